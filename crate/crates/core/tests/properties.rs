//! Property suites: parse/print round trips, differentiation rules checked
//! symbolically over Q, reduction/evaluation consistency, and the box-norm
//! monotonicity lattice.

use corners_core::fp;
use corners_core::gowers::{box_norm, DirectionSpec, Subgroup};
use corners_core::grid::{generate, Generator};
use corners_core::ratfun::{parse_ratfun, reduce_mod_p, PolyZ, RatFunQ};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn poly(coeffs: Vec<i64>) -> PolyZ {
    PolyZ::new(coeffs.into_iter().map(BigInt::from).collect())
}

/// Random rational function with small integer coefficients and a nonzero
/// denominator.
fn ratfun_strategy() -> impl Strategy<Value = RatFunQ> {
    let coeffs = prop::collection::vec(-6i64..=6, 1..=4);
    (coeffs.clone(), coeffs).prop_filter_map("nonzero denominator", |(num, den)| {
        if den.iter().all(|&c| c == 0) {
            return None;
        }
        RatFunQ::new(poly(num), poly(den)).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_print_round_trip(f in ratfun_strategy()) {
        let text = f.to_string();
        let back = parse_ratfun(&text).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn product_rule(f in ratfun_strategy(), g in ratfun_strategy()) {
        let lhs = f.mul(&g).derivative();
        let rhs = f.derivative().mul(&g).add(&f.mul(&g.derivative()));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn power_rule(f in ratfun_strategy()) {
        // (f³)' = 3 f² f'.
        let lhs = f.pow(3).derivative();
        let three = RatFunQ::constant(BigInt::from(3));
        let rhs = three.mul(&f.pow(2)).mul(&f.derivative());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sum_rule(f in ratfun_strategy(), g in ratfun_strategy()) {
        prop_assert_eq!(
            f.add(&g).derivative(),
            f.derivative().add(&g.derivative())
        );
    }

    #[test]
    fn reduction_matches_rational_evaluation(f in ratfun_strategy(), x in 0u64..10007) {
        // Evaluating over Q and then reducing mod p agrees with evaluating
        // the reduction, wherever both are defined.
        let p = 10007u64;
        let Ok(rf) = reduce_mod_p(&f, p) else { return Ok(()) };
        let rational = f.eval_rational(&BigRational::from_integer(BigInt::from(x)));
        let modular = rf.evaluate(x).value();
        if let (Some(q), Some(m)) = (rational, modular) {
            let to_fp = |n: &BigInt| {
                let r = (n % BigInt::from(p) + BigInt::from(p)) % BigInt::from(p);
                u64::try_from(r).unwrap()
            };
            let den = to_fp(q.denom());
            // The rational value may have a denominator divisible by p even
            // though the reduced function is defined; skip that corner.
            if den != 0 {
                let want = fp::mul(to_fp(q.numer()), fp::inv(den, p), p);
                prop_assert_eq!(want, m);
            }
        }
    }

    #[test]
    fn monotonicity_lattice(seed in 0u64..1000, pick in 0usize..2) {
        // Refining a subgroup in any slot never decreases the box norm.
        let p = [5u64, 7][pick];
        let f = generate(&Generator::RandomBounded, p, seed).unwrap();
        let slack = 1e-9;
        for axis in [Subgroup::Axis1, Subgroup::Axis2] {
            let refined = box_norm(&f, &DirectionSpec(vec![axis; 2])).unwrap();
            let mixed = box_norm(&f, &DirectionSpec(vec![axis, Subgroup::Full])).unwrap();
            let full = box_norm(&f, &DirectionSpec(vec![Subgroup::Full; 2])).unwrap();
            prop_assert!(refined + slack >= mixed);
            prop_assert!(mixed + slack >= full);
        }
    }
}
