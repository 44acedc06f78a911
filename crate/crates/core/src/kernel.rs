//! The exponential-sum kernel `K(a,b)` attached to a pair of rational
//! functions, its differenced form, the Bombieri square-root-cancellation
//! check, and the Parseval-type mass identity.
//!
//! `K(a,b) = (1/p) Σ_{y ∉ poles(P) ∪ poles(Q)} e_p(aP(y) + bQ(y))`.
//!
//! The pole set is the union of the poles of `P` and `Q`, used uniformly
//! for every frequency pair — including `a = 0` or `b = 0`, where one of the
//! summands would individually allow a larger domain. Every variable of the
//! point-counting varieties needs both `P` and `Q` defined, so the uniform
//! convention keeps kernel, counting operator, and variety counts mutually
//! consistent.

use crate::fp;
use crate::grid::e_p;
use crate::ratfun::RatFunFp;
use crate::tol;
use num_complex::Complex64;
use std::collections::HashMap;
use std::io::Write;

/// Dense table of `K(a,b)` for all `(a,b) ∈ F_p^2`.
#[derive(Clone, Debug)]
pub struct KernelTable {
    p: u64,
    values: Vec<Complex64>,
    pole_count: u64,
    /// `(P(y), Q(y))` for each non-pole `y`, in increasing `y` order; reused
    /// by the mass identity and by the counting operator.
    value_pairs: Vec<(u64, u64)>,
}

impl KernelTable {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn pole_count(&self) -> u64 {
        self.pole_count
    }

    #[inline]
    pub fn at(&self, a: u64, b: u64) -> Complex64 {
        self.values[(a * self.p + b) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(P(y), Q(y))` over the common non-pole domain.
    pub fn value_pairs(&self) -> &[(u64, u64)] {
        &self.value_pairs
    }

    /// Serialize as little-endian binary: `p` and `pole_count` as `u64`,
    /// then row-major `(re, im)` pairs of 8-byte floats.
    pub fn write_binary(&self, mut w: impl Write) -> std::io::Result<()> {
        w.write_all(&self.p.to_le_bytes())?;
        w.write_all(&self.pole_count.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Build the full kernel table at cost O(p³): p² frequency pairs times the
/// one-dimensional character sum.
pub fn kernel_table(pfun: &RatFunFp, qfun: &RatFunFp) -> KernelTable {
    let p = pfun.prime();
    assert_eq!(p, qfun.prime(), "kernel requires a shared prime");
    let mut value_pairs = Vec::with_capacity(p as usize);
    for y in 0..p {
        if let (Some(pv), Some(qv)) = (pfun.evaluate(y).value(), qfun.evaluate(y).value()) {
            value_pairs.push((pv, qv));
        }
    }
    let pole_count = p - value_pairs.len() as u64;
    let mut values = vec![Complex64::ZERO; (p * p) as usize];
    for a in 0..p {
        for b in 0..p {
            let mut acc = Complex64::ZERO;
            for &(pv, qv) in &value_pairs {
                acc += e_p(fp::add(fp::mul(a, pv, p), fp::mul(b, qv, p), p), p);
            }
            values[(a * p + b) as usize] = acc / p as f64;
        }
    }
    KernelTable {
        p,
        values,
        pole_count,
        value_pairs,
    }
}

/// Differenced kernel `G_h(n,m) = K(n,m)·conj K(n−h₁, m+h₂)` as a dense
/// p×p table.
pub fn delta_kernel(k: &KernelTable, h: (u64, u64)) -> Vec<Complex64> {
    let p = k.p;
    let mut out = vec![Complex64::ZERO; (p * p) as usize];
    for n in 0..p {
        for m in 0..p {
            out[(n * p + m) as usize] =
                k.at(n, m) * k.at(fp::sub(n, h.0, p), fp::add(m, h.1, p)).conj();
        }
    }
    out
}

/// Largest modulus off the origin and its √p normalization.
pub fn bombieri_check(k: &KernelTable) -> (f64, f64) {
    let p = k.p;
    let mut sup = 0.0f64;
    for a in 0..p {
        for b in 0..p {
            if (a, b) != (0, 0) {
                sup = sup.max(k.at(a, b).norm());
            }
        }
    }
    (sup, sup * (p as f64).sqrt())
}

/// Both sides of the mass identity
/// `Σ_{a,b} |K(a,b)|² = #{(y,y′) non-pole : P(y)=P(y′), Q(y)=Q(y′)}`,
/// the second side via value bucketing. Returns `(spectral, combinatorial)`.
pub fn parseval_mass(k: &KernelTable) -> (f64, f64) {
    let spectral: f64 = k.values.iter().map(|v| v.norm_sqr()).sum();
    let mut buckets: HashMap<(u64, u64), u64> = HashMap::new();
    for &pair in &k.value_pairs {
        *buckets.entry(pair).or_insert(0) += 1;
    }
    let collisions: u64 = buckets.values().map(|&c| c * c).sum();
    (spectral, collisions as f64)
}

/// Validate the table invariants: the origin value, conjugate symmetry, and
/// agreement of the two mass paths. Returns the worst discrepancy seen.
pub fn check_invariants(k: &KernelTable) -> Result<f64, String> {
    let p = k.p;
    let origin = (p - k.pole_count) as f64 / p as f64;
    let mut worst = (k.at(0, 0) - Complex64::new(origin, 0.0)).norm();
    if worst > tol::IDENTITY {
        return Err(format!("K(0,0) = {} but expected {origin}", k.at(0, 0)));
    }
    for a in 0..p {
        for b in 0..p {
            let d = (k.at(a, b).conj() - k.at(fp::neg(a, p), fp::neg(b, p))).norm();
            worst = worst.max(d);
            if d > tol::SYMMETRY {
                return Err(format!("conjugate symmetry fails at ({a},{b}) by {d}"));
            }
        }
    }
    let (spectral, combinatorial) = parseval_mass(k);
    let d = (spectral - combinatorial).abs();
    worst = worst.max(d);
    if d > tol::KERNEL_MASS {
        return Err(format!(
            "mass identity: spectral {spectral} vs combinatorial {combinatorial}"
        ));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::{parse_ratfun, reduce_mod_p};

    fn table(ptext: &str, qtext: &str, p: u64) -> KernelTable {
        let pf = reduce_mod_p(&parse_ratfun(ptext).unwrap(), p).unwrap();
        let qf = reduce_mod_p(&parse_ratfun(qtext).unwrap(), p).unwrap();
        kernel_table(&pf, &qf)
    }

    #[test]
    fn complete_character_sum_vanishes() {
        // P=t, Q=t²: K(a,0) sums a full character, zero for a ≠ 0.
        let k = table("t", "t^2", 11);
        for a in 1..11 {
            assert!(k.at(a, 0).norm() < tol::IDENTITY);
        }
        assert!((k.at(0, 0).re - 1.0).abs() < tol::IDENTITY);
    }

    #[test]
    fn gauss_sum_magnitude() {
        // P=t, Q=t²: for b ≠ 0 the sum is a Gauss sum of modulus √p, so
        // |K(a,b)| = p^{-1/2} exactly.
        let p = 11u64;
        let k = table("t", "t^2", p);
        let want = 1.0 / (p as f64).sqrt();
        for a in 0..p {
            for b in 1..p {
                assert!((k.at(a, b).norm() - want).abs() < 1e-9);
            }
        }
        let (_, normalized) = bombieri_check(&k);
        assert!((normalized - 1.0).abs() < 1e-9);
    }

    #[test]
    fn origin_counts_poles() {
        let k = table("1/t", "t^2", 7);
        assert_eq!(k.pole_count(), 1);
        assert!((k.at(0, 0).re - 6.0 / 7.0).abs() < tol::IDENTITY);
    }

    #[test]
    fn invariants_hold_for_sample_pairs() {
        for (ptext, qtext, p) in [
            ("t", "t^2", 11),
            ("1/t", "t^2", 7),
            ("t^2/(t-1)", "t^3", 13),
            ("t", "t^3", 31),
        ] {
            let k = table(ptext, qtext, p);
            check_invariants(&k).unwrap();
        }
    }

    #[test]
    fn mass_identity_for_parabola() {
        // P=t, Q=t²: (P,Q) is injective, so collisions are the p diagonal
        // pairs and the spectral mass is exactly p.
        let p = 13u64;
        let k = table("t", "t^2", p);
        let (spectral, combinatorial) = parseval_mass(&k);
        assert!((combinatorial - p as f64).abs() < 1e-12);
        assert!((spectral - p as f64).abs() < tol::KERNEL_MASS);
    }

    #[test]
    fn delta_kernel_composition() {
        let p = 7u64;
        let k = table("t", "t^2", p);
        let g0 = delta_kernel(&k, (0, 0));
        for n in 0..p {
            for m in 0..p {
                let want = k.at(n, m).norm_sqr();
                assert!((g0[(n * p + m) as usize].re - want).abs() < tol::IDENTITY);
                assert!(g0[(n * p + m) as usize].im.abs() < tol::IDENTITY);
            }
        }
        // h=(1,0): recompute by definition.
        let g = delta_kernel(&k, (1, 0));
        let sup_k = k.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for n in 0..p {
            for m in 0..p {
                let want = k.at(n, m) * k.at(fp::sub(n, 1, p), m).conj();
                let got = g[(n * p + m) as usize];
                assert!((got - want).norm() < tol::IDENTITY);
                assert!(got.norm() <= sup_k * sup_k + tol::IDENTITY);
            }
        }
    }

    #[test]
    fn binary_dump_round_trip() {
        let k = table("t", "t^2", 5);
        let mut buf = Vec::new();
        k.write_binary(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 25 * 16);
        assert_eq!(u64::from_le_bytes(buf[0..8].try_into().unwrap()), 5);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 0);
        let re = f64::from_le_bytes(buf[16..24].try_into().unwrap());
        assert!((re - k.at(0, 0).re).abs() == 0.0);
    }
}
