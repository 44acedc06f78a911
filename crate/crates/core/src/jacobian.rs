//! Jacobian determinant identities behind the variety dimension bounds:
//! the 10×10 determinant and its two-factor closed form, the 3×3
//! factorization through the logarithmic-derivative determinant `D`, and
//! the non-vanishing witness searches for `D` and the 2×2 pair Wronskian.
//!
//! Everything is checked by randomized polynomial-identity testing over a
//! fixed 61-bit prime: the identities have modest degree, so a mismatch
//! probability below 2⁻⁴⁰ per trial comes essentially for free, while the
//! per-point evaluation stays exact field arithmetic.

use crate::fp::{self, TEST_PRIME_61};
use crate::ratfun::{is_linearly_independent_with_one, reduce_mod_p, BadPrime, RatFunFp, RatFunQ};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JacobianError {
    #[error("coordinate {0} hits a pole of P' or Q'; resample")]
    PoleHit(usize),
    #[error("resampling budget exhausted: the inputs are degenerate for this identity")]
    Degenerate,
    #[error("reduction mod the testing prime failed: {0}")]
    Reduction(#[from] BadPrime),
}

/// Which identity `verify_identity` checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    /// 10×10 determinant equals the two-factor closed form.
    PropJac,
    /// `J_{Z'}(y1,y4,y6) = R(y1)R(y4)R(y6)R(y7)·D(y1,y4,y6)` with `R = P'/Q'`.
    JzprimeFactorization,
    /// `R'/R = P''/P' − Q''/Q'`.
    SLogDerivative,
}

/// Which expression `nonvanishing_witness` searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessId {
    /// The 3×3 determinant with rows `P'`, `Q'`, `S` at `(y1,y4,y6)`.
    D,
    /// `−P'(y7)Q'(y8) + Q'(y7)P'(y8)`.
    JX,
    /// The same 2×2 form at `(y15,y16)`.
    JW,
    /// The shared 2×2 pair Wronskian; vanishes identically iff `P'/Q'` is
    /// constant, so dependent pairs exhaust the budget (negative control).
    PairWronskian,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: IdentityId,
    pub prime: u64,
    pub trials: u64,
    pub failures: u64,
    /// Points where a non-vanishing claim held exactly (witness searches
    /// append here; identity checks leave it empty).
    pub witnesses: Vec<Vec<u64>>,
    /// Degenerate draws skipped while sampling.
    pub resampled: u64,
}

#[derive(Clone, Debug, Serialize)]
pub enum WitnessOutcome {
    Found { point: Vec<u64>, draws: u64 },
    Exhausted { draws: u64 },
}

/// Derivatives of a reduced pair, all at the same prime.
struct Derived {
    p: u64,
    dp: RatFunFp,
    dq: RatFunFp,
    ddp: RatFunFp,
    ddq: RatFunFp,
}

impl Derived {
    fn new(pfun: &RatFunQ, qfun: &RatFunQ, prime: u64) -> Result<Self, JacobianError> {
        let rp = reduce_mod_p(pfun, prime)?;
        let rq = reduce_mod_p(qfun, prime)?;
        let dp = rp.derivative()?;
        let dq = rq.derivative()?;
        let ddp = dp.derivative()?;
        let ddq = dq.derivative()?;
        Ok(Derived {
            p: prime,
            dp,
            dq,
            ddp,
            ddq,
        })
    }

    /// `(P'(y), Q'(y))` or `None` on a pole.
    fn first(&self, y: u64) -> Option<(u64, u64)> {
        Some((self.dp.evaluate(y).value()?, self.dq.evaluate(y).value()?))
    }

    /// `S(y) = P''(y)/P'(y) − Q''(y)/Q'(y)`; `None` when undefined.
    fn s_at(&self, y: u64) -> Option<u64> {
        let (a, b) = self.first(y)?;
        if a == 0 || b == 0 {
            return None;
        }
        let na = self.ddp.evaluate(y).value()?;
        let nb = self.ddq.evaluate(y).value()?;
        let p = self.p;
        Some(fp::sub(
            fp::mul(na, fp::inv(a, p), p),
            fp::mul(nb, fp::inv(b, p), p),
            p,
        ))
    }

    /// `R(y) = P'(y)/Q'(y)`; `None` when `Q'(y) = 0` or on a pole.
    fn r_at(&self, y: u64) -> Option<u64> {
        let (a, b) = self.first(y)?;
        if b == 0 {
            return None;
        }
        Some(fp::mul(a, fp::inv(b, self.p), self.p))
    }

    /// `R'(y) = (P''Q' − P'Q'')/Q'²`; `None` when `Q'(y) = 0` or on a pole.
    fn r_prime_at(&self, y: u64) -> Option<u64> {
        let (a, b) = self.first(y)?;
        if b == 0 {
            return None;
        }
        let na = self.ddp.evaluate(y).value()?;
        let nb = self.ddq.evaluate(y).value()?;
        let p = self.p;
        let num = fp::sub(fp::mul(na, b, p), fp::mul(a, nb, p), p);
        Some(fp::mul(num, fp::inv(fp::mul(b, b, p), p), p))
    }
}

/// Determinant over F_p by Gaussian elimination with partial pivoting.
fn determinant(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if pivot != col {
            m.swap(pivot, col);
            det = fp::neg(det, p);
        }
        let pv = m[col][col];
        det = fp::mul(det, pv, p);
        let inv = fp::inv(pv, p);
        for r in col + 1..n {
            if m[r][col] == 0 {
                continue;
            }
            let factor = fp::mul(m[r][col], inv, p);
            for c in col..n {
                let sub = fp::mul(factor, m[col][c], p);
                m[r][c] = fp::sub(m[r][c], sub, p);
            }
        }
    }
    det
}

/// The 10×10 determinant of the first ten Jacobian columns of the Roth
/// variety, evaluated at `point = (y1,…,y10)`. Blank entries are zero.
pub fn jacobian_det_10(
    pfun: &RatFunFp,
    qfun: &RatFunFp,
    point: &[u64; 10],
) -> Result<u64, JacobianError> {
    let p = pfun.prime();
    assert_eq!(p, qfun.prime(), "Jacobian needs a shared prime");
    let dp = pfun.derivative()?;
    let dq = qfun.derivative()?;
    let mut dpv = [0u64; 10];
    let mut dqv = [0u64; 10];
    for (i, &y) in point.iter().enumerate() {
        dpv[i] = dp.evaluate(y).value().ok_or(JacobianError::PoleHit(i))?;
        dqv[i] = dq.evaluate(y).value().ok_or(JacobianError::PoleHit(i))?;
    }
    let neg = |v: u64| fp::neg(v, p);
    let mut m = vec![vec![0u64; 10]; 10];
    m[0][0] = dpv[0];
    m[0][2] = neg(dpv[2]);
    m[0][8] = neg(dpv[8]);
    m[1][1] = dpv[1];
    m[1][3] = neg(dpv[3]);
    m[1][9] = neg(dpv[9]);
    m[2][4] = dpv[4];
    m[2][6] = neg(dpv[6]);
    m[3][5] = dpv[5];
    m[3][7] = neg(dpv[7]);
    m[4][0] = dqv[0];
    m[4][1] = neg(dqv[1]);
    m[4][8] = neg(dqv[8]);
    m[4][9] = dqv[9];
    m[5][2] = dqv[2];
    m[5][6] = neg(dqv[6]);
    m[6][3] = dqv[3];
    m[6][7] = neg(dqv[7]);
    m[7][4] = dqv[4];
    m[7][5] = neg(dqv[5]);
    m[8][8] = dpv[8];
    m[8][9] = neg(dpv[9]);
    m[9][8] = dqv[8];
    m[9][9] = neg(dqv[9]);
    Ok(determinant(m, p))
}

/// The two-factor closed form of the same determinant:
/// `(P'₁Q'₂Q'₃P'₄Q'₅P'₆P'₇Q'₈ − Q'₁P'₂P'₃Q'₄P'₅Q'₆Q'₇P'₈)·(−P'₉Q'₁₀ + Q'₉P'₁₀)`.
pub fn jacobian_closed_form(
    pfun: &RatFunFp,
    qfun: &RatFunFp,
    point: &[u64; 10],
) -> Result<u64, JacobianError> {
    let p = pfun.prime();
    let dp = pfun.derivative()?;
    let dq = qfun.derivative()?;
    let mut dpv = [0u64; 10];
    let mut dqv = [0u64; 10];
    for (i, &y) in point.iter().enumerate() {
        dpv[i] = dp.evaluate(y).value().ok_or(JacobianError::PoleHit(i))?;
        dqv[i] = dq.evaluate(y).value().ok_or(JacobianError::PoleHit(i))?;
    }
    // P at positions 1,4,6,7 and Q at 2,3,5,8 in the first monomial; the
    // complementary pattern in the second.
    let first_pick = [true, false, false, true, false, true, true, false];
    let mut a = 1u64;
    let mut b = 1u64;
    for i in 0..8 {
        if first_pick[i] {
            a = fp::mul(a, dpv[i], p);
            b = fp::mul(b, dqv[i], p);
        } else {
            a = fp::mul(a, dqv[i], p);
            b = fp::mul(b, dpv[i], p);
        }
    }
    let factor1 = fp::sub(a, b, p);
    let factor2 = pair_wronskian_value(dpv[8], dqv[8], dpv[9], dqv[9], p);
    Ok(fp::mul(factor1, factor2, p))
}

/// `−P'(u)Q'(v) + Q'(u)P'(v)` given the four derivative values.
fn pair_wronskian_value(dpu: u64, dqu: u64, dpv: u64, dqv: u64, p: u64) -> u64 {
    fp::sub(fp::mul(dqu, dpv, p), fp::mul(dpu, dqv, p), p)
}

/// `D(y1,y4,y6)`: 3×3 determinant with rows `P'`, `Q'`, `S`.
fn d_det(der: &Derived, ys: [u64; 3]) -> Option<u64> {
    let mut m = vec![vec![0u64; 3]; 3];
    for (c, &y) in ys.iter().enumerate() {
        let (a, b) = der.first(y)?;
        m[0][c] = a;
        m[1][c] = b;
        m[2][c] = der.s_at(y)?;
    }
    Some(determinant(m, der.p))
}

const RESAMPLE_FACTOR: u64 = 100;

fn sample(rng: &mut ChaCha8Rng, p: u64) -> u64 {
    rng.gen_range(0..p)
}

/// Schwartz–Zippel check of one identity at `trials` random non-degenerate
/// points over the fixed 61-bit testing prime. Degenerate draws (a pole or a
/// vanishing denominator in either side) are resampled, not counted.
pub fn verify_identity(
    id: IdentityId,
    pfun: &RatFunQ,
    qfun: &RatFunQ,
    trials: u64,
    seed: u64,
) -> Result<IdentityReport, JacobianError> {
    let prime = TEST_PRIME_61;
    let der = Derived::new(pfun, qfun, prime)?;
    let rp = reduce_mod_p(pfun, prime)?;
    let rq = reduce_mod_p(qfun, prime)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0u64;
    let mut resampled = 0u64;
    let budget = trials.saturating_mul(RESAMPLE_FACTOR);
    let mut done = 0u64;
    while done < trials {
        if resampled > budget {
            return Err(JacobianError::Degenerate);
        }
        let ok = match id {
            IdentityId::PropJac => {
                let mut point = [0u64; 10];
                for slot in point.iter_mut() {
                    *slot = sample(&mut rng, prime);
                }
                match (
                    jacobian_det_10(&rp, &rq, &point),
                    jacobian_closed_form(&rp, &rq, &point),
                ) {
                    (Ok(a), Ok(b)) => Some(a == b),
                    _ => None,
                }
            }
            IdentityId::JzprimeFactorization => {
                let ys: Vec<u64> = (0..4).map(|_| sample(&mut rng, prime)).collect();
                jzprime_sides(&der, [ys[0], ys[1], ys[2], ys[3]]).map(|(l, r)| l == r)
            }
            IdentityId::SLogDerivative => {
                let y = sample(&mut rng, prime);
                match (der.r_at(y), der.r_prime_at(y), der.s_at(y)) {
                    (Some(r), Some(rp_), Some(s)) if r != 0 => {
                        Some(fp::mul(rp_, fp::inv(r, prime), prime) == s)
                    }
                    _ => None,
                }
            }
        };
        match ok {
            Some(true) => done += 1,
            Some(false) => {
                done += 1;
                failures += 1;
            }
            None => resampled += 1,
        }
    }
    Ok(IdentityReport {
        identity: id,
        prime,
        trials,
        failures,
        witnesses: Vec::new(),
        resampled,
    })
}

/// Both sides of the `J_{Z'}` factorization at `(y1,y4,y6,y7)`.
fn jzprime_sides(der: &Derived, ys: [u64; 4]) -> Option<(u64, u64)> {
    let p = der.p;
    let r: Vec<u64> = ys.iter().map(|&y| der.r_at(y)).collect::<Option<_>>()?;
    if r.iter().any(|&v| v == 0) {
        return None;
    }
    let rp: Vec<u64> = ys[..3]
        .iter()
        .map(|&y| der.r_prime_at(y))
        .collect::<Option<_>>()?;
    let mut m = vec![vec![0u64; 3]; 3];
    for (c, &y) in ys[..3].iter().enumerate() {
        let (a, b) = der.first(y)?;
        m[0][c] = a;
        m[1][c] = b;
        // Third row: product of the R-values with one factor replaced by R'.
        let mut prod = r[3];
        for j in 0..3 {
            prod = fp::mul(prod, if j == c { rp[j] } else { r[j] }, p);
        }
        m[2][c] = prod;
    }
    let lhs = determinant(m, p);
    let d = d_det(der, [ys[0], ys[1], ys[2]])?;
    let mut rhs = d;
    for &v in &r {
        rhs = fp::mul(rhs, v, p);
    }
    Some((lhs, rhs))
}

/// Random search for a field point where the chosen expression is nonzero.
/// Draws where the expression is undefined count against the budget. The
/// independence certificate is computed first for reporting; a dependent
/// pair makes the pair Wronskian vanish identically, so the search exhausts.
pub fn nonvanishing_witness(
    id: WitnessId,
    pfun: &RatFunQ,
    qfun: &RatFunQ,
    budget: u64,
    seed: u64,
) -> Result<WitnessOutcome, JacobianError> {
    let prime = TEST_PRIME_61;
    let _ = is_linearly_independent_with_one(pfun, qfun);
    let der = Derived::new(pfun, qfun, prime)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=budget {
        let hit = match id {
            WitnessId::D => {
                let ys = [
                    sample(&mut rng, prime),
                    sample(&mut rng, prime),
                    sample(&mut rng, prime),
                ];
                match d_det(&der, ys) {
                    Some(v) if v != 0 => Some(ys.to_vec()),
                    _ => None,
                }
            }
            WitnessId::JX | WitnessId::JW | WitnessId::PairWronskian => {
                let u = sample(&mut rng, prime);
                let v = sample(&mut rng, prime);
                match (der.first(u), der.first(v)) {
                    (Some((a, b)), Some((c, d)))
                        if pair_wronskian_value(a, b, c, d, prime) != 0 =>
                    {
                        Some(vec![u, v])
                    }
                    _ => None,
                }
            }
        };
        if let Some(point) = hit {
            return Ok(WitnessOutcome::Found { point, draws: draw });
        }
    }
    Ok(WitnessOutcome::Exhausted { draws: budget })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::parse_ratfun;

    fn pair(ptext: &str, qtext: &str) -> (RatFunQ, RatFunQ) {
        (parse_ratfun(ptext).unwrap(), parse_ratfun(qtext).unwrap())
    }

    fn reduced(ptext: &str, qtext: &str) -> (RatFunFp, RatFunFp) {
        let (pf, qf) = pair(ptext, qtext);
        (
            reduce_mod_p(&pf, TEST_PRIME_61).unwrap(),
            reduce_mod_p(&qf, TEST_PRIME_61).unwrap(),
        )
    }

    #[test]
    fn determinant_helper_basics() {
        let p = 7;
        assert_eq!(determinant(vec![vec![2, 0], vec![0, 3]], p), 6);
        assert_eq!(determinant(vec![vec![0, 1], vec![1, 0]], p), fp::neg(1, p));
        assert_eq!(determinant(vec![vec![1, 2], vec![2, 4]], p), 0);
    }

    #[test]
    fn parabola_closed_form_monomial() {
        // P=t, Q=t²: J = 32(y2·y3·y5·y8 − y1·y4·y6·y7)(y9 − y10).
        let (rp, rq) = reduced("t", "t^2");
        let p = TEST_PRIME_61;
        let point = [1u64, 2, 3, 4, 5, 6, 7, 8, 9, 10];
        let got = jacobian_det_10(&rp, &rq, &point).unwrap();
        let prod = |idx: [u64; 4]| idx.iter().fold(1u64, |acc, &i| fp::mul(acc, i, p));
        let inner = fp::sub(prod([2, 3, 5, 8]), prod([1, 4, 6, 7]), p);
        let want = fp::mul(
            32,
            fp::mul(inner, fp::sub(9, 10, p), p),
            p,
        );
        assert_eq!(got, want);
        assert_eq!(jacobian_closed_form(&rp, &rq, &point).unwrap(), want);
    }

    #[test]
    fn equal_last_pair_kills_determinant() {
        let (rp, rq) = reduced("t", "t^3");
        let point = [3u64, 1, 4, 1, 5, 9, 2, 6, 7, 7];
        assert_eq!(jacobian_det_10(&rp, &rq, &point).unwrap(), 0);
    }

    #[test]
    fn closed_form_antisymmetries() {
        let (rp, rq) = reduced("t^2/(t-1)", "t^3");
        let p = TEST_PRIME_61;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let mut point = [0u64; 10];
            for slot in point.iter_mut() {
                *slot = rng.gen_range(0..p);
            }
            let Ok(base) = jacobian_closed_form(&rp, &rq, &point) else {
                continue;
            };
            let mut swapped = point;
            swapped.swap(8, 9);
            assert_eq!(
                jacobian_closed_form(&rp, &rq, &swapped).unwrap(),
                fp::neg(base, p)
            );
            // (y1,y4,y6,y7) ↔ (y2,y3,y5,y8): flips the first factor.
            let mut exch = point;
            exch.swap(0, 1);
            exch.swap(3, 2);
            exch.swap(5, 4);
            exch.swap(6, 7);
            assert_eq!(
                jacobian_closed_form(&rp, &rq, &exch).unwrap(),
                fp::neg(base, p)
            );
        }
    }

    #[test]
    fn det_matches_closed_form_at_random_points() {
        for (ptext, qtext) in [("t", "t^2"), ("1/t", "t"), ("t^2/(t-1)", "t^3")] {
            let (rp, rq) = reduced(ptext, qtext);
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let mut checked = 0;
            while checked < 25 {
                let mut point = [0u64; 10];
                for slot in point.iter_mut() {
                    *slot = rng.gen_range(0..TEST_PRIME_61);
                }
                let (Ok(a), Ok(b)) = (
                    jacobian_det_10(&rp, &rq, &point),
                    jacobian_closed_form(&rp, &rq, &point),
                ) else {
                    continue;
                };
                assert_eq!(a, b);
                checked += 1;
            }
        }
    }

    #[test]
    fn verify_identity_passes() {
        for (id, ptext, qtext) in [
            (IdentityId::PropJac, "t", "t^2"),
            (IdentityId::PropJac, "t^2/(t-1)", "t^3"),
            (IdentityId::JzprimeFactorization, "t", "t^3"),
            (IdentityId::JzprimeFactorization, "t^3", "t^3-t^2+t"),
            (IdentityId::SLogDerivative, "t^3", "t^3-t^2+t"),
            (IdentityId::SLogDerivative, "1/t", "t^2"),
        ] {
            let (pf, qf) = pair(ptext, qtext);
            let report = verify_identity(id, &pf, &qf, 50, 1).unwrap();
            assert_eq!(report.failures, 0, "{id:?} on ({ptext},{qtext})");
            assert_eq!(report.trials, 50);
        }
    }

    #[test]
    fn witnesses_found_for_independent_pairs() {
        let (pf, qf) = pair("t", "t^2");
        for id in [WitnessId::D, WitnessId::JX, WitnessId::JW, WitnessId::PairWronskian] {
            match nonvanishing_witness(id, &pf, &qf, 10, 3).unwrap() {
                WitnessOutcome::Found { draws, .. } => assert!(draws <= 10),
                WitnessOutcome::Exhausted { .. } => panic!("{id:?} should have a witness"),
            }
        }
    }

    #[test]
    fn dependent_pair_exhausts_wronskian() {
        // P=t, Q=3t+5: R = P'/Q' ≡ 1/3, so the pair Wronskian vanishes
        // identically and D has an identically-zero third row.
        let (pf, qf) = pair("t", "3*t+5");
        for id in [WitnessId::PairWronskian, WitnessId::D] {
            match nonvanishing_witness(id, &pf, &qf, 50, 5).unwrap() {
                WitnessOutcome::Exhausted { draws } => assert_eq!(draws, 50),
                WitnessOutcome::Found { point, .. } => {
                    panic!("{id:?} found spurious witness {point:?}")
                }
            }
        }
    }

    #[test]
    fn report_serializes() {
        let (pf, qf) = pair("t", "t^2");
        let report = verify_identity(IdentityId::PropJac, &pf, &qf, 5, 2).unwrap();
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["identity"], "prop_jac");
        assert_eq!(json["failures"], 0);
    }
}
