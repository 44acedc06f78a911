//! Exact rational-function arithmetic over Q, reduction mod p, evaluation
//! with pole detection, derivatives, and the linear-independence test that
//! gates the main counting formula.

mod parse;
pub mod poly_fp;
pub mod poly_q;

pub use parse::{parse_ratfun, ParseError};
pub use poly_q::PolyZ;

use crate::fp;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Primes at or below this bound get their pole set enumerated by scan;
/// above it (the 61-bit testing prime) poles are detected at evaluation.
const POLE_SCAN_LIMIT: u64 = 1 << 20;

/// A rational function in `t` over Q, stored as a reduced pair of
/// integer-coefficient polynomials.
///
/// Invariants: the denominator is nonzero with positive leading
/// coefficient, numerator and denominator share no polynomial factor over Q
/// and no common integer content, and zero is represented as `0/1`.
/// Equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunQ {
    num: PolyZ,
    den: PolyZ,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatFunError {
    #[error("division by the zero polynomial")]
    ZeroDenominator,
}

impl RatFunQ {
    pub fn new(num: PolyZ, den: PolyZ) -> Result<Self, RatFunError> {
        if den.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: PolyZ, den: PolyZ) -> Self {
        if num.is_zero() {
            return RatFunQ {
                num: PolyZ::zero(),
                den: PolyZ::one(),
            };
        }
        let g = num.gcd_q(&den);
        let (mut num, num_scale) = poly_q::rational_to_scaled(&num.div_exact_q(&g));
        let (mut den, den_scale) = poly_q::rational_to_scaled(&den.div_exact_q(&g));
        // Fold the rational scale num_scale/den_scale = a/b (lowest terms,
        // b > 0) back into the integer pair.
        let ratio: BigRational = num_scale / den_scale;
        let mut a = ratio.numer().clone();
        let mut b = ratio.denom().clone();
        if b.is_negative() {
            a = -a;
            b = -b;
        }
        num = num.mul(&PolyZ::constant(a));
        den = den.mul(&PolyZ::constant(b));
        if den.leading().is_negative() {
            num = num.neg();
            den = den.neg();
        }
        RatFunQ { num, den }
    }

    pub fn zero() -> Self {
        RatFunQ {
            num: PolyZ::zero(),
            den: PolyZ::one(),
        }
    }

    pub fn from_poly(p: PolyZ) -> Self {
        RatFunQ {
            num: p,
            den: PolyZ::one(),
        }
    }

    pub fn var() -> Self {
        Self::from_poly(PolyZ::var())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_poly(PolyZ::constant(c))
    }

    pub fn numerator(&self) -> &PolyZ {
        &self.num
    }

    pub fn denominator(&self) -> &PolyZ {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// Degree of a rational function: sum of the degrees of numerator and
    /// denominator.
    pub fn degree(&self) -> usize {
        self.num.degree() + self.den.degree()
    }

    pub fn add(&self, other: &RatFunQ) -> RatFunQ {
        RatFunQ::normalized(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFunQ) -> RatFunQ {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> RatFunQ {
        RatFunQ {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunQ) -> RatFunQ {
        RatFunQ::normalized(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn div(&self, other: &RatFunQ) -> Result<RatFunQ, RatFunError> {
        if other.is_zero() {
            return Err(RatFunError::ZeroDenominator);
        }
        Ok(RatFunQ::normalized(
            self.num.mul(&other.den),
            self.den.mul(&other.num),
        ))
    }

    pub fn pow(&self, e: u32) -> RatFunQ {
        let mut acc = RatFunQ::from_poly(PolyZ::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Quotient-rule derivative, reduced.
    pub fn derivative(&self) -> RatFunQ {
        let n = self.num.derivative().mul(&self.den);
        let d = self.num.mul(&self.den.derivative());
        RatFunQ::normalized(n.sub(&d), self.den.mul(&self.den))
    }

    /// Exact evaluation at a rational point; `None` at a pole.
    pub fn eval_rational(&self, x: &BigRational) -> Option<BigRational> {
        let d = self.den.eval_rational(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval_rational(x) / d)
    }
}

impl fmt::Display for RatFunQ {
    /// Canonical print form `(<numerator>)/(<denominator>)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/({})", self.num, self.den)
    }
}

/// Reason a prime is rejected by reduction.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BadPrime {
    #[error("p={0} is not prime")]
    NotPrime(u64),
    #[error("denominator vanishes identically mod {0}")]
    DenominatorVanishes(u64),
    #[error("reduction mod {0} is constant")]
    BecameConstant(u64),
    #[error("derivative loses degree mod {p}: exponent {exponent} divisible by p")]
    DerivativeDegenerate { p: u64, exponent: usize },
    #[error("{{1, P, Q}} become linearly dependent mod {0}")]
    LostIndependence(u64),
}

/// A rational function reduced to `F_p`: coprime coefficient vectors with a
/// monic denominator, and the denominator's roots as the pole set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunFp {
    p: u64,
    num: Vec<u64>,
    den: Vec<u64>,
    /// Roots of the denominator in `F_p`, found by exhaustive scan; `None`
    /// for primes past the scan limit, where poles are detected at
    /// evaluation instead.
    pole_set: Option<Vec<u64>>,
}

/// Evaluation outcome at a single point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FpValue {
    Value(u64),
    PoleMarker,
}

impl FpValue {
    pub fn value(self) -> Option<u64> {
        match self {
            FpValue::Value(v) => Some(v),
            FpValue::PoleMarker => None,
        }
    }
}

impl RatFunFp {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn numerator(&self) -> &[u64] {
        &self.num
    }

    pub fn denominator(&self) -> &[u64] {
        &self.den
    }

    pub fn pole_set(&self) -> &[u64] {
        self.pole_set.as_deref().unwrap_or(&[])
    }

    pub fn is_polynomial(&self) -> bool {
        self.den == [1]
    }

    fn from_reduced(p: u64, mut num: Vec<u64>, mut den: Vec<u64>) -> Self {
        poly_fp::trim(&mut num);
        poly_fp::trim(&mut den);
        assert!(!den.is_empty());
        let g = poly_fp::gcd(&num, &den, p);
        if poly_fp::degree(&g) > 0 {
            num = poly_fp::div_exact(&num, &g, p);
            den = poly_fp::div_exact(&den, &g, p);
        }
        let lead_inv = fp::inv(*den.last().unwrap(), p);
        num = poly_fp::scale(&num, lead_inv, p);
        den = poly_fp::scale(&den, lead_inv, p);
        let pole_set = if p <= POLE_SCAN_LIMIT {
            Some((0..p).filter(|&y| poly_fp::eval(&den, y, p) == 0).collect())
        } else {
            None
        };
        RatFunFp {
            p,
            num,
            den,
            pole_set,
        }
    }

    pub fn evaluate(&self, y: u64) -> FpValue {
        let d = poly_fp::eval(&self.den, y, self.p);
        if d == 0 {
            return FpValue::PoleMarker;
        }
        let n = poly_fp::eval(&self.num, y, self.p);
        FpValue::Value(fp::mul(n, fp::inv(d, self.p), self.p))
    }

    /// Quotient-rule derivative. Errors if the characteristic annihilates a
    /// term of the numerator or denominator, which would silently change
    /// the degree of the derivative.
    pub fn derivative(&self) -> Result<RatFunFp, BadPrime> {
        let p = self.p;
        let dn = poly_fp::derivative(&self.num, p)
            .map_err(|exponent| BadPrime::DerivativeDegenerate { p, exponent })?;
        let dd = poly_fp::derivative(&self.den, p)
            .map_err(|exponent| BadPrime::DerivativeDegenerate { p, exponent })?;
        let num = poly_fp::sub(
            &poly_fp::mul(&dn, &self.den, p),
            &poly_fp::mul(&self.num, &dd, p),
            p,
        );
        let den = poly_fp::mul(&self.den, &self.den, p);
        if num.is_empty() {
            return Ok(RatFunFp::from_reduced(p, vec![], vec![1]));
        }
        Ok(RatFunFp::from_reduced(p, num, den))
    }

    /// Non-pole field elements in increasing order (scanned primes only).
    pub fn non_pole_values(&self) -> Vec<u64> {
        let poles = self.pole_set();
        (0..self.p).filter(|y| !poles.contains(y)).collect()
    }
}

/// Reduce an exact rational function to `F_p`.
pub fn reduce_mod_p(f: &RatFunQ, p: u64) -> Result<RatFunFp, BadPrime> {
    if !fp::is_prime(p) {
        return Err(BadPrime::NotPrime(p));
    }
    let den = f.den.reduce_mod(p);
    if den.is_empty() {
        return Err(BadPrime::DenominatorVanishes(p));
    }
    let num = f.num.reduce_mod(p);
    let reduced = RatFunFp::from_reduced(p, num, den);
    if !f.is_constant() && poly_fp::degree(&reduced.num) == 0 && poly_fp::degree(&reduced.den) == 0
    {
        return Err(BadPrime::BecameConstant(p));
    }
    Ok(reduced)
}

/// Reduce the pair `(P, Q)` with the full bad-prime policy: either reduction
/// may fail on its own, and a pair that is independent over Q must stay
/// independent of `{1}` over `F_p`.
pub fn reduce_pair_mod_p(
    pfun: &RatFunQ,
    qfun: &RatFunQ,
    p: u64,
) -> Result<(RatFunFp, RatFunFp), BadPrime> {
    let rp = reduce_mod_p(pfun, p)?;
    let rq = reduce_mod_p(qfun, p)?;
    if is_linearly_independent_with_one(pfun, qfun).is_independent()
        && !fp_independent_with_one(&rp, &rq)
    {
        return Err(BadPrime::LostIndependence(p));
    }
    Ok((rp, rq))
}

/// Certificate of the linear-independence test for `{1, P, Q}` over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndependenceCertificate {
    Independent,
    /// Nonzero integers with `alpha*P + beta*Q + gamma = 0`.
    Dependent {
        alpha: BigInt,
        beta: BigInt,
        gamma: BigInt,
    },
}

impl IndependenceCertificate {
    pub fn is_independent(&self) -> bool {
        matches!(self, IndependenceCertificate::Independent)
    }
}

/// Decide whether `P`, `Q` and the constant 1 are linearly independent over
/// Q, exactly. Writing `P = a/b`, `Q = c/d`, the relation
/// `alpha*P + beta*Q + gamma = 0` clears to the polynomial identity
/// `alpha*(a d) + beta*(c b) + gamma*(b d) = 0`, a nullspace problem for an
/// integer coefficient matrix.
pub fn is_linearly_independent_with_one(
    pfun: &RatFunQ,
    qfun: &RatFunQ,
) -> IndependenceCertificate {
    let cols = [
        pfun.num.mul(&qfun.den),
        qfun.num.mul(&pfun.den),
        pfun.den.mul(&qfun.den),
    ];
    let rows = cols.iter().map(|c| c.degree() + 1).max().unwrap();
    let mut m: Vec<[BigRational; 3]> = (0..rows)
        .map(|k| {
            [
                BigRational::from_integer(cols[0].coeff(k)),
                BigRational::from_integer(cols[1].coeff(k)),
                BigRational::from_integer(cols[2].coeff(k)),
            ]
        })
        .collect();
    // Gaussian elimination tracking pivot columns.
    let mut pivot_row_of_col = [usize::MAX; 3];
    let mut next_row = 0usize;
    for col in 0..3 {
        let Some(r) = (next_row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(next_row, r);
        let inv = m[next_row][col].clone();
        for c in 0..3 {
            m[next_row][c] = &m[next_row][c] / &inv;
        }
        for r in 0..m.len() {
            if r != next_row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in 0..3 {
                    let t = &factor * &m[next_row][c];
                    m[r][c] -= t;
                }
            }
        }
        pivot_row_of_col[col] = next_row;
        next_row += 1;
    }
    let free_col = (0..3).find(|&c| pivot_row_of_col[c] == usize::MAX);
    let Some(free) = free_col else {
        return IndependenceCertificate::Independent;
    };
    // Back-substitute with the free variable set to 1.
    let mut sol = [BigRational::zero(), BigRational::zero(), BigRational::zero()];
    sol[free] = BigRational::one();
    for col in 0..3 {
        let r = pivot_row_of_col[col];
        if r != usize::MAX {
            sol[col] = -&m[r][free];
        }
    }
    // Scale to coprime integers.
    let mut lcm = BigInt::one();
    for s in &sol {
        lcm = num_integer::Integer::lcm(&lcm, s.denom());
    }
    let ints: Vec<BigInt> = sol
        .iter()
        .map(|s| (s * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = num_integer::Integer::gcd(&g, v);
    }
    let norm = |v: &BigInt| if g.is_one() { v.clone() } else { v / &g };
    IndependenceCertificate::Dependent {
        alpha: norm(&ints[0]),
        beta: norm(&ints[1]),
        gamma: norm(&ints[2]),
    }
}

/// The same nullspace test over `F_p`.
fn fp_independent_with_one(pfun: &RatFunFp, qfun: &RatFunFp) -> bool {
    let p = pfun.p;
    let cols = [
        poly_fp::mul(pfun.numerator(), qfun.denominator(), p),
        poly_fp::mul(qfun.numerator(), pfun.denominator(), p),
        poly_fp::mul(pfun.denominator(), qfun.denominator(), p),
    ];
    let rows = cols.iter().map(|c| c.len()).max().unwrap().max(1);
    let mut m: Vec<[u64; 3]> = (0..rows)
        .map(|k| {
            [
                cols[0].get(k).copied().unwrap_or(0),
                cols[1].get(k).copied().unwrap_or(0),
                cols[2].get(k).copied().unwrap_or(0),
            ]
        })
        .collect();
    let mut rank = 0usize;
    for col in 0..3 {
        let Some(r) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, r);
        let inv = fp::inv(m[rank][col], p);
        for c in 0..3 {
            m[rank][c] = fp::mul(m[rank][c], inv, p);
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..3 {
                    m[r][c] = fp::sub(m[r][c], fp::mul(factor, m[rank][c], p), p);
                }
            }
        }
        rank += 1;
    }
    rank == 3
}
