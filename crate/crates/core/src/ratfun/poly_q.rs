//! Integer-coefficient univariate polynomials with exact gcd over Q.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Polynomial in `t` with `BigInt` coefficients, ascending order, no
/// trailing zeros. The zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyZ {
    coeffs: Vec<BigInt>,
}

impl PolyZ {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyZ { coeffs }
    }

    pub fn zero() -> Self {
        PolyZ { coeffs: vec![] }
    }

    pub fn one() -> Self {
        PolyZ::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        PolyZ::new(vec![c])
    }

    /// The monomial `t`.
    pub fn var() -> Self {
        PolyZ::new(vec![BigInt::zero(), BigInt::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; zero polynomial reports degree 0 for the purposes of the
    /// rational-function degree convention.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add(&self, other: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        PolyZ::new(out)
    }

    pub fn sub(&self, other: &PolyZ) -> PolyZ {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - other.coeff(k));
        }
        PolyZ::new(out)
    }

    pub fn neg(&self) -> PolyZ {
        PolyZ::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &PolyZ) -> PolyZ {
        if self.is_zero() || other.is_zero() {
            return PolyZ::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        PolyZ::new(out)
    }

    pub fn derivative(&self) -> PolyZ {
        if self.coeffs.len() <= 1 {
            return PolyZ::zero();
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigInt::from(k))
            .collect();
        PolyZ::new(out)
    }

    /// gcd of all coefficients, nonnegative; content of the zero polynomial
    /// is zero.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
        }
        g
    }

    pub fn divide_content(&self, g: &BigInt) -> PolyZ {
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        PolyZ::new(self.coeffs.iter().map(|c| c / g).collect())
    }

    fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect()
    }

    /// Primitive gcd over Q with positive leading coefficient; gcd with the
    /// zero polynomial is the primitive part of the other argument.
    pub fn gcd_q(&self, other: &PolyZ) -> PolyZ {
        if self.is_zero() {
            return other.primitive_positive();
        }
        if other.is_zero() {
            return self.primitive_positive();
        }
        let mut a = self.to_rational();
        let mut b = other.to_rational();
        loop {
            trim(&mut b);
            if b.is_empty() {
                break;
            }
            let r = rem_rational(&a, &b);
            a = b;
            b = r;
        }
        from_rational(&a).primitive_positive()
    }

    fn primitive_positive(&self) -> PolyZ {
        if self.is_zero() {
            return PolyZ::zero();
        }
        let mut out = self.divide_content(&self.content());
        if out.leading().is_negative() {
            out = out.neg();
        }
        out
    }

    /// Exact division by a divisor known to divide `self` over Q; the
    /// quotient may have rational coefficients in general, so the caller
    /// receives it in rational form.
    pub fn div_exact_q(&self, divisor: &PolyZ) -> Vec<BigRational> {
        let (q, r) = div_rem_rational(&self.to_rational(), &divisor.to_rational());
        debug_assert!(r.iter().all(|c| c.is_zero()), "inexact polynomial division");
        q
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    /// Coefficients reduced mod p, ascending, trailing zeros trimmed.
    pub fn reduce_mod(&self, p: u64) -> Vec<u64> {
        let pb = BigInt::from(p);
        let mut out: Vec<u64> = self
            .coeffs
            .iter()
            .map(|c| {
                let m = c.mod_floor(&pb);
                let (_, digits) = m.to_u64_digits();
                digits.first().copied().unwrap_or(0)
            })
            .collect();
        while out.last() == Some(&0) {
            out.pop();
        }
        out
    }
}

fn trim(v: &mut Vec<BigRational>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn div_rem_rational(
    num: &[BigRational],
    den: &[BigRational],
) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut r = num.to_vec();
    trim(&mut r);
    let mut d = den.to_vec();
    trim(&mut d);
    assert!(!d.is_empty(), "division by zero polynomial");
    if r.len() < d.len() {
        return (vec![], r);
    }
    let mut q = vec![BigRational::zero(); r.len() - d.len() + 1];
    let lead = d.last().unwrap().clone();
    while r.len() >= d.len() && !r.is_empty() {
        let k = r.len() - d.len();
        let c = r.last().unwrap() / &lead;
        q[k] = c.clone();
        for (i, dc) in d.iter().enumerate() {
            let t = &c * dc;
            r[k + i] -= t;
        }
        trim(&mut r);
    }
    (q, r)
}

fn rem_rational(num: &[BigRational], den: &[BigRational]) -> Vec<BigRational> {
    div_rem_rational(num, den).1
}

/// Clear denominators: smallest positive integer multiple with integer
/// coefficients.
fn from_rational(v: &[BigRational]) -> PolyZ {
    let mut lcm = BigInt::one();
    for c in v {
        lcm = lcm.lcm(c.denom());
    }
    PolyZ::new(
        v.iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect(),
    )
}

/// Rational-coefficient polynomial scaled to a primitive integer polynomial
/// together with its (positive) rational scale, i.e. `poly = scale * prim`.
pub fn rational_to_scaled(v: &[BigRational]) -> (PolyZ, BigRational) {
    let mut w = v.to_vec();
    trim(&mut w);
    if w.is_empty() {
        return (PolyZ::zero(), BigRational::one());
    }
    let cleared = from_rational(&w);
    let content = cleared.content();
    let prim = cleared.divide_content(&content);
    // scale = content / lcm, recovered by comparing leading coefficients.
    let lead_ratio = w.last().unwrap()
        / BigRational::from_integer(prim.leading());
    (prim, lead_ratio)
}

impl fmt::Display for PolyZ {
    /// Descending-power form, e.g. `t^5-5*t`, `-2*t^2+3`, `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for k in (0..self.coeffs.len()).rev() {
            let c = &self.coeffs[k];
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.sign() == Sign::Minus {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.sign() == Sign::Minus {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                1 => {
                    if unit {
                        write!(f, "t")?;
                    } else {
                        write!(f, "{mag}*t")?;
                    }
                }
                _ => {
                    if unit {
                        write!(f, "t^{k}")?;
                    } else {
                        write!(f, "{mag}*t^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}
