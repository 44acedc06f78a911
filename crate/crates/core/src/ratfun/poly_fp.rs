//! Univariate polynomials over `F_p` as `u64` coefficient vectors.

use crate::fp;

pub type PolyFp = Vec<u64>;

pub fn trim(v: &mut PolyFp) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub fn is_zero(v: &[u64]) -> bool {
    v.is_empty()
}

pub fn degree(v: &[u64]) -> usize {
    v.len().saturating_sub(1)
}

pub fn eval(v: &[u64], x: u64, p: u64) -> u64 {
    let mut acc = 0u64;
    for &c in v.iter().rev() {
        acc = fp::add(fp::mul(acc, x, p), c, p);
    }
    acc
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = fp::add(out[i + j], fp::mul(x, y, p), p);
        }
    }
    trim(&mut out);
    out
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let x = a.get(k).copied().unwrap_or(0);
        let y = b.get(k).copied().unwrap_or(0);
        out.push(fp::sub(x, y, p));
    }
    trim(&mut out);
    out
}

pub fn scale(a: &[u64], c: u64, p: u64) -> PolyFp {
    let mut out: PolyFp = a.iter().map(|&x| fp::mul(x, c, p)).collect();
    trim(&mut out);
    out
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    assert!(!b.is_empty());
    let mut r = a.to_vec();
    trim(&mut r);
    let lead_inv = fp::inv(*b.last().unwrap(), p);
    while r.len() >= b.len() && !r.is_empty() {
        let k = r.len() - b.len();
        let c = fp::mul(*r.last().unwrap(), lead_inv, p);
        for (i, &bc) in b.iter().enumerate() {
            r[k + i] = fp::sub(r[k + i], fp::mul(c, bc, p), p);
        }
        trim(&mut r);
    }
    r
}

/// Monic gcd over `F_p`.
pub fn gcd(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    if let Some(&lead) = a.last() {
        if lead != 1 {
            a = scale(&a, fp::inv(lead, p), p);
        }
    }
    a
}

/// Exact quotient of `a` by a known divisor `b`.
pub fn div_exact(a: &[u64], b: &[u64], p: u64) -> PolyFp {
    assert!(!b.is_empty());
    let mut r = a.to_vec();
    trim(&mut r);
    if r.is_empty() {
        return vec![];
    }
    assert!(r.len() >= b.len());
    let mut q = vec![0u64; r.len() - b.len() + 1];
    let lead_inv = fp::inv(*b.last().unwrap(), p);
    while r.len() >= b.len() && !r.is_empty() {
        let k = r.len() - b.len();
        let c = fp::mul(*r.last().unwrap(), lead_inv, p);
        q[k] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[k + i] = fp::sub(r[k + i], fp::mul(c, bc, p), p);
        }
        trim(&mut r);
    }
    assert!(r.is_empty(), "inexact division over F_p");
    q
}

/// Formal derivative; `Err` reports an exponent annihilated by the
/// characteristic (a nonzero term `c t^k` with `p | k`), which would
/// silently lose degree.
pub fn derivative(v: &[u64], p: u64) -> Result<PolyFp, usize> {
    let mut out = Vec::new();
    for (k, &c) in v.iter().enumerate().skip(1) {
        if c != 0 && (k as u64) % p == 0 {
            return Err(k);
        }
        out.push(fp::mul(c, (k as u64) % p, p));
    }
    trim(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_monic() {
        // (t+1)(t+2) and (t+1)(t+3) over F_7.
        let a = mul(&[1, 1], &[2, 1], 7);
        let b = mul(&[1, 1], &[3, 1], 7);
        assert_eq!(gcd(&a, &b, 7), vec![1, 1]);
    }

    #[test]
    fn derivative_flags_char_divides_exponent() {
        // t^5 over F_5.
        assert_eq!(derivative(&[0, 0, 0, 0, 0, 1], 5), Err(5));
        assert_eq!(derivative(&[0, 0, 1], 7), Ok(vec![0, 2]));
    }
}
