//! Scalar arithmetic in `F_p` for primes up to 63 bits.
//!
//! Plain `u64` residues with `u128` intermediate products. The grid-scale
//! primes here are tiny (p <= ~500); the same routines also serve the fixed
//! 61-bit testing prime of the identity checker.

/// The fixed Mersenne prime `2^61 - 1` used for randomized identity testing.
pub const TEST_PRIME_61: u64 = (1u64 << 61) - 1;

#[inline]
pub fn add(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

#[inline]
pub fn neg(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

#[inline]
pub fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base, p);
        }
        base = mul(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse of `a != 0` modulo the prime `p`.
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0, "inverse of zero in F_{p}");
    pow(a, p - 2, p)
}

/// Trial-division primality check; scan primes are tiny, and the 61-bit
/// testing prime is a named constant, so nothing faster is needed.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n == TEST_PRIME_61 {
        return true;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        for p in [5u64, 7, 61, TEST_PRIME_61] {
            for a in [1u64, 2, 3, p - 1] {
                assert_eq!(mul(a, inv(a, p), p), 1);
            }
        }
    }

    #[test]
    fn small_primes() {
        assert!(is_prime(2));
        assert!(is_prime(61));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
        assert!(is_prime(TEST_PRIME_61));
    }
}
