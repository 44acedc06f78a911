//! Complex functions on `F_p^2`: dense storage, the 2-dimensional discrete
//! Fourier transform with the averaging convention, `L^r`/`l^r` norms, the
//! `F1`/`F2` Fourier aggregates, and seeded generators.
//!
//! Conventions: `f̂(ξ) = E_x f(x) e_p(−x·ξ)`, inversion
//! `f(x) = Σ_ξ f̂(ξ) e_p(ξ·x)`. Storage is row-major with row `x1` and
//! column `x2`. The transform is the direct O(p³) row-column pass — target
//! primes are small and index conventions matter more than speed.

use crate::fp;
use crate::tol;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use std::f64::consts::TAU;
use std::path::Path;
use thiserror::Error;

/// `e_p(k) = exp(2πik/p)` for `k` already reduced mod `p`.
pub fn e_p(k: u64, p: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * k as f64 / p as f64)
}

/// `e(x) = exp(2πix)` for real `x`.
pub fn e_real(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * x)
}

/// A complex function on `F_p^2`, immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFn {
    p: u64,
    values: Vec<Complex64>,
    bounded: bool,
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid asserts 1-boundedness but sup|f| = {sup}")]
    NotBounded { sup: f64 },
    #[error("expected {expected} values for p={p}, got {got}")]
    WrongSize { p: u64, expected: usize, got: usize },
    #[error("grid file: {0}")]
    Io(#[from] std::io::Error),
    #[error("grid file: {0}")]
    Format(#[from] serde_json::Error),
    #[error("p={0} is not prime")]
    NotPrime(u64),
}

impl GridFn {
    /// Wrap a dense value vector; `bounded` asserts `sup|f| ≤ 1` and is
    /// validated here.
    pub fn new(p: u64, values: Vec<Complex64>, bounded: bool) -> Result<Self, GridError> {
        let expected = (p * p) as usize;
        if values.len() != expected {
            return Err(GridError::WrongSize {
                p,
                expected,
                got: values.len(),
            });
        }
        let f = GridFn { p, values, bounded };
        if bounded {
            let sup = f.sup_norm();
            if sup > 1.0 + tol::BOUNDED {
                return Err(GridError::NotBounded { sup });
            }
        }
        Ok(f)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn at(&self, x1: u64, x2: u64) -> Complex64 {
        self.values[(x1 * self.p + x2) as usize]
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise map producing an unbounded grid.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFn {
        GridFn {
            p: self.p,
            values: self.values.iter().map(|&v| f(v)).collect(),
            bounded: false,
        }
    }

    /// Mean over the grid with uniform probability measure.
    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / (self.p * self.p) as f64
    }
}

/// Forward transform: `f̂(ξ) = E_x f(x) e_p(−x·ξ)`, output indexed (ξ1,ξ2).
pub fn dft2(f: &GridFn) -> GridFn {
    transform(f, true)
}

/// Inverse transform: `f(x) = Σ_ξ f̂(ξ) e_p(ξ·x)`.
pub fn idft2(fhat: &GridFn) -> GridFn {
    transform(fhat, false)
}

fn transform(f: &GridFn, forward: bool) -> GridFn {
    let p = f.p;
    let pf = p as f64;
    // Character table: col[k] = e_p(∓k).
    let table: Vec<Complex64> = (0..p)
        .map(|k| e_p(if forward { fp::neg(k, p) } else { k }, p))
        .collect();
    // Row pass (transform over x2), then column pass (over x1).
    let mut mid = vec![Complex64::ZERO; (p * p) as usize];
    for x1 in 0..p {
        for xi2 in 0..p {
            let mut acc = Complex64::ZERO;
            for x2 in 0..p {
                acc += f.at(x1, x2) * table[fp::mul(x2, xi2, p) as usize];
            }
            mid[(x1 * p + xi2) as usize] = acc;
        }
    }
    let mut out = vec![Complex64::ZERO; (p * p) as usize];
    for xi1 in 0..p {
        for xi2 in 0..p {
            let mut acc = Complex64::ZERO;
            for x1 in 0..p {
                acc += mid[(x1 * p + xi2) as usize] * table[fp::mul(x1, xi1, p) as usize];
            }
            if forward {
                acc /= pf * pf;
            }
            out[(xi1 * p + xi2) as usize] = acc;
        }
    }
    GridFn {
        p,
        values: out,
        bounded: false,
    }
}

/// Norm family: averaged (`L^r`) or counting (`l^r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormKind {
    Averaged,
    Counting,
}

/// `(E_x |f|^r)^{1/r}` or `(Σ_x |f|^r)^{1/r}`; requires `r ≥ 1`.
pub fn norm(f: &GridFn, kind: NormKind, r: f64) -> f64 {
    assert!(r >= 1.0, "norm exponent must be at least 1");
    let sum: f64 = f.values.iter().map(|v| v.norm().powf(r)).sum();
    let base = match kind {
        NormKind::Averaged => sum / (f.p * f.p) as f64,
        NormKind::Counting => sum,
    };
    base.powf(1.0 / r)
}

/// Which aggregate of the Fourier transform to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AggregateKind {
    F1,
    F2,
}

/// Table indexed by (line frequency, shift h ∈ F_p²), size p × p².
#[derive(Clone, Debug)]
pub struct AggregateTable {
    p: u64,
    kind: AggregateKind,
    values: Vec<Complex64>,
}

impl AggregateTable {
    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn kind(&self) -> AggregateKind {
        self.kind
    }

    #[inline]
    pub fn at(&self, freq: u64, h1: u64, h2: u64) -> Complex64 {
        let p = self.p;
        self.values[((freq * p + h1) * p + h2) as usize]
    }

    /// `l²` norm over the full (frequency, h) index set.
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `Σ_h (Σ_freq |T(freq,h)|²)²`, the fourth-moment contraction that the
    /// F2 aggregate bounds by a directional Gowers norm.
    pub fn per_shift_square_sum(&self) -> f64 {
        let p = self.p;
        let mut total = 0.0;
        for h1 in 0..p {
            for h2 in 0..p {
                let inner: f64 = (0..p).map(|m| self.at(m, h1, h2).norm_sqr()).sum();
                total += inner * inner;
            }
        }
        total
    }
}

/// Build the aggregate of the transform of `f`:
/// `F1(n1,h) = Σ_{n2} Δ_{−h} f̂(n1,n2)` and
/// `F2(m2,h) = Σ_{m1} Δ_h f̂(m1,m2)`, with `Δ_h g(x) = g(x)·conj g(x+h)`.
pub fn fourier_aggregate(f: &GridFn, kind: AggregateKind) -> AggregateTable {
    let p = f.p;
    let fhat = dft2(f);
    let mut values = vec![Complex64::ZERO; (p * p * p) as usize];
    for freq in 0..p {
        for h1 in 0..p {
            for h2 in 0..p {
                let mut acc = Complex64::ZERO;
                for other in 0..p {
                    acc += match kind {
                        // Δ_{−h} f̂ at (n1, n2): f̂(n1,n2)·conj f̂(n1−h1, n2−h2).
                        AggregateKind::F1 => {
                            fhat.at(freq, other)
                                * fhat.at(fp::sub(freq, h1, p), fp::sub(other, h2, p)).conj()
                        }
                        // Δ_h f̂ at (m1, m2): f̂(m1,m2)·conj f̂(m1+h1, m2+h2).
                        AggregateKind::F2 => {
                            fhat.at(other, freq)
                                * fhat.at(fp::add(other, h1, p), fp::add(freq, h2, p)).conj()
                        }
                    };
                }
                values[((freq * p + h1) * p + h2) as usize] = acc;
            }
        }
    }
    AggregateTable { p, kind, values }
}

/// Seeded generator descriptors.
#[derive(Clone, Debug)]
pub enum Generator {
    /// Constant grid; bounded iff `|c| ≤ 1`.
    Constant(Complex64),
    /// `f(x) = e_p(ξ1 x1 + ξ2 x2)`.
    Character(u64, u64),
    /// Independent uniform phases, modulus 1.
    RandomUnimodular,
    /// Independent values uniform in the closed unit disc.
    RandomBounded,
    /// 0/1 indicator of an i.i.d. random set of the given density.
    IndicatorRandomSet(f64),
}

/// Deterministic generation from (descriptor, p, seed).
pub fn generate(gen: &Generator, p: u64, seed: u64) -> Result<GridFn, GridError> {
    if !fp::is_prime(p) {
        return Err(GridError::NotPrime(p));
    }
    let n = (p * p) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (values, bounded): (Vec<Complex64>, bool) = match *gen {
        Generator::Constant(c) => (vec![c; n], c.norm() <= 1.0 + tol::BOUNDED),
        Generator::Character(xi1, xi2) => {
            let mut v = Vec::with_capacity(n);
            for x1 in 0..p {
                for x2 in 0..p {
                    let k = fp::add(fp::mul(xi1 % p, x1, p), fp::mul(xi2 % p, x2, p), p);
                    v.push(e_p(k, p));
                }
            }
            (v, true)
        }
        Generator::RandomUnimodular => (
            (0..n).map(|_| e_real(rng.gen::<f64>())).collect(),
            true,
        ),
        Generator::RandomBounded => (
            (0..n)
                .map(|_| {
                    // Uniform on the unit disc by rejection.
                    loop {
                        let re = 2.0 * rng.gen::<f64>() - 1.0;
                        let im = 2.0 * rng.gen::<f64>() - 1.0;
                        let z = Complex64::new(re, im);
                        if z.norm_sqr() <= 1.0 {
                            return z;
                        }
                    }
                })
                .collect(),
            true,
        ),
        Generator::IndicatorRandomSet(density) => (
            (0..n)
                .map(|_| {
                    if rng.gen::<f64>() < density {
                        Complex64::ONE
                    } else {
                        Complex64::ZERO
                    }
                })
                .collect(),
            true,
        ),
    };
    GridFn::new(p, values, bounded)
}

#[derive(Deserialize)]
struct GridFile {
    p: u64,
    values: Vec<Vec<[f64; 2]>>,
}

/// Load a grid from the JSON file format
/// `{ "p": int, "values": p×p array of [re, im] }` (row index x1).
pub fn from_file(path: &Path) -> Result<GridFn, GridError> {
    let text = std::fs::read_to_string(path)?;
    let file: GridFile = serde_json::from_str(&text)?;
    if !fp::is_prime(file.p) {
        return Err(GridError::NotPrime(file.p));
    }
    let p = file.p as usize;
    if file.values.len() != p || file.values.iter().any(|row| row.len() != p) {
        return Err(GridError::WrongSize {
            p: file.p,
            expected: p * p,
            got: file.values.iter().map(|r| r.len()).sum(),
        });
    }
    let values: Vec<Complex64> = file
        .values
        .iter()
        .flatten()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    let bounded = values.iter().all(|v| v.norm() <= 1.0 + tol::BOUNDED);
    GridFn::new(file.p, values, bounded)
}
