//! Gowers box norms over subgroups of `F_p^2`, the directional U² identity
//! through line Fourier transforms, and the constructive U² inverse step
//! that extracts a correlating eigenfunction.

use crate::fp;
use crate::grid::{e_p, e_real, GridFn};
use crate::tol;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// The three subgroups of `F_p^2` the degree-lowering argument uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subgroup {
    /// `F_p × 0`: shifts of the first coordinate.
    Axis1,
    /// `0 × F_p`: shifts of the second coordinate.
    Axis2,
    /// All of `F_p^2`.
    Full,
}

impl Subgroup {
    pub fn elements(self, p: u64) -> Vec<(u64, u64)> {
        match self {
            Subgroup::Axis1 => (0..p).map(|h| (h, 0)).collect(),
            Subgroup::Axis2 => (0..p).map(|h| (0, h)).collect(),
            Subgroup::Full => {
                let mut v = Vec::with_capacity((p * p) as usize);
                for h1 in 0..p {
                    for h2 in 0..p {
                        v.push((h1, h2));
                    }
                }
                v
            }
        }
    }

    /// Subgroup containment within the three-element lattice.
    pub fn is_subgroup_of(self, other: Subgroup) -> bool {
        self == other || other == Subgroup::Full
    }
}

/// An ordered list of subgroups; its length is the box-norm degree `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionSpec(pub Vec<Subgroup>);

impl DirectionSpec {
    pub fn u2(dir: Subgroup) -> Self {
        DirectionSpec(vec![dir, dir])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, Error)]
pub enum GowersError {
    #[error("box-norm degree {0} out of scope (s must be 1..=3)")]
    DegreeOutOfScope(usize),
    #[error("box-norm average {avg} is negative beyond the round-off clamp")]
    NegativeAverage { avg: f64 },
}

/// Gowers box norm `‖f‖_{H_1,…,H_s}`: the `2^s`-th root of
/// `E_x E_{h_i∈H_i} Δ_{h_1}…Δ_{h_s} f(x)` where `Δ_h g(x) = g(x)·conj g(x+h)`.
///
/// The nested difference expands into a product over subsets `S ⊆ {1..s}`
/// of `conj^{|S|} f(x + Σ_{i∈S} h_i)`, evaluated directly. The average is
/// provably nonnegative; round-off below `−10⁻¹²` is an internal error.
pub fn box_norm(f: &GridFn, dirs: &DirectionSpec) -> Result<f64, GowersError> {
    let s = dirs.degree();
    if !(1..=3).contains(&s) {
        return Err(GowersError::DegreeOutOfScope(s));
    }
    let p = f.prime();
    let groups: Vec<Vec<(u64, u64)>> = dirs.0.iter().map(|g| g.elements(p)).collect();
    let mut shifts: Vec<(u64, u64)> = vec![(0, 0)];
    let mut total = Complex64::ZERO;
    // Iterate over the h-tuple by odometer to keep a fixed summation order.
    let mut idx = vec![0usize; s];
    loop {
        // Precompute the 2^s subset shifts for this h-tuple.
        shifts.clear();
        shifts.push((0, 0));
        for (i, &j) in idx.iter().enumerate() {
            let (h1, h2) = groups[i][j];
            for k in 0..shifts.len() {
                let (a, b) = shifts[k];
                shifts.push((fp::add(a, h1, p), fp::add(b, h2, p)));
            }
        }
        for x1 in 0..p {
            for x2 in 0..p {
                let mut prod = Complex64::ONE;
                for (bit, &(s1, s2)) in shifts.iter().enumerate() {
                    let v = f.at(fp::add(x1, s1, p), fp::add(x2, s2, p));
                    prod *= if (bit as u32).count_ones() % 2 == 1 {
                        v.conj()
                    } else {
                        v
                    };
                }
                total += prod;
            }
        }
        // Advance the odometer.
        let mut carry = s;
        for i in (0..s).rev() {
            idx[i] += 1;
            if idx[i] < groups[i].len() {
                carry = i;
                break;
            }
            idx[i] = 0;
        }
        if carry == s {
            break;
        }
    }
    let denom = (p * p) as f64 * groups.iter().map(|g| g.len() as f64).product::<f64>();
    let avg = total.re / denom;
    let avg = if avg < 0.0 {
        if avg < -tol::BOX_NORM_CLAMP {
            return Err(GowersError::NegativeAverage { avg });
        }
        0.0
    } else {
        avg
    };
    Ok(avg.powf(1.0 / (1u64 << s) as f64))
}

/// Which coordinate an eigenfunction oscillates in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    First,
    Second,
}

impl Coordinate {
    /// The directional U² norm the inverse theorem controls for this
    /// coordinate: oscillation in `x1` pairs with shifts along `F_p × 0`.
    pub fn u2_direction(self) -> Subgroup {
        match self {
            Coordinate::First => Subgroup::Axis1,
            Coordinate::Second => Subgroup::Axis2,
        }
    }
}

/// An eigenfunction `χ(x1,x2) = 1_E(x2) e_p(φ(x2)x1) e(ψ(x2))` (coordinate
/// `First`; the `Second` variant swaps the roles of `x1` and `x2`). Lines
/// are indexed by the non-oscillating coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenfunction {
    pub coordinate: Coordinate,
    pub support: Vec<bool>,
    pub phi: Vec<u64>,
    pub psi: Vec<f64>,
}

impl Eigenfunction {
    pub fn to_grid(&self, p: u64) -> GridFn {
        assert_eq!(self.support.len(), p as usize);
        let mut values = vec![Complex64::ZERO; (p * p) as usize];
        for x1 in 0..p {
            for x2 in 0..p {
                let line = match self.coordinate {
                    Coordinate::First => x2,
                    Coordinate::Second => x1,
                } as usize;
                if !self.support[line] {
                    continue;
                }
                let osc = match self.coordinate {
                    Coordinate::First => x1,
                    Coordinate::Second => x2,
                };
                values[(x1 * p + x2) as usize] =
                    e_p(fp::mul(self.phi[line], osc, p), p) * e_real(self.psi[line]);
            }
        }
        GridFn::new(p, values, true).expect("eigenfunction values are unimodular")
    }

    /// Restrict the support to the given set of lines.
    pub fn restrict(&self, lines: &[bool]) -> Eigenfunction {
        assert_eq!(lines.len(), self.support.len());
        Eigenfunction {
            coordinate: self.coordinate,
            support: self
                .support
                .iter()
                .zip(lines)
                .map(|(&a, &b)| a && b)
                .collect(),
            phi: self.phi.clone(),
            psi: self.psi.clone(),
        }
    }
}

impl Serialize for Eigenfunction {
    /// JSON form `{ coordinate, E, phi, psi }` with `E` a hex bitmask string,
    /// least-significant bit = line 0.
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut nibbles = vec![0u8; self.support.len().div_ceil(4)];
        for (i, &b) in self.support.iter().enumerate() {
            if b {
                nibbles[i / 4] |= 1 << (i % 4);
            }
        }
        let mask: String = nibbles
            .iter()
            .rev()
            .map(|n| char::from_digit(*n as u32, 16).unwrap())
            .collect();
        let mut st = serializer.serialize_struct("Eigenfunction", 4)?;
        st.serialize_field("coordinate", &self.coordinate)?;
        st.serialize_field("E", &mask)?;
        st.serialize_field("phi", &self.phi)?;
        st.serialize_field("psi", &self.psi)?;
        st.end()
    }
}

/// One-dimensional line transform `ĝ(ξ) = E_t g(t) e_p(−tξ)` of the line
/// restrictions of `f`. For coordinate `First` the lines are indexed by
/// `x2` and `g(t) = f(t, x2)`; for `Second`, by `x1` with `g(t) = f(x1, t)`.
fn line_dfts(f: &GridFn, coordinate: Coordinate) -> Vec<Vec<Complex64>> {
    let p = f.prime();
    (0..p)
        .map(|line| {
            (0..p)
                .map(|xi| {
                    let mut acc = Complex64::ZERO;
                    for t in 0..p {
                        let v = match coordinate {
                            Coordinate::First => f.at(t, line),
                            Coordinate::Second => f.at(line, t),
                        };
                        acc += v * e_p(fp::neg(fp::mul(t, xi, p), p), p);
                    }
                    acc / p as f64
                })
                .collect()
        })
        .collect()
}

/// The directional U² norm through the line-transform identity
/// `‖f‖⁴_{U²(dir)} = E_line Σ_ξ |ĝ_line(ξ)|⁴`, a cross-check for
/// [`box_norm`] with a U² direction spec.
pub fn u2_line_identity(f: &GridFn, coordinate: Coordinate) -> f64 {
    let p = f.prime();
    let lines = line_dfts(f, coordinate);
    let mut total = 0.0;
    for line in &lines {
        for c in line {
            total += c.norm_sqr() * c.norm_sqr();
        }
    }
    (total / p as f64).powf(0.25)
}

/// Constructive U² inverse: per line, take the Fourier coefficient of
/// largest modulus (smallest frequency index on ties), set
/// `φ(line) = −argmax` and pick `ψ(line)` to cancel its argument, and take
/// the support to be all of `F_p`. The resulting correlation
/// `E_x f·χ` is real, is a sum of nonnegative per-line terms, and dominates
/// `‖f‖⁴` in the matching directional U² norm.
pub fn u2_inverse(f: &GridFn, coordinate: Coordinate) -> (Eigenfunction, f64) {
    let p = f.prime();
    let lines = line_dfts(f, coordinate);
    let mut phi = Vec::with_capacity(p as usize);
    let mut psi = Vec::with_capacity(p as usize);
    let mut correlation = 0.0;
    for line in &lines {
        let mut best = 0usize;
        for (xi, c) in line.iter().enumerate() {
            if c.norm() > line[best].norm() {
                best = xi;
            }
        }
        let coef = line[best];
        phi.push(fp::neg(best as u64, p));
        let psi_line = if coef.norm() == 0.0 {
            0.0
        } else {
            ((-coef.arg()) / std::f64::consts::TAU).rem_euclid(1.0)
        };
        psi.push(psi_line);
        // Per-line correlation E_t g(t) e_p(φ t) e(ψ) = ĝ(argmax)·e(ψ) = |ĝ|.
        correlation += coef.norm();
    }
    correlation /= p as f64;
    let chi = Eigenfunction {
        coordinate,
        support: vec![true; p as usize],
        phi,
        psi,
    };
    (chi, correlation)
}

/// Correlation `E_x f(x)·χ(x)`; real up to round-off when `χ` came from
/// [`u2_inverse`] on `f`.
pub fn correlation(f: &GridFn, chi: &Eigenfunction) -> Complex64 {
    let p = f.prime();
    let grid = chi.to_grid(p);
    let mut acc = Complex64::ZERO;
    for (a, b) in f.values().iter().zip(grid.values()) {
        acc += a * b;
    }
    acc / (p * p) as f64
}

/// Detect whether `f` already is an eigenfunction (up to `10⁻¹⁰` per line):
/// every line restriction is either identically zero or a unimodular
/// multiple of a single character. Returns the exact eigenfunction data.
pub fn detect_eigenfunction(f: &GridFn, coordinate: Coordinate) -> Option<Eigenfunction> {
    let p = f.prime();
    let lines = line_dfts(f, coordinate);
    let mut support = Vec::with_capacity(p as usize);
    let mut phi = Vec::with_capacity(p as usize);
    let mut psi = Vec::with_capacity(p as usize);
    for line in &lines {
        let mut best = 0usize;
        for (xi, c) in line.iter().enumerate() {
            if c.norm() > line[best].norm() {
                best = xi;
            }
        }
        let peak = line[best].norm();
        let rest: f64 = line
            .iter()
            .enumerate()
            .filter(|&(xi, _)| xi != best)
            .map(|(_, c)| c.norm())
            .sum();
        if peak < tol::IDENTITY {
            support.push(false);
            phi.push(0);
            psi.push(0.0);
            continue;
        }
        if (peak - 1.0).abs() > tol::IDENTITY || rest > tol::IDENTITY {
            return None;
        }
        // A line c·e_p(φt) has its spectral peak at ξ = φ, so φ is the
        // argmax itself (unlike the inverse step, which negates to form a
        // conjugate-free correlation).
        support.push(true);
        phi.push(best as u64);
        psi.push((line[best].arg() / std::f64::consts::TAU).rem_euclid(1.0));
    }
    Some(Eigenfunction {
        coordinate,
        support,
        phi,
        psi,
    })
}
