//! Point counting for the Roth variety `Y` and its auxiliary varieties
//! (`Z′`, `X_{a,b}`, `W_{a,b}`, signed-sum systems) by three mutually
//! cross-validating algorithms.
//!
//! The Roth variety is cut out by ten equations in sixteen variables
//! `y_1..y_16`, each equation a signed combination of `P`- or `Q`-values of
//! four variables (eight for the last two). Coordinates range over the
//! common non-pole set of `P` and `Q` — that is exactly the locus where all
//! ten equations are evaluable, since each variable appears in one
//! `P`-equation and one `Q`-equation.
//!
//! Algorithms and their validity ranges:
//! * `brute`: exhaustive 16-fold enumeration, `p ≤ 3` — the exact anchor.
//! * `structured`: the left variables form an 8-cycle whose edge offsets are
//!   determined by the right block; counted by bucketing right tuples and
//!   propagating weights around the cycle, `p ≤ 11`.
//! * `charsum`: the kernel contraction, floating point, `p ≤ ~200`.

use crate::fp;
use crate::kernel::{delta_kernel, KernelTable};
use crate::ratfun::{BadPrime, RatFunFp, RatFunQ};
use crate::tol;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::HashMap;
use std::time::Instant;
use thiserror::Error;

/// Sign pattern of the `Z′` linear equations over `y_1..y_8` (also the
/// pattern of Roth equations (9)–(10) over `y_9..y_16`).
pub const EIGHT_SIGNS: [i8; 8] = [1, -1, -1, 1, -1, 1, 1, -1];
/// `X_{a,b}` sign pattern over `(y_2,y_3,y_5,y_7,y_8)`.
pub const X_SIGNS: [i8; 5] = [-1, -1, -1, 1, -1];
/// `W_{a,b}` sign pattern over `(y_11,…,y_16)`.
pub const W_SIGNS: [i8; 6] = [-1, 1, -1, 1, 1, -1];

#[derive(Debug, Error)]
pub enum VarietyError {
    #[error("p={p} too large for {method} counting (limit {limit})")]
    PrimeTooLarge {
        p: u64,
        method: &'static str,
        limit: u64,
    },
    #[error("filter needs derivatives: {0}")]
    Derivative(#[from] BadPrime),
}

/// Which subset of the Roth variety the brute-force counter enumerates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteFilter {
    /// All of `Y`.
    All,
    /// `Z`: the `R`-product equation `R(y1)R(y4)R(y6)R(y7) =
    /// R(y2)R(y3)R(y5)R(y8)` also holds (all eight `R`-values defined).
    Z,
    /// `Y_i` for `1 ≤ i ≤ 8`: additionally `Q′(y_i) = 0`.
    Yi(usize),
    /// `Y_{9,10}`: additionally `−P′(y9)Q′(y10) + Q′(y9)P′(y10) = 0`.
    Y910,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Brute,
    Structured,
    Charsum,
}

/// One variety count with its normalization.
#[derive(Clone, Debug, Serialize)]
pub struct VarietyCountReport {
    pub variety: String,
    pub p: u64,
    pub count: u64,
    pub exponent: u32,
    pub ratio: f64,
    pub method: CountMethod,
    /// Distance of the raw floating value to the returned integer
    /// (charsum only).
    pub residual: Option<f64>,
    pub reliable: bool,
    pub seconds: f64,
}

impl VarietyCountReport {
    fn exact(variety: &str, p: u64, count: u64, exponent: u32, method: CountMethod, t: Instant) -> Self {
        VarietyCountReport {
            variety: variety.to_string(),
            p,
            count,
            exponent,
            ratio: count as f64 / (p as f64).powi(exponent as i32),
            method,
            residual: None,
            reliable: true,
            seconds: t.elapsed().as_secs_f64(),
        }
    }
}

/// The ten Roth equations as (function selector, signed variable indices):
/// `false` = P-equation, `true` = Q-equation; indices are 1-based with sign.
const ROTH_EQUATIONS: [(bool, &[i8]); 10] = [
    (false, &[1, -3, -9, 11]),
    (false, &[2, -4, -10, 12]),
    (false, &[5, -7, -13, 15]),
    (false, &[6, -8, -14, 16]),
    (true, &[1, -2, -9, 10]),
    (true, &[3, -7, -11, 15]),
    (true, &[4, -8, -12, 16]),
    (true, &[5, -6, -13, 14]),
    (false, &[9, -10, -11, 12, -13, 14, 15, -16]),
    (true, &[9, -10, -11, 12, -13, 14, 15, -16]),
];

/// Per-point data the enumerators share: the non-pole values and their
/// `P`/`Q` images.
struct ValueTables {
    p: u64,
    /// Non-pole `y` values in increasing order.
    domain: Vec<u64>,
    /// `pv[y]`, `qv[y]` for all `y` (garbage at poles), plus a pole mask.
    pv: Vec<u64>,
    qv: Vec<u64>,
    pole: Vec<bool>,
}

impl ValueTables {
    fn new(pfun: &RatFunFp, qfun: &RatFunFp) -> Self {
        let p = pfun.prime();
        let mut pv = vec![0u64; p as usize];
        let mut qv = vec![0u64; p as usize];
        let mut pole = vec![false; p as usize];
        let mut domain = Vec::new();
        for y in 0..p {
            match (pfun.evaluate(y).value(), qfun.evaluate(y).value()) {
                (Some(a), Some(b)) => {
                    pv[y as usize] = a;
                    qv[y as usize] = b;
                    domain.push(y);
                }
                _ => pole[y as usize] = true,
            }
        }
        ValueTables {
            p,
            domain,
            pv,
            qv,
            pole,
        }
    }

    #[inline]
    fn value(&self, q_equation: bool, y: u64) -> u64 {
        if q_equation {
            self.qv[y as usize]
        } else {
            self.pv[y as usize]
        }
    }
}

/// `R(y) = P′(y)/Q′(y)` for each point, `None` where undefined (derivative
/// pole or `Q′(y) = 0`).
fn r_values(pfun: &RatFunFp, qfun: &RatFunFp) -> Result<Vec<Option<u64>>, BadPrime> {
    let p = pfun.prime();
    let dp = pfun.derivative()?;
    let dq = qfun.derivative()?;
    Ok((0..p)
        .map(|y| match (dp.evaluate(y).value(), dq.evaluate(y).value()) {
            (Some(a), Some(b)) if b != 0 => Some(fp::mul(a, fp::inv(b, p), p)),
            _ => None,
        })
        .collect())
}

const BRUTE_LIMIT: u64 = 3;

/// Exhaustive count of the filtered Roth variety, `p ≤ 3`. Equations are
/// checked as soon as their last variable is bound, which prunes the
/// 16-deep recursion heavily.
pub fn roth_count_brute(
    pfun: &RatFunFp,
    qfun: &RatFunFp,
    filter: BruteFilter,
) -> Result<u64, VarietyError> {
    let p = pfun.prime();
    if p > BRUTE_LIMIT {
        return Err(VarietyError::PrimeTooLarge {
            p,
            method: "brute",
            limit: BRUTE_LIMIT,
        });
    }
    let tables = ValueTables::new(pfun, qfun);
    // Equation residuals are accumulated incrementally: checks[d] lists the
    // equations whose last (largest) variable index is d+1.
    let mut checks: Vec<Vec<usize>> = vec![Vec::new(); 16];
    for (eq, (_, vars)) in ROTH_EQUATIONS.iter().enumerate() {
        let last = vars.iter().map(|v| v.unsigned_abs()).max().unwrap() as usize;
        checks[last - 1].push(eq);
    }
    let filter_data: Option<FilterData> = match filter {
        BruteFilter::All => None,
        _ => Some(FilterData::new(pfun, qfun, filter)?),
    };
    let mut assignment = [0u64; 16];
    let mut count = 0u64;
    enumerate(
        0,
        &mut assignment,
        &tables,
        &checks,
        filter_data.as_ref(),
        &mut count,
    );
    Ok(count)
}

struct FilterData {
    filter: BruteFilter,
    r: Vec<Option<u64>>,
    dq: Vec<Option<u64>>,
    dp: Vec<Option<u64>>,
}

impl FilterData {
    fn new(pfun: &RatFunFp, qfun: &RatFunFp, filter: BruteFilter) -> Result<Self, VarietyError> {
        let p = pfun.prime();
        let dpf = pfun.derivative().map_err(VarietyError::Derivative)?;
        let dqf = qfun.derivative().map_err(VarietyError::Derivative)?;
        let dp = (0..p).map(|y| dpf.evaluate(y).value()).collect();
        let dq = (0..p).map(|y| dqf.evaluate(y).value()).collect();
        Ok(FilterData {
            filter,
            r: r_values(pfun, qfun).map_err(VarietyError::Derivative)?,
            dq,
            dp,
        })
    }

    fn accepts(&self, p: u64, y: &[u64; 16]) -> bool {
        match self.filter {
            BruteFilter::All => true,
            BruteFilter::Z => {
                let mut lhs = 1u64;
                let mut rhs = 1u64;
                for (i, &yi) in y[..8].iter().enumerate() {
                    let Some(r) = self.r[yi as usize] else {
                        return false;
                    };
                    // Cycle-side split: indices 1,4,6,7 versus 2,3,5,8.
                    if [0, 3, 5, 6].contains(&i) {
                        lhs = fp::mul(lhs, r, p);
                    } else {
                        rhs = fp::mul(rhs, r, p);
                    }
                }
                lhs == rhs
            }
            BruteFilter::Yi(i) => self.dq[y[i - 1] as usize] == Some(0),
            BruteFilter::Y910 => {
                let (Some(p9), Some(p10)) = (self.dp[y[8] as usize], self.dp[y[9] as usize])
                else {
                    return false;
                };
                let (Some(q9), Some(q10)) = (self.dq[y[8] as usize], self.dq[y[9] as usize])
                else {
                    return false;
                };
                fp::mul(p9, q10, p) == fp::mul(q9, p10, p)
            }
        }
    }
}

fn enumerate(
    depth: usize,
    assignment: &mut [u64; 16],
    tables: &ValueTables,
    checks: &[Vec<usize>],
    filter: Option<&FilterData>,
    count: &mut u64,
) {
    if depth == 16 {
        if filter.is_none_or(|f| f.accepts(tables.p, assignment)) {
            *count += 1;
        }
        return;
    }
    let p = tables.p;
    'next_value: for y in tables.domain.clone() {
        assignment[depth] = y;
        for &eq in &checks[depth] {
            let (q_eq, vars) = ROTH_EQUATIONS[eq];
            let mut acc = 0u64;
            for &v in vars {
                let val = tables.value(q_eq, assignment[v.unsigned_abs() as usize - 1]);
                acc = if v > 0 {
                    fp::add(acc, val, p)
                } else {
                    fp::sub(acc, val, p)
                };
            }
            if acc != 0 {
                continue 'next_value;
            }
        }
        enumerate(depth + 1, assignment, tables, checks, filter, count);
    }
}

const STRUCTURED_LIMIT: u64 = 11;

/// The left variables form a closed 8-cycle; traversal order and the
/// (function, right-block offset) of each edge. Edge `i` joins cycle vertex
/// `i` to vertex `i+1` with constraint `F(prev) − F(next) = c_i`.
///
/// Cycle: y1 → y3 → y7 → y5 → y6 → y8 → y4 → y2 → y1.
/// Offsets: c1 = P(y9)−P(y11), c2 = Q(y11)−Q(y15), c3 = P(y15)−P(y13),
/// c4 = Q(y13)−Q(y14), c5 = P(y14)−P(y16), c6 = Q(y16)−Q(y12),
/// c7 = P(y12)−P(y10), c8 = Q(y10)−Q(y9) — each a rearrangement of Roth
/// equations (1), (6), (3), (8), (4), (7), (2), (5) respectively.
/// `(q_equation, plus_index, minus_index)` with right-block indices 0..8
/// for y9..y16:
const CYCLE_EDGES: [(bool, usize, usize); 8] = [
    (false, 0, 2),
    (true, 2, 6),
    (false, 6, 4),
    (true, 4, 5),
    (false, 5, 7),
    (true, 7, 3),
    (false, 3, 1),
    (true, 1, 0),
];

/// Exact structured count: enumerate right-block tuples `y9..y15` (the value
/// pair of `y16` is forced by Roth equations (9),(10) and realized with a
/// multiplicity lookup), bucket them by the 8-vector of induced cycle
/// offsets, then count closed cycles per distinct offset vector by weight
/// propagation.
pub fn roth_count_structured(pfun: &RatFunFp, qfun: &RatFunFp) -> Result<u64, VarietyError> {
    let p = pfun.prime();
    if p > STRUCTURED_LIMIT {
        return Err(VarietyError::PrimeTooLarge {
            p,
            method: "structured",
            limit: STRUCTURED_LIMIT,
        });
    }
    let tables = ValueTables::new(pfun, qfun);
    // Multiplicity of each (P,Q) value pair, for resolving y16.
    let mut pair_mult: HashMap<(u64, u64), u64> = HashMap::new();
    for &y in &tables.domain {
        *pair_mult
            .entry((tables.pv[y as usize], tables.qv[y as usize]))
            .or_insert(0) += 1;
    }

    // Right block: recursive enumeration of y9..y15 over the domain; the
    // value pair of y16 is forced by equations (9),(10) (slot 16 carries
    // sign −1 in both), realized with the multiplicity lookup. All y16
    // preimages share the same value pair, hence the same offset vector.
    fn recurse(
        depth: usize,
        right: &mut [u64; 7],
        tables: &ValueTables,
        pair_mult: &HashMap<(u64, u64), u64>,
        buckets: &mut HashMap<[u64; 8], u64>,
    ) {
        if depth == 7 {
            let p = tables.p;
            let mut sp = 0u64;
            let mut sq = 0u64;
            for (i, &yi) in right.iter().enumerate() {
                let (a, b) = (tables.pv[yi as usize], tables.qv[yi as usize]);
                if EIGHT_SIGNS[i] > 0 {
                    sp = fp::add(sp, a, p);
                    sq = fp::add(sq, b, p);
                } else {
                    sp = fp::sub(sp, a, p);
                    sq = fp::sub(sq, b, p);
                }
            }
            if let Some(&mult) = pair_mult.get(&(sp, sq)) {
                let pq = |q_eq: bool, idx: usize| -> u64 {
                    if idx == 7 {
                        if q_eq {
                            sq
                        } else {
                            sp
                        }
                    } else {
                        tables.value(q_eq, right[idx])
                    }
                };
                let mut c = [0u64; 8];
                for (i, &(q_eq, plus, minus)) in CYCLE_EDGES.iter().enumerate() {
                    c[i] = fp::sub(pq(q_eq, plus), pq(q_eq, minus), p);
                }
                *buckets.entry(c).or_insert(0) += mult;
            }
            return;
        }
        for i in 0..tables.domain.len() {
            right[depth] = tables.domain[i];
            recurse(depth + 1, right, tables, pair_mult, buckets);
        }
    }
    let mut buckets: HashMap<[u64; 8], u64> = HashMap::new();
    let mut right = [0u64; 7];
    recurse(0, &mut right, &tables, &pair_mult, &mut buckets);

    // Left cycle count per distinct offset vector.
    let mut total = 0u64;
    for (c, mult) in &buckets {
        total += left_cycle_count(&tables, c) * mult;
    }
    Ok(total)
}

/// Number of cycle tuples with the given edge offsets: for each start `y1`,
/// propagate a weight vector around the eight edges and read the weight
/// returned to the start. Each step is a value-indexed convolution, O(p).
fn left_cycle_count(tables: &ValueTables, c: &[u64; 8]) -> u64 {
    let p = tables.p;
    let mut total = 0u64;
    let mut weights = vec![0u64; p as usize];
    let mut by_value = vec![0u64; p as usize];
    for &start in &tables.domain {
        weights.iter_mut().for_each(|w| *w = 0);
        weights[start as usize] = 1;
        for (i, &(q_eq, _, _)) in CYCLE_EDGES.iter().enumerate() {
            // Constraint F(prev) − F(next) = c_i ⟺ F(prev) = F(next) + c_i.
            by_value.iter_mut().for_each(|w| *w = 0);
            for &u in &tables.domain {
                by_value[tables.value(q_eq, u) as usize] += weights[u as usize];
            }
            for &v in &tables.domain {
                weights[v as usize] = by_value[fp::add(tables.value(q_eq, v), c[i], p) as usize];
            }
            for y in 0..p {
                if tables.pole[y as usize] {
                    weights[y as usize] = 0;
                }
            }
        }
        total += weights[start as usize];
    }
    total
}

/// Pairwise (tree) summation for reproducible compensated accumulation.
fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Complex accumulator abstraction so the charsum can run plain first and
/// retry with Kahan compensation when the rounding residual is too large.
trait Accum: Default {
    fn add(&mut self, v: Complex64);
    fn value(&self) -> Complex64;
}

#[derive(Default)]
struct Plain(Complex64);

impl Accum for Plain {
    #[inline]
    fn add(&mut self, v: Complex64) {
        self.0 += v;
    }

    fn value(&self) -> Complex64 {
        self.0
    }
}

#[derive(Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

#[derive(Default)]
struct Compensated {
    re: Kahan,
    im: Kahan,
}

impl Accum for Compensated {
    #[inline]
    fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.sum, self.im.sum)
    }
}

/// One full charsum pass; returns `(S, worst imaginary residue)`.
fn charsum_pass<A: Accum>(k: &KernelTable) -> (f64, f64) {
    let p = k.prime();
    let n = p as usize;
    let mut per_h = Vec::with_capacity(n * n);
    let mut imag_max: f64 = 0.0;
    for h1 in 0..p {
        for h2 in 0..p {
            let g = delta_kernel(k, (h1, h2));
            // A_h(m,m′) = Σ_n G_h(n,m)·conj G_h(n,m′).
            let mut a = vec![Complex64::ZERO; n * n];
            for m in 0..n {
                for m2 in 0..n {
                    let mut acc = A::default();
                    for nn in 0..n {
                        acc.add(g[nn * n + m] * g[nn * n + m2].conj());
                    }
                    a[m * n + m2] = acc.value();
                }
            }
            // B_h(m′,m″) = Σ_m A_h(m,m′)·conj A_h(m,m″).
            let mut b = vec![Complex64::ZERO; n * n];
            for m1 in 0..n {
                for m2 in 0..n {
                    let mut acc = A::default();
                    for m in 0..n {
                        acc.add(a[m * n + m1] * a[m * n + m2].conj());
                    }
                    b[m1 * n + m2] = acc.value();
                }
            }
            // ‖B_h‖²_F through a complex accumulator so a nonzero imaginary
            // residue would be visible.
            let mut frob = A::default();
            for v in &b {
                frob.add(v * v.conj());
            }
            let frob = frob.value();
            imag_max = imag_max.max(frob.im.abs());
            per_h.push(frob.re);
        }
    }
    (pairwise_sum(&per_h), imag_max)
}

/// Charsum count of `|Y(F_p)|`: the ten-fold character-orthogonality dual of
/// the defining equations contracts to
/// `S = Σ_{h∈F_p²} ‖B_h‖²_F` with `G_h = Δ-kernel`, `A_h = G_h^*`-product,
/// `B_h = A_h^*`-product, and `|Y| = p⁶·S`. Cost O(p⁵). A residual at or
/// above the rounding tolerance triggers one compensated-summation retry
/// before the report is marked unreliable.
pub fn roth_count_charsum(k: &KernelTable) -> VarietyCountReport {
    let t = Instant::now();
    let p = k.prime();
    let (mut s, mut imag_max) = charsum_pass::<Plain>(k);
    let raw_residual = |s: f64| {
        let raw = (p as f64).powi(6) * s;
        (raw - raw.round()).abs()
    };
    if raw_residual(s) >= tol::CHARSUM_RESIDUAL {
        (s, imag_max) = charsum_pass::<Compensated>(k);
    }
    assert!(
        imag_max <= tol::CHARSUM_IMAG_REL * s.max(f64::MIN_POSITIVE),
        "charsum imaginary residue {imag_max} out of tolerance (S = {s})"
    );
    let raw = (p as f64).powi(6) * s;
    let count = raw.round().max(0.0) as u64;
    let residual = (raw - count as f64).abs();
    VarietyCountReport {
        variety: "Y".to_string(),
        p,
        count,
        exponent: 6,
        ratio: s,
        method: CountMethod::Charsum,
        residual: Some(residual),
        reliable: residual < tol::CHARSUM_RESIDUAL,
        seconds: t.elapsed().as_secs_f64(),
    }
}

/// Exact table `N(a,b) = #{(y_1..y_k) non-pole : Σ s_i P(y_i) = a,
/// Σ s_i Q(y_i) = b}` by `k−1` convolutions over `F_p²` of the
/// single-variable signed distributions.
pub fn signed_sum_histogram(pfun: &RatFunFp, qfun: &RatFunFp, signs: &[i8]) -> Vec<u64> {
    assert!(!signs.is_empty() && signs.len() <= 8, "1 ≤ k ≤ 8 required");
    let p = pfun.prime();
    let n = (p * p) as usize;
    let tables = ValueTables::new(pfun, qfun);
    let single = |sign: i8| -> Vec<u64> {
        let mut d = vec![0u64; n];
        for &y in &tables.domain {
            let (mut a, mut b) = (tables.pv[y as usize], tables.qv[y as usize]);
            if sign < 0 {
                a = fp::neg(a, p);
                b = fp::neg(b, p);
            }
            d[(a * p + b) as usize] += 1;
        }
        d
    };
    let mut acc = single(signs[0]);
    for &s in &signs[1..] {
        let next = single(s);
        let mut out = vec![0u64; n];
        for a1 in 0..p {
            for b1 in 0..p {
                let v = acc[(a1 * p + b1) as usize];
                if v == 0 {
                    continue;
                }
                for a2 in 0..p {
                    for b2 in 0..p {
                        let w = next[(a2 * p + b2) as usize];
                        if w != 0 {
                            let idx = (fp::add(a1, a2, p) * p + fp::add(b1, b2, p)) as usize;
                            out[idx] += v * w;
                        }
                    }
                }
            }
        }
        acc = out;
    }
    acc
}

/// Result of the `Z′` meet-in-the-middle join.
#[derive(Clone, Debug, Serialize)]
pub struct ZprimeReport {
    pub count: u64,
    /// Points `y` where `R(y) = P′(y)/Q′(y)` is undefined; tuples touching
    /// them are excluded from `count` (they belong to the separately
    /// handled `Y_i`-type pieces).
    pub r_undefined_points: u64,
}

const ZPRIME_LIMIT: u64 = 31;

/// Exact `|Z′(F_p)|` over R-defined points: enumerate each half of the
/// variable split `(y1,y4,y6,y7) | (y2,y3,y5,y8)` into keys
/// `(ΣP, ΣQ, ΠR)` and join.
pub fn zprime_count(pfun: &RatFunFp, qfun: &RatFunFp) -> Result<ZprimeReport, VarietyError> {
    let p = pfun.prime();
    if p > ZPRIME_LIMIT {
        return Err(VarietyError::PrimeTooLarge {
            p,
            method: "zprime",
            limit: ZPRIME_LIMIT,
        });
    }
    let tables = ValueTables::new(pfun, qfun);
    let r = r_values(pfun, qfun).map_err(VarietyError::Derivative)?;
    // Points usable in Z′ tuples: non-pole with R defined.
    let usable: Vec<u64> = tables
        .domain
        .iter()
        .copied()
        .filter(|&y| r[y as usize].is_some())
        .collect();
    let r_undefined_points = tables.domain.len() as u64 - usable.len() as u64;
    let half = |ys: &[u64]| -> HashMap<(u64, u64, u64), u64> {
        // Keys over all 4-tuples from the usable set.
        let mut keys = HashMap::new();
        for &a in ys {
            for &b in ys {
                for &c in ys {
                    for &d in ys {
                        let sp = [a, b, c, d]
                            .iter()
                            .fold(0u64, |acc, &y| fp::add(acc, tables.pv[y as usize], p));
                        let sq = [a, b, c, d]
                            .iter()
                            .fold(0u64, |acc, &y| fp::add(acc, tables.qv[y as usize], p));
                        let rp = [a, b, c, d]
                            .iter()
                            .fold(1u64, |acc, &y| fp::mul(acc, r[y as usize].unwrap(), p));
                        *keys.entry((sp, sq, rp)).or_insert(0) += 1;
                    }
                }
            }
        }
        keys
    };
    let left = half(&usable);
    let right = half(&usable);
    let mut count = 0u64;
    for (key, v) in &left {
        if let Some(w) = right.get(key) {
            count += v * w;
        }
    }
    Ok(ZprimeReport {
        count,
        r_undefined_points,
    })
}

/// Pick the best exact |Y| counter available at this prime, for the
/// diagonal lower-bound assertion.
fn best_exact_y(pfun: &RatFunFp, qfun: &RatFunFp) -> Option<u64> {
    let p = pfun.prime();
    if p <= BRUTE_LIMIT {
        roth_count_brute(pfun, qfun, BruteFilter::All).ok()
    } else if p <= STRUCTURED_LIMIT {
        roth_count_structured(pfun, qfun).ok()
    } else {
        None
    }
}

/// One CSV row of a dimension scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub p: u64,
    pub variety: String,
    pub count: u64,
    pub exponent: u32,
    pub ratio: f64,
    pub method: CountMethod,
    pub residual: Option<f64>,
    pub seconds: f64,
}

impl From<&VarietyCountReport> for ScanRow {
    fn from(r: &VarietyCountReport) -> Self {
        ScanRow {
            p: r.p,
            variety: r.variety.clone(),
            count: r.count,
            exponent: r.exponent,
            ratio: r.ratio,
            method: r.method,
            residual: r.residual,
            seconds: r.seconds,
        }
    }
}

/// Scan the point-counting ratios across primes: `|Y|/p⁶` (charsum,
/// cross-anchored where an exact method applies), `|Z′|/p⁵` where feasible,
/// and the suprema `sup_{a,b}|X_{a,b}|/p³`, `sup_{a,b}|W_{a,b}|/p⁴`.
/// Bad primes are skipped with the reason recorded.
pub fn dimension_scan(
    pfun_q: &RatFunQ,
    qfun_q: &RatFunQ,
    primes: &[u64],
) -> (Vec<ScanRow>, Vec<(u64, BadPrime)>) {
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &p in primes {
        let (pf, qf) = match crate::ratfun::reduce_pair_mod_p(pfun_q, qfun_q, p) {
            Ok(pair) => pair,
            Err(e) => {
                skipped.push((p, e));
                continue;
            }
        };
        let k = crate::kernel::kernel_table(&pf, &qf);
        let y_report = roth_count_charsum(&k);

        // Diagonal lower bound: |Y| ≥ N₈(0,0) by the embedding
        // y1..y8 := y9..y16 (it kills equations (1)–(8) identically).
        let n8 = signed_sum_histogram(&pf, &qf, &EIGHT_SIGNS);
        let diag = n8[0];
        if let Some(exact) = best_exact_y(&pf, &qf) {
            assert!(exact >= diag, "diagonal bound violated: |Y|={exact} < N8(0,0)={diag}");
            assert_eq!(exact, y_report.count, "charsum disagrees with exact count at p={p}");
        } else if y_report.reliable {
            assert!(
                y_report.count >= diag,
                "diagonal bound violated: |Y|={} < N8(0,0)={diag}",
                y_report.count
            );
        }
        rows.push(ScanRow::from(&y_report));

        if p <= ZPRIME_LIMIT {
            let t = Instant::now();
            if let Ok(z) = zprime_count(&pf, &qf) {
                rows.push(ScanRow::from(&VarietyCountReport::exact(
                    "Zprime",
                    p,
                    z.count,
                    5,
                    CountMethod::Structured,
                    t,
                )));
            }
        }

        let t = Instant::now();
        let x = signed_sum_histogram(&pf, &qf, &X_SIGNS);
        let x_sup = *x.iter().max().unwrap();
        rows.push(ScanRow::from(&VarietyCountReport::exact(
            "X_sup", p, x_sup, 3, CountMethod::Structured, t,
        )));

        let t = Instant::now();
        let w = signed_sum_histogram(&pf, &qf, &W_SIGNS);
        let w_sup = *w.iter().max().unwrap();
        rows.push(ScanRow::from(&VarietyCountReport::exact(
            "W_sup", p, w_sup, 4, CountMethod::Structured, t,
        )));
    }
    (rows, skipped)
}
