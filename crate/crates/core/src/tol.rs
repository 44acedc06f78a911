//! Centralized numerical tolerances.
//!
//! Every floating-point comparison in the crate goes through one of these
//! constants, so the acceptance thresholds live in exactly one place.

/// Identities that are exact in exact arithmetic (Parseval, Fourier
/// inversion, duality of the counting operator).
pub const IDENTITY: f64 = 1e-10;

/// Slack allowed on proved inequalities: a computed slack below `-INEQ_SLACK`
/// signals an implementation bug, not round-off.
pub const INEQ_SLACK: f64 = 1e-9;

/// Conjugate-symmetry and unimodularity checks.
pub const SYMMETRY: f64 = 1e-12;

/// 1-boundedness headroom at grid construction.
pub const BOUNDED: f64 = 1e-12;

/// Negative round-off clamp for box-norm averages (provably nonnegative).
pub const BOX_NORM_CLAMP: f64 = 1e-12;

/// Maximum distance from the charsum point count to the nearest integer
/// before the report is marked unreliable.
pub const CHARSUM_RESIDUAL: f64 = 1e-3;

/// Relative imaginary residue allowed in the charsum contraction, which is a
/// sum of squared Frobenius norms and hence real.
pub const CHARSUM_IMAG_REL: f64 = 1e-8;

/// Two evaluation paths for the kernel Parseval mass must agree this closely.
pub const KERNEL_MASS: f64 = 1e-8;
