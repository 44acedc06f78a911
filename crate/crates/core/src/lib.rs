//! Desk-scale laboratory for corner configurations `(x1,x2), (x1+P(y),x2),
//! (x1,x2+Q(y))` in `F_p^2`, where `P` and `Q` are rational functions.
//!
//! The crate provides exact rational-function arithmetic ([`ratfun`]),
//! complex-valued grid functions with Fourier machinery ([`grid`]), Gowers
//! box norms and the constructive `U^2` inverse ([`gowers`]), the
//! exponential-sum kernel `K(a,b)` ([`kernel`]), the corner counting
//! operator and its inequality chains ([`counting`]), point counts for the
//! Roth variety and its auxiliaries ([`varieties`]), and randomized
//! verification of the Jacobian determinant identities ([`jacobian`]).

pub mod counting;
pub mod fp;
pub mod gowers;
pub mod grid;
pub mod jacobian;
pub mod kernel;
pub mod ratfun;
pub mod tol;
pub mod varieties;

pub use grid::GridFn;
pub use ratfun::{RatFunFp, RatFunQ};
