//! berezin-lab: a numerical laboratory for the boundary behaviour of bounded
//! radial symbols on the Bergman space of the unit disc.
//!
//! For a bounded radial symbol `f` the crate computes three boundary-indexed
//! quantities:
//!
//! - the normalized Mellin coefficients `C_n(f) = (n+1) int_0^1 f(r) r^n dr`,
//! - the Berezin transform `f~(z)` near the boundary, and
//! - the boundary means `M_eps(f) = (1/(1-eps)) int_eps^1 f(r) dr`
//!
//! and estimates their cluster sets, suprema and mutual ordering. The
//! oscillatory symbol `alpha (ln 1/r)^i` realizes three pairwise distinct
//! suprema; the step symbol `example10` realizes coincident memberships at
//! its essential-range extreme points. Both live behind the same
//! [`symbols::RadialSymbol`] strategy trait and are selected by name at
//! runtime.

// negated float comparisons like `!(tol > 0.0)` are deliberate: they treat
// NaN as invalid input instead of letting it slip through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod berezin;
pub mod cli;
pub mod cluster;
pub mod coefficients;
pub mod numerics;
pub mod output;
pub mod symbols;
pub mod verify;

pub use numerics::Complex;
