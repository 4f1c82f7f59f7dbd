//! Bounded radial symbols on the unit disc and their combinators.
//!
//! Every symbol variant implements the [`RadialSymbol`] strategy trait and is
//! registered by name in [`registry::SymbolRegistry`]; the CLI and the JSON
//! schema select implementations at runtime through that registry. Engines
//! (Mellin coefficients, Berezin transform, boundary means) consume the trait
//! only: a variant contributes closed forms where it has them and falls back
//! to the shared quadrature routes otherwise.

mod basic;
mod oscillatory;
mod piecewise;
pub mod registry;

use std::fmt;
use std::sync::Arc;

use serde_json::Value;
use thiserror::Error;

pub use crate::numerics::Complex;
pub use basic::{Affine, Constant, Power, RealPart};
pub use oscillatory::{alpha, compute_alpha, AlphaConstant, GrudskyVasilevski};
pub use piecewise::{PiecewiseConstant, StepExample10};

#[derive(Debug, Error)]
pub enum SymbolError {
    #[error("radius {r} outside the open interval (0, 1)")]
    DomainError { r: f64 },
    #[error("operation not supported for symbol kind `{kind}`: {reason}")]
    UnsupportedVariant { kind: String, reason: String },
    #[error("invalid symbol definition: {0}")]
    Validation(String),
    #[error("cannot parse symbol from `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

/// Shared handle to an immutable symbol; freely cloneable across threads.
pub type SymbolRef = Arc<dyn RadialSymbol>;

/// Essential range of a symbol, in the three shapes the built-in variants
/// produce.
#[derive(Debug, Clone, PartialEq)]
pub enum EssentialRange {
    /// Finitely many values of positive measure.
    FinitePoints(Vec<Complex>),
    /// A segment in the plane (real-valued symbols with a continuum of
    /// values, and affine images of those).
    Segment(Complex, Complex),
    /// A full circle (constant-modulus oscillatory symbols).
    Circle { center: Complex, radius: f64 },
}

/// Extreme points of the closed convex hull of the essential range. For a
/// circle every boundary point is extreme, so the circle itself is returned
/// as a tagged description rather than an error.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtremePoints {
    Points(Vec<Complex>),
    Circle { center: Complex, radius: f64 },
}

/// A bounded radial symbol `f : [0,1) -> C`.
pub trait RadialSymbol: fmt::Debug + Send + Sync {
    /// Registry name of the variant.
    fn kind(&self) -> &'static str;

    /// Short human-readable description used in reports.
    fn describe(&self) -> String {
        self.kind().to_string()
    }

    /// Pointwise value. The domain is the open interval `(0, 1)`; `r = 0` is
    /// a genuine singularity for the oscillatory variants and is rejected
    /// uniformly.
    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError>;

    /// Value at `r = exp(-exp(v))` when the variant has an exact expression
    /// in the log-log coordinate. This is what keeps boundary means accurate
    /// for oscillatory symbols at complements far below 1e-12, where the
    /// round trip through an `f64` radius would destroy the phase.
    fn evaluate_loglog(&self, _v: f64) -> Option<Complex> {
        None
    }

    /// Essential supremum of `|f|` (an upper bound for combinators).
    fn sup_modulus(&self) -> f64;

    fn is_real_valued(&self) -> bool;

    /// Closed-form normalized Mellin coefficient `C_n(f) = (n+1) int_0^1 f(r) r^n dr`,
    /// when the variant has one. Implementations must be all-or-nothing
    /// across `n`: either every index has a closed form or none does.
    fn mellin_closed_form(&self, n: u64) -> Option<Complex>;

    /// Closed-form boundary mean `M_eps(f) = (1/(1-eps)) int_eps^1 f(r) dr`,
    /// keyed by the exact complement `1 - eps`.
    fn mean_closed_form(&self, complement: f64) -> Option<Complex>;

    fn essential_range(&self) -> EssentialRange;

    /// Radii in `(0, 1)` where the symbol jumps; quadrature routes split
    /// panels there.
    fn jump_radii(&self) -> Vec<f64> {
        Vec::new()
    }

    /// True for symbols that oscillate without a limit at the boundary; the
    /// Mellin quadrature route is used unconditionally in cross-validation,
    /// so this is informational for reports.
    fn oscillatory_near_boundary(&self) -> bool {
        false
    }

    /// JSON form under the documented symbol schema.
    fn to_json(&self) -> Value;
}

/// Extreme points of the closed convex hull of the essential range.
pub fn essential_range_extreme_points(s: &dyn RadialSymbol) -> ExtremePoints {
    match s.essential_range() {
        EssentialRange::Circle { center, radius } => ExtremePoints::Circle { center, radius },
        EssentialRange::Segment(p, q) => {
            if (p - q).norm() == 0.0 {
                ExtremePoints::Points(vec![p])
            } else {
                ExtremePoints::Points(sort_points(vec![p, q]))
            }
        }
        EssentialRange::FinitePoints(pts) => ExtremePoints::Points(hull_extreme_points(pts)),
    }
}

fn sort_points(mut pts: Vec<Complex>) -> Vec<Complex> {
    pts.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
    pts
}

/// Extreme points of the convex hull of a finite point set (monotone chain
/// with strict turns, so collinear interior points are dropped).
fn hull_extreme_points(pts: Vec<Complex>) -> Vec<Complex> {
    let mut pts = sort_points(pts);
    pts.dedup_by(|a, b| a.re == b.re && a.im == b.im);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: Complex, a: Complex, b: Complex| -> f64 {
        (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
    };
    let chain = |iter: &mut dyn Iterator<Item = Complex>| -> Vec<Complex> {
        let mut out: Vec<Complex> = Vec::new();
        for p in iter {
            while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= 0.0 {
                out.pop();
            }
            out.push(p);
        }
        out
    };
    let lower = chain(&mut pts.iter().copied());
    let upper = chain(&mut pts.iter().rev().copied());
    let mut hull: Vec<Complex> = lower[..lower.len() - 1]
        .iter()
        .chain(&upper[..upper.len() - 1])
        .copied()
        .collect();
    if hull.is_empty() {
        // All points collinear: strict turns collapse the chains to the two
        // endpoints of the segment.
        hull = vec![pts[0], pts[pts.len() - 1]];
    }
    sort_points(hull)
}

pub(crate) fn complex_to_json(z: Complex) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

pub(crate) fn complex_from_json(v: &Value) -> Result<Complex, SymbolError> {
    let obj = v
        .as_object()
        .ok_or_else(|| SymbolError::Validation(format!("expected {{re, im}} object, got {v}")))?;
    let field = |name: &str| -> Result<f64, SymbolError> {
        obj.get(name)
            .and_then(Value::as_f64)
            .ok_or_else(|| SymbolError::Validation(format!("complex value missing `{name}`")))
    };
    let z = Complex::new(field("re")?, field("im")?);
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SymbolError::Validation("non-finite complex value".into()));
    }
    Ok(z)
}

pub(crate) fn check_domain(r: f64) -> Result<(), SymbolError> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(SymbolError::DomainError { r })
    }
}
