//! Piecewise-constant symbols, including the dyadic step symbol whose 0/1
//! blocks accumulate at the boundary.

use serde_json::{json, Value};

use super::{
    check_domain, complex_from_json, complex_to_json, Complex, EssentialRange, RadialSymbol,
    SymbolError,
};
use crate::numerics::exp2_neg;

/// Stable `ln b` for `b` in `[0, 1]`: goes through the complement for
/// `b >= 0.5` so radii close to 1 keep full precision.
fn ln_radius(b: f64) -> f64 {
    if b >= 0.5 {
        (-(1.0 - b)).ln_1p()
    } else {
        b.ln()
    }
}

/// `b_hi^m - b_lo^m` for `0 <= b_lo <= b_hi <= 1`, via an expm1 factorization
/// when the two powers are close enough to cancel.
fn power_difference(m: f64, ln_lo: f64, ln_hi: f64) -> f64 {
    let d = m * (ln_hi - ln_lo);
    if d.is_nan() {
        // both logs -inf: the interval is degenerate at 0
        return 0.0;
    }
    if d < 0.5 {
        (m * ln_lo).exp() * d.exp_m1()
    } else {
        (m * ln_hi).exp() - (m * ln_lo).exp()
    }
}

// ---------------------------------------------------------------------------
// Generic piecewise-constant symbol
// ---------------------------------------------------------------------------

/// Piecewise-constant symbol on `[0, 1)` with breakpoints
/// `0 = b_0 < ... < b_k = 1` and one complex value per interval.
#[derive(Debug, Clone)]
pub struct PiecewiseConstant {
    breakpoints: Vec<f64>,
    values: Vec<Complex>,
}

impl PiecewiseConstant {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex>) -> Result<Self, SymbolError> {
        if breakpoints.len() < 2 {
            return Err(SymbolError::Validation(
                "piecewise symbol needs at least two breakpoints".into(),
            ));
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(SymbolError::Validation(format!(
                "expected {} values for {} breakpoints, got {}",
                breakpoints.len() - 1,
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints[0] != 0.0 || *breakpoints.last().unwrap() != 1.0 {
            return Err(SymbolError::Validation(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(SymbolError::Validation(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(SymbolError::Validation(
                "piecewise values must be finite".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex] {
        &self.values
    }
}

impl RadialSymbol for PiecewiseConstant {
    fn kind(&self) -> &'static str {
        "piecewise"
    }

    fn describe(&self) -> String {
        format!("piecewise ({} pieces)", self.values.len())
    }

    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        check_domain(r)?;
        let j = match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&r).unwrap())
        {
            Ok(exact) => exact,
            Err(ins) => ins - 1,
        };
        Ok(self.values[j.min(self.values.len() - 1)])
    }

    fn sup_modulus(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn is_real_valued(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    fn mellin_closed_form(&self, n: u64) -> Option<Complex> {
        let m = n as f64 + 1.0;
        let mut acc = Complex::new(0.0, 0.0);
        for (j, v) in self.values.iter().enumerate() {
            let ln_lo = ln_radius(self.breakpoints[j]);
            let ln_hi = ln_radius(self.breakpoints[j + 1]);
            acc += v * power_difference(m, ln_lo, ln_hi);
        }
        Some(acc)
    }

    fn mean_closed_form(&self, complement: f64) -> Option<Complex> {
        // Work in complements: interval j covers t in (1-b_{j+1}, 1-b_j].
        let mut acc = Complex::new(0.0, 0.0);
        for (j, v) in self.values.iter().enumerate() {
            let t_hi = 1.0 - self.breakpoints[j];
            let t_lo = 1.0 - self.breakpoints[j + 1];
            let overlap = (t_hi.min(complement) - t_lo).max(0.0);
            acc += v * overlap;
        }
        Some(acc / complement)
    }

    fn essential_range(&self) -> EssentialRange {
        EssentialRange::FinitePoints(self.values.clone())
    }

    fn jump_radii(&self) -> Vec<f64> {
        self.breakpoints[1..self.breakpoints.len() - 1].to_vec()
    }

    fn to_json(&self) -> Value {
        json!({
            "kind": "piecewise",
            "breakpoints": self.breakpoints,
            "values": self.values.iter().map(|v| complex_to_json(*v)).collect::<Vec<_>>(),
        })
    }
}

pub(super) fn piecewise_from_json(v: &Value) -> Result<PiecewiseConstant, SymbolError> {
    let breakpoints: Vec<f64> = v
        .get("breakpoints")
        .and_then(Value::as_array)
        .ok_or_else(|| SymbolError::Validation("piecewise symbol needs `breakpoints`".into()))?
        .iter()
        .map(|b| {
            b.as_f64()
                .ok_or_else(|| SymbolError::Validation("breakpoints must be numbers".into()))
        })
        .collect::<Result<_, _>>()?;
    let values: Vec<Complex> = v
        .get("values")
        .and_then(Value::as_array)
        .ok_or_else(|| SymbolError::Validation("piecewise symbol needs `values`".into()))?
        .iter()
        .map(complex_from_json)
        .collect::<Result<_, _>>()?;
    PiecewiseConstant::new(breakpoints, values)
}

// ---------------------------------------------------------------------------
// The dyadic step symbol
// ---------------------------------------------------------------------------

/// The step symbol with a linear ramp `16r` on `[0, 1/16)` and alternating
/// 1/0 blocks `[1 - 2^{-k^2}, 1 - 2^{-(k+1)^2})` (value 1 for even `k >= 2`,
/// 0 for odd `k`) accumulating at the boundary.
///
/// The printed block pattern covers `[15/16, 1)`; on the middle gap
/// `[1/16, 15/16)` no value is prescribed, so the symbol extends the value 1
/// right-continuously into the first 1-block. None of the three boundary
/// quantities' limits depend on that choice.
///
/// Block breakpoints are kept as exponent integers `k^2` with the complement
/// `2^{-k^2}` stored exactly, and all interval lengths are formed as
/// differences of those complements, so nothing cancels near 1.
#[derive(Debug, Clone, Default)]
pub struct StepExample10;

/// Largest block index whose complement `2^{-k^2}` is representable as f64
/// (33^2 = 1089 lies below the subnormal range).
const MAX_BLOCK: u32 = 32;

fn block_complement(k: u32) -> f64 {
    exp2_neg((k as i32) * (k as i32))
}

impl StepExample10 {
    /// Value at the complement `t = 1 - r`, `0 < t <= 1`. Exact for dyadic
    /// complements far below where `r` itself is representable.
    pub fn value_at_complement(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0 && t <= 1.0);
        if t > block_complement(2) {
            let r = 1.0 - t;
            return if r < 1.0 / 16.0 { 16.0 * r } else { 1.0 };
        }
        let mut k = 2u32;
        while k < MAX_BLOCK && t <= block_complement(k + 1) {
            k += 1;
        }
        if k.is_multiple_of(2) {
            1.0
        } else {
            0.0
        }
    }

    /// Intervals of value 1 as complement pairs `(t_lo, t_hi)` meaning
    /// `r in [1 - t_hi, 1 - t_lo)`; the first entry is the merged
    /// `[1/16, 1 - 2^{-9})` region.
    fn one_intervals() -> Vec<(f64, f64)> {
        let mut out = vec![(block_complement(3), 15.0 / 16.0)];
        let mut k = 4u32;
        while k <= MAX_BLOCK {
            out.push((block_complement(k + 1), block_complement(k)));
            k += 2;
        }
        out
    }
}

impl RadialSymbol for StepExample10 {
    fn kind(&self) -> &'static str {
        "example10"
    }

    fn describe(&self) -> String {
        "example10 (ramp + dyadic 0/1 blocks)".into()
    }

    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        check_domain(r)?;
        Ok(Complex::new(self.value_at_complement(1.0 - r), 0.0))
    }

    fn sup_modulus(&self) -> f64 {
        1.0
    }

    fn is_real_valued(&self) -> bool {
        true
    }

    fn mellin_closed_form(&self, n: u64) -> Option<Complex> {
        let m = n as f64 + 1.0;
        // ramp: 16 (n+1) int_0^{1/16} r^{n+1} dr = (n+1)/(n+2) * 16^{-(n+1)}
        let mut acc = m / (m + 1.0) * (-m * 16f64.ln()).exp();
        for (t_lo, t_hi) in Self::one_intervals() {
            let ln_lo = (-t_hi).ln_1p(); // smaller radius
            let ln_hi = (-t_lo).ln_1p();
            acc += power_difference(m, ln_lo, ln_hi);
        }
        Some(Complex::new(acc, 0.0))
    }

    fn mean_closed_form(&self, complement: f64) -> Option<Complex> {
        let mut acc = 0.0;
        for (t_lo, t_hi) in Self::one_intervals() {
            acc += (t_hi.min(complement) - t_lo).max(0.0);
        }
        if complement > 15.0 / 16.0 {
            // part of the ramp is inside [eps, 1]
            let eps = 1.0 - complement;
            acc += 8.0 * (1.0 / 256.0 - eps * eps);
        }
        Some(Complex::new(acc / complement, 0.0))
    }

    fn essential_range(&self) -> EssentialRange {
        EssentialRange::Segment(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
    }

    fn jump_radii(&self) -> Vec<f64> {
        // Representable jump radii, plus the ramp kink at 1/16.
        let mut out = vec![1.0 / 16.0];
        for k in 3..=7u32 {
            let c = block_complement(k);
            let r = 1.0 - c;
            if r < 1.0 {
                out.push(r);
            }
        }
        out
    }

    fn to_json(&self) -> Value {
        json!({ "kind": "example10" })
    }
}
