//! The boundary-oscillatory symbol `r -> alpha * (ln 1/r)^i`.
//!
//! `alpha` normalizes the symbol so that `C_0 = 1`; it is the reciprocal of
//! `int_0^1 (ln 1/r)^i dr`, computed once by quadrature in the log-log
//! coordinate `v = ln ln(1/r)` where the integrand `e^{(1+i)v - e^v}` is
//! smooth with double-exponential decay on the right and exponential decay on
//! the left, so both truncation tails are certified.

use std::sync::OnceLock;

use serde_json::{json, Value};

use super::{check_domain, Complex, EssentialRange, RadialSymbol, SymbolError};
use crate::numerics::{integrate, NumericsError, QuadratureResult};

/// The normalization constant of the oscillatory symbol.
#[derive(Debug, Clone, Copy)]
pub struct AlphaConstant {
    pub value: Complex,
    pub modulus: f64,
    /// Quadrature error estimate carried by the defining integral.
    pub error_estimate: f64,
}

/// Computes `alpha = (int_0^1 (ln 1/r)^i dr)^{-1}` by quadrature at the given
/// tolerance.
pub fn compute_alpha(tol: f64) -> Result<AlphaConstant, NumericsError> {
    let integral = alpha_defining_integral(tol)?;
    let value = integral.value.finv();
    Ok(AlphaConstant {
        value,
        modulus: value.norm(),
        error_estimate: integral.error_estimate,
    })
}

fn alpha_defining_integral(tol: f64) -> Result<QuadratureResult, NumericsError> {
    // Truncation tails: left <= e^{v_min}, right <= e^{-e^{v_max}}.
    let v_min = (tol / 4.0).ln();
    let v_max = (4.0 / tol).ln().ln() + 0.5;
    let mut res = integrate(
        |v: f64| (Complex::new(1.0, 1.0) * v - Complex::new(v.exp(), 0.0)).exp(),
        v_min,
        v_max,
        tol / 2.0,
    )?;
    res.error_estimate += tol / 2.0;
    Ok(res)
}

/// Cached `alpha` at tolerance 1e-12.
pub fn alpha() -> &'static AlphaConstant {
    static ALPHA: OnceLock<AlphaConstant> = OnceLock::new();
    ALPHA.get_or_init(|| {
        compute_alpha(1e-12).expect("alpha integrand is smooth on the truncated interval")
    })
}

/// `r -> alpha * (ln 1/r)^i = alpha * e^{i ln ln(1/r)}`.
#[derive(Debug, Clone, Default)]
pub struct GrudskyVasilevski;

impl RadialSymbol for GrudskyVasilevski {
    fn kind(&self) -> &'static str {
        "gv"
    }

    fn describe(&self) -> String {
        "gv (alpha * (ln 1/r)^i)".into()
    }

    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        check_domain(r)?;
        // ln(1/r) through ln_1p on the complement keeps the phase accurate
        // near the boundary; small radii take the direct log.
        let u = if r >= 0.5 {
            -(-(1.0 - r)).ln_1p()
        } else {
            -r.ln()
        };
        Ok(alpha().value * Complex::new(0.0, u.ln()).exp())
    }

    fn evaluate_loglog(&self, v: f64) -> Option<Complex> {
        Some(alpha().value * Complex::new(0.0, v).exp())
    }

    fn sup_modulus(&self) -> f64 {
        alpha().modulus
    }

    fn is_real_valued(&self) -> bool {
        false
    }

    /// `C_n = exp(-i ln(n+1))`: substituting `u = ln(1/r)` turns the defining
    /// integral into `alpha * Gamma(1+i) * (n+1)^{-i}` and `alpha * Gamma(1+i) = 1`
    /// by the definition of `alpha`.
    fn mellin_closed_form(&self, n: u64) -> Option<Complex> {
        let phase = -((n as f64) + 1.0).ln();
        let (sin, cos) = phase.sin_cos();
        Some(Complex::new(cos, sin))
    }

    fn mean_closed_form(&self, _complement: f64) -> Option<Complex> {
        None
    }

    fn essential_range(&self) -> EssentialRange {
        EssentialRange::Circle {
            center: Complex::new(0.0, 0.0),
            radius: alpha().modulus,
        }
    }

    fn oscillatory_near_boundary(&self) -> bool {
        true
    }

    fn to_json(&self) -> Value {
        json!({ "kind": "gv" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn alpha_modulus_matches_gamma_identity() {
        // |int_0^1 (ln 1/r)^i dr| = |Gamma(1+i)| and |Gamma(1+i)|^2 = pi/sinh(pi).
        let expected = (PI.sinh() / PI).sqrt();
        let a = compute_alpha(1e-12).unwrap();
        assert!(
            (a.modulus - expected).abs() < 1e-9,
            "quadrature |alpha| = {}, Gamma identity gives {}",
            a.modulus,
            expected
        );
        assert!(a.modulus / 2f64.sqrt() > 1.0);
    }

    #[test]
    fn alpha_argument_is_reproducible() {
        let coarse = compute_alpha(1e-10).unwrap();
        let fine = compute_alpha(1e-13).unwrap();
        assert!(coarse.value.arg().is_finite());
        assert!((coarse.value.arg() - fine.value.arg()).abs() < 1e-9);
    }

    #[test]
    fn value_at_exp_minus_one_is_alpha() {
        // ln(1/r) = 1 there, and 1^i = 1.
        let s = GrudskyVasilevski;
        let v = s.evaluate((-1.0f64).exp()).unwrap();
        assert!((v - alpha().value).norm() < 1e-12);
    }

    #[test]
    fn modulus_is_constant_on_the_open_interval() {
        let s = GrudskyVasilevski;
        let mut seed = 42u64;
        for _ in 0..200 {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            let r = 1e-9 + (seed >> 11) as f64 / (1u64 << 53) as f64 * (1.0 - 2e-9);
            let v = s.evaluate(r).unwrap();
            assert!(
                (v.norm() - alpha().modulus).abs() < 1e-12,
                "modulus drifted at r = {r}"
            );
        }
    }

    #[test]
    fn rejects_singular_point() {
        assert!(GrudskyVasilevski.evaluate(0.0).is_err());
    }
}
