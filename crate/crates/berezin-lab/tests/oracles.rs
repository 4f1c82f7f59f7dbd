//! Cross-route validations that pit each evaluator against an independent
//! implementation: a Lanczos complex Gamma for the normalization constant,
//! exact piecewise closed forms against the log-log quadrature route, and
//! the defining-integral oracle against the series on symbols outside the
//! acceptance battery.

use std::sync::Arc;

use berezin_lab::berezin::{berezin_integral_oracle, berezin_radial};
use berezin_lab::cluster::{boundary_mean, BoundaryEps};
use berezin_lab::coefficients::mellin_quadrature;
use berezin_lab::numerics::Complex;
use berezin_lab::symbols::{
    compute_alpha, EssentialRange, PiecewiseConstant, RadialSymbol, StepExample10, SymbolError,
};

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

/// Lanczos approximation (g = 7, n = 9) for the complex Gamma function;
/// test-only, independent of everything in the crate. Coefficients as
/// published, beyond f64 precision.
#[allow(clippy::excessive_precision)]
fn lanczos_gamma(z: Complex) -> Complex {
    const COEFFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    let z = z - 1.0;
    let mut x = Complex::new(COEFFS[0], 0.0);
    for (i, coeff) in COEFFS.iter().enumerate().skip(1) {
        x += coeff / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powc(z + 0.5) * (-t).exp() * x
}

#[test]
fn alpha_matches_the_lanczos_gamma_reciprocal() {
    // The defining integral int_0^1 (ln 1/r)^i dr is Gamma(1 + i), so alpha
    // must equal its reciprocal, phase included.
    let oracle = lanczos_gamma(c(1.0, 1.0)).finv();
    let a = compute_alpha(1e-12).unwrap();
    let diff = (a.value - oracle).norm();
    assert!(
        diff < 1e-9,
        "alpha {} vs Lanczos reciprocal {} (diff {diff:e})",
        a.value,
        oracle
    );
}

/// A step symbol with the closed forms switched off, so every evaluation is
/// forced through the shared quadrature routes.
#[derive(Debug)]
struct OpaqueStep(StepExample10);

impl RadialSymbol for OpaqueStep {
    fn kind(&self) -> &'static str {
        "opaque-step"
    }
    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        self.0.evaluate(r)
    }
    fn sup_modulus(&self) -> f64 {
        self.0.sup_modulus()
    }
    fn is_real_valued(&self) -> bool {
        true
    }
    fn mellin_closed_form(&self, _n: u64) -> Option<Complex> {
        None
    }
    fn mean_closed_form(&self, _complement: f64) -> Option<Complex> {
        None
    }
    fn essential_range(&self) -> EssentialRange {
        self.0.essential_range()
    }
    fn jump_radii(&self) -> Vec<f64> {
        self.0.jump_radii()
    }
    fn to_json(&self) -> serde_json::Value {
        self.0.to_json()
    }
}

#[test]
fn quadrature_mean_route_matches_exact_piecewise_sums() {
    let exact = StepExample10;
    let opaque = OpaqueStep(StepExample10);
    for k in [4i32, 9, 16] {
        let eps = BoundaryEps::from_complement(2f64.powi(-k)).unwrap();
        let closed = boundary_mean(&exact, eps, 1e-10).unwrap();
        let quad = boundary_mean(&opaque, eps, 1e-8).unwrap();
        let diff = (closed - quad).norm();
        assert!(
            diff < 1e-7,
            "complement 2^-{k}: closed {closed} vs quadrature {quad} (diff {diff:e})"
        );
    }
}

#[test]
fn quadrature_coefficient_route_matches_exact_piecewise_sums() {
    let exact = StepExample10;
    let opaque = OpaqueStep(StepExample10);
    for n in [0u64, 3, 17, 200, 4097] {
        let closed = exact.mellin_closed_form(n).unwrap();
        let quad = mellin_quadrature(&opaque, n, 1e-10).unwrap();
        let diff = (closed - quad.value).norm();
        assert!(
            diff < 1e-8,
            "n = {n}: closed {closed} vs quadrature {} (diff {diff:e})",
            quad.value
        );
    }
}

#[test]
fn series_matches_oracle_for_a_complex_piecewise_symbol() {
    let s = PiecewiseConstant::new(
        vec![0.0, 0.3, 0.8, 1.0],
        vec![c(0.8, 0.1), c(-0.2, 0.7), c(0.5, -0.5)],
    )
    .unwrap();
    for r in [0.0, 0.4, 0.85] {
        let series = berezin_radial(&s, r, 1e-11).unwrap();
        let oracle = berezin_integral_oracle(&s, 0, c(r, 0.0), 1e-8).unwrap();
        let diff = (series.value - oracle.value).norm();
        assert!(
            diff < 1e-6,
            "R = {r}: series {} vs oracle {} (diff {diff:e})",
            series.value,
            oracle.value
        );
    }
}

#[test]
fn oracle_accepts_off_axis_points_for_radial_symbols() {
    // radial symbols have rotation-invariant transforms: the oracle value at
    // z = R e^{i theta} must match the series value at R
    let s = Arc::new(
        PiecewiseConstant::new(vec![0.0, 0.5, 1.0], vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap(),
    );
    let series = berezin_radial(s.as_ref(), 0.6, 1e-11).unwrap();
    for theta in [0.7, 2.4, -1.1] {
        let z = Complex::from_polar(0.6, theta);
        let oracle = berezin_integral_oracle(s.as_ref(), 0, z, 1e-8).unwrap();
        let diff = (series.value - oracle.value).norm();
        assert!(diff < 1e-6, "theta = {theta}: diff {diff:e}");
    }
}
