//! Constant and power symbols, plus the affine and real-part combinators.

use serde_json::{json, Value};

use super::{
    check_domain, complex_to_json, Complex, EssentialRange, RadialSymbol, SymbolError, SymbolRef,
};

/// `r -> c`.
#[derive(Debug, Clone)]
pub struct Constant {
    pub value: Complex,
}

impl Constant {
    pub fn new(value: Complex) -> Result<Self, SymbolError> {
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(SymbolError::Validation("constant must be finite".into()));
        }
        Ok(Self { value })
    }
}

impl RadialSymbol for Constant {
    fn kind(&self) -> &'static str {
        "constant"
    }

    fn describe(&self) -> String {
        format!("constant {}", self.value)
    }

    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        check_domain(r)?;
        Ok(self.value)
    }

    fn evaluate_loglog(&self, _v: f64) -> Option<Complex> {
        Some(self.value)
    }

    fn sup_modulus(&self) -> f64 {
        self.value.norm()
    }

    fn is_real_valued(&self) -> bool {
        self.value.im == 0.0
    }

    fn mellin_closed_form(&self, _n: u64) -> Option<Complex> {
        Some(self.value)
    }

    fn mean_closed_form(&self, _complement: f64) -> Option<Complex> {
        Some(self.value)
    }

    fn essential_range(&self) -> EssentialRange {
        EssentialRange::FinitePoints(vec![self.value])
    }

    fn to_json(&self) -> Value {
        json!({ "kind": "constant", "value": complex_to_json(self.value) })
    }
}

/// `r -> r^p` with `p >= 0`.
#[derive(Debug, Clone)]
pub struct Power {
    pub exponent: f64,
}

impl Power {
    pub fn new(exponent: f64) -> Result<Self, SymbolError> {
        if !(exponent >= 0.0) || !exponent.is_finite() {
            return Err(SymbolError::Validation(format!(
                "power exponent must be finite and >= 0, got {exponent}"
            )));
        }
        Ok(Self { exponent })
    }
}

impl RadialSymbol for Power {
    fn kind(&self) -> &'static str {
        "power"
    }

    fn describe(&self) -> String {
        format!("power r^{}", self.exponent)
    }

    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        check_domain(r)?;
        Ok(Complex::new(r.powf(self.exponent), 0.0))
    }

    fn sup_modulus(&self) -> f64 {
        1.0
    }

    fn is_real_valued(&self) -> bool {
        true
    }

    fn mellin_closed_form(&self, n: u64) -> Option<Complex> {
        let nf = n as f64;
        Some(Complex::new((nf + 1.0) / (nf + self.exponent + 1.0), 0.0))
    }

    fn mean_closed_form(&self, complement: f64) -> Option<Complex> {
        // (1 - eps^{p+1}) / ((1-eps)(p+1)) via expm1/ln_1p, stable for tiny
        // complements.
        let p1 = self.exponent + 1.0;
        let one_minus_pow = -(p1 * (-complement).ln_1p()).exp_m1();
        Some(Complex::new(one_minus_pow / (complement * p1), 0.0))
    }

    fn essential_range(&self) -> EssentialRange {
        if self.exponent == 0.0 {
            EssentialRange::FinitePoints(vec![Complex::new(1.0, 0.0)])
        } else {
            EssentialRange::Segment(Complex::new(0.0, 0.0), Complex::new(1.0, 0.0))
        }
    }

    fn to_json(&self) -> Value {
        json!({ "kind": "power", "exponent": self.exponent })
    }
}

/// `r -> a * inner(r) + b`.
#[derive(Debug, Clone)]
pub struct Affine {
    pub a: Complex,
    pub b: Complex,
    pub inner: SymbolRef,
}

impl Affine {
    pub fn new(a: Complex, b: Complex, inner: SymbolRef) -> Result<Self, SymbolError> {
        for z in [a, b] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(SymbolError::Validation(
                    "affine coefficients must be finite".into(),
                ));
            }
        }
        Ok(Self { a, b, inner })
    }
}

impl RadialSymbol for Affine {
    fn kind(&self) -> &'static str {
        "affine"
    }

    fn describe(&self) -> String {
        format!("({}) * [{}] + ({})", self.a, self.inner.describe(), self.b)
    }

    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        Ok(self.a * self.inner.evaluate(r)? + self.b)
    }

    fn evaluate_loglog(&self, v: f64) -> Option<Complex> {
        self.inner.evaluate_loglog(v).map(|z| self.a * z + self.b)
    }

    fn sup_modulus(&self) -> f64 {
        self.a.norm() * self.inner.sup_modulus() + self.b.norm()
    }

    fn is_real_valued(&self) -> bool {
        self.a.im == 0.0 && self.b.im == 0.0 && self.inner.is_real_valued()
    }

    fn mellin_closed_form(&self, n: u64) -> Option<Complex> {
        self.inner
            .mellin_closed_form(n)
            .map(|c| self.a * c + self.b)
    }

    fn mean_closed_form(&self, complement: f64) -> Option<Complex> {
        self.inner
            .mean_closed_form(complement)
            .map(|m| self.a * m + self.b)
    }

    fn essential_range(&self) -> EssentialRange {
        let map = |z: Complex| self.a * z + self.b;
        match self.inner.essential_range() {
            EssentialRange::FinitePoints(pts) => {
                EssentialRange::FinitePoints(pts.into_iter().map(map).collect())
            }
            EssentialRange::Segment(p, q) => EssentialRange::Segment(map(p), map(q)),
            EssentialRange::Circle { center, radius } => EssentialRange::Circle {
                center: map(center),
                radius: self.a.norm() * radius,
            },
        }
    }

    fn jump_radii(&self) -> Vec<f64> {
        self.inner.jump_radii()
    }

    fn oscillatory_near_boundary(&self) -> bool {
        self.inner.oscillatory_near_boundary()
    }

    fn to_json(&self) -> Value {
        json!({
            "kind": "affine",
            "a": complex_to_json(self.a),
            "b": complex_to_json(self.b),
            "inner": self.inner.to_json(),
        })
    }
}

/// `r -> Re(inner(r))`.
#[derive(Debug, Clone)]
pub struct RealPart {
    pub inner: SymbolRef,
}

impl RealPart {
    pub fn new(inner: SymbolRef) -> Self {
        Self { inner }
    }
}

impl RadialSymbol for RealPart {
    fn kind(&self) -> &'static str {
        "re"
    }

    fn describe(&self) -> String {
        format!("Re[{}]", self.inner.describe())
    }

    fn evaluate(&self, r: f64) -> Result<Complex, SymbolError> {
        Ok(Complex::new(self.inner.evaluate(r)?.re, 0.0))
    }

    fn evaluate_loglog(&self, v: f64) -> Option<Complex> {
        self.inner
            .evaluate_loglog(v)
            .map(|z| Complex::new(z.re, 0.0))
    }

    fn sup_modulus(&self) -> f64 {
        // sup |Re f| <= sup |f|; attained for the oscillatory variants whose
        // phase is dense, exact anyway as an upper bound.
        self.inner.sup_modulus()
    }

    fn is_real_valued(&self) -> bool {
        true
    }

    // The Mellin weight r^n is real, so C_n(Re f) = Re C_n(f); same for means.
    fn mellin_closed_form(&self, n: u64) -> Option<Complex> {
        self.inner
            .mellin_closed_form(n)
            .map(|c| Complex::new(c.re, 0.0))
    }

    fn mean_closed_form(&self, complement: f64) -> Option<Complex> {
        self.inner
            .mean_closed_form(complement)
            .map(|m| Complex::new(m.re, 0.0))
    }

    fn essential_range(&self) -> EssentialRange {
        let re = |z: Complex| Complex::new(z.re, 0.0);
        match self.inner.essential_range() {
            EssentialRange::FinitePoints(pts) => {
                EssentialRange::FinitePoints(pts.into_iter().map(re).collect())
            }
            EssentialRange::Segment(p, q) => EssentialRange::Segment(re(p), re(q)),
            EssentialRange::Circle { center, radius } => EssentialRange::Segment(
                Complex::new(center.re - radius, 0.0),
                Complex::new(center.re + radius, 0.0),
            ),
        }
    }

    fn jump_radii(&self) -> Vec<f64> {
        self.inner.jump_radii()
    }

    fn oscillatory_near_boundary(&self) -> bool {
        self.inner.oscillatory_near_boundary()
    }

    fn to_json(&self) -> Value {
        json!({ "kind": "re", "inner": self.inner.to_json() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn constant_evaluates_everywhere_inside() {
        let s = Constant::new(Complex::new(0.5, 0.0)).unwrap();
        assert_eq!(s.evaluate(0.3).unwrap(), Complex::new(0.5, 0.0));
        assert!(s.evaluate(0.0).is_err());
        assert!(s.evaluate(1.0).is_err());
    }

    #[test]
    fn power_closed_forms() {
        let s = Power::new(1.0).unwrap();
        assert!((s.mellin_closed_form(3).unwrap().re - 0.8).abs() < 1e-15);
        // mean of r over [eps, 1] is (1 + eps)/2
        let m = s.mean_closed_form(0.25).unwrap().re;
        assert!((m - 0.875).abs() < 1e-14, "got {m}");
    }

    #[test]
    fn sup_modulus_per_variant() {
        use crate::symbols::{alpha, GrudskyVasilevski, StepExample10};
        assert_eq!(
            Constant::new(Complex::new(0.0, 3.0)).unwrap().sup_modulus(),
            3.0
        );
        assert_eq!(GrudskyVasilevski.sup_modulus(), alpha().modulus);
        assert_eq!(StepExample10.sup_modulus(), 1.0);
        let affine = Affine::new(
            Complex::new(0.0, 2.0),
            Complex::new(1.0, 0.0),
            Arc::new(StepExample10),
        )
        .unwrap();
        assert_eq!(affine.sup_modulus(), 3.0); // |a| sup + |b| upper bound
    }

    #[test]
    fn affine_is_pointwise_affine() {
        let inner: SymbolRef = Arc::new(Power::new(2.0).unwrap());
        let s = Affine::new(
            Complex::new(2.0, 1.0),
            Complex::new(-0.5, 0.25),
            inner.clone(),
        )
        .unwrap();
        let mut seed = 17u64;
        for _ in 0..50 {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let r = 1e-6 + (seed >> 11) as f64 / (1u64 << 53) as f64 * (1.0 - 2e-6);
            let lhs = s.evaluate(r).unwrap();
            let rhs =
                Complex::new(2.0, 1.0) * inner.evaluate(r).unwrap() + Complex::new(-0.5, 0.25);
            assert_eq!(lhs, rhs);
        }
    }
}
