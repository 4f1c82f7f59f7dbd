//! Normalized Mellin coefficients `C_n(f) = (n+1) int_0^1 f(r) r^n dr`.
//!
//! Closed forms are taken from the symbol when it has them; the fallback (and
//! the independent cross-validation route) is adaptive quadrature in the
//! log-log coordinate: substituting `r = exp(-u/(n+1))` and then `u = e^v`
//! gives
//!
//! `C_n(f) = int_R f(exp(-e^v/(n+1))) e^{v - e^v} dv`,
//!
//! an integrand with exponential left decay and double-exponential right
//! decay, so the truncation window is certified for any bounded symbol. For
//! the oscillatory symbol the substitution also removes the oscillation: the
//! integrand becomes `alpha e^{i(v - ln(n+1))} e^{v - e^v}`.
//!
//! Tables are persisted as CSV keyed by a content fingerprint of the symbol;
//! a reload is bit-identical to a recompute for closed-form routes.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::numerics::{integrate_split, Complex, NumericsError};
use crate::output::format_f64;
use crate::symbols::RadialSymbol;

pub const CACHE_ENV: &str = "BEREZIN_LAB_CACHE";

#[derive(Debug, Error)]
pub enum CoeffError {
    #[error("numerics failure: {0}")]
    Numerics(#[from] NumericsError),
    #[error("symbol failure: {0}")]
    Symbol(#[from] crate::symbols::SymbolError),
    #[error("cache I/O failure at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Provenance of a coefficient value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    ClosedForm,
    Quadrature,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::ClosedForm => "closed",
            Route::Quadrature => "quad",
        })
    }
}

impl Route {
    fn parse(s: &str) -> Option<Route> {
        match s {
            "closed" => Some(Route::ClosedForm),
            "quad" => Some(Route::Quadrature),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientEntry {
    pub n: u64,
    pub value: Complex,
    pub modulus: f64,
    pub route: Route,
    pub error_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub fingerprint: String,
    pub tol: f64,
    pub entries: Vec<CoefficientEntry>,
}

/// One Mellin coefficient with provenance.
pub fn mellin_coefficient(
    s: &dyn RadialSymbol,
    n: u64,
    tol: f64,
) -> Result<CoefficientEntry, CoeffError> {
    if let Some(value) = s.mellin_closed_form(n) {
        let modulus = closed_form_modulus(s, n, value);
        return Ok(CoefficientEntry {
            n,
            value,
            modulus,
            route: Route::ClosedForm,
            error_estimate: 0.0,
        });
    }
    let q = mellin_quadrature(s, n, tol)?;
    Ok(CoefficientEntry {
        n,
        value: q.value,
        modulus: q.value.norm(),
        route: Route::Quadrature,
        error_estimate: q.error_estimate,
    })
}

/// Modulus of a closed-form coefficient, exact where the structure pins it
/// (unimodular phases stay exactly 1 instead of hypot-rounded).
fn closed_form_modulus(s: &dyn RadialSymbol, _n: u64, value: Complex) -> f64 {
    if s.kind() == "gv" {
        1.0
    } else {
        value.norm()
    }
}

/// The quadrature route, available for every symbol regardless of closed
/// forms; used for cross-validation.
pub fn mellin_quadrature(
    s: &dyn RadialSymbol,
    n: u64,
    tol: f64,
) -> Result<crate::numerics::QuadratureResult, CoeffError> {
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance { tol }.into());
    }
    let sup = s.sup_modulus();
    if sup == 0.0 {
        return Ok(crate::numerics::QuadratureResult {
            value: Complex::new(0.0, 0.0),
            error_estimate: 0.0,
            evaluations: 0,
        });
    }
    let scale = n as f64 + 1.0;
    let v_min = (tol / (4.0 * sup)).ln();
    let v_max = (4.0 * sup / tol).ln().ln() + 0.5;
    let largest_below_one = f64::from_bits(1.0f64.to_bits() - 1);

    let mut splits: Vec<f64> = Vec::new();
    for b in s.jump_radii() {
        // the jump at radius b lands at v = ln((n+1) ln(1/b))
        let u = scale * -(-(1.0 - b)).ln_1p();
        if u > 0.0 {
            let v = u.ln();
            if v > v_min && v < v_max {
                splits.push(v);
            }
        }
    }

    let integrand = |v: f64| -> Complex {
        let r = (-(v.exp()) / scale).exp().min(largest_below_one);
        match s.evaluate(r) {
            Ok(z) => z * (v - v.exp()).exp(),
            Err(_) => Complex::new(f64::NAN, f64::NAN),
        }
    };
    let mut res = integrate_split(integrand, v_min, v_max, &splits, tol / 2.0)?;
    res.error_estimate += tol / 2.0; // certified truncation tails
    Ok(res)
}

/// The odd-index coefficient subsequence `(C_{2n+1})_{n=0..n_max}`: the
/// eigenvalues of the radial Toeplitz operator in the monomial basis.
pub fn toeplitz_eigenvalues(
    s: &dyn RadialSymbol,
    n_max: u64,
    tol: f64,
) -> Result<Vec<Complex>, CoeffError> {
    (0..=n_max)
        .map(|n| mellin_coefficient(s, 2 * n + 1, tol).map(|e| e.value))
        .collect()
}

// ---------------------------------------------------------------------------
// Table persistence
// ---------------------------------------------------------------------------

/// Cache location; resolved from `BEREZIN_LAB_CACHE` (default `./.cache`) by
/// the CLI and passed explicitly everywhere else.
#[derive(Debug, Clone)]
pub struct CacheConfig {
    pub dir: PathBuf,
}

impl CacheConfig {
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(".cache"));
        Self { dir }
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    fn table_path(&self, fingerprint: &str, n_max: u64, tol: f64) -> PathBuf {
        self.dir
            .join(format!("{fingerprint}-N{n_max}-tol{tol:e}.csv"))
    }
}

/// FNV-1a over the canonical JSON form of the symbol; stable across runs and
/// platforms (serde_json object keys are ordered).
pub fn symbol_fingerprint(s: &dyn RadialSymbol) -> String {
    let text = s.to_json().to_string();
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in text.as_bytes() {
        hash ^= *byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

/// Coefficient table for `n = 0..=n_max`, persisted to the cache directory.
/// A cache hit with inconsistent content (wrong shape, unparsable rows) is
/// treated as corrupt: the table is recomputed and the file overwritten.
pub fn coefficient_table(
    s: &dyn RadialSymbol,
    n_max: u64,
    tol: f64,
    cache: &CacheConfig,
) -> Result<CoefficientTable, CoeffError> {
    let fingerprint = symbol_fingerprint(s);
    let path = cache.table_path(&fingerprint, n_max, tol);
    if path.exists() {
        if let Ok(table) = load_table(&path, &fingerprint, n_max, tol) {
            return Ok(table);
        }
    }
    let entries: Vec<CoefficientEntry> = (0..=n_max)
        .map(|n| mellin_coefficient(s, n, tol))
        .collect::<Result<_, _>>()?;
    let table = CoefficientTable {
        fingerprint,
        tol,
        entries,
    };
    save_table(&table, &path)?;
    Ok(table)
}

pub fn table_csv(table: &CoefficientTable) -> String {
    let mut out = String::from("n,re,im,abs,route,err\n");
    for e in &table.entries {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.n,
            format_f64(e.value.re),
            format_f64(e.value.im),
            format_f64(e.modulus),
            e.route,
            format_f64(e.error_estimate),
        ));
    }
    out
}

fn save_table(table: &CoefficientTable, path: &Path) -> Result<(), CoeffError> {
    let io_err = |source: std::io::Error| CoeffError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    // write-temp-then-rename so concurrent writers of the same key race
    // benignly on identical content
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut file = fs::File::create(&tmp).map_err(io_err)?;
        file.write_all(table_csv(table).as_bytes())
            .map_err(io_err)?;
    }
    fs::rename(&tmp, path).map_err(io_err)?;
    Ok(())
}

#[derive(Debug)]
struct CorruptTable;

fn load_table(
    path: &Path,
    fingerprint: &str,
    n_max: u64,
    tol: f64,
) -> Result<CoefficientTable, CorruptTable> {
    let text = fs::read_to_string(path).map_err(|_| CorruptTable)?;
    let mut lines = text.lines();
    if lines.next() != Some("n,re,im,abs,route,err") {
        return Err(CorruptTable);
    }
    let mut entries = Vec::with_capacity(n_max as usize + 1);
    for (idx, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(CorruptTable);
        }
        let n: u64 = cols[0].parse().map_err(|_| CorruptTable)?;
        if n != idx as u64 {
            return Err(CorruptTable);
        }
        let field = |text: &str| -> Result<f64, CorruptTable> {
            let x: f64 = text.parse().map_err(|_| CorruptTable)?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(CorruptTable)
            }
        };
        entries.push(CoefficientEntry {
            n,
            value: Complex::new(field(cols[1])?, field(cols[2])?),
            modulus: field(cols[3])?,
            route: Route::parse(cols[4]).ok_or(CorruptTable)?,
            error_estimate: field(cols[5])?,
        });
    }
    if entries.len() != n_max as usize + 1 {
        return Err(CorruptTable);
    }
    Ok(CoefficientTable {
        fingerprint: fingerprint.to_string(),
        tol,
        entries,
    })
}
