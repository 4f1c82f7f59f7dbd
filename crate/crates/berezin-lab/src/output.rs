//! Deterministic CSV/JSON emission shared by the CLI and the cache.

use serde_json::{json, Value};

use crate::numerics::Complex;

/// 17 significant digits: round-trips every f64 and keeps output
/// byte-identical across runs.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex_json(z: Complex) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// The top-level JSON report envelope.
pub fn envelope(subcommand: &str, config: Value, data: Value) -> Value {
    json!({
        "tool": "berezin-lab",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "config": config,
        "data": data,
    })
}

/// Renders a CSV table with LF line endings.
pub fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
