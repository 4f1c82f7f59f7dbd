//! Name-based symbol registry.
//!
//! Each symbol variant registers a factory under its `kind` name; the CLI
//! token grammar and the JSON schema both dispatch through the same table, so
//! adding a variant is one registration away from being selectable at
//! runtime.
//!
//! Token grammar: `gv`, `example10`, `constant:<complex>`, `power:<float>`,
//! `re:<token>`. Anything else is treated as a path to a JSON file under the
//! symbol schema `{"kind": ..., per-kind fields}` with complex numbers as
//! `{"re": ..., "im": ...}`.

use std::sync::{Arc, OnceLock};

use serde_json::Value;

use super::piecewise::piecewise_from_json;
use super::{
    complex_from_json, Affine, Complex, Constant, GrudskyVasilevski, Power, RealPart,
    StepExample10, SymbolError, SymbolRef,
};

type TokenFactory = fn(&SymbolRegistry, Option<&str>) -> Result<SymbolRef, SymbolError>;
type JsonFactory = fn(&SymbolRegistry, &Value) -> Result<SymbolRef, SymbolError>;

struct Entry {
    kind: &'static str,
    token: Option<TokenFactory>,
    json: JsonFactory,
}

/// Runtime registry of symbol variants, keyed by kind name.
pub struct SymbolRegistry {
    entries: Vec<Entry>,
}

impl SymbolRegistry {
    /// The registry with all built-in variants.
    pub fn builtin() -> &'static SymbolRegistry {
        static REGISTRY: OnceLock<SymbolRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| SymbolRegistry {
            entries: vec![
                Entry {
                    kind: "constant",
                    token: Some(|_, arg| {
                        let arg = require_arg("constant", arg)?;
                        Ok(Arc::new(Constant::new(parse_complex(arg)?)?))
                    }),
                    json: |_, v| {
                        let z = complex_from_json(field(v, "value")?)?;
                        Ok(Arc::new(Constant::new(z)?))
                    },
                },
                Entry {
                    kind: "power",
                    token: Some(|_, arg| {
                        let arg = require_arg("power", arg)?;
                        let p: f64 = arg.parse().map_err(|_| SymbolError::Parse {
                            input: arg.to_string(),
                            reason: "expected a floating-point exponent".into(),
                        })?;
                        Ok(Arc::new(Power::new(p)?))
                    }),
                    json: |_, v| {
                        let p = field(v, "exponent")?.as_f64().ok_or_else(|| {
                            SymbolError::Validation("exponent must be a number".into())
                        })?;
                        Ok(Arc::new(Power::new(p)?))
                    },
                },
                Entry {
                    kind: "gv",
                    token: Some(|_, arg| {
                        reject_arg("gv", arg)?;
                        Ok(Arc::new(GrudskyVasilevski))
                    }),
                    json: |_, _| Ok(Arc::new(GrudskyVasilevski)),
                },
                Entry {
                    kind: "example10",
                    token: Some(|_, arg| {
                        reject_arg("example10", arg)?;
                        Ok(Arc::new(StepExample10))
                    }),
                    json: |_, _| Ok(Arc::new(StepExample10)),
                },
                Entry {
                    kind: "piecewise",
                    token: None,
                    json: |_, v| Ok(Arc::new(piecewise_from_json(v)?)),
                },
                Entry {
                    kind: "affine",
                    token: None,
                    json: |reg, v| {
                        let a = complex_from_json(field(v, "a")?)?;
                        let b = complex_from_json(field(v, "b")?)?;
                        let inner = reg.from_json(field(v, "inner")?)?;
                        Ok(Arc::new(Affine::new(a, b, inner)?))
                    },
                },
                Entry {
                    kind: "re",
                    token: Some(|reg, arg| {
                        let arg = require_arg("re", arg)?;
                        Ok(Arc::new(RealPart::new(reg.parse_token(arg)?)))
                    }),
                    json: |reg, v| {
                        let inner = reg.from_json(field(v, "inner")?)?;
                        Ok(Arc::new(RealPart::new(inner)))
                    },
                },
            ],
        })
    }

    pub fn kinds(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.kind).collect()
    }

    /// Parses a CLI token such as `gv` or `constant:0.5+0.5i`.
    pub fn parse_token(&self, token: &str) -> Result<SymbolRef, SymbolError> {
        let (name, arg) = match token.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (token, None),
        };
        let entry = self
            .entries
            .iter()
            .find(|e| e.kind == name)
            .ok_or_else(|| SymbolError::Parse {
                input: token.to_string(),
                reason: format!(
                    "unknown symbol kind `{name}` (known: {})",
                    self.kinds().join(", ")
                ),
            })?;
        let factory = entry.token.ok_or_else(|| SymbolError::Parse {
            input: token.to_string(),
            reason: format!("kind `{name}` is only constructible from JSON"),
        })?;
        factory(self, arg)
    }

    /// Builds a symbol from a JSON value under the documented schema.
    pub fn from_json(&self, v: &Value) -> Result<SymbolRef, SymbolError> {
        let kind = v
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| SymbolError::Validation("symbol JSON needs a string `kind`".into()))?;
        let entry = self
            .entries
            .iter()
            .find(|e| e.kind == kind)
            .ok_or_else(|| {
                SymbolError::Validation(format!(
                    "unknown symbol kind `{kind}` (known: {})",
                    self.kinds().join(", ")
                ))
            })?;
        (entry.json)(self, v)
    }

    /// Loads a symbol from a builtin token or, failing that, a JSON file path.
    pub fn load(&self, source: &str) -> Result<SymbolRef, SymbolError> {
        match self.parse_token(source) {
            Ok(s) => Ok(s),
            Err(token_err) => {
                let path = std::path::Path::new(source);
                if !path.exists() {
                    return Err(token_err);
                }
                let text = std::fs::read_to_string(path).map_err(|e| SymbolError::Parse {
                    input: source.to_string(),
                    reason: format!("cannot read file: {e}"),
                })?;
                let value: Value = serde_json::from_str(&text).map_err(|e| SymbolError::Parse {
                    input: source.to_string(),
                    reason: format!("invalid JSON at line {}, column {}", e.line(), e.column()),
                })?;
                self.from_json(&value)
            }
        }
    }
}

fn field<'v>(v: &'v Value, name: &str) -> Result<&'v Value, SymbolError> {
    v.get(name)
        .ok_or_else(|| SymbolError::Validation(format!("symbol JSON missing field `{name}`")))
}

fn require_arg<'a>(kind: &str, arg: Option<&'a str>) -> Result<&'a str, SymbolError> {
    arg.ok_or_else(|| SymbolError::Parse {
        input: kind.to_string(),
        reason: format!("`{kind}` needs an argument, e.g. `{kind}:<value>`"),
    })
}

fn reject_arg(kind: &str, arg: Option<&str>) -> Result<(), SymbolError> {
    match arg {
        None => Ok(()),
        Some(a) => Err(SymbolError::Parse {
            input: format!("{kind}:{a}"),
            reason: format!("`{kind}` takes no argument"),
        }),
    }
}

/// Parses complex literals like `1`, `-2.5`, `i`, `-i`, `2i`, `1+2i`,
/// `0.5-0.5i`, `1e-3+2.5e2i`.
pub fn parse_complex(input: &str) -> Result<Complex, SymbolError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(SymbolError::Parse {
            input: input.to_string(),
            reason: "empty complex literal".into(),
        });
    }
    let bad = |reason: &str| SymbolError::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    };

    // Split at the last '+' or '-' that is not a leading sign and not part of
    // an exponent.
    let bytes = s.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx] as char;
        if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
            split = Some(idx);
            break;
        }
    }

    let parse_imag = |part: &str| -> Result<f64, SymbolError> {
        let body = &part[..part.len() - 1];
        match body {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => body.parse().map_err(|_| bad("invalid imaginary part")),
        }
    };

    if let Some(idx) = split {
        let (head, tail) = s.split_at(idx);
        if tail.ends_with('i') || tail.ends_with('I') {
            let re: f64 = head.parse().map_err(|_| bad("invalid real part"))?;
            return Ok(Complex::new(re, parse_imag(tail)?));
        }
        if head.ends_with('i') || head.ends_with('I') {
            return Err(bad("imaginary part must come last"));
        }
        // no imaginary unit anywhere: plain real with an interior sign (e.g. 1e-3)
    }
    if s.ends_with('i') || s.ends_with('I') {
        return Ok(Complex::new(0.0, parse_imag(&s)?));
    }
    let re: f64 = s.parse().map_err(|_| bad("invalid real literal"))?;
    Ok(Complex::new(re, 0.0))
}
