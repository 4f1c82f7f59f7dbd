//! Command-line frontend: symbol ingestion, one subcommand per boundary
//! quantity, deterministic CSV/JSON emission.
//!
//! Exit codes: 0 success, 1 numerical failure (the offending operation is
//! named on stderr), 2 argument errors, 3 acceptance-suite failure.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::berezin::berezin_radial;
use crate::cluster::{
    boundary_mean, cluster_estimate, density_ratio, verify_chain, BoundaryEps, ChainConfig,
    ClusterEstimate, ClusterKind, Schedule,
};
use crate::coefficients::{coefficient_table, table_csv, CacheConfig};
use crate::output::{complex_json, csv_table, envelope, format_f64};
use crate::symbols::registry::{parse_complex, SymbolRegistry};
use crate::symbols::SymbolRef;

pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Parser)]
#[command(
    name = "berezin-lab",
    version,
    about = "Boundary quantities of radial Bergman-Toeplitz symbols: Mellin coefficients, Berezin transform, boundary means, cluster sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Mellin,
    Mean,
    Berezin,
}

impl From<KindArg> for ClusterKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Mellin => ClusterKind::Mellin,
            KindArg::Mean => ClusterKind::Mean,
            KindArg::Berezin => ClusterKind::Berezin,
        }
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Mellin coefficient table C_0..C_N (cached under BEREZIN_LAB_CACHE).
    Coeffs {
        /// Builtin token (gv, example10, constant:<c>, power:<p>, re:<token>)
        /// or path to a symbol JSON file.
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Berezin transform on a radius grid.
    Berezin {
        #[arg(long)]
        symbol: String,
        /// Grid spec: `lo:hi:log[:count]`, `lo:hi:lin[:count]` or
        /// `dyadic:kmin:kmax` (radii 1 - 2^-k).
        #[arg(long, default_value = "dyadic:4:20")]
        r_grid: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Boundary means along a schedule.
    Means {
        #[arg(long)]
        symbol: String,
        /// Schedule spec: `decades:K` (complements 10^-k), `even-dyadic:N`
        /// (complements 2^-(2n)^2), `odd-dyadic:N` (2^-(2n+1)^2) or
        /// `phase:PHI:KMAX` (complements of exp(-e^-(PHI+2 pi k))).
        #[arg(long, default_value = "decades:6")]
        schedule: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Counting data p_N = #{n <= N : |C_{2n+1} - L| > eps}.
    Density {
        #[arg(long)]
        symbol: String,
        /// Candidate limit point, e.g. `1+0i`.
        #[arg(long = "L")]
        l: String,
        #[arg(long)]
        eps: f64,
        #[arg(long = "N", default_value_t = 1_000_000)]
        n_max: u64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Sample one quantity along a boundary schedule and cover its tail.
    Cluster {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        symbol: String,
        /// Mellin: sample n = 0..=n_max.
        #[arg(long)]
        n_max: Option<u64>,
        /// Mean schedule spec (see `means --schedule`).
        #[arg(long)]
        schedule: Option<String>,
        /// Berezin grid spec (see `berezin --r-grid`).
        #[arg(long)]
        r_grid: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Grid suprema of the three quantities and their ordering.
    Chain {
        #[arg(long)]
        symbol: String,
        /// Override the dense coefficient scan bound.
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the acceptance suite; one line per criterion, exit 3 on failure.
    Verify,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numerical(op: &str, err: impl std::fmt::Display) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: format!("{op}: {err}"),
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn load_symbol(source: &str) -> Result<SymbolRef, Failure> {
    SymbolRegistry::builtin()
        .load(source)
        .map_err(|e| Failure::usage(format!("--symbol {source}: {e}")))
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text).map_err(|e| Failure {
            code: EXIT_NUMERICAL,
            message: format!("cannot write {}: {e}", path.display()),
        }),
    }
}

fn execute(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Coeffs {
            symbol,
            n_max,
            tol,
            format,
            output,
        } => {
            let s = load_symbol(&symbol)?;
            let cache = CacheConfig::from_env();
            let table = coefficient_table(s.as_ref(), n_max, tol, &cache)
                .map_err(|e| Failure::numerical("coeffs", e))?;
            let text = match format {
                Format::Csv => table_csv(&table),
                Format::Json => {
                    let rows: Vec<Value> = table
                        .entries
                        .iter()
                        .map(|e| {
                            json!({
                                "n": e.n,
                                "re": e.value.re,
                                "im": e.value.im,
                                "abs": e.modulus,
                                "route": e.route.to_string(),
                                "err": e.error_estimate,
                            })
                        })
                        .collect();
                    let body = envelope(
                        "coeffs",
                        json!({"symbol": s.to_json(), "n_max": n_max, "tol": tol,
                               "fingerprint": table.fingerprint}),
                        json!(rows),
                    );
                    format!("{body}\n")
                }
            };
            emit(output.as_ref(), &text)?;
            Ok(0)
        }

        Command::Berezin {
            symbol,
            r_grid,
            tol,
            format,
            output,
        } => {
            let s = load_symbol(&symbol)?;
            let radii = parse_r_grid(&r_grid)?;
            let mut rows = Vec::new();
            for r in &radii {
                let v = berezin_radial(s.as_ref(), *r, tol)
                    .map_err(|e| Failure::numerical("berezin", e))?;
                rows.push((*r, v));
            }
            let text = match format {
                Format::Csv => csv_table(
                    "R,re,im,abs",
                    rows.iter().map(|(r, v)| {
                        vec![
                            format_f64(*r),
                            format_f64(v.value.re),
                            format_f64(v.value.im),
                            format_f64(v.value.norm()),
                        ]
                    }),
                ),
                Format::Json => {
                    let data: Vec<Value> = rows
                        .iter()
                        .map(|(r, v)| {
                            json!({
                                "R": r,
                                "value": complex_json(v.value),
                                "abs": v.value.norm(),
                                "tail_bound": v.tail_bound,
                                "terms_used": v.terms_used,
                            })
                        })
                        .collect();
                    let body = envelope(
                        "berezin",
                        json!({"symbol": s.to_json(), "r_grid": r_grid, "tol": tol}),
                        json!(data),
                    );
                    format!("{body}\n")
                }
            };
            emit(output.as_ref(), &text)?;
            Ok(0)
        }

        Command::Means {
            symbol,
            schedule,
            tol,
            format,
            output,
        } => {
            let s = load_symbol(&symbol)?;
            let points = parse_mean_schedule(&schedule)?;
            let mut rows = Vec::new();
            for eps in &points {
                let m = boundary_mean(s.as_ref(), *eps, tol)
                    .map_err(|e| Failure::numerical("means", e))?;
                rows.push((*eps, m));
            }
            let text = match format {
                Format::Csv => csv_table(
                    "complement,epsilon,re,im,abs",
                    rows.iter().map(|(eps, m)| {
                        vec![
                            format_f64(eps.complement()),
                            format_f64(eps.epsilon()),
                            format_f64(m.re),
                            format_f64(m.im),
                            format_f64(m.norm()),
                        ]
                    }),
                ),
                Format::Json => {
                    let data: Vec<Value> = rows
                        .iter()
                        .map(|(eps, m)| {
                            json!({
                                "complement": eps.complement(),
                                "epsilon": eps.epsilon(),
                                "value": complex_json(*m),
                                "abs": m.norm(),
                            })
                        })
                        .collect();
                    let body = envelope(
                        "means",
                        json!({"symbol": s.to_json(), "schedule": schedule, "tol": tol}),
                        json!(data),
                    );
                    format!("{body}\n")
                }
            };
            emit(output.as_ref(), &text)?;
            Ok(0)
        }

        Command::Density {
            symbol,
            l,
            eps,
            n_max,
            tol,
            format,
            output,
        } => {
            let s = load_symbol(&symbol)?;
            let l = parse_complex(&l).map_err(|e| Failure::usage(format!("--L: {e}")))?;
            let report = density_ratio(s.as_ref(), l, eps, n_max, tol)
                .map_err(|e| Failure::numerical("density", e))?;
            let text = match format {
                Format::Csv => csv_table(
                    "N,p,ratio",
                    report.counts.iter().map(|(n, p)| {
                        vec![
                            n.to_string(),
                            p.to_string(),
                            format_f64(*p as f64 / *n as f64),
                        ]
                    }),
                ),
                Format::Json => {
                    let body = envelope(
                        "density",
                        json!({"symbol": s.to_json(), "L": complex_json(l), "eps": eps,
                               "N": n_max, "tol": tol}),
                        json!({
                            "counts": report.counts.iter()
                                .map(|(n, p)| json!({"N": n, "p": p, "ratio": *p as f64 / *n as f64}))
                                .collect::<Vec<_>>(),
                            "ratio_floor": report.ratio_floor,
                        }),
                    );
                    format!("{body}\n")
                }
            };
            emit(output.as_ref(), &text)?;
            Ok(0)
        }

        Command::Cluster {
            kind,
            symbol,
            n_max,
            schedule,
            r_grid,
            delta,
            tol,
            format,
            output,
        } => {
            let s = load_symbol(&symbol)?;
            let sched = match kind {
                KindArg::Mellin => {
                    let n = n_max.ok_or_else(|| Failure::usage("--kind mellin needs --n-max"))?;
                    Schedule::mellin_range(n)
                }
                KindArg::Mean => {
                    let spec = schedule
                        .as_deref()
                        .ok_or_else(|| Failure::usage("--kind mean needs --schedule"))?;
                    Schedule::Mean(parse_mean_schedule(spec)?)
                }
                KindArg::Berezin => {
                    let spec = r_grid
                        .as_deref()
                        .ok_or_else(|| Failure::usage("--kind berezin needs --r-grid"))?;
                    Schedule::Berezin(parse_r_grid(spec)?)
                }
            };
            let est = cluster_estimate(s.as_ref(), &sched, delta, tol)
                .map_err(|e| Failure::numerical("cluster", e))?;
            let text = match format {
                Format::Csv => cluster_csv(&est),
                Format::Json => {
                    let body = envelope(
                        "cluster",
                        json!({"symbol": s.to_json(), "kind": est.kind.to_string(),
                               "delta": delta, "tol": tol, "schedule": est.schedule}),
                        cluster_json(&est),
                    );
                    format!("{body}\n")
                }
            };
            emit(output.as_ref(), &text)?;
            Ok(0)
        }

        Command::Chain {
            symbol,
            n_max,
            tol,
            format,
            output,
        } => {
            let s = load_symbol(&symbol)?;
            let mut config = ChainConfig {
                tol,
                ..ChainConfig::default()
            };
            if let Some(n) = n_max {
                config.mellin_n_max = n;
                config.mellin_n_max_quadrature = n.min(config.mellin_n_max_quadrature);
            }
            let report =
                verify_chain(s.as_ref(), &config).map_err(|e| Failure::numerical("chain", e))?;
            let nesting_row = report
                .nesting
                .as_ref()
                .map(|n| n.ok.to_string())
                .unwrap_or_else(|| "n/a".into());
            let text = match format {
                Format::Csv => csv_table(
                    "metric,value",
                    vec![
                        vec!["sup_berezin".into(), format_f64(report.sup_berezin)],
                        vec!["sup_mellin".into(), format_f64(report.sup_mellin)],
                        vec!["sup_mean".into(), format_f64(report.sup_mean)],
                        vec!["sup_modulus".into(), format_f64(report.sup_modulus)],
                        vec!["ordering_ok".into(), report.ordering_ok.to_string()],
                        vec!["nesting_ok".into(), nesting_row],
                    ],
                ),
                Format::Json => {
                    let body = envelope(
                        "chain",
                        json!({"symbol": s.to_json(), "tol": tol,
                               "mellin_grid": report.mellin_grid,
                               "r_grid": report.r_grid, "eps_grid": report.eps_grid}),
                        json!({
                            "sup_berezin": report.sup_berezin,
                            "argmax_radius": report.argmax_radius,
                            "sup_mellin": report.sup_mellin,
                            "argmax_index": report.argmax_index,
                            "sup_mean": report.sup_mean,
                            "argmax_complement": report.argmax_complement,
                            "sup_modulus": report.sup_modulus,
                            "ordering_ok": report.ordering_ok,
                            "nesting": report.nesting.as_ref().map(|n| json!({
                                "delta": n.delta,
                                "berezin_in_mellin": n.berezin_in_mellin,
                                "mellin_in_mean": n.mellin_in_mean,
                                "ok": n.ok,
                            })),
                        }),
                    );
                    format!("{body}\n")
                }
            };
            emit(output.as_ref(), &text)?;
            Ok(0)
        }

        Command::Verify => {
            let outcomes = crate::verify::run_all();
            let mut failed = 0;
            for o in &outcomes {
                println!("{}", o.line());
                if !o.passed {
                    failed += 1;
                }
            }
            println!(
                "verify: {}/{} criteria passed",
                outcomes.len() - failed,
                outcomes.len()
            );
            Ok(if failed == 0 { 0 } else { EXIT_VERIFY })
        }
    }
}

fn cluster_csv(est: &ClusterEstimate) -> String {
    csv_table(
        "param,re,im,abs",
        est.samples.iter().map(|(p, z)| {
            vec![
                format_f64(*p),
                format_f64(z.re),
                format_f64(z.im),
                format_f64(z.norm()),
            ]
        }),
    )
}

fn cluster_json(est: &ClusterEstimate) -> Value {
    json!({
        "tail_start": est.tail_start,
        "tail_limsup_modulus": est.tail_limsup_modulus,
        "tail_liminf_modulus": est.tail_liminf_modulus,
        "delta": est.delta,
        "cluster_points": est.cluster_points.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
        "samples": est.samples.iter()
            .map(|(p, z)| json!({"param": p, "re": z.re, "im": z.im}))
            .collect::<Vec<_>>(),
    })
}

/// `lo:hi:log[:count]`, `lo:hi:lin[:count]` or `dyadic:kmin:kmax`.
fn parse_r_grid(spec: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::usage(format!("invalid --r-grid `{spec}`"));
    match parts.as_slice() {
        ["dyadic", kmin, kmax] => {
            let kmin: u32 = kmin.parse().map_err(|_| bad())?;
            let kmax: u32 = kmax.parse().map_err(|_| bad())?;
            if kmin > kmax || kmax > 52 {
                return Err(bad());
            }
            match Schedule::berezin_dyadic(kmin, kmax) {
                Schedule::Berezin(v) => Ok(v),
                _ => unreachable!(),
            }
        }
        [lo, hi, mode] | [lo, hi, mode, _] => {
            let lo: f64 = lo.parse().map_err(|_| bad())?;
            let hi: f64 = hi.parse().map_err(|_| bad())?;
            let count: usize = match parts.get(3) {
                Some(c) => c.parse().map_err(|_| bad())?,
                None => 32,
            };
            if !(0.0..1.0).contains(&lo) || !(0.0..1.0).contains(&hi) || lo >= hi || count < 2 {
                return Err(bad());
            }
            match *mode {
                "log" => match Schedule::berezin_log_grid(lo, hi, count) {
                    Schedule::Berezin(v) => Ok(v),
                    _ => unreachable!(),
                },
                "lin" => Ok((0..count)
                    .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                    .collect()),
                _ => Err(bad()),
            }
        }
        _ => Err(bad()),
    }
}

/// `decades:K`, `even-dyadic:N`, `odd-dyadic:N` or `phase:PHI:KMAX`.
fn parse_mean_schedule(spec: &str) -> Result<Vec<BoundaryEps>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::usage(format!("invalid --schedule `{spec}`"));
    let unwrap_mean = |s: Schedule| match s {
        Schedule::Mean(v) => v,
        _ => unreachable!(),
    };
    match parts.as_slice() {
        ["decades", k] => {
            let k: u32 = k.parse().map_err(|_| bad())?;
            if k == 0 || k > 300 {
                return Err(bad());
            }
            Ok(unwrap_mean(Schedule::mean_decades(k)))
        }
        ["even-dyadic", n] => {
            let n: u32 = n.parse().map_err(|_| bad())?;
            if n == 0 || n > 16 {
                return Err(bad());
            }
            Ok(unwrap_mean(Schedule::mean_dyadic_even(n)))
        }
        ["odd-dyadic", n] => {
            let n: u32 = n.parse().map_err(|_| bad())?;
            if n == 0 || n > 15 {
                return Err(bad());
            }
            Ok(unwrap_mean(Schedule::mean_dyadic_odd(n)))
        }
        ["phase", phi, kmax] => {
            let phi: f64 = phi.parse().map_err(|_| bad())?;
            let kmax: u32 = kmax.parse().map_err(|_| bad())?;
            if !phi.is_finite() || kmax == 0 {
                return Err(bad());
            }
            let points = unwrap_mean(Schedule::mean_phase_targeted(phi, 1, kmax));
            if points.is_empty() {
                return Err(bad());
            }
            Ok(points)
        }
        _ => Err(bad()),
    }
}
