//! Boundary means, cluster-set estimation, index-density counters and the
//! three-quantity chain verifier.
//!
//! Cluster sets are approximated by sampling a boundary-indexed quantity
//! along a schedule (indices `n -> infinity`, means `eps -> 1`, radii
//! `R -> 1`), keeping the last half of the samples as the tail window, and
//! covering the tail greedily with delta-balls. Schedules are first-class so
//! tests can use phase-targeted sequences that hit prescribed phases exactly.
//!
//! Boundary points are carried as exact complements `1 - eps`: dyadic and
//! phase-targeted schedules construct the complement directly, which keeps
//! means meaningful far beyond the raw-epsilon resolution of f64 (an epsilon
//! given as a plain f64 is refused once `1 - eps < 1e-12`, where the
//! complement recovered by subtraction has lost most of its precision).

use std::f64::consts::PI;

use thiserror::Error;

use crate::berezin::{berezin_radial, BerezinError};
use crate::coefficients::{mellin_coefficient, CoeffError};
use crate::numerics::{exp2_neg, integrate_split, Complex, NumericsError};
use crate::symbols::{essential_range_extreme_points, ExtremePoints, RadialSymbol, SymbolError};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("numerics failure: {0}")]
    Numerics(#[from] NumericsError),
    #[error("coefficient failure: {0}")]
    Coefficient(#[from] CoeffError),
    #[error("berezin failure: {0}")]
    Berezin(#[from] BerezinError),
    #[error("symbol failure: {0}")]
    Symbol(#[from] SymbolError),
    #[error("{0}")]
    Domain(String),
    #[error("schedule too short: {len} samples (need at least {min})")]
    ScheduleTooShort { len: usize, min: usize },
    #[error("finite-grid ordering violated: {detail}")]
    OrderingViolation {
        report: Box<ChainReport>,
        detail: String,
    },
    #[error("{l} is not an extreme point of the essential range")]
    NotExtremePoint { l: Complex },
}

// ---------------------------------------------------------------------------
// Boundary points
// ---------------------------------------------------------------------------

/// A point `eps` near 1, stored as its exact complement `1 - eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryEps {
    complement: f64,
}

impl BoundaryEps {
    /// Raw epsilons closer to 1 than this are refused: the complement
    /// recovered by `1 - eps` is no longer trustworthy in f64.
    pub const MIN_RAW_COMPLEMENT: f64 = 1e-12;

    pub fn from_epsilon(eps: f64) -> Result<Self, ClusterError> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(ClusterError::Domain(format!(
                "epsilon must lie in (0, 1), got {eps}"
            )));
        }
        let complement = 1.0 - eps;
        if complement < Self::MIN_RAW_COMPLEMENT {
            return Err(ClusterError::Domain(format!(
                "epsilon {eps} is beyond 1 - 1e-12; supply the complement directly"
            )));
        }
        Ok(Self { complement })
    }

    /// Constructs from an exactly-known complement (dyadic or schedule
    /// generated); allows points far deeper than raw epsilons.
    pub fn from_complement(complement: f64) -> Result<Self, ClusterError> {
        if !(complement > 0.0 && complement < 1.0) {
            return Err(ClusterError::Domain(format!(
                "complement must lie in (0, 1), got {complement}"
            )));
        }
        Ok(Self { complement })
    }

    pub fn epsilon(&self) -> f64 {
        1.0 - self.complement
    }

    pub fn complement(&self) -> f64 {
        self.complement
    }

    /// `ln(1/eps)` computed from the complement.
    pub fn ln_inv_epsilon(&self) -> f64 {
        -(-self.complement).ln_1p()
    }
}

// ---------------------------------------------------------------------------
// Boundary means
// ---------------------------------------------------------------------------

/// `M_eps(f) = (1/(1-eps)) int_eps^1 f(r) dr`.
///
/// Closed forms come from the symbol; the fallback substitutes `v = ln ln(1/r)`
/// so the integral becomes `int_{-inf}^{ln ln(1/eps)} f(e^{-e^v}) e^{v-e^v} dv`
/// with left tail below `sup |f| * e^{v_min}`, and evaluates the symbol in the
/// log-log coordinate when it has an exact form there.
pub fn boundary_mean(
    s: &dyn RadialSymbol,
    eps: BoundaryEps,
    tol: f64,
) -> Result<Complex, ClusterError> {
    if let Some(m) = s.mean_closed_form(eps.complement()) {
        return Ok(m);
    }
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidTolerance { tol }.into());
    }
    let sup = s.sup_modulus();
    if sup == 0.0 {
        return Ok(Complex::new(0.0, 0.0));
    }
    let delta = eps.complement();
    let v_max = eps.ln_inv_epsilon().ln();
    let v_min = (delta * tol / (2.0 * sup)).ln();
    let largest_below_one = f64::from_bits(1.0f64.to_bits() - 1);

    let mut splits = Vec::new();
    for b in s.jump_radii() {
        let u = -(-(1.0 - b)).ln_1p();
        if u > 0.0 {
            let v = u.ln();
            if v > v_min && v < v_max {
                splits.push(v);
            }
        }
    }

    let integrand = |v: f64| -> Complex {
        let value = s.evaluate_loglog(v).or_else(|| {
            let r = (-(v.exp())).exp().min(largest_below_one);
            s.evaluate(r).ok()
        });
        match value {
            Some(z) => z * (v - v.exp()).exp(),
            None => Complex::new(f64::NAN, f64::NAN),
        }
    };
    let quad = integrate_split(integrand, v_min, v_max, &splits, tol * delta / 2.0)?;
    Ok(quad.value / delta)
}

// ---------------------------------------------------------------------------
// Schedules and cluster estimation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusterKind {
    Mellin,
    Mean,
    Berezin,
}

impl std::fmt::Display for ClusterKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClusterKind::Mellin => "mellin",
            ClusterKind::Mean => "mean",
            ClusterKind::Berezin => "berezin",
        })
    }
}

/// A boundary-approaching parameter sequence for one of the three quantities.
#[derive(Debug, Clone)]
pub enum Schedule {
    Mellin(Vec<u64>),
    Mean(Vec<BoundaryEps>),
    Berezin(Vec<f64>),
}

impl Schedule {
    pub fn kind(&self) -> ClusterKind {
        match self {
            Schedule::Mellin(_) => ClusterKind::Mellin,
            Schedule::Mean(_) => ClusterKind::Mean,
            Schedule::Berezin(_) => ClusterKind::Berezin,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Schedule::Mellin(v) => v.len(),
            Schedule::Mean(v) => v.len(),
            Schedule::Berezin(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn describe(&self) -> String {
        match self {
            Schedule::Mellin(v) => format!("mellin indices 0-based, {} samples", v.len()),
            Schedule::Mean(v) => format!("mean complements, {} samples", v.len()),
            Schedule::Berezin(v) => format!("berezin radii, {} samples", v.len()),
        }
    }

    /// `n = 0..=n_max`.
    pub fn mellin_range(n_max: u64) -> Schedule {
        Schedule::Mellin((0..=n_max).collect())
    }

    /// `n_k = floor(e^{phi + 2 pi k})`: the coefficient phase `-ln(n+1)` hits
    /// `-phi` modulo 2 pi up to the flooring error.
    pub fn mellin_phase_targeted(phi: f64, k_max: u32) -> Schedule {
        let mut out = Vec::new();
        for k in 0..=k_max {
            let target = (phi + 2.0 * PI * k as f64).exp();
            if target < 9.0e15 {
                out.push(target.floor() as u64);
            }
        }
        out.dedup();
        Schedule::Mellin(out)
    }

    /// About `count` log-spaced indices up to `n_max`. The tail window of a
    /// linear index range spans less than one phase cycle of `ln n`; the
    /// log-spaced version keeps every suffix covering full cycles, which is
    /// what cluster estimation needs.
    pub fn mellin_log(n_max: u64, count: usize) -> Schedule {
        let h = (n_max as f64 + 1.0).ln() / count.max(2) as f64;
        let mut out: Vec<u64> = (0..=count)
            .map(|j| ((j as f64 * h).exp().floor() as u64).min(n_max))
            .collect();
        out.sort_unstable();
        out.dedup();
        Schedule::Mellin(out)
    }

    /// Complements `10^{-k}`, `k = 1..=k_max`.
    pub fn mean_decades(k_max: u32) -> Schedule {
        Schedule::Mean(
            (1..=k_max)
                .map(|k| BoundaryEps::from_complement(10f64.powi(-(k as i32))).unwrap())
                .collect(),
        )
    }

    /// Complements `2^{-(2n)^2}`, `n = 1..=n_max` (the windows where the step
    /// symbol's means approach 1).
    pub fn mean_dyadic_even(n_max: u32) -> Schedule {
        Schedule::Mean(
            (1..=n_max)
                .map(|n| {
                    let e = (2 * n) * (2 * n);
                    BoundaryEps::from_complement(exp2_neg(e as i32)).unwrap()
                })
                .collect(),
        )
    }

    /// Complements `2^{-(2n+1)^2}`, `n = 1..=n_max` (the windows where they
    /// approach 0).
    pub fn mean_dyadic_odd(n_max: u32) -> Schedule {
        Schedule::Mean(
            (1..=n_max)
                .map(|n| {
                    let e = (2 * n + 1) * (2 * n + 1);
                    BoundaryEps::from_complement(exp2_neg(e as i32)).unwrap()
                })
                .collect(),
        )
    }

    /// `eps_k = exp(-e^{-(phi + 2 pi k)})`: `ln ln(1/eps_k)` equals
    /// `-(phi + 2 pi k)` exactly, so the oscillatory mean phase is pinned.
    /// Complements are generated as `-expm1(-e^{-(phi+2pik)})`, exact in f64.
    pub fn mean_phase_targeted(phi: f64, k_min: u32, k_max: u32) -> Schedule {
        Schedule::Mean(
            (k_min..=k_max)
                .filter_map(|k| {
                    let x = (-(phi + 2.0 * PI * k as f64)).exp();
                    let complement = -(-x).exp_m1();
                    BoundaryEps::from_complement(complement).ok()
                })
                .collect(),
        )
    }

    /// `R_k = 1 - 2^{-k}`, `k = k_min..=k_max`.
    pub fn berezin_dyadic(k_min: u32, k_max: u32) -> Schedule {
        Schedule::Berezin((k_min..=k_max).map(|k| 1.0 - exp2_neg(k as i32)).collect())
    }

    /// Radii with geometrically spaced complements from `lo` to `hi`.
    pub fn berezin_log_grid(lo: f64, hi: f64, count: usize) -> Schedule {
        let c_lo = 1.0 - lo;
        let c_hi = 1.0 - hi;
        let mut out = Vec::with_capacity(count);
        for i in 0..count {
            let t = if count == 1 {
                0.0
            } else {
                i as f64 / (count - 1) as f64
            };
            let c = c_lo * (c_hi / c_lo).powf(t);
            out.push(1.0 - c);
        }
        Schedule::Berezin(out)
    }
}

/// Sampled accumulation-point data for one boundary quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterEstimate {
    pub kind: ClusterKind,
    /// `(parameter, value)` pairs; the parameter is the index for Mellin,
    /// the complement `1 - eps` for means, and the radius for Berezin.
    pub samples: Vec<(f64, Complex)>,
    /// Index of the first tail-window sample (last half by default).
    pub tail_start: usize,
    pub tail_limsup_modulus: f64,
    pub tail_liminf_modulus: f64,
    /// Greedy delta-ball representatives of the tail samples, in first-seen
    /// order (deterministic).
    pub cluster_points: Vec<Complex>,
    pub delta: f64,
    pub schedule: String,
}

pub const MIN_SCHEDULE: usize = 16;

/// Samples the chosen quantity along the schedule and reports tail
/// limsup/liminf of the modulus plus a greedy delta-cover of tail samples.
pub fn cluster_estimate(
    s: &dyn RadialSymbol,
    schedule: &Schedule,
    delta: f64,
    tol: f64,
) -> Result<ClusterEstimate, ClusterError> {
    if schedule.len() < MIN_SCHEDULE {
        return Err(ClusterError::ScheduleTooShort {
            len: schedule.len(),
            min: MIN_SCHEDULE,
        });
    }
    if !(delta > 0.0) {
        return Err(ClusterError::Domain(format!(
            "cover radius must be positive, got {delta}"
        )));
    }
    validate_monotone(schedule)?;
    let samples = sample_quantity(s, schedule, tol)?;
    Ok(estimate_from_samples(
        schedule.kind(),
        samples,
        delta,
        schedule.describe(),
    ))
}

fn validate_monotone(schedule: &Schedule) -> Result<(), ClusterError> {
    let ok = match schedule {
        Schedule::Mellin(v) => v.windows(2).all(|w| w[0] < w[1]),
        Schedule::Mean(v) => v.windows(2).all(|w| w[0].complement() > w[1].complement()),
        Schedule::Berezin(v) => {
            v.iter().all(|r| (0.0..1.0).contains(r)) && v.windows(2).all(|w| w[0] < w[1])
        }
    };
    if ok {
        Ok(())
    } else {
        Err(ClusterError::Domain(
            "schedule must strictly approach the boundary".into(),
        ))
    }
}

fn sample_quantity(
    s: &dyn RadialSymbol,
    schedule: &Schedule,
    tol: f64,
) -> Result<Vec<(f64, Complex)>, ClusterError> {
    match schedule {
        Schedule::Mellin(indices) => indices
            .iter()
            .map(|n| Ok((*n as f64, mellin_coefficient(s, *n, tol)?.value)))
            .collect(),
        Schedule::Mean(points) => points
            .iter()
            .map(|eps| Ok((eps.complement(), boundary_mean(s, *eps, tol)?)))
            .collect(),
        Schedule::Berezin(radii) => radii
            .iter()
            .map(|r| Ok((*r, berezin_radial(s, *r, tol)?.value)))
            .collect(),
    }
}

fn estimate_from_samples(
    kind: ClusterKind,
    samples: Vec<(f64, Complex)>,
    delta: f64,
    schedule: String,
) -> ClusterEstimate {
    let tail_start = samples.len() / 2;
    let tail = &samples[tail_start..];
    let tail_limsup = tail.iter().map(|(_, z)| z.norm()).fold(f64::MIN, f64::max);
    let tail_liminf = tail.iter().map(|(_, z)| z.norm()).fold(f64::MAX, f64::min);
    let mut cluster_points: Vec<Complex> = Vec::new();
    for (_, z) in tail {
        if cluster_points.iter().all(|p| (p - z).norm() > delta) {
            cluster_points.push(*z);
        }
    }
    ClusterEstimate {
        kind,
        samples,
        tail_start,
        tail_limsup_modulus: tail_limsup,
        tail_liminf_modulus: tail_liminf,
        cluster_points,
        delta,
        schedule,
    }
}

// ---------------------------------------------------------------------------
// Density counting
// ---------------------------------------------------------------------------

/// The counting data `p_N = #{n in {0..N} : |C_{2n+1}(f) - L| > eps}`,
/// reported at `N, N/2, N/4, N/8, N/16` for liminf inspection.
#[derive(Debug, Clone)]
pub struct DensityReport {
    pub l: Complex,
    pub eps: f64,
    /// `(N, p_N)` in increasing `N`.
    pub counts: Vec<(u64, u64)>,
    /// Minimum of `p_N / N` over the reported rows.
    pub ratio_floor: f64,
}

pub fn density_ratio(
    s: &dyn RadialSymbol,
    l: Complex,
    eps: f64,
    n_max: u64,
    tol: f64,
) -> Result<DensityReport, ClusterError> {
    if n_max < 1 {
        return Err(ClusterError::Domain("density needs N >= 1".into()));
    }
    if !(eps > 0.0) {
        return Err(ClusterError::Domain("density needs eps > 0".into()));
    }
    let mut thresholds: Vec<u64> = (0..5).map(|j| n_max >> j).filter(|n| *n >= 1).collect();
    thresholds.sort_unstable();
    thresholds.dedup();
    let mut counts = Vec::with_capacity(thresholds.len());
    let mut p: u64 = 0;
    let mut next = 0usize;
    for n in 0..=n_max {
        if (mellin_coefficient(s, 2 * n + 1, tol)?.value - l).norm() > eps {
            p += 1;
        }
        while next < thresholds.len() && thresholds[next] == n {
            counts.push((n, p));
            next += 1;
        }
    }
    let ratio_floor = counts
        .iter()
        .map(|(n, p)| *p as f64 / *n as f64)
        .fold(f64::MAX, f64::min);
    Ok(DensityReport {
        l,
        eps,
        counts,
        ratio_floor,
    })
}

/// Closed-form arc count for the oscillatory symbol at threshold `sqrt 2`:
/// with `C_{2n+1} = exp(-i ln(2n+2))` and `L = e^{-i theta}`, the condition
/// `|C_{2n+1} - L| > sqrt 2` says `cos(ln(2n+2) - theta) < 0`, i.e.
///
/// `n in ( e^{theta + pi/2 + 2k pi}/2 - 1 , e^{theta + 3pi/2 + 2k pi}/2 - 1 )`
///
/// for some integer `k`; this counts lattice points in those arcs directly
/// and must equal the direct count exactly.
pub fn density_arc_count(theta: f64, n_max: u64) -> u64 {
    let ln_top = (2.0 * (n_max as f64 + 1.0)).ln();
    let k_low = ((2f64.ln() - theta - 1.5 * PI) / (2.0 * PI)).floor() as i64 - 1;
    let k_high = ((ln_top - theta - 0.5 * PI) / (2.0 * PI)).ceil() as i64 + 1;
    let mut count = 0u64;
    for k in k_low..=k_high {
        let lo = (theta + 0.5 * PI + 2.0 * PI * k as f64).exp() / 2.0 - 1.0;
        let hi = (theta + 1.5 * PI + 2.0 * PI * k as f64).exp() / 2.0 - 1.0;
        if hi <= 0.0 || lo >= n_max as f64 {
            continue;
        }
        let first = (lo.floor() as i64 + 1).max(0);
        let last = ((hi.ceil() as i64) - 1).min(n_max as i64);
        if last >= first {
            count += (last - first + 1) as u64;
        }
    }
    count
}

// ---------------------------------------------------------------------------
// Chain verification
// ---------------------------------------------------------------------------

/// Grids and tolerances for [`verify_chain`].
#[derive(Debug, Clone)]
pub struct ChainConfig {
    /// Dense Mellin scan bound when the symbol has closed-form coefficients.
    pub mellin_n_max: u64,
    /// Dense scan bound when every coefficient needs a quadrature.
    pub mellin_n_max_quadrature: u64,
    /// Berezin radii `1 - 2^{-k}`, `k = r_k_min..=r_k_max`.
    pub r_k_min: u32,
    pub r_k_max: u32,
    /// Mean complements `10^{-k}`, `k = 1..=eps_decades`, plus dyadic
    /// complements `2^{-k}`, `k = eps_k_min..=eps_k_max`.
    pub eps_decades: u32,
    pub eps_k_min: u32,
    pub eps_k_max: u32,
    pub tol: f64,
    pub ordering_tol: f64,
    /// Resolution for the sampled cluster-set nesting check (real symbols).
    pub delta: f64,
    pub nesting: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            mellin_n_max: 1 << 21,
            mellin_n_max_quadrature: 512,
            r_k_min: 4,
            r_k_max: 20,
            eps_decades: 6,
            eps_k_min: 4,
            eps_k_max: 20,
            tol: 1e-9,
            ordering_tol: 1e-6,
            delta: 0.05,
            nesting: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NestingReport {
    pub delta: f64,
    /// Every Berezin cluster point is within 2 delta of a Mellin point.
    pub berezin_in_mellin: bool,
    /// Every Mellin cluster point is within 2 delta of a mean point.
    pub mellin_in_mean: bool,
    pub ok: bool,
}

/// The three grid suprema and their ordering.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub symbol: String,
    pub sup_berezin: f64,
    pub argmax_radius: f64,
    pub sup_mellin: f64,
    pub argmax_index: u64,
    pub sup_mean: f64,
    pub argmax_complement: f64,
    pub sup_modulus: f64,
    pub mellin_grid: String,
    pub r_grid: String,
    pub eps_grid: String,
    pub ordering_tol: f64,
    pub ordering_ok: bool,
    pub nesting: Option<NestingReport>,
}

/// Computes the grid suprema of the three quantities, checks the ordering
/// `sup_berezin <= sup_mellin <= sup_mean <= sup_modulus` within the
/// configured tolerance, and for real-valued symbols checks the sampled
/// cluster-set nesting Berezin ⊂ Mellin ⊂ means.
///
/// A broken ordering indicates a numerics bug and is returned as an error
/// carrying the full report, never accepted silently.
pub fn verify_chain(
    s: &dyn RadialSymbol,
    config: &ChainConfig,
) -> Result<ChainReport, ClusterError> {
    let closed = s.mellin_closed_form(0).is_some();
    let n_max = if closed {
        config.mellin_n_max
    } else {
        config.mellin_n_max_quadrature
    };

    let mut sup_mellin = f64::MIN;
    let mut argmax_index = 0u64;
    for n in 0..=n_max {
        let e = mellin_coefficient(s, n, config.tol)?;
        if e.modulus > sup_mellin {
            sup_mellin = e.modulus;
            argmax_index = n;
        }
    }

    let mut sup_berezin = f64::MIN;
    let mut argmax_radius = 0.0f64;
    for k in config.r_k_min..=config.r_k_max {
        let r = 1.0 - exp2_neg(k as i32);
        let v = berezin_radial(s, r, config.tol)?;
        let modulus = v.value.norm();
        if modulus > sup_berezin {
            sup_berezin = modulus;
            argmax_radius = r;
        }
    }

    let mut sup_mean = f64::MIN;
    let mut argmax_complement = 0.0f64;
    let mut eps_points: Vec<BoundaryEps> = (1..=config.eps_decades)
        .map(|k| BoundaryEps::from_complement(10f64.powi(-(k as i32))).unwrap())
        .collect();
    for k in config.eps_k_min..=config.eps_k_max {
        eps_points.push(BoundaryEps::from_complement(exp2_neg(k as i32)).unwrap());
    }
    for eps in &eps_points {
        let m = boundary_mean(s, *eps, config.tol)?.norm();
        if m > sup_mean {
            sup_mean = m;
            argmax_complement = eps.complement();
        }
    }

    let sup_modulus = s.sup_modulus();

    let nesting = if config.nesting && s.is_real_valued() {
        Some(nesting_check(s, config)?)
    } else {
        None
    };

    let t = config.ordering_tol;
    let ordering_ok =
        sup_berezin <= sup_mellin + t && sup_mellin <= sup_mean + t && sup_mean <= sup_modulus + t;

    let report = ChainReport {
        symbol: s.describe(),
        sup_berezin,
        argmax_radius,
        sup_mellin,
        argmax_index,
        sup_mean,
        argmax_complement,
        sup_modulus,
        mellin_grid: format!("n = 0..={n_max} (dense)"),
        r_grid: format!("R = 1 - 2^-k, k = {}..={}", config.r_k_min, config.r_k_max),
        eps_grid: format!(
            "complements 10^-k, k = 1..={} and 2^-k, k = {}..={}",
            config.eps_decades, config.eps_k_min, config.eps_k_max
        ),
        ordering_tol: t,
        ordering_ok,
        nesting,
    };
    if !ordering_ok {
        let detail = format!(
            "sup_berezin = {}, sup_mellin = {}, sup_mean = {}, sup_modulus = {} (tol {})",
            report.sup_berezin, report.sup_mellin, report.sup_mean, report.sup_modulus, t
        );
        return Err(ClusterError::OrderingViolation {
            report: Box::new(report),
            detail,
        });
    }
    Ok(report)
}

fn nesting_check(
    s: &dyn RadialSymbol,
    config: &ChainConfig,
) -> Result<NestingReport, ClusterError> {
    let delta = config.delta;
    let mellin = cluster_estimate(
        s,
        &Schedule::mellin_log(1_000_000.min(config.mellin_n_max.max(4096)), 2048),
        delta,
        config.tol,
    )?;
    let berezin = cluster_estimate(
        s,
        &Schedule::berezin_dyadic(config.r_k_min, config.r_k_max.max(config.r_k_min + 15)),
        delta,
        config.tol,
    )?;
    // phase-swept means so the mean cluster set is covered densely
    let mut complements: Vec<BoundaryEps> = Vec::new();
    for j in 0..64 {
        let phi = 2.0 * PI * j as f64 / 64.0;
        if let Schedule::Mean(points) = Schedule::mean_phase_targeted(phi, 1, 3) {
            complements.extend(points);
        }
    }
    complements.sort_by(|a, b| b.complement().partial_cmp(&a.complement()).unwrap());
    complements.dedup_by(|a, b| a.complement() == b.complement());
    let mean = cluster_estimate(s, &Schedule::Mean(complements), delta, config.tol)?;

    let covered = |inner: &ClusterEstimate, outer: &ClusterEstimate| -> bool {
        inner.cluster_points.iter().all(|p| {
            outer
                .cluster_points
                .iter()
                .any(|q| (p - q).norm() <= 2.0 * delta)
        })
    };
    let berezin_in_mellin = covered(&berezin, &mellin);
    let mellin_in_mean = covered(&mellin, &mean);
    Ok(NestingReport {
        delta,
        berezin_in_mellin,
        mellin_in_mean,
        ok: berezin_in_mellin && mellin_in_mean,
    })
}

// ---------------------------------------------------------------------------
// Extreme-point membership
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MembershipSchedules {
    pub mellin: Vec<u64>,
    pub mean: Vec<BoundaryEps>,
    pub berezin: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MembershipOutcome {
    pub member: bool,
    /// Distance of the closest tail sample to the candidate point.
    pub best_distance: f64,
    /// Parameter of that sample (index, complement or radius).
    pub witness: Option<f64>,
}

/// Per-quantity membership of an essential-range extreme point, at the tested
/// resolution. The three-way equivalence is asymptotic; finite schedules can
/// disagree, so the report exposes the three outcomes and a consistency flag
/// instead of asserting them equal.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub l: Complex,
    pub delta: f64,
    pub mellin: MembershipOutcome,
    pub mean: MembershipOutcome,
    pub berezin: MembershipOutcome,
    pub consistent: bool,
}

pub fn extreme_point_membership(
    s: &dyn RadialSymbol,
    l: Complex,
    schedules: &MembershipSchedules,
    delta: f64,
    tol: f64,
) -> Result<MembershipReport, ClusterError> {
    let extreme = match essential_range_extreme_points(s) {
        ExtremePoints::Points(pts) => pts.iter().any(|p| (p - l).norm() <= 1e-9),
        ExtremePoints::Circle { center, radius } => ((l - center).norm() - radius).abs() <= 1e-9,
    };
    if !extreme {
        return Err(ClusterError::NotExtremePoint { l });
    }

    let outcome = |samples: Vec<(f64, Complex)>| -> MembershipOutcome {
        let tail = &samples[samples.len() / 2..];
        let mut best = f64::INFINITY;
        let mut witness = None;
        for (param, z) in tail {
            let d = (z - l).norm();
            if d < best {
                best = d;
                witness = Some(*param);
            }
        }
        MembershipOutcome {
            member: best <= delta,
            best_distance: best,
            witness,
        }
    };

    let mellin = outcome(sample_quantity(
        s,
        &Schedule::Mellin(schedules.mellin.clone()),
        tol,
    )?);
    let mean = outcome(sample_quantity(
        s,
        &Schedule::Mean(schedules.mean.clone()),
        tol,
    )?);
    let berezin = outcome(sample_quantity(
        s,
        &Schedule::Berezin(schedules.berezin.clone()),
        tol,
    )?);
    let consistent = mellin.member == mean.member && mean.member == berezin.member;
    Ok(MembershipReport {
        l,
        delta,
        mellin,
        mean,
        berezin,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{alpha, Constant, GrudskyVasilevski, Power, StepExample10};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn means_have_closed_forms_for_simple_symbols() {
        let eps = BoundaryEps::from_epsilon(0.25).unwrap();
        let constant = Constant::new(c(0.3, -0.4)).unwrap();
        assert_eq!(boundary_mean(&constant, eps, 1e-10).unwrap(), c(0.3, -0.4));

        let linear = Power::new(1.0).unwrap();
        let m = boundary_mean(&linear, eps, 1e-10).unwrap();
        assert!((m.re - (1.0 + 0.25) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn raw_epsilon_beyond_the_resolution_limit_is_refused() {
        assert!(BoundaryEps::from_epsilon(1.0 - 1e-13).is_err());
        assert!(BoundaryEps::from_epsilon(0.5).is_ok());
        // but exact complements go much deeper
        assert!(BoundaryEps::from_complement(exp2_neg(49)).is_ok());
    }

    #[test]
    fn oscillatory_mean_approaches_the_predicted_modulus() {
        let gv = GrudskyVasilevski;
        let limit = alpha().modulus / 2f64.sqrt();
        let eps = BoundaryEps::from_complement(1e-4).unwrap();
        let m = boundary_mean(&gv, eps, 1e-10).unwrap();
        assert!(
            (m.norm() - limit).abs() < 1e-3,
            "|M| = {} vs limit {limit}",
            m.norm()
        );
    }

    #[test]
    fn oscillatory_mean_error_is_dominated_by_the_complement() {
        let gv = GrudskyVasilevski;
        let limit = alpha().modulus / 2f64.sqrt();
        for k in 2..=6 {
            let complement = 10f64.powi(-k);
            let eps = BoundaryEps::from_complement(complement).unwrap();
            let m = boundary_mean(&gv, eps, 1e-11).unwrap();
            let err = (m.norm() - limit).abs();
            assert!(
                err <= 0.2 * complement,
                "k = {k}: error {err:e} not dominated by 0.2 * {complement:e}"
            );
        }
    }

    #[test]
    fn step_mean_at_the_first_even_window() {
        let g = StepExample10;
        let eps = BoundaryEps::from_complement(exp2_neg(16)).unwrap();
        let m = boundary_mean(&g, eps, 1e-10).unwrap().re;
        assert!(m >= 1.0 - exp2_neg(5) && m <= 1.0, "got {m}");
    }

    #[test]
    fn cluster_estimate_of_a_constant_is_one_point() {
        let s = Constant::new(c(0.5, 0.25)).unwrap();
        let est = cluster_estimate(&s, &Schedule::mellin_range(999), 1e-6, 1e-10).unwrap();
        assert_eq!(est.cluster_points.len(), 1);
        assert!((est.cluster_points[0] - c(0.5, 0.25)).norm() < 1e-12);
        assert!((est.tail_limsup_modulus - est.tail_liminf_modulus).abs() < 1e-12);
        assert!(est.tail_liminf_modulus <= est.tail_limsup_modulus);
    }

    #[test]
    fn short_schedules_are_rejected() {
        let s = Constant::new(c(1.0, 0.0)).unwrap();
        assert!(matches!(
            cluster_estimate(&s, &Schedule::mellin_range(3), 0.1, 1e-10),
            Err(ClusterError::ScheduleTooShort { .. })
        ));
    }

    #[test]
    fn cluster_estimates_are_deterministic() {
        let gv = GrudskyVasilevski;
        let schedule = Schedule::mellin_range(2000);
        let a = cluster_estimate(&gv, &schedule, 0.05, 1e-10).unwrap();
        let b = cluster_estimate(&gv, &schedule, 0.05, 1e-10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_tail_sample_is_covered_by_a_cluster_point() {
        let gv = GrudskyVasilevski;
        let est = cluster_estimate(&gv, &Schedule::mellin_range(5000), 0.05, 1e-10).unwrap();
        for (_, z) in &est.samples[est.tail_start..] {
            let covered = est
                .cluster_points
                .iter()
                .any(|p| (p - z).norm() <= est.delta);
            assert!(covered, "tail sample {z} not within delta of any cluster point");
        }
    }

    #[test]
    fn gv_mellin_cluster_covers_the_unit_circle() {
        let gv = GrudskyVasilevski;
        let est = cluster_estimate(&gv, &Schedule::mellin_range(100_000), 0.05, 1e-10).unwrap();
        // every point of a 100-point circle grid is within delta + grid
        // spacing of some sample
        let tail = &est.samples[est.tail_start..];
        for j in 0..100 {
            let target = Complex::from_polar(1.0, 2.0 * PI * j as f64 / 100.0);
            let best = est
                .samples
                .iter()
                .chain(tail)
                .map(|(_, z)| (z - target).norm())
                .fold(f64::MAX, f64::min);
            assert!(best < 0.1, "grid point {j} uncovered (best {best})");
        }
    }

    #[test]
    fn gv_mean_cluster_covers_the_scaled_circle() {
        let gv = GrudskyVasilevski;
        let radius = alpha().modulus / 2f64.sqrt();
        for j in 0..24 {
            let phi = 2.0 * PI * j as f64 / 24.0;
            let schedule = Schedule::mean_phase_targeted(phi, 1, 4);
            if let Schedule::Mean(points) = &schedule {
                assert!(points.len() >= 3, "phase schedule too short at phi={phi}");
            }
            let samples = sample_quantity(&gv, &schedule, 1e-10).unwrap();
            // ln ln(1/eps_k) = -(phi + 2 pi k): the mean phase locks onto
            // -phi, so the samples approach radius * e^{i(-phi + arg(alpha/(1+i)))}
            let expected_phase = -phi + (alpha().value / c(1.0, 1.0)).arg();
            let target = Complex::from_polar(radius, expected_phase);
            let best = samples
                .iter()
                .map(|(_, z)| (z - target).norm())
                .fold(f64::MAX, f64::min);
            assert!(
                best < 0.05,
                "phi = {phi}: best distance {best} to predicted mean limit"
            );
        }
    }

    #[test]
    fn density_of_a_constant_is_all_or_nothing() {
        let s = Constant::new(c(1.0, 0.0)).unwrap();
        let at_center = density_ratio(&s, c(1.0, 0.0), 0.5, 1000, 1e-10).unwrap();
        assert!(at_center.counts.iter().all(|(_, p)| *p == 0));
        assert_eq!(at_center.ratio_floor, 0.0);

        let zero = Constant::new(c(0.0, 0.0)).unwrap();
        let far = density_ratio(&zero, c(1.0, 0.0), 0.5, 1000, 1e-10).unwrap();
        assert_eq!(far.counts.last().unwrap().1, 1001);
        assert!(far.ratio_floor >= 1.0);
    }

    #[test]
    fn density_counts_are_monotone_in_n() {
        let gv = GrudskyVasilevski;
        let rep = density_ratio(&gv, c(1.0, 0.0), 2f64.sqrt(), 50_000, 1e-10).unwrap();
        for w in rep.counts.windows(2) {
            assert!(w[0].1 <= w[1].1);
            assert!(w[1].1 <= w[1].0 + 1);
        }
    }

    #[test]
    fn arc_count_matches_direct_count_on_a_theta_grid() {
        let gv = GrudskyVasilevski;
        for n_max in [1_000u64, 10_000, 100_000] {
            for j in 0..32 {
                let theta = -PI + 2.0 * PI * (j as f64 + 0.5) / 32.0;
                let l = Complex::from_polar(1.0, -theta);
                let direct = density_ratio(&gv, l, 2f64.sqrt(), n_max, 1e-10)
                    .unwrap()
                    .counts
                    .last()
                    .unwrap()
                    .1;
                let arcs = density_arc_count(theta, n_max);
                assert_eq!(
                    arcs, direct,
                    "theta = {theta}, N = {n_max}: arcs {arcs} vs direct {direct}"
                );
            }
        }
    }

    #[test]
    fn arc_count_can_be_zero_for_small_ranges() {
        // N = 1: phases ln 2 and ln 4; theta = 1.0 keeps both within a
        // quarter turn.
        assert_eq!(density_arc_count(1.0, 1), 0);
    }

    #[test]
    fn chain_for_a_constant_is_flat() {
        let s = Constant::new(c(0.6, 0.8)).unwrap();
        let config = ChainConfig {
            mellin_n_max: 4096,
            nesting: false,
            ..ChainConfig::default()
        };
        let report = verify_chain(&s, &config).unwrap();
        assert!((report.sup_mellin - 1.0).abs() < 1e-12);
        assert!((report.sup_berezin - 1.0).abs() < 1e-8);
        assert!((report.sup_mean - 1.0).abs() < 1e-12);
        assert!(report.ordering_ok);
    }

    #[test]
    fn membership_for_a_constant_is_trivially_consistent() {
        let s = Constant::new(c(0.5, 0.0)).unwrap();
        let schedules = MembershipSchedules {
            mellin: (0..64).collect(),
            mean: (1..=8)
                .map(|k| BoundaryEps::from_complement(10f64.powi(-k)).unwrap())
                .collect(),
            berezin: (4..=12).map(|k| 1.0 - exp2_neg(k)).collect(),
        };
        let report = extreme_point_membership(&s, c(0.5, 0.0), &schedules, 1e-2, 1e-10).unwrap();
        assert!(report.mellin.member && report.mean.member && report.berezin.member);
        assert!(report.consistent);
    }

    #[test]
    fn non_extreme_candidates_are_rejected() {
        let g = StepExample10;
        let schedules = MembershipSchedules {
            mellin: (0..32).collect(),
            mean: vec![BoundaryEps::from_complement(0.5).unwrap()],
            berezin: vec![0.5],
        };
        assert!(matches!(
            extreme_point_membership(&g, c(0.5, 0.0), &schedules, 1e-2, 1e-10),
            Err(ClusterError::NotExtremePoint { .. })
        ));
    }

    #[test]
    fn step_means_hit_both_extreme_points() {
        let g = StepExample10;
        let schedules = MembershipSchedules {
            mellin: (0..32).collect(),
            mean: match Schedule::mean_dyadic_even(4) {
                Schedule::Mean(v) => v,
                _ => unreachable!(),
            },
            berezin: (4..=12).map(|k| 1.0 - exp2_neg(k)).collect(),
        };
        let at_one = extreme_point_membership(&g, c(1.0, 0.0), &schedules, 1e-2, 1e-10).unwrap();
        assert!(at_one.mean.member, "best {}", at_one.mean.best_distance);

        let schedules = MembershipSchedules {
            mean: match Schedule::mean_dyadic_odd(4) {
                Schedule::Mean(v) => v,
                _ => unreachable!(),
            },
            ..schedules
        };
        let at_zero = extreme_point_membership(&g, c(0.0, 0.0), &schedules, 1e-2, 1e-10).unwrap();
        assert!(at_zero.mean.member, "best {}", at_zero.mean.best_distance);
    }
}
