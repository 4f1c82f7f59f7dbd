//! The acceptance suite: eight criteria over the two featured symbols,
//! runnable through `berezin-lab verify` and mirrored one-to-one by the
//! `acceptance` integration test target.
//!
//! Two sub-checks of criterion 6 encode target constants that the computed
//! mathematics does not meet (details in the criterion's report text and in
//! the README); they are evaluated verbatim and reported honestly rather
//! than loosened.

use std::f64::consts::PI;

use crate::berezin::{
    berezin_integral_oracle, berezin_quasihomogeneous, berezin_radial, convex_decomposition,
    QuasihomogeneousSymbol,
};
use crate::cluster::{
    boundary_mean, density_arc_count, density_ratio, extreme_point_membership, verify_chain,
    BoundaryEps, ChainConfig, MembershipSchedules, Schedule,
};
use crate::coefficients::{mellin_coefficient, mellin_quadrature};
use crate::numerics::{exp2_neg, sum_weighted_coefficients, Complex, NumericsError, WeightFamily};
use crate::symbols::{
    alpha, Affine, Constant, GrudskyVasilevski, Power, RadialSymbol, RealPart, StepExample10,
    SymbolRef,
};
use std::sync::Arc;

/// Regression pin for the oscillatory symbol's Berezin grid supremum over
/// `R = 1 - 2^{-k}`, `k = 4..=20` (recorded from the validated radial series;
/// attained at k = 4, decaying onto the plateau `sqrt(2 pi / sinh pi) ~
/// 0.7376029`).
pub const GV_SUP_BEREZIN_PIN: f64 = 0.7395177121978159;
pub const GV_SUP_BEREZIN_TOL: f64 = 1e-6;

/// Recorded density-ratio floors `min p_N / N` over `N in {1e4, 1e5, 1e6}`
/// at threshold `sqrt 2`, per target phase `theta in {0, pi/2, pi, -pi/2}`.
pub const DENSITY_FLOOR_PINS: [f64; 4] = [0.2857, 0.137436, 0.1234, 0.05939];

/// Recorded floor of the convex-split mass `a_R` for the oscillatory symbol
/// at `L = 1`, threshold `sqrt 2`, over `R = 1 - 2^{-k}`, `k = 4..=20`
/// (measured minimum 0.054668 at k = 18).
pub const GV_SPLIT_MASS_FLOOR: f64 = 0.0546;

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: u8,
    pub label: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} | {} | {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.label,
            self.detail
        )
    }
}

fn outcome(
    id: u8,
    label: &'static str,
    run: impl FnOnce() -> Result<(bool, String), String>,
) -> CriterionOutcome {
    match run() {
        Ok((passed, detail)) => CriterionOutcome {
            id,
            label,
            passed,
            detail,
        },
        Err(e) => CriterionOutcome {
            id,
            label,
            passed: false,
            detail: format!("errored: {e}"),
        },
    }
}

pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ]
}

/// Closed form `exp(-i ln(n+1))` versus the independent quadrature route,
/// `n = 0..=2000`, agreement below 1e-8.
pub fn criterion_1() -> CriterionOutcome {
    outcome(
        1,
        "oscillatory coefficients: closed form vs quadrature",
        || {
            let gv = GrudskyVasilevski;
            let mut max_diff: f64 = 0.0;
            let mut argmax = 0u64;
            for n in 0..=2000u64 {
                let closed = gv.mellin_closed_form(n).unwrap();
                let quad = mellin_quadrature(&gv, n, 1e-10).map_err(|e| e.to_string())?;
                let diff = (closed - quad.value).norm();
                if diff > max_diff {
                    max_diff = diff;
                    argmax = n;
                }
            }
            Ok((
                max_diff < 1e-8,
                format!(
                    "max |C_n^quad - exp(-i ln(n+1))| = {max_diff:.3e} at n = {argmax} (< 1e-8)"
                ),
            ))
        },
    )
}

/// The coefficient cluster set is the whole unit circle: a 100-point circle
/// grid is covered within 0.1 by samples up to n = 1e5, and the closed-form
/// modulus column attains exactly 1.
pub fn criterion_2() -> CriterionOutcome {
    outcome(
        2,
        "oscillatory coefficients cluster on the unit circle",
        || {
            let gv = GrudskyVasilevski;
            let mut samples = Vec::with_capacity(100_001);
            let mut max_modulus: f64 = 0.0;
            for n in 0..=100_000u64 {
                let e = mellin_coefficient(&gv, n, 1e-10).map_err(|e| e.to_string())?;
                max_modulus = max_modulus.max(e.modulus);
                samples.push(e.value);
            }
            let mut worst_cover: f64 = 0.0;
            for j in 0..100 {
                let target = Complex::from_polar(1.0, 2.0 * PI * j as f64 / 100.0);
                let best = samples
                    .iter()
                    .map(|z| (z - target).norm())
                    .fold(f64::MAX, f64::min);
                worst_cover = worst_cover.max(best);
            }
            let covered = worst_cover < 0.1;
            let exact = max_modulus == 1.0;
            Ok((
            covered && exact,
            format!(
                "worst circle-grid distance {worst_cover:.4} (< 0.1), max closed-form |C_n| = {max_modulus} (= 1 exactly: {exact})"
            ),
        ))
        },
    )
}

/// Boundary means of the oscillatory symbol approach `|alpha|/sqrt 2`, with
/// the normalization constant pinned by the Gamma-identity oracle first.
pub fn criterion_3() -> CriterionOutcome {
    outcome(
        3,
        "oscillatory boundary means approach |alpha|/sqrt(2)",
        || {
            let identity = (PI.sinh() / PI).sqrt();
            let a = alpha();
            if (a.modulus - identity).abs() >= 1e-9 {
                return Ok((
                false,
                format!(
                    "quadrature |alpha| = {} disagrees with the identity sqrt(sinh pi / pi) = {identity}",
                    a.modulus
                ),
            ));
            }
            let target = a.modulus / 2f64.sqrt();
            let gv = GrudskyVasilevski;
            let mut errs = Vec::new();
            for k in 1..=5 {
                let eps = BoundaryEps::from_complement(10f64.powi(-k)).unwrap();
                let m = boundary_mean(&gv, eps, 1e-11).map_err(|e| e.to_string())?;
                errs.push((m.norm() - target).abs());
            }
            let monotone = errs.windows(2).all(|w| w[1] < w[0]);
            let at_k3 = errs[2];
            Ok((
            at_k3 < 5e-3 && monotone,
            format!(
                "|alpha|/sqrt2 = {target:.9}; | |M| - target | at complements 1e-1..1e-5: {} (k=3 err {:.3e} < 5e-3, monotone: {monotone})",
                errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", "),
                at_k3
            ),
        ))
        },
    )
}

/// Strict separation of the three suprema for the oscillatory symbol, with
/// the Berezin grid supremum pinned as a regression value.
pub fn criterion_4() -> CriterionOutcome {
    outcome(4, "three suprema are strictly separated", || {
        let gv = GrudskyVasilevski;
        let mut sup_berezin: f64 = 0.0;
        let mut arg_k = 0u32;
        for k in 4..=20u32 {
            let r = 1.0 - exp2_neg(k as i32);
            let v = berezin_radial(&gv, r, 1e-9).map_err(|e| e.to_string())?;
            if v.value.norm() > sup_berezin {
                sup_berezin = v.value.norm();
                arg_k = k;
            }
        }
        let mut sup_mellin: f64 = 0.0;
        for n in 0..=(1u64 << 21) {
            sup_mellin = sup_mellin.max(
                mellin_coefficient(&gv, n, 1e-10)
                    .map_err(|e| e.to_string())?
                    .modulus,
            );
        }
        let mut sup_mean: f64 = 0.0;
        for k in 1..=6 {
            let eps = BoundaryEps::from_complement(10f64.powi(-k)).unwrap();
            sup_mean = sup_mean.max(
                boundary_mean(&gv, eps, 1e-10)
                    .map_err(|e| e.to_string())?
                    .norm(),
            );
        }
        let separated = sup_mean >= 1.35
            && sup_mellin == 1.0
            && sup_berezin < 1.0
            && sup_mean > sup_mellin
            && sup_mellin > sup_berezin;
        let pinned = (sup_berezin - GV_SUP_BEREZIN_PIN).abs() <= GV_SUP_BEREZIN_TOL;
        Ok((
            separated && pinned,
            format!(
                "sup_mean = {sup_mean:.6} >= 1.35 > sup_mellin = {sup_mellin} > sup_berezin = {sup_berezin:.10} (grid max at k = {arg_k}; pin {GV_SUP_BEREZIN_PIN} +- {GV_SUP_BEREZIN_TOL:.0e}: {pinned})"
            ),
        ))
    })
}

/// Arc counting equals the direct count at N = 1e6 for four phases, and the
/// index-density ratios stay above the recorded positive floors.
pub fn criterion_5() -> CriterionOutcome {
    outcome(
        5,
        "index density of far coefficients has a positive floor",
        || {
            let gv = GrudskyVasilevski;
            let eps = 2f64.sqrt();
            let thetas = [0.0, PI / 2.0, PI, -PI / 2.0];
            let mut detail = Vec::new();
            let mut ok = true;
            for (idx, theta) in thetas.iter().enumerate() {
                let l = Complex::from_polar(1.0, -theta);
                // one pass over n <= 1e6 recording p at the three checkpoints
                let mut p = 0u64;
                let mut ratios = Vec::new();
                for n in 0..=1_000_000u64 {
                    let c = gv.mellin_closed_form(2 * n + 1).unwrap();
                    if (c - l).norm() > eps {
                        p += 1;
                    }
                    if n == 10_000 || n == 100_000 || n == 1_000_000 {
                        ratios.push(p as f64 / n as f64);
                    }
                }
                let arcs = density_arc_count(*theta, 1_000_000);
                let direct = density_ratio(&gv, l, eps, 1_000_000, 1e-10)
                    .map_err(|e| e.to_string())?
                    .counts
                    .last()
                    .unwrap()
                    .1;
                let floor = ratios.iter().copied().fold(f64::MAX, f64::min);
                let counts_equal = arcs == direct && direct == p;
                let above = floor >= DENSITY_FLOOR_PINS[idx] - 1e-9 && floor > 0.0;
                ok &= counts_equal && above;
                detail.push(format!(
                "theta={theta:.3}: arcs {arcs} vs direct {direct} (equal: {counts_equal}), floor {floor:.7} (pin {})",
                DENSITY_FLOOR_PINS[idx]
            ));
            }
            Ok((ok, detail.join("; ")))
        },
    )
}

/// Step-symbol means inside the dyadic windows and extreme-point membership.
///
/// Two sub-checks fail by construction of their targets:
/// - the 0-window mean bound `2^-(6n+3)`: splitting off the first 0-block of
///   the symbol bounds the mean by the block-length ratio
///   `2^-((2n+2)^2-(2n+1)^2) = 2^-(4n+3)`, and the computed means sit just
///   below that, above `2^-(6n+3)` for every n >= 1;
/// - the coefficient scan for indices within 1e-2 of 0 and 1 below n = 1e6:
///   the nearest windows sit at n ~ 2.6e8 (for 0) and n ~ 6e11 (for 1), so
///   the scan's best distances stall near 4.5e-2 and 1.4e-2.
pub fn criterion_6() -> CriterionOutcome {
    outcome(
        6,
        "step symbol: window means and extreme-point membership",
        || {
            let g = StepExample10;
            let mut detail = Vec::new();

            // (a) means in the windows where the symbol is 1
            let mut part_a = true;
            for n in 1..=3u32 {
                let complement = exp2_neg(((2 * n) * (2 * n)) as i32);
                let eps = BoundaryEps::from_complement(complement).unwrap();
                let m = boundary_mean(&g, eps, 1e-12).map_err(|e| e.to_string())?.re;
                let lower = 1.0 - exp2_neg((4 * n + 1) as i32);
                let ok = m >= lower && m <= 1.0;
                part_a &= ok;
                if !ok {
                    detail.push(format!("1-window n={n}: M = {m} outside [{lower}, 1]"));
                }
            }
            detail.push(format!(
                "1-window means within [1 - 2^-(4n+1), 1] for n=1..3: {part_a}"
            ));

            // (b) means in the windows where the symbol is 0, against the stated
            // 2^-(6n+3) target
            let mut part_b = true;
            let mut zero_means = Vec::new();
            for n in 1..=3u32 {
                let complement = exp2_neg(((2 * n + 1) * (2 * n + 1)) as i32);
                let eps = BoundaryEps::from_complement(complement).unwrap();
                let m = boundary_mean(&g, eps, 1e-12).map_err(|e| e.to_string())?.re;
                let upper = exp2_neg((6 * n + 3) as i32);
                part_b &= m >= 0.0 && m <= upper;
                zero_means.push(format!(
                "n={n}: M = {m:.6e} vs stated bound 2^-{} = {upper:.3e} (block-ratio bound 2^-{} = {:.3e})",
                6 * n + 3,
                4 * n + 3,
                exp2_neg((4 * n + 3) as i32)
            ));
            }
            detail.push(format!(
                "0-window means within [0, 2^-(6n+3)]: {part_b} [{}]",
                zero_means.join("; ")
            ));

            // (d) coefficient scan below n = 1e6 for values near 0 and 1
            let mut best_zero = (f64::INFINITY, 0u64);
            let mut best_one = (f64::INFINITY, 0u64);
            let mut hits_zero = Vec::new();
            let mut hits_one = Vec::new();
            for n in 0..=1_000_000u64 {
                let c = g.mellin_closed_form(n).unwrap().re;
                let d0 = c.abs();
                let d1 = (c - 1.0).abs();
                if d0 < best_zero.0 {
                    best_zero = (d0, n);
                }
                if d1 < best_one.0 {
                    best_one = (d1, n);
                }
                if d0 <= 1e-2 {
                    hits_zero.push(n);
                }
                if d1 <= 1e-2 {
                    hits_one.push(n);
                }
            }
            let part_d = !hits_zero.is_empty() && !hits_one.is_empty();
            detail.push(format!(
            "coefficient scan n <= 1e6: {} hits near 0 (best |C_n| = {:.4e} at n = {}), {} hits near 1 (best |C_n - 1| = {:.4e} at n = {}): {part_d}",
            hits_zero.len(),
            best_zero.0,
            best_zero.1,
            hits_one.len(),
            best_one.0,
            best_one.1
        ));

            // (c) membership of 0 and 1 in the mean cluster set at delta = 1e-2,
            // with the scan hits (when any) as the coefficient schedules
            let berezin_schedule: Vec<f64> = (4..=20).map(|k| 1.0 - exp2_neg(k)).collect();
            let schedules_one = MembershipSchedules {
                mellin: if hits_one.is_empty() {
                    (0..=32).collect()
                } else {
                    hits_one.clone()
                },
                mean: match Schedule::mean_dyadic_even(4) {
                    Schedule::Mean(v) => v,
                    _ => unreachable!(),
                },
                berezin: berezin_schedule.clone(),
            };
            let at_one =
                extreme_point_membership(&g, Complex::new(1.0, 0.0), &schedules_one, 1e-2, 1e-10)
                    .map_err(|e| e.to_string())?;
            let schedules_zero = MembershipSchedules {
                mellin: if hits_zero.is_empty() {
                    (0..=32).collect()
                } else {
                    hits_zero.clone()
                },
                mean: match Schedule::mean_dyadic_odd(4) {
                    Schedule::Mean(v) => v,
                    _ => unreachable!(),
                },
                berezin: berezin_schedule,
            };
            let at_zero =
                extreme_point_membership(&g, Complex::new(0.0, 0.0), &schedules_zero, 1e-2, 1e-10)
                    .map_err(|e| e.to_string())?;
            let part_c = at_one.mean.member && at_zero.mean.member;
            detail.push(format!(
                "mean-cluster membership at delta 1e-2: L=1 {} (best {:.3e}), L=0 {} (best {:.3e})",
                at_one.mean.member,
                at_one.mean.best_distance,
                at_zero.mean.member,
                at_zero.mean.best_distance
            ));
            let part_d_membership = at_one.mellin.member && at_zero.mellin.member;
            detail.push(format!(
                "coefficient-cluster membership from scan subsequences: L=1 {}, L=0 {}",
                at_one.mellin.member, at_zero.mellin.member
            ));

            Ok((
                part_a && part_b && part_c && part_d && part_d_membership,
                detail.join(" | "),
            ))
        },
    )
}

/// Series evaluators agree with the defining-integral oracle, and the
/// literature series reproduces its own geometric identity.
pub fn criterion_7() -> CriterionOutcome {
    outcome(
        7,
        "series evaluators validated against the defining integral",
        || {
            let battery: Vec<SymbolRef> = vec![
                Arc::new(Constant::new(Complex::new(1.0, 0.0)).unwrap()),
                Arc::new(Power::new(1.0).unwrap()),
                Arc::new(StepExample10),
            ];
            let mut worst: f64 = 0.0;
            let mut worst_at = String::new();
            for s in &battery {
                for r in [0.0, 0.5, 0.9] {
                    let series = berezin_radial(s.as_ref(), r, 1e-10).map_err(|e| e.to_string())?;
                    let oracle = berezin_integral_oracle(s.as_ref(), 0, Complex::new(r, 0.0), 1e-8)
                        .map_err(|e| e.to_string())?;
                    let diff = (series.value - oracle.value).norm();
                    if diff > worst {
                        worst = diff;
                        worst_at = format!("{} at R = {r}", s.kind());
                    }
                }
            }
            let oracle_ok = worst < 1e-6;

            let unit = QuasihomogeneousSymbol {
                degree: 1,
                radial: Arc::new(Constant::new(Complex::new(1.0, 0.0)).unwrap()),
            };
            let mut printed_worst: f64 = 0.0;
            for k in 1..=9 {
                let r = k as f64 / 10.0;
                let q =
                    berezin_quasihomogeneous(&unit, r, 0.0, 1e-12).map_err(|e| e.to_string())?;
                printed_worst = printed_worst.max((q.printed - Complex::new(r, 0.0)).norm());
            }
            let printed_ok = printed_worst < 1e-10;
            Ok((
            oracle_ok && printed_ok,
            format!(
                "worst series-vs-oracle gap {worst:.3e} ({worst_at}) < 1e-6; printed lift series at f == 1 returns R within {printed_worst:.3e} (< 1e-10)"
            ),
        ))
        },
    )
}

/// The property suites: weight normalization, affine equivariance, convex
/// reconstruction, finite-grid ordering (with nesting for the real part) and
/// the two counting routes.
pub fn criterion_8() -> CriterionOutcome {
    outcome(8, "property suites", || {
        let mut failures = Vec::new();

        // weight normalization
        for family in [WeightFamily::IndexPlusOne, WeightFamily::Index] {
            for k in 0..100 {
                let r = k as f64 / 100.0;
                let res = sum_weighted_coefficients(family, r, 1.0, 1e-13, |_| {
                    Ok::<_, NumericsError>(Complex::new(1.0, 0.0))
                })
                .map_err(|e| e.to_string())?;
                if (res.value.re - 1.0).abs() > res.tail_bound + 1e-12 {
                    failures.push(format!(
                        "weight normalization broke at R = {r} ({family:?})"
                    ));
                }
            }
        }

        // affine equivariance: coefficients (bitwise), transform and means
        let gv: SymbolRef = Arc::new(GrudskyVasilevski);
        let a = Complex::new(1.5, -0.25);
        let b = Complex::new(0.0, 0.75);
        let affine = Affine::new(a, b, gv.clone()).unwrap();
        for n in [0u64, 3, 1000] {
            let lhs = affine.mellin_closed_form(n).unwrap();
            let rhs = a * gv.mellin_closed_form(n).unwrap() + b;
            if lhs != rhs {
                failures.push(format!("coefficient equivariance broke at n = {n}"));
            }
        }
        for r in [0.2, 0.9] {
            let lhs = berezin_radial(&affine, r, 1e-11)
                .map_err(|e| e.to_string())?
                .value;
            let rhs = a * berezin_radial(gv.as_ref(), r, 1e-11)
                .map_err(|e| e.to_string())?
                .value
                + b;
            if (lhs - rhs).norm() > 1e-8 {
                failures.push(format!("transform equivariance broke at R = {r}"));
            }
        }
        for c in [1e-3, 1e-6] {
            let eps = BoundaryEps::from_complement(c).unwrap();
            let lhs = boundary_mean(&affine, eps, 1e-11).map_err(|e| e.to_string())?;
            let rhs = a * boundary_mean(gv.as_ref(), eps, 1e-11).map_err(|e| e.to_string())? + b;
            if (lhs - rhs).norm() > 1e-8 {
                failures.push(format!("mean equivariance broke at complement {c}"));
            }
        }

        // convex reconstruction on deterministic pseudo-random splits
        let mut seed = 0xfeed_5eed_0123_4567u64;
        let mut rand = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        let split_battery: Vec<SymbolRef> = vec![
            gv.clone(),
            Arc::new(StepExample10),
            Arc::new(Power::new(1.0).unwrap()),
        ];
        for s in &split_battery {
            for _ in 0..6 {
                let r = 0.98 * rand();
                let l = Complex::from_polar(1.2 * rand(), 2.0 * PI * rand());
                let eps = 0.05 + 1.2 * rand();
                let d =
                    convex_decomposition(s.as_ref(), r, l, eps, 1e-10, WeightFamily::IndexPlusOne)
                        .map_err(|e| e.to_string())?;
                let lhs = match (d.m_r, d.n_r) {
                    (Some(mr), Some(nr)) => d.a_r * mr + (1.0 - d.a_r) * nr,
                    (Some(mr), None) => mr,
                    (None, Some(nr)) => nr,
                    (None, None) => unreachable!(),
                };
                if (lhs - d.reconstruction).norm() > d.tolerance + 1e-12
                    || !(0.0..=1.0).contains(&d.a_r)
                {
                    failures.push(format!(
                        "convex reconstruction broke for {} at R = {r}",
                        s.kind()
                    ));
                }
            }
        }
        // the split mass stays away from 0 near the boundary for the
        // oscillatory symbol at threshold sqrt 2 (recorded grid minimum
        // 0.054668 at k = 18; the mass oscillates up to ~0.95)
        for k in 4..=20 {
            let r = 1.0 - exp2_neg(k);
            let d = convex_decomposition(
                gv.as_ref(),
                r,
                Complex::new(1.0, 0.0),
                2f64.sqrt(),
                1e-10,
                WeightFamily::IndexPlusOne,
            )
            .map_err(|e| e.to_string())?;
            if d.a_r < GV_SPLIT_MASS_FLOOR {
                failures.push(format!(
                    "split mass collapsed at R = 1 - 2^-{k}: a_R = {}",
                    d.a_r
                ));
            }
        }

        // finite-grid ordering for the battery
        let ordering_battery: Vec<SymbolRef> = vec![
            Arc::new(Constant::new(Complex::new(1.0, 0.0)).unwrap()),
            gv.clone(),
            Arc::new(StepExample10),
            Arc::new(Power::new(1.0).unwrap()),
            Arc::new(RealPart::new(gv.clone())),
        ];
        for s in &ordering_battery {
            let config = ChainConfig {
                nesting: false,
                ..ChainConfig::default()
            };
            match verify_chain(s.as_ref(), &config) {
                Ok(report) => {
                    if !report.ordering_ok {
                        failures.push(format!("ordering broke for {}", s.kind()));
                    }
                }
                Err(e) => failures.push(format!("chain failed for {}: {e}", s.kind())),
            }
        }
        // sampled cluster-set nesting for the real part
        let re_gv = RealPart::new(gv.clone());
        match verify_chain(&re_gv, &ChainConfig::default()) {
            Ok(report) => match report.nesting {
                Some(n) if n.ok => {}
                other => failures.push(format!("nesting check for re:gv not ok: {other:?}")),
            },
            Err(e) => failures.push(format!("chain failed for re:gv: {e}")),
        }

        // the two counting routes agree on a 32-point phase grid
        for n_max in [1_000u64, 10_000, 100_000] {
            for j in 0..32 {
                let theta = -PI + 2.0 * PI * (j as f64 + 0.5) / 32.0;
                let l = Complex::from_polar(1.0, -theta);
                let direct = density_ratio(gv.as_ref(), l, 2f64.sqrt(), n_max, 1e-10)
                    .map_err(|e| e.to_string())?
                    .counts
                    .last()
                    .unwrap()
                    .1;
                let arcs = density_arc_count(theta, n_max);
                if arcs != direct {
                    failures.push(format!(
                        "arc count {arcs} != direct count {direct} at theta = {theta}, N = {n_max}"
                    ));
                }
            }
        }

        if failures.is_empty() {
            Ok((true, "weight normalization, equivariance, reconstruction, ordering (+ nesting for re:gv) and counting-route equality all hold".into()))
        } else {
            Ok((false, failures.join("; ")))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Recomputes the two recorded regression pins; run with
    /// `cargo test -p berezin-lab --lib print_derived_pins -- --ignored --nocapture`
    /// after any change to the series engine and update the constants above.
    #[test]
    #[ignore]
    fn print_derived_pins() {
        let gv = GrudskyVasilevski;
        let mut sup: f64 = 0.0;
        for k in 4..=20u32 {
            let r = 1.0 - exp2_neg(k as i32);
            let v = berezin_radial(&gv, r, 1e-9).unwrap();
            println!("k = {k}: |f~(R)| = {:.12}", v.value.norm());
            sup = sup.max(v.value.norm());
        }
        println!("GV_SUP_BEREZIN_PIN = {sup:.16}");

        let eps = 2f64.sqrt();
        for theta in [0.0, PI / 2.0, PI, -PI / 2.0] {
            let l = Complex::from_polar(1.0, -theta);
            let mut p = 0u64;
            let mut floor = f64::MAX;
            for n in 0..=1_000_000u64 {
                let c = gv.mellin_closed_form(2 * n + 1).unwrap();
                if (c - l).norm() > eps {
                    p += 1;
                }
                if n == 10_000 || n == 100_000 || n == 1_000_000 {
                    floor = floor.min(p as f64 / n as f64);
                }
            }
            println!("theta = {theta}: floor = {floor:.7}");
        }

        let mut min_mass = f64::MAX;
        for k in 4..=20 {
            let r = 1.0 - exp2_neg(k);
            let d = convex_decomposition(
                &gv,
                r,
                Complex::new(1.0, 0.0),
                2f64.sqrt(),
                1e-10,
                WeightFamily::IndexPlusOne,
            )
            .unwrap();
            min_mass = min_mass.min(d.a_r);
        }
        println!("GV_SPLIT_MASS_FLOOR candidate (grid min) = {min_mass:.6}");
    }
}
