//! Exact and statistical verification of the model's quantitative claims.
//!
//! The operations here fall into three groups. Exact algebra:
//! [`abel_identity_check`] (a summation-by-parts identity on local-time
//! profiles) and [`exact_endpoint_law`] (dynamic-programming enumeration of
//! the walk law for small horizons). Goodness of fit:
//! [`endpoint_distribution_test`] compares the scaled vertical endpoint
//! with the oscillating-BM marginal, [`horizontal_fraction_test`] compares
//! the horizontal step fraction with the closed-form complement law, and
//! [`construction_equivalence_test`] compares the constructive simulator
//! with the exact law in total variation. Scaling diagnostics:
//! [`coupling_error_scan`] and [`local_time_increment_scan`] fit log-log
//! slopes against theoretical rate exponents, and [`lil_diagnostics`]
//! tracks iterated-logarithm statistics along single long trajectories.
//!
//! Every operation is deterministic given its seed: replica `r` of a test
//! draws from a stream derived from (seed, test label, r), so reports are
//! identical across runs and worker counts.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::env::{self, Environment};
use crate::error::{Error, Result};
use crate::seed;
use crate::stats;
use crate::timechange::{self, DensityVariant, DENSITY_INTERVALS};
use crate::walk::{self, ConstructiveWalk, DirectWalk, LocalTimeProfile, PathMode, StepKind};

/// Window used when fitting Cesaro constants for a test.
const CESARO_WINDOW: u64 = 4096;

/// Result of a log-log regression against dyadic horizons.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// 1 for exactly collinear points.
    pub r_squared: f64,
    /// The (log N, log err) pairs actually used by the fit.
    pub points: Vec<(f64, f64)>,
}

/// Outcome of one goodness-of-fit comparison.
#[derive(Debug, Clone, Serialize)]
pub struct GofReport {
    /// Sup distance between the empirical and reference CDFs, in [0, 1].
    pub ks_distance: f64,
    pub n_samples: usize,
    /// Human-readable description of the reference law.
    pub reference: String,
    pub threshold: f64,
    pub pass: bool,
}

/// Which trajectory statistic a LIL diagnostic tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LilKind {
    /// Running maximum of `|S(k)|` for a simple symmetric walk,
    /// normalized by `sqrt(2 n log log n)`; limit constant 1.
    WalkMax,
    /// Maximal local time of a simple symmetric walk, same normalization;
    /// limit constant 1.
    LocalTimeMax,
    /// Running maximum of `|C1(k)|`, normalized by
    /// `sqrt(n log log n)`; limit constant `sqrt(2 (1 - 1/gamma1))` with
    /// `gamma1` the larger constant.
    C1,
    /// Running maxima of `C2(k)` (primary, constant `sqrt(2/gamma_up)`)
    /// and of `-C2(k)` (secondary, constant `sqrt(2/gamma_down)`), both
    /// normalized by `sqrt(n log log n)`.
    C2,
}

impl LilKind {
    pub fn all() -> [LilKind; 4] {
        [LilKind::WalkMax, LilKind::LocalTimeMax, LilKind::C1, LilKind::C2]
    }

    pub fn label(self) -> &'static str {
        match self {
            LilKind::WalkMax => "walk_max",
            LilKind::LocalTimeMax => "local_time_max",
            LilKind::C1 => "c1",
            LilKind::C2 => "c2",
        }
    }
}

/// One normalized statistic series along the dyadic checkpoints.
#[derive(Debug, Clone, Serialize)]
pub struct LilSeries {
    pub target_constant: f64,
    pub normalized_stats: Vec<f64>,
}

impl LilSeries {
    pub fn final_normalized(&self) -> f64 {
        *self.normalized_stats.last().expect("at least one checkpoint")
    }

    pub fn max_normalized(&self) -> f64 {
        self.normalized_stats.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether the final value lies within `band` times the target.
    pub fn in_band(&self, band: (f64, f64)) -> bool {
        let ratio = self.final_normalized() / self.target_constant;
        band.0 <= ratio && ratio <= band.1
    }
}

/// Normalized trajectory statistics at dyadic checkpoints, against the
/// limit constant. These are bounded diagnostics, not convergent tests:
/// iterated-logarithm convergence is unobservable at desk scale.
#[derive(Debug, Clone, Serialize)]
pub struct LilDiagnostic {
    pub kind: LilKind,
    pub checkpoints: Vec<u64>,
    pub primary: LilSeries,
    /// The downward-side series for [`LilKind::C2`], absent otherwise.
    pub secondary: Option<LilSeries>,
}

/// Dense per-level counters for walks that stay near the origin.
/// Constant-time bumps; maxima by linear scan over the touched range.
struct DenseCounts {
    counts: Vec<u64>,
    origin: usize,
    lo: i64,
    hi: i64,
}

impl DenseCounts {
    fn new(expected_halfspan: usize) -> Self {
        let halfspan = expected_halfspan.max(16);
        DenseCounts {
            counts: vec![0; 2 * halfspan + 1],
            origin: halfspan,
            lo: i64::MAX,
            hi: i64::MIN,
        }
    }

    fn index(&mut self, level: i64) -> usize {
        loop {
            let idx = level + self.origin as i64;
            if idx >= 0 && (idx as usize) < self.counts.len() {
                return idx as usize;
            }
            // Double the span around the origin.
            let old_len = self.counts.len();
            let mut grown = vec![0; 2 * old_len + 1];
            let shift = old_len.div_ceil(2);
            grown[shift..shift + old_len].copy_from_slice(&self.counts);
            self.counts = grown;
            self.origin += shift;
        }
    }

    fn bump(&mut self, level: i64) {
        let idx = self.index(level);
        self.counts[idx] += 1;
        self.lo = self.lo.min(level);
        self.hi = self.hi.max(level);
    }

    fn get(&self, level: i64) -> u64 {
        let idx = level + self.origin as i64;
        if idx >= 0 && (idx as usize) < self.counts.len() {
            self.counts[idx as usize]
        } else {
            0
        }
    }

    fn max_count(&self) -> u64 {
        if self.lo > self.hi {
            return 0;
        }
        (self.lo..=self.hi).map(|l| self.get(l)).max().unwrap_or(0)
    }

    /// `sup_x |count(x+1) - count(x)|`, counting the zero fringe outside
    /// the touched range.
    fn max_adjacent_diff(&self) -> u64 {
        if self.lo > self.hi {
            return 0;
        }
        let mut best = 0u64;
        let mut prev = 0u64;
        for level in self.lo..=self.hi {
            let c = self.get(level);
            best = best.max(c.abs_diff(prev));
            prev = c;
        }
        best.max(prev)
    }
}

/// Checks the summation-by-parts identity on the positive-level part of a
/// local-time profile: with `kappa_j = j^{-1} sum_{k<=j} 1/beta_k`,
///
/// `sum_j xi(j)/beta_j = rho sum_j xi(j)
///     + sum_j j (kappa_j - rho)(xi(j) - xi(j+1))`.
///
/// Returns `(lhs, rhs, |lhs - rhs|)`; the identity is exact up to
/// floating-point roundoff for every finite profile and any `rho`.
pub fn abel_identity_check(
    profile: &LocalTimeProfile,
    betas: impl Fn(i64) -> f64,
    rho: f64,
) -> Result<(f64, f64, f64)> {
    let j_max = profile.counts.iter().filter(|(j, c)| **j >= 1 && **c > 0).map(|(j, _)| *j).max();
    let Some(j_max) = j_max else {
        return Ok((0.0, 0.0, 0.0));
    };
    let xi = |j: i64| profile.count(j) as f64;
    let mut lhs = 0.0;
    let mut total = 0.0;
    let mut correction = 0.0;
    let mut inv_beta_sum = 0.0;
    for j in 1..=j_max {
        let beta = betas(j);
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta at level {j} must be positive, got {beta}"
            )));
        }
        inv_beta_sum += 1.0 / beta;
        let kappa = inv_beta_sum / j as f64;
        lhs += xi(j) / beta;
        total += xi(j);
        correction += j as f64 * (kappa - rho) * (xi(j) - xi(j + 1));
    }
    let rhs = rho * total + correction;
    Ok((lhs, rhs, (lhs - rhs).abs()))
}

/// Least squares on `(log N, log err)`; pairs with a nonpositive entry
/// carry no rate information and are dropped. Errors when fewer than
/// three usable points remain.
pub fn exponent_regression(points: &[(f64, f64)]) -> Result<ExponentFit> {
    let log_points: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, e)| *n > 0.0 && *e > 0.0)
        .map(|&(n, e)| (n.ln(), e.ln()))
        .collect();
    let (slope, intercept, r_squared) = stats::least_squares(&log_points)?;
    Ok(ExponentFit { slope, intercept, r_squared, points: log_points })
}

/// Upper/lower-half-plane constants and the rate exponent for an
/// environment, honoring config overrides. `gamma_up` stays attached to
/// the upper half-plane (it is the smaller one for mirrored profiles).
fn resolve_constants(cfg: &ExperimentConfig, env: &Environment) -> (f64, f64, f64) {
    let profile = env::cesaro_estimate(env, CESARO_WINDOW);
    let (mut g_up, mut g_down) = if profile.swapped {
        (profile.gamma2, profile.gamma1)
    } else {
        (profile.gamma1, profile.gamma2)
    };
    if let Some(g) = cfg.gamma1 {
        g_up = g;
    }
    if let Some(g) = cfg.gamma2 {
        g_down = g;
    }
    (g_up, g_down, cfg.tau.unwrap_or(profile.tau))
}

/// Fits the log-log slope of the median coupling surrogate
/// `|N - A_hat_2(V_N)|` over dyadic horizons, where `A_hat_2` applies the
/// Cesaro constants to the vertical walk's own local times. The slope
/// should not exceed `5/4 - tau/2 + epsilon`.
pub fn coupling_error_scan(
    env: &Environment,
    n_grid: &[u64],
    replicas: u64,
    seed: u64,
) -> Result<ExponentFit> {
    if replicas < 50 {
        return Err(Error::InvalidParameter(format!(
            "coupling scan needs at least 50 replicas, got {replicas}"
        )));
    }
    let profile = env::cesaro_estimate(env, CESARO_WINDOW);
    let (g_up, g_down) = if profile.swapped {
        (profile.gamma2, profile.gamma1)
    } else {
        (profile.gamma1, profile.gamma2)
    };
    let mut points = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let label = format!("verify.coupling.n{n}");
        let mut errs: Vec<f64> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let mut walker = ConstructiveWalk::new(env, seed::derive_u64(seed, &label, r));
                let mut upper = 0u64;
                let mut lower = 0u64;
                for _ in 0..n {
                    if walker.step() == StepKind::Vertical {
                        if walker.position().1 >= 0 {
                            upper += 1;
                        } else {
                            lower += 1;
                        }
                    }
                }
                let a_hat = g_up * upper as f64 + g_down * lower as f64;
                (n as f64 - a_hat).abs()
            })
            .collect();
        points.push((n as f64, stats::median(&mut errs)));
    }
    exponent_regression(&points)
}

/// Two-sample KS comparison of the scaled vertical endpoint
/// `C2(N)/sqrt(N)` against the oscillating-BM marginal `Y(1)`.
/// `gamma1`/`gamma2` are attached to the upper/lower half-planes; a
/// mirrored orientation is handled by the `W -> -W` symmetry.
#[allow(clippy::too_many_arguments)]
pub fn endpoint_distribution_test(
    env: &Environment,
    n: u64,
    replicas: u64,
    gamma1: f64,
    gamma2: f64,
    bm_replicas: u64,
    dt: f64,
    seed: u64,
    threshold: f64,
) -> Result<GofReport> {
    let mut walk_samples: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let path = walk::simulate_direct_with(
                env,
                n,
                seed::derive_u64(seed, "verify.endpoint.walk", r),
                PathMode::Summary,
            );
            path.end().1 as f64 / (n as f64).sqrt()
        })
        .collect();
    let (g_hi, g_lo, flip) =
        if gamma1 >= gamma2 { (gamma1, gamma2, false) } else { (gamma2, gamma1, true) };
    let mut bm_samples: Vec<f64> = (0..bm_replicas)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let w = timechange::simulate_wiener(
                1.0,
                dt,
                seed::derive_u64(seed, "verify.endpoint.bm", r),
            )?;
            let y = timechange::oscillating_bm(&w, g_hi, g_lo, &[1.0])?[0];
            Ok(if flip { -y } else { y })
        })
        .collect::<Result<_>>()?;
    let ks_distance = stats::ks_two_sample(&mut walk_samples, &mut bm_samples);
    Ok(GofReport {
        ks_distance,
        n_samples: replicas as usize,
        reference: format!(
            "oscillating BM Y(1), gamma = ({gamma1}, {gamma2}), dt = {dt}, {bm_replicas} paths"
        ),
        threshold,
        pass: ks_distance <= threshold,
    })
}

/// One-sample KS comparison of the horizontal step fraction `H_N / N`
/// against the law of `t - A^{-1}(t)` at `t = 1` with fitted constants.
/// Equal constants make the limit deterministic at `1 - 1/gamma`; the
/// test then degenerates to a concentration check with
/// `concentration_tol` as the bound, reported through the same shape.
pub fn horizontal_fraction_test(
    env: &Environment,
    n: u64,
    replicas: u64,
    seed: u64,
    threshold: f64,
    concentration_tol: f64,
) -> Result<GofReport> {
    let profile = env::cesaro_estimate(env, CESARO_WINDOW);
    let (g1, g2) = (profile.gamma1, profile.gamma2);
    let samples: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let (_, dec) = walk::simulate_constructive_with(
                env,
                n,
                seed::derive_u64(seed, "verify.horizontal", r),
                PathMode::Summary,
            );
            dec.h as f64 / n as f64
        })
        .collect();
    if (g1 - g2).abs() < 1e-9 {
        let center = 1.0 - 1.0 / g1;
        let worst = samples.iter().map(|h| (h - center).abs()).fold(0.0f64, f64::max);
        return Ok(GofReport {
            ks_distance: worst,
            n_samples: replicas as usize,
            reference: format!("degenerate point mass at 1 - 1/gamma = {center}"),
            threshold: concentration_tol,
            pass: worst <= concentration_tol,
        });
    }
    let table =
        timechange::density_table(1.0, g1, g2, DensityVariant::Complement, DENSITY_INTERVALS)?;
    let mut samples = samples;
    let ks_distance = stats::ks_one_sample(&mut samples, |v| table.cdf(v));
    Ok(GofReport {
        ks_distance,
        n_samples: replicas as usize,
        reference: format!("complement law at t = 1, gamma = ({g1}, {g2})"),
        threshold,
        pass: ks_distance <= threshold,
    })
}

/// Fits the growth exponent of the maximal adjacent local-time increment
/// `sup_x |xi(x+1, n) - xi(x, n)|` of a simple symmetric walk over dyadic
/// horizons (medians over replicas). The limit theorem puts the exponent
/// below `1/4 + epsilon`.
pub fn local_time_increment_scan(n_grid: &[u64], replicas: u64, seed: u64) -> Result<ExponentFit> {
    let mut grid: Vec<u64> = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let n_max = *grid.last().ok_or(Error::TooFewPoints { needed: 3, got: 0 })?;
    let per_replica: Vec<Vec<u64>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = seed::rng_for(seed, "verify.increments", r);
            let mut counts = DenseCounts::new(3 * (n_max as f64).sqrt() as usize);
            let mut pos = 0i64;
            let mut sups = Vec::with_capacity(grid.len());
            let mut next = 0usize;
            for step in 1..=n_max {
                pos += if rng.random::<bool>() { 1 } else { -1 };
                counts.bump(pos);
                if next < grid.len() && step == grid[next] {
                    sups.push(counts.max_adjacent_diff());
                    next += 1;
                }
            }
            sups
        })
        .collect();
    let mut points = Vec::with_capacity(grid.len());
    for (i, &n) in grid.iter().enumerate() {
        let mut sups: Vec<f64> = per_replica.iter().map(|s| s[i] as f64).collect();
        points.push((n as f64, stats::median(&mut sups)));
    }
    exponent_regression(&points)
}

/// Tracks one LIL statistic along a single trajectory at dyadic
/// checkpoints `8, 16, ..., n_max` (`n_max` a power of two, at least
/// 2^16). The simple-walk kinds ignore the environment.
pub fn lil_diagnostics(
    kind: LilKind,
    env: &Environment,
    n_max: u64,
    seed: u64,
) -> Result<LilDiagnostic> {
    if n_max < (1 << 16) || !n_max.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "LIL diagnostics need a dyadic n_max >= 2^16, got {n_max}"
        )));
    }
    let cfg_free = ExperimentConfig { gamma1: None, gamma2: None, ..ExperimentConfig::default() };
    let (g_up, g_down, _) = resolve_constants(&cfg_free, env);
    let g_max = g_up.max(g_down);

    let checkpoints: Vec<u64> = (3..=n_max.ilog2()).map(|k| 1u64 << k).collect();
    let label = format!("verify.lil.{}", kind.label());
    let walk_seed = seed::derive_u64(seed, &label, 0);

    // Scaling denominators: sqrt(2 n log log n) for the simple-walk
    // lemmas, sqrt(n log log n) for the walk components.
    let srw_scale = |n: u64| (2.0 * n as f64 * (n as f64).ln().ln()).sqrt();
    let component_scale = |n: u64| (n as f64 * (n as f64).ln().ln()).sqrt();

    let mut primary_stats = Vec::with_capacity(checkpoints.len());
    let mut secondary_stats = Vec::with_capacity(checkpoints.len());
    match kind {
        LilKind::WalkMax | LilKind::LocalTimeMax => {
            let mut rng = seed::rng_for(walk_seed, "walk.srw", 0);
            let mut counts = DenseCounts::new(3 * (n_max as f64).sqrt() as usize);
            let mut pos = 0i64;
            let mut max_abs = 0u64;
            let mut next = 0usize;
            for step in 1..=n_max {
                pos += if rng.random::<bool>() { 1 } else { -1 };
                max_abs = max_abs.max(pos.unsigned_abs());
                if kind == LilKind::LocalTimeMax {
                    counts.bump(pos);
                }
                if next < checkpoints.len() && step == checkpoints[next] {
                    let stat = match kind {
                        LilKind::WalkMax => max_abs as f64,
                        _ => counts.max_count() as f64,
                    };
                    primary_stats.push(stat / srw_scale(step));
                    next += 1;
                }
            }
        }
        LilKind::C1 | LilKind::C2 => {
            let mut walker = DirectWalk::new(env, walk_seed);
            let mut max_c1_abs = 0u64;
            let mut max_c2 = 0i64;
            let mut min_c2 = 0i64;
            let mut next = 0usize;
            for step in 1..=n_max {
                walker.step();
                let (c1, c2) = walker.position();
                max_c1_abs = max_c1_abs.max(c1.unsigned_abs());
                max_c2 = max_c2.max(c2);
                min_c2 = min_c2.min(c2);
                if next < checkpoints.len() && step == checkpoints[next] {
                    let scale = component_scale(step);
                    match kind {
                        LilKind::C1 => primary_stats.push(max_c1_abs as f64 / scale),
                        _ => {
                            primary_stats.push(max_c2 as f64 / scale);
                            secondary_stats.push((-min_c2) as f64 / scale);
                        }
                    }
                    next += 1;
                }
            }
        }
    }

    let primary_target = match kind {
        LilKind::WalkMax | LilKind::LocalTimeMax => 1.0,
        LilKind::C1 => (2.0 * (1.0 - 1.0 / g_max)).sqrt(),
        LilKind::C2 => (2.0 / g_up).sqrt(),
    };
    let secondary = (kind == LilKind::C2).then(|| LilSeries {
        target_constant: (2.0 / g_down).sqrt(),
        normalized_stats: secondary_stats,
    });
    Ok(LilDiagnostic {
        kind,
        checkpoints,
        primary: LilSeries { target_constant: primary_target, normalized_stats: primary_stats },
        secondary,
    })
}

/// Exact law of `C(n)` by dynamic programming over the reachable lattice
/// square. Feasible for small `n`; the support has at most `(2n+1)^2`
/// points.
pub fn exact_endpoint_law(env: &Environment, n: u64) -> BTreeMap<(i64, i64), f64> {
    let mut law: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    law.insert((0, 0), 1.0);
    for _ in 0..n {
        let mut next: BTreeMap<(i64, i64), f64> = BTreeMap::new();
        for (&(x, y), &mass) in &law {
            let p = env.p(y);
            let q = 0.5 - p;
            *next.entry((x, y + 1)).or_insert(0.0) += mass * p;
            *next.entry((x, y - 1)).or_insert(0.0) += mass * p;
            if q > 0.0 {
                *next.entry((x + 1, y)).or_insert(0.0) += mass * q;
                *next.entry((x - 1, y)).or_insert(0.0) += mass * q;
            }
        }
        law = next;
    }
    law
}

/// Total-variation distance between the exact law of `C(n_small)` and the
/// empirical law of `mc_samples` constructive simulations.
pub fn construction_equivalence_test(
    env: &Environment,
    n_small: u64,
    mc_samples: u64,
    seed: u64,
) -> Result<f64> {
    if n_small > 8 {
        return Err(Error::InvalidParameter(format!(
            "exact enumeration is limited to 8 steps, got {n_small}"
        )));
    }
    if mc_samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let exact = exact_endpoint_law(env, n_small);
    let counts: BTreeMap<(i64, i64), u64> = (0..mc_samples)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<(i64, i64), u64>, r| {
            let (path, _) = walk::simulate_constructive_with(
                env,
                n_small,
                seed::derive_u64(seed, "verify.equivalence", r),
                PathMode::Summary,
            );
            *acc.entry(path.end()).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    let empirical: BTreeMap<(i64, i64), f64> =
        counts.into_iter().map(|(k, c)| (k, c as f64 / mc_samples as f64)).collect();
    Ok(stats::total_variation(&exact, &empirical))
}

/// One serialized verification result; the JSON shape consumed by the
/// report files and the export command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub test: String,
    pub params: serde_json::Value,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub points: Vec<(f64, f64)>,
}

/// Operation names of this module, for registry checks.
pub const OPERATIONS: &[&str] = &[
    "abel_identity_check",
    "coupling_error_scan",
    "endpoint_distribution_test",
    "horizontal_fraction_test",
    "local_time_increment_scan",
    "lil_diagnostics",
    "construction_equivalence_test",
    "exponent_regression",
];

/// Named suites and the operations each one exercises; the union covers
/// every operation.
pub const SUITES: &[(&str, &[&str])] = &[
    ("abel", &["abel_identity_check"]),
    ("coupling", &["coupling_error_scan", "exponent_regression"]),
    ("endpoint", &["endpoint_distribution_test"]),
    ("horizontal", &["horizontal_fraction_test"]),
    ("increments", &["local_time_increment_scan", "exponent_regression"]),
    ("lil", &["lil_diagnostics"]),
    ("equivalence", &["construction_equivalence_test"]),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(name, _)| *name).collect()
}

/// Runs one named suite with the given configuration, producing one or
/// more reports.
pub fn run_suite(name: &str, cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    match name {
        "abel" => suite_abel(cfg),
        "coupling" => suite_coupling(cfg),
        "endpoint" => suite_endpoint(cfg),
        "horizontal" => suite_horizontal(cfg),
        "increments" => suite_increments(cfg),
        "lil" => suite_lil(cfg),
        "equivalence" => suite_equivalence(cfg),
        other => Err(Error::UnknownSuite(other.to_string())),
    }
}

fn suite_abel(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let profiles = 1000u64;
    let mut rng = seed::rng_for(cfg.master_seed, "verify.abel", 0);
    let mut worst = 0.0f64;
    for _ in 0..profiles {
        let j_max = rng.random_range(1..=24i64);
        let mut counts = BTreeMap::new();
        for j in 1..=j_max {
            let c = rng.random_range(0..=40u64);
            if c > 0 {
                counts.insert(j, c);
            }
        }
        counts.insert(j_max, rng.random_range(1..=40u64));
        let horizon = counts.values().sum();
        let profile = LocalTimeProfile { counts, horizon };
        let betas: Vec<f64> = (0..=j_max as usize).map(|_| rng.random_range(0.05..2.0)).collect();
        let rho = rng.random_range(0.25..4.0);
        let (lhs, rhs, diff) = abel_identity_check(&profile, |j| betas[j as usize - 1], rho)?;
        let rel = diff / lhs.abs().max(rhs.abs()).max(1.0);
        worst = worst.max(rel);
    }
    let threshold = cfg.thresholds.identity_rel;
    Ok(vec![Report {
        test: "abel_identity".into(),
        params: serde_json::json!({ "profiles": profiles, "seed": cfg.master_seed }),
        statistic: worst,
        threshold,
        pass: worst <= threshold,
        points: Vec::new(),
    }])
}

fn suite_coupling(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let env = env::make_environment(cfg.env.clone())?;
    let (g_up, g_down, tau) = resolve_constants(cfg, &env);
    let fit = coupling_error_scan(&env, &cfg.n_grid, cfg.scan_replicas, cfg.master_seed)?;
    let threshold = 1.25 - tau / 2.0 + cfg.epsilon;
    Ok(vec![Report {
        test: "coupling_exponent".into(),
        params: serde_json::json!({
            "env": cfg.env,
            "n_grid": cfg.n_grid,
            "replicas": cfg.scan_replicas,
            "gamma_up": g_up,
            "gamma_down": g_down,
            "tau": tau,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
        }),
        statistic: fit.slope,
        threshold,
        pass: fit.slope <= threshold,
        points: fit.points.iter().map(|&(lx, ly)| (lx.exp(), ly.exp())).collect(),
    }])
}

fn suite_endpoint(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let env = env::make_environment(cfg.env.clone())?;
    let (g_up, g_down, _) = resolve_constants(cfg, &env);
    let gof = endpoint_distribution_test(
        &env,
        cfg.n,
        cfg.replicas,
        g_up,
        g_down,
        cfg.bm_replicas,
        cfg.dt,
        cfg.master_seed,
        cfg.thresholds.ks_two_sample,
    )?;
    Ok(vec![Report {
        test: "endpoint_distribution".into(),
        params: serde_json::json!({
            "env": cfg.env,
            "n": cfg.n,
            "replicas": cfg.replicas,
            "bm_replicas": cfg.bm_replicas,
            "dt": cfg.dt,
            "gamma_up": g_up,
            "gamma_down": g_down,
            "reference": gof.reference,
        }),
        statistic: gof.ks_distance,
        threshold: gof.threshold,
        pass: gof.pass,
        points: Vec::new(),
    }])
}

fn suite_horizontal(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let env = env::make_environment(cfg.env.clone())?;
    let gof = horizontal_fraction_test(
        &env,
        cfg.n,
        cfg.replicas,
        cfg.master_seed,
        cfg.thresholds.ks_one_sample,
        cfg.thresholds.concentration,
    )?;
    Ok(vec![Report {
        test: "horizontal_fraction".into(),
        params: serde_json::json!({
            "env": cfg.env,
            "n": cfg.n,
            "replicas": cfg.replicas,
            "reference": gof.reference,
        }),
        statistic: gof.ks_distance,
        threshold: gof.threshold,
        pass: gof.pass,
        points: Vec::new(),
    }])
}

fn suite_increments(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let fit = local_time_increment_scan(&cfg.n_grid, cfg.scan_replicas, cfg.master_seed)?;
    let threshold = cfg.thresholds.increment_slope;
    Ok(vec![Report {
        test: "local_time_increments".into(),
        params: serde_json::json!({
            "n_grid": cfg.n_grid,
            "replicas": cfg.scan_replicas,
            "slope": fit.slope,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
        }),
        statistic: fit.slope,
        threshold,
        pass: fit.slope <= threshold,
        points: fit.points.iter().map(|&(lx, ly)| (lx.exp(), ly.exp())).collect(),
    }])
}

/// Reports for one LIL kind ([`LilKind::C2`] yields both one-sided
/// statistics).
pub fn lil_reports(kind: LilKind, cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let env = env::make_environment(cfg.env.clone())?;
    let band = cfg.thresholds.lil_band;
    let diag = lil_diagnostics(kind, &env, cfg.lil_n_max, cfg.master_seed)?;
    let mut series = vec![(format!("lil_{}", kind.label()), &diag.primary)];
    if let Some(secondary) = &diag.secondary {
        series[0].0 = "lil_c2_upper".into();
        series.push(("lil_c2_lower".into(), secondary));
    }
    let mut reports = Vec::new();
    for (test, s) in series {
        let ratio = s.final_normalized() / s.target_constant;
        reports.push(Report {
            test,
            params: serde_json::json!({
                "env": cfg.env,
                "kind": kind.label(),
                "n_max": cfg.lil_n_max,
                "target_constant": s.target_constant,
                "final_normalized": s.final_normalized(),
                "max_normalized": s.max_normalized(),
                "band_low": band.0,
            }),
            statistic: ratio,
            threshold: band.1,
            pass: s.in_band(band),
            points: diag
                .checkpoints
                .iter()
                .zip(&s.normalized_stats)
                .map(|(&n, &v)| (n as f64, v))
                .collect(),
        });
    }
    Ok(reports)
}

fn suite_lil(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let mut reports = Vec::new();
    for kind in LilKind::all() {
        reports.extend(lil_reports(kind, cfg)?);
    }
    Ok(reports)
}

fn suite_equivalence(cfg: &ExperimentConfig) -> Result<Vec<Report>> {
    let env = env::make_environment(cfg.env.clone())?;
    let tv =
        construction_equivalence_test(&env, cfg.equivalence_n, cfg.mc_samples, cfg.master_seed)?;
    let threshold = cfg.thresholds.tv_distance;
    Ok(vec![Report {
        test: "construction_equivalence".into(),
        params: serde_json::json!({
            "env": cfg.env,
            "n": cfg.equivalence_n,
            "mc_samples": cfg.mc_samples,
        }),
        statistic: tv,
        threshold,
        pass: tv <= threshold,
        points: Vec::new(),
    }])
}
