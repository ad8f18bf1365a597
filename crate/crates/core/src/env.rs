//! Vertical-level probability environments.
//!
//! An environment assigns to every lattice level `j` the vertical step
//! probability `p(j) in (0, 1/2]`; horizontal steps then carry probability
//! `1/2 - p(j)` each. Levels with `p(j) = 1/2` have no horizontal edges at
//! all, and the all-`1/2` environment (a one-dimensional walk) is rejected.
//!
//! The Cesaro constants are the limits of the partial averages of `1/p`:
//! `avg_k = k^{-1} sum_{j=1..k} 1/p(j) = 2*gamma1 + eps_k` on the upper
//! half-plane and symmetrically `gamma2` below, with `eps_k = o(k^{-tau})`.
//! [`cesaro_estimate`] recovers `(gamma1, gamma2)` from a finite window and
//! fits `tau` from the decay of the recorded residuals.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;

/// Probe window used when an environment is constructed.
pub const DEFAULT_PROBE_RANGE: i64 = 1024;

/// Declarative description of an environment, as read from config files.
///
/// `table` levels use string keys in JSON: `{"kind": "table", "default":
/// 0.5, "levels": {"0": 0.25, "-3": 0.1}}`. `level_set` ranges are
/// inclusive `[lo, hi]` pairs where `null` means unbounded, so the upper
/// half-plane is `[[0, null]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnvSpec {
    /// `p(j) = p` everywhere.
    Uniform { p: f64 },
    /// The two-dimensional comb: `p(0) = 1/4`, `p(j) = 1/2` otherwise.
    Comb,
    /// Half-plane half-comb: `p(j) = 1/4` for `j >= 0`, `1/2` for `j < 0`.
    Hphc,
    /// `p(j) = p_in` on the union of `ranges`, `p_out` elsewhere.
    LevelSet { p_in: f64, p_out: f64, ranges: Vec<(Option<i64>, Option<i64>)> },
    /// `p(j) = probs[j mod len]` (Euclidean remainder).
    Periodic { probs: Vec<f64> },
    /// Explicit per-level table with a default for unlisted levels.
    Table {
        default: f64,
        #[serde(with = "level_map")]
        levels: BTreeMap<i64, f64>,
    },
}

/// JSON object keys are strings; this maps them to and from integer
/// levels (the tagged-enum representation cannot do that natively).
mod level_map {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<i64, f64>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_map(map.iter().map(|(k, v)| (k.to_string(), *v)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, f64>, D::Error> {
        let raw = BTreeMap::<String, f64>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                k.parse::<i64>()
                    .map(|level| (level, v))
                    .map_err(|e| D::Error::custom(format!("invalid level key {k:?}: {e}")))
            })
            .collect()
    }
}

/// A validated environment; the accessor [`Environment::p`] is pure and
/// total on all integers. Immutable after construction, safe to share
/// across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    spec: EnvSpec,
    mirrored: bool,
}

/// Outcome of probing an environment over a finite window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Validity {
    Valid,
    /// `p` outside `(0, 1/2]`; carries the offending level closest to the
    /// origin.
    OutOfBounds {
        level: i64,
        p: f64,
    },
    /// Every probed level has `p = 1/2`: the walk never leaves the y-axis.
    Degenerate,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

fn prob_in_bounds(p: f64) -> bool {
    p.is_finite() && p > 0.0 && p <= 0.5
}

/// Builds an [`Environment`] from its description, rejecting any parameter
/// outside `(0, 1/2]` and the degenerate all-`1/2` profile.
pub fn make_environment(spec: EnvSpec) -> Result<Environment> {
    match &spec {
        EnvSpec::Uniform { p } => {
            if !prob_in_bounds(*p) {
                return Err(Error::InvalidProbability { level: 0, p: *p });
            }
            if *p == 0.5 {
                return Err(Error::DegenerateEnvironment);
            }
        }
        EnvSpec::Comb | EnvSpec::Hphc => {}
        EnvSpec::LevelSet { p_in, p_out, .. } => {
            for p in [p_in, p_out] {
                if !prob_in_bounds(*p) {
                    return Err(Error::InvalidProbability { level: 0, p: *p });
                }
            }
        }
        EnvSpec::Periodic { probs } => {
            if probs.is_empty() {
                return Err(Error::InvalidParameter(
                    "periodic environment needs at least one probability".into(),
                ));
            }
            for (i, p) in probs.iter().enumerate() {
                if !prob_in_bounds(*p) {
                    return Err(Error::InvalidProbability { level: i as i64, p: *p });
                }
            }
            if probs.iter().all(|p| *p == 0.5) {
                return Err(Error::DegenerateEnvironment);
            }
        }
        EnvSpec::Table { default, levels } => {
            if !prob_in_bounds(*default) {
                return Err(Error::InvalidProbability { level: 0, p: *default });
            }
            for (level, p) in levels {
                if !prob_in_bounds(*p) {
                    return Err(Error::InvalidProbability { level: *level, p: *p });
                }
            }
            if *default == 0.5 && levels.values().all(|p| *p == 0.5) {
                return Err(Error::DegenerateEnvironment);
            }
        }
    }
    let env = Environment { spec, mirrored: false };
    match validate_environment(&env, DEFAULT_PROBE_RANGE) {
        Validity::Valid => Ok(env),
        Validity::OutOfBounds { level, p } => Err(Error::InvalidProbability { level, p }),
        Validity::Degenerate => Err(Error::DegenerateEnvironment),
    }
}

/// Probes levels in order of distance from the origin (`0, 1, -1, 2, ...`)
/// over `[-probe_range, probe_range]`, plus any explicitly tabled levels.
/// Accepts iff every probed `p` lies in `(0, 1/2]` and at least one probed
/// level has `p < 1/2`.
pub fn validate_environment(env: &Environment, probe_range: i64) -> Validity {
    assert!(probe_range >= 1, "probe_range must be >= 1");
    let mut any_below_half = false;
    let mut check = |j: i64| -> Option<Validity> {
        let p = env.p(j);
        if !prob_in_bounds(p) {
            return Some(Validity::OutOfBounds { level: j, p });
        }
        if p < 0.5 {
            any_below_half = true;
        }
        None
    };
    if let Some(v) = check(0) {
        return v;
    }
    for j in 1..=probe_range {
        if let Some(v) = check(j) {
            return v;
        }
        if let Some(v) = check(-j) {
            return v;
        }
    }
    if let EnvSpec::Table { levels, .. } = &env.spec {
        for &level in levels.keys() {
            let j = if env.mirrored { -level } else { level };
            if j.abs() > probe_range {
                if let Some(v) = check(j) {
                    return v;
                }
            }
        }
    }
    if any_below_half {
        Validity::Valid
    } else {
        Validity::Degenerate
    }
}

impl Environment {
    pub fn uniform(p: f64) -> Result<Self> {
        make_environment(EnvSpec::Uniform { p })
    }

    pub fn comb() -> Self {
        make_environment(EnvSpec::Comb).expect("comb preset is valid")
    }

    pub fn hphc() -> Self {
        make_environment(EnvSpec::Hphc).expect("hphc preset is valid")
    }

    /// Vertical step probability at level `j`.
    pub fn p(&self, j: i64) -> f64 {
        let j = if self.mirrored { -j } else { j };
        match &self.spec {
            EnvSpec::Uniform { p } => *p,
            EnvSpec::Comb => {
                if j == 0 {
                    0.25
                } else {
                    0.5
                }
            }
            EnvSpec::Hphc => {
                if j >= 0 {
                    0.25
                } else {
                    0.5
                }
            }
            EnvSpec::LevelSet { p_in, p_out, ranges } => {
                let inside = ranges
                    .iter()
                    .any(|(lo, hi)| lo.is_none_or(|l| j >= l) && hi.is_none_or(|h| j <= h));
                if inside {
                    *p_in
                } else {
                    *p_out
                }
            }
            EnvSpec::Periodic { probs } => {
                let idx = j.rem_euclid(probs.len() as i64) as usize;
                probs[idx]
            }
            EnvSpec::Table { default, levels } => levels.get(&j).copied().unwrap_or(*default),
        }
    }

    pub fn spec(&self) -> &EnvSpec {
        &self.spec
    }

    /// The environment reflected about the x-axis: `p'(j) = p(-j)`.
    pub fn mirrored(&self) -> Self {
        Environment { spec: self.spec.clone(), mirrored: !self.mirrored }
    }

    pub fn is_mirrored(&self) -> bool {
        self.mirrored
    }
}

/// Cesaro constants and residual diagnostics for one environment.
///
/// `gamma1 >= gamma2` always holds here; when the raw upper/lower estimates
/// violate that order the roles of the half-planes are exchanged and
/// `swapped` is set. `residuals_pos` stays attached to the upper half-plane
/// (deviations from its own constant), `residuals_neg` to the lower.
#[derive(Debug, Clone, Serialize)]
pub struct CesaroProfile {
    pub gamma1: f64,
    pub gamma2: f64,
    /// Effective rate exponent in `(1/2, 1]`; 1 when the partial averages
    /// are exactly constant on the window.
    pub tau: f64,
    /// Raw log-log regression slope estimate, when a fit was possible.
    pub tau_fit: Option<f64>,
    /// `(k, eps_k)` at dyadic `k`, upper half-plane.
    pub residuals_pos: Vec<(u64, f64)>,
    /// `(k, eps*_k)` at dyadic `k`, lower half-plane.
    pub residuals_neg: Vec<(u64, f64)>,
    pub swapped: bool,
}

/// Partial averages of `1/p` on one half-plane, sampled at dyadic `k`.
/// `sign = 1` probes levels `1..=n_max`, `sign = -1` levels `-1..=-n_max`.
fn dyadic_averages(env: &Environment, n_max: u64, sign: i64) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    let mut sum = 0.0f64;
    let mut next_dyadic = 1u64;
    for k in 1..=n_max {
        sum += 1.0 / env.p(sign * k as i64);
        if k == next_dyadic {
            out.push((k, sum / k as f64));
            next_dyadic *= 2;
        }
    }
    out
}

/// Limit of the partial averages, refined by Richardson extrapolation over
/// the last three dyadic prefixes when they show a clean geometric decay.
fn extrapolate_limit(averages: &[(u64, f64)]) -> f64 {
    let n = averages.len();
    let a3 = averages[n - 1].1;
    if n < 3 {
        return a3;
    }
    let a1 = averages[n - 3].1;
    let a2 = averages[n - 2].1;
    let d1 = a1 - a2;
    let d2 = a2 - a3;
    let scale = a3.abs().max(1.0);
    if d2.abs() < 1e-13 * scale || d1.abs() < 1e-13 * scale {
        return a3;
    }
    let r = d2 / d1;
    if r <= 0.0 || r >= 1.0 {
        return a3;
    }
    a3 - d2 * r / (1.0 - r)
}

/// Estimates `(gamma1, gamma2, tau)` over the window `1..=n_max`.
///
/// `gamma` on each side is half the extrapolated limit of the partial
/// averages of `1/p`. `tau` comes from least squares on
/// `(log k, log |eps_k|)` over dyadic `k >= 16`, dropping residuals that
/// are zero to machine precision; when every residual vanishes the profile
/// is exactly constant and `tau = 1`.
pub fn cesaro_estimate(env: &Environment, n_max: u64) -> CesaroProfile {
    assert!(n_max >= 16, "n_max must be >= 16");
    let avgs_pos = dyadic_averages(env, n_max, 1);
    let avgs_neg = dyadic_averages(env, n_max, -1);
    let g_pos = extrapolate_limit(&avgs_pos) / 2.0;
    let g_neg = extrapolate_limit(&avgs_neg) / 2.0;

    let residuals = |avgs: &[(u64, f64)], gamma: f64| -> Vec<(u64, f64)> {
        avgs.iter().map(|&(k, a)| (k, a - 2.0 * gamma)).collect()
    };
    let res_pos = residuals(&avgs_pos, g_pos);
    let res_neg = residuals(&avgs_neg, g_neg);

    // Residuals indistinguishable from zero do not carry rate information.
    let floor = 1e-13 * (g_pos.abs() + g_neg.abs()).max(1.0);
    let fit_points: Vec<(f64, f64)> = res_pos
        .iter()
        .chain(res_neg.iter())
        .filter(|(k, e)| *k >= 16 && e.abs() > floor)
        .map(|&(k, e)| ((k as f64).ln(), e.abs().ln()))
        .collect();
    let tau_fit = stats::least_squares(&fit_points).ok().map(|(slope, _, _)| -slope);
    let tau = match tau_fit {
        Some(t) => t.clamp(0.51, 1.0),
        None => 1.0,
    };

    let swapped = g_neg > g_pos;
    let (gamma1, gamma2) = if swapped { (g_neg, g_pos) } else { (g_pos, g_neg) };
    CesaroProfile {
        gamma1,
        gamma2,
        tau,
        tau_fit,
        residuals_pos: res_pos,
        residuals_neg: res_neg,
        swapped,
    }
}
