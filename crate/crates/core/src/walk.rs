//! Simulators for the anisotropic walk, local times, and the
//! horizontal/vertical step decomposition.
//!
//! Two equivalent simulators are provided. [`simulate_direct`] draws each
//! step from the Markov kernel: from level `j` the walk moves to either
//! vertical neighbour with probability `p(j)` and to either horizontal
//! neighbour with probability `1/2 - p(j)`. [`simulate_constructive`]
//! builds the same law from two embedded simple symmetric walks: on the
//! i-th visit to level `j` it takes a geometric number of horizontal steps
//! with `P(G = k) = 2 p(j) (1 - 2 p(j))^k`, then one vertical step. The
//! endpoint after `N` steps is `(S1(H_N), S2(V_N))` with `H_N + V_N = N`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};
use crate::seed;

/// Largest `N` for which the batch simulators keep the full position
/// sequence; beyond this only running statistics are stored.
pub const FULL_STORAGE_LIMIT: u64 = 1 << 26;

/// Whether a simulated path stores every position or only running
/// statistics (endpoint, local times, step counters).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathMode {
    Full,
    Summary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    Horizontal,
    Vertical,
}

impl StepKind {
    fn csv_tag(self) -> &'static str {
        match self {
            StepKind::Horizontal => "h",
            StepKind::Vertical => "v",
        }
    }
}

/// A simulated trajectory starting at the origin.
///
/// In [`PathMode::Full`] the positions `(C1(n), C2(n))` for `n = 0..=N` and
/// the per-step kind markers are kept; in summary mode only the running
/// statistics survive. Either way the vertical-component local times
/// `xi(j, N)` (counting steps `k = 1..N`, so they sum to `N` exactly) and
/// the endpoint are available.
#[derive(Debug, Clone)]
pub struct WalkPath {
    env: Environment,
    seed: u64,
    len: u64,
    end: (i64, i64),
    local_times: BTreeMap<i64, u64>,
    positions: Option<Vec<(i64, i64)>>,
    step_kinds: Option<Vec<StepKind>>,
}

impl WalkPath {
    pub fn env(&self) -> &Environment {
        &self.env
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of steps `N`.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> (i64, i64) {
        self.end
    }

    /// Full position sequence `(C1(n), C2(n))`, `n = 0..=N`, when stored.
    pub fn positions(&self) -> Option<&[(i64, i64)]> {
        self.positions.as_deref()
    }

    /// Per-step kind markers (`step_kinds[k-1]` describes step `k`), when
    /// stored.
    pub fn step_kinds(&self) -> Option<&[StepKind]> {
        self.step_kinds.as_deref()
    }

    /// Local times of the vertical component over the whole path.
    pub fn local_time_profile(&self) -> LocalTimeProfile {
        LocalTimeProfile { counts: self.local_times.clone(), horizon: self.len }
    }

    /// Renders the path as CSV with columns `n, c1, c2, kind`; the origin
    /// row carries kind `start`. Fails for summary-mode paths.
    pub fn to_csv(&self) -> Result<String> {
        let positions = self.positions.as_ref().ok_or_else(|| {
            Error::InvalidParameter(
                "cannot export a summary-mode path; positions were not stored".into(),
            )
        })?;
        let kinds = self.step_kinds.as_ref().expect("kinds stored with positions");
        let mut out = String::from("n,c1,c2,kind\n");
        for (n, (c1, c2)) in positions.iter().enumerate() {
            let kind = if n == 0 { "start" } else { kinds[n - 1].csv_tag() };
            out.push_str(&format!("{n},{c1},{c2},{kind}\n"));
        }
        Ok(out)
    }
}

/// Occupation counts `xi(j, horizon)` by level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalTimeProfile {
    pub counts: BTreeMap<i64, u64>,
    pub horizon: u64,
}

impl LocalTimeProfile {
    pub fn count(&self, level: i64) -> u64 {
        self.counts.get(&level).copied().unwrap_or(0)
    }

    /// Sum of all counts; equals the horizon for profiles built from a
    /// full sequence.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Maximal local time and an argmax level, ties broken toward the
    /// smallest level. Empty profiles yield `(0, 0)`.
    pub fn max(&self) -> (i64, u64) {
        let mut best = (0i64, 0u64);
        for (&level, &count) in &self.counts {
            if count > best.1 {
                best = (level, count);
            }
        }
        best
    }
}

/// Counts `k` in `1..=horizon` with `values[k] = level`.
///
/// `values` is a state sequence indexed from time 0; time 0 is not
/// counted, so summing over all levels gives exactly `horizon`.
pub fn local_time(values: &[i64], level: i64, horizon: usize) -> u64 {
    assert!(horizon < values.len(), "horizon must be < sequence length");
    values[1..=horizon].iter().filter(|v| **v == level).count() as u64
}

/// Full occupation profile of `values` over `k = 1..=horizon`.
pub fn local_time_profile(values: &[i64], horizon: usize) -> LocalTimeProfile {
    assert!(horizon < values.len(), "horizon must be < sequence length");
    let mut counts = BTreeMap::new();
    for v in &values[1..=horizon] {
        *counts.entry(*v).or_insert(0u64) += 1;
    }
    LocalTimeProfile { counts, horizon: horizon as u64 }
}

/// Maximal local time over all levels; see [`LocalTimeProfile::max`].
pub fn max_local_time(values: &[i64], horizon: usize) -> (i64, u64) {
    local_time_profile(values, horizon).max()
}

/// The discrete time change: `gamma1` times the occupation of levels
/// `>= 0` plus `gamma2` times the occupation of levels `< 0`.
pub fn discrete_time_change(profile: &LocalTimeProfile, gamma1: f64, gamma2: f64) -> f64 {
    let mut upper = 0u64;
    let mut lower = 0u64;
    for (&level, &count) in &profile.counts {
        if level >= 0 {
            upper += count;
        } else {
            lower += count;
        }
    }
    gamma1 * upper as f64 + gamma2 * lower as f64
}

/// Horizontal/vertical bookkeeping of one constructive simulation.
///
/// `h_star` sums every geometric draw at full value, so `h_star - h` is
/// the unconsumed remainder of the final block (zero when the walk stopped
/// at a block boundary). Only the headline counters appear in the JSON
/// export.
#[derive(Debug, Clone, Serialize)]
pub struct GeometricDecomposition {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "H")]
    pub h: u64,
    #[serde(rename = "V")]
    pub v: u64,
    #[serde(rename = "H_star")]
    pub h_star: u64,
    /// Per-level summary of the geometric draws (block count, sum of full
    /// values).
    #[serde(skip)]
    pub blocks: BTreeMap<i64, BlockStats>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BlockStats {
    pub count: u64,
    pub sum: u64,
}

/// Inverse-CDF geometric sampler on `{0, 1, ...}` with success
/// probability `alpha`: `floor(ln U / ln(1 - alpha))`, `U` uniform in
/// `(0, 1]`. At `alpha = 1` the draw is consumed and the result clamped
/// to 0.
fn sample_geometric(alpha: f64, rng: &mut ChaCha8Rng) -> u64 {
    debug_assert!(alpha > 0.0 && alpha <= 1.0);
    let u = 1.0 - rng.random::<f64>();
    if alpha >= 1.0 {
        return 0;
    }
    (u.ln() / (1.0 - alpha).ln()).floor() as u64
}

/// Step-by-step direct simulator (one kernel draw per step).
pub struct DirectWalk<'e> {
    env: &'e Environment,
    pos: (i64, i64),
    rng: ChaCha8Rng,
}

impl<'e> DirectWalk<'e> {
    pub fn new(env: &'e Environment, seed: u64) -> Self {
        DirectWalk { env, pos: (0, 0), rng: seed::rng_for(seed, "walk.direct", 0) }
    }

    pub fn position(&self) -> (i64, i64) {
        self.pos
    }

    /// Advances one step and reports its kind.
    pub fn step(&mut self) -> StepKind {
        let p = self.env.p(self.pos.1);
        let u: f64 = self.rng.random();
        if u < p {
            self.pos.1 += 1;
            StepKind::Vertical
        } else if u < 2.0 * p {
            self.pos.1 -= 1;
            StepKind::Vertical
        } else if u < p + 0.5 {
            self.pos.0 += 1;
            StepKind::Horizontal
        } else {
            self.pos.0 -= 1;
            StepKind::Horizontal
        }
    }
}

/// Step-by-step constructive simulator.
///
/// Horizontal signs come from an embedded walk `S1`, vertical signs from
/// an independent `S2`, block lengths from a third stream; the three
/// streams are derived from the single seed, so the law of `S2` does not
/// depend on the environment.
pub struct ConstructiveWalk<'e> {
    env: &'e Environment,
    pos: (i64, i64),
    s1: ChaCha8Rng,
    s2: ChaCha8Rng,
    geo: ChaCha8Rng,
    /// Steps left in the current block; `None` means the next step begins
    /// a new visit and must draw a block first.
    block_remaining: Option<u64>,
    h: u64,
    v: u64,
    h_star: u64,
    blocks: BTreeMap<i64, BlockStats>,
}

impl<'e> ConstructiveWalk<'e> {
    pub fn new(env: &'e Environment, seed: u64) -> Self {
        ConstructiveWalk {
            env,
            pos: (0, 0),
            s1: seed::rng_for(seed, "walk.s1", 0),
            s2: seed::rng_for(seed, "walk.s2", 0),
            geo: seed::rng_for(seed, "walk.geo", 0),
            block_remaining: None,
            h: 0,
            v: 0,
            h_star: 0,
            blocks: BTreeMap::new(),
        }
    }

    pub fn position(&self) -> (i64, i64) {
        self.pos
    }

    /// Advances one step, drawing a fresh geometric block when the
    /// previous visit is exhausted.
    pub fn step(&mut self) -> StepKind {
        let remaining = match self.block_remaining {
            Some(r) => r,
            None => {
                let level = self.pos.1;
                let g = sample_geometric(2.0 * self.env.p(level), &mut self.geo);
                let entry = self.blocks.entry(level).or_default();
                entry.count += 1;
                entry.sum += g;
                self.h_star += g;
                self.block_remaining = Some(g);
                g
            }
        };
        if remaining > 0 {
            self.block_remaining = Some(remaining - 1);
            self.pos.0 += if self.s1.random::<bool>() { 1 } else { -1 };
            self.h += 1;
            StepKind::Horizontal
        } else {
            self.block_remaining = None;
            self.pos.1 += if self.s2.random::<bool>() { 1 } else { -1 };
            self.v += 1;
            StepKind::Vertical
        }
    }

    /// Unconsumed remainder of the current block (the truncated portion if
    /// the walk stops now).
    pub fn truncated_remainder(&self) -> u64 {
        self.block_remaining.unwrap_or(0)
    }

    /// Snapshot of the decomposition counters.
    pub fn decomposition(&self) -> GeometricDecomposition {
        GeometricDecomposition {
            n: self.h + self.v,
            h: self.h,
            v: self.v,
            h_star: self.h_star,
            blocks: self.blocks.clone(),
        }
    }
}

fn run_walk(
    env: &Environment,
    n: u64,
    seed: u64,
    mode: PathMode,
    mut advance: impl FnMut() -> ((i64, i64), StepKind),
) -> WalkPath {
    let store = matches!(mode, PathMode::Full);
    let mut positions = store.then(|| {
        let mut v = Vec::with_capacity(n as usize + 1);
        v.push((0i64, 0i64));
        v
    });
    let mut kinds = store.then(|| Vec::with_capacity(n as usize));
    let mut local_times = BTreeMap::new();
    let mut end = (0i64, 0i64);
    for _ in 0..n {
        let (pos, kind) = advance();
        *local_times.entry(pos.1).or_insert(0u64) += 1;
        if let (Some(ps), Some(ks)) = (positions.as_mut(), kinds.as_mut()) {
            ps.push(pos);
            ks.push(kind);
        }
        end = pos;
    }
    WalkPath { env: env.clone(), seed, len: n, end, local_times, positions, step_kinds: kinds }
}

/// Simulates `N` steps of the direct Markov chain. Paths up to
/// [`FULL_STORAGE_LIMIT`] steps store all positions.
pub fn simulate_direct(env: &Environment, n: u64, seed: u64) -> WalkPath {
    let mode = if n <= FULL_STORAGE_LIMIT { PathMode::Full } else { PathMode::Summary };
    simulate_direct_with(env, n, seed, mode)
}

pub fn simulate_direct_with(env: &Environment, n: u64, seed: u64, mode: PathMode) -> WalkPath {
    let mut walker = DirectWalk::new(env, seed);
    run_walk(env, n, seed, mode, || {
        let kind = walker.step();
        (walker.position(), kind)
    })
}

/// Simulates `N` steps via the geometric-block construction, returning the
/// path and the step decomposition.
pub fn simulate_constructive(
    env: &Environment,
    n: u64,
    seed: u64,
) -> (WalkPath, GeometricDecomposition) {
    let mode = if n <= FULL_STORAGE_LIMIT { PathMode::Full } else { PathMode::Summary };
    simulate_constructive_with(env, n, seed, mode)
}

pub fn simulate_constructive_with(
    env: &Environment,
    n: u64,
    seed: u64,
    mode: PathMode,
) -> (WalkPath, GeometricDecomposition) {
    let mut walker = ConstructiveWalk::new(env, seed);
    let path = run_walk(env, n, seed, mode, || {
        let kind = walker.step();
        (walker.position(), kind)
    });
    (path, walker.decomposition())
}
