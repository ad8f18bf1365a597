//! Wiener paths, the occupation-time change, oscillating Brownian motion,
//! and the closed-form laws of the inverse time change.
//!
//! For a Wiener path `W` and constants `gamma1 >= gamma2 >= 1`, the
//! additive functional is
//! `A(t) = gamma1 * |{s <= t : W(s) >= 0}| + gamma2 * |{s <= t : W(s) < 0}|`
//! (Lebesgue measure). Its inverse `A^{-1}` slows the clock down where `W`
//! is positive, and `Y(t) = W(A^{-1}(t))` is an oscillating Brownian
//! motion. When `gamma1 > gamma2` the laws of `A^{-1}(t)` and of
//! `t - A^{-1}(t)` have explicit densities with integrable inverse-square-
//! root singularities at both support endpoints; [`density_table`]
//! tabulates them with a singularity-removing substitution.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::seed;

/// A Wiener path sampled on the uniform grid `k * dt`, `k = 0..=K`.
#[derive(Debug, Clone)]
pub struct WienerGrid {
    pub dt: f64,
    /// `W(k * dt)`; `values[0] = 0`.
    pub values: Vec<f64>,
    pub seed: u64,
}

impl WienerGrid {
    /// Time of the last grid point.
    pub fn total_time(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dt
    }

    /// Linear interpolation of the path at `t` in `[0, total_time]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let k_max = self.values.len() - 1;
        let raw = t / self.dt;
        let k = (raw.floor() as usize).min(k_max);
        if k == k_max {
            return self.values[k_max];
        }
        let frac = raw - k as f64;
        self.values[k] + frac * (self.values[k + 1] - self.values[k])
    }
}

/// Simulates a Wiener path with `K = ceil(T / dt)` Gaussian increments of
/// variance `dt`. Deterministic given the seed.
pub fn simulate_wiener(t_total: f64, dt: f64, seed: u64) -> Result<WienerGrid> {
    if !(dt > 0.0 && dt.is_finite()) || !(t_total > 0.0 && t_total.is_finite()) || dt > t_total {
        return Err(Error::InvalidParameter(format!(
            "wiener grid needs 0 < dt <= T, got dt = {dt}, T = {t_total}"
        )));
    }
    // Guard the ratio against float dust, so T = 1, dt = 1e-4 gives
    // exactly 10^4 cells.
    let k = (t_total / dt - 1e-9).ceil().max(1.0) as usize;
    let mut rng = seed::rng_for(seed, "timechange.wiener", 0);
    let scale = dt.sqrt();
    let mut values = Vec::with_capacity(k + 1);
    let mut w = 0.0f64;
    values.push(w);
    for _ in 0..k {
        let z: f64 = rng.sample(StandardNormal);
        w += scale * z;
        values.push(w);
    }
    Ok(WienerGrid { dt, values, seed })
}

/// The discretized additive functional on the same grid as its source
/// path.
#[derive(Debug, Clone)]
pub struct TimeChange {
    pub gamma1: f64,
    pub gamma2: f64,
    pub dt: f64,
    /// `A(k * dt)`; `a_values[0] = 0`.
    pub a_values: Vec<f64>,
}

impl TimeChange {
    /// `A` at the last grid point.
    pub fn total(&self) -> f64 {
        *self.a_values.last().expect("grid is nonempty")
    }
}

fn check_gammas(gamma1: f64, gamma2: f64) -> Result<()> {
    if !(gamma1.is_finite() && gamma2.is_finite()) || gamma2 < 1.0 || gamma1 < gamma2 {
        return Err(Error::InvalidParameter(format!(
            "time change needs gamma1 >= gamma2 >= 1, got ({gamma1}, {gamma2})"
        )));
    }
    Ok(())
}

/// Computes `A` on the grid of `w` using the left endpoint of each cell
/// for the indicator: the cell `[k*dt, (k+1)*dt)` contributes
/// `dt * gamma1` if `W(k*dt) >= 0` and `dt * gamma2` otherwise.
pub fn additive_functional(w: &WienerGrid, gamma1: f64, gamma2: f64) -> Result<TimeChange> {
    check_gammas(gamma1, gamma2)?;
    let mut a_values = Vec::with_capacity(w.values.len());
    let mut a = 0.0f64;
    a_values.push(a);
    for left in &w.values[..w.values.len() - 1] {
        a += w.dt * if *left >= 0.0 { gamma1 } else { gamma2 };
        a_values.push(a);
    }
    Ok(TimeChange { gamma1, gamma2, dt: w.dt, a_values })
}

/// Inverts the time change at `s` in `[0, A(T)]` by bisection over the
/// grid plus linear interpolation within the cell. Within a cell `A` has
/// slope `gamma1` or `gamma2` exactly, so the interpolation is exact.
pub fn inverse_time_change(tc: &TimeChange, s: f64) -> Result<f64> {
    let total = tc.total();
    if !(0.0..=total).contains(&s) {
        return Err(Error::OutOfRange { value: s, lo: 0.0, hi: total });
    }
    // First index with A >= s; s lies in the cell to its left.
    let idx = tc.a_values.partition_point(|a| *a < s);
    if idx == 0 {
        return Ok(0.0);
    }
    let k = idx - 1;
    let (a_lo, a_hi) = (tc.a_values[k], tc.a_values[k + 1]);
    let frac = (s - a_lo) / (a_hi - a_lo);
    Ok((k as f64 + frac) * tc.dt)
}

/// Evaluates `Y(t) = W(A^{-1}(t))` at each sample time.
pub fn oscillating_bm(
    w: &WienerGrid,
    gamma1: f64,
    gamma2: f64,
    sample_times: &[f64],
) -> Result<Vec<f64>> {
    let tc = additive_functional(w, gamma1, gamma2)?;
    sample_times.iter().map(|&t| inverse_time_change(&tc, t).map(|u| w.value_at(u))).collect()
}

/// Which of the two Remark-style laws a density request refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityVariant {
    /// Law of `A^{-1}(t)`, supported on `(t/gamma1, t/gamma2)`.
    Inverse,
    /// Law of `t - A^{-1}(t)`, supported on
    /// `(t(1 - 1/gamma2), t(1 - 1/gamma1))`.
    Complement,
}

/// Parameters of one closed-form density evaluation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DensitySpec {
    pub t: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub variant: DensityVariant,
}

impl DensitySpec {
    /// Requires `t > 0` and strictly ordered `gamma1 > gamma2 >= 1`; the
    /// equal-gamma case is a point mass and is handled by
    /// [`density_table`], not by the closed form.
    pub fn new(t: f64, gamma1: f64, gamma2: f64, variant: DensityVariant) -> Result<Self> {
        check_gammas(gamma1, gamma2)?;
        if gamma1 == gamma2 {
            return Err(Error::InvalidParameter(
                "closed-form density needs gamma1 > gamma2; equal gammas give a point mass".into(),
            ));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("density needs t > 0, got {t}")));
        }
        Ok(DensitySpec { t, gamma1, gamma2, variant })
    }

    /// Open support interval `(lo, hi)` of the chosen variant.
    pub fn support(&self) -> (f64, f64) {
        match self.variant {
            DensityVariant::Inverse => (self.t / self.gamma1, self.t / self.gamma2),
            DensityVariant::Complement => {
                (self.t * (1.0 - 1.0 / self.gamma2), self.t * (1.0 - 1.0 / self.gamma1))
            }
        }
    }
}

fn density_at(spec: &DensitySpec, v: f64) -> Result<f64> {
    let (lo, hi) = spec.support();
    if v == lo || v == hi {
        return Err(Error::Singularity { v });
    }
    if v < lo || v > hi {
        return Ok(0.0);
    }
    let (t, g1, g2) = (spec.t, spec.gamma1, spec.gamma2);
    let value = match spec.variant {
        DensityVariant::Inverse => {
            t / (std::f64::consts::PI * v * ((v * g1 - t) * (t - g2 * v)).sqrt())
        }
        DensityVariant::Complement => {
            t / (std::f64::consts::PI
                * (t - v)
                * (((g1 - 1.0) * t - g1 * v) * (t * (1.0 - g2) + g2 * v)).sqrt())
        }
    };
    Ok(value)
}

/// Density of `A^{-1}(t)` at `v`: zero outside the closed support, the
/// closed form strictly inside, an error exactly at the endpoints where
/// the density diverges (integrably).
pub fn inverse_density(spec: &DensitySpec, v: f64) -> Result<f64> {
    if spec.variant != DensityVariant::Inverse {
        return Err(Error::InvalidParameter(
            "inverse_density needs an inverse-variant spec".into(),
        ));
    }
    density_at(spec, v)
}

/// Density of `t - A^{-1}(t)` at `v`; same conventions as
/// [`inverse_density`]. Satisfies `complement(v) = inverse(t - v)`.
pub fn complement_density(spec: &DensitySpec, v: f64) -> Result<f64> {
    if spec.variant != DensityVariant::Complement {
        return Err(Error::InvalidParameter(
            "complement_density needs a complement-variant spec".into(),
        ));
    }
    density_at(spec, v)
}

/// Tabulated density with its cumulative, or a point mass when
/// `gamma1 = gamma2`.
#[derive(Debug, Clone, Serialize)]
pub struct DensityTable {
    pub t: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub variant: DensityVariant,
    /// Location of the degenerate point mass, when the gammas coincide.
    pub point_mass: Option<f64>,
    /// Raw quadrature value of the full integral (1 analytically); the
    /// stored cumulative is divided by it.
    pub quadrature_total: f64,
    /// `(v, pdf, cdf)` rows on an endpoint-clustered grid, singular
    /// endpoints excluded.
    pub rows: Vec<(f64, f64, f64)>,
}

/// Default number of quadrature intervals for [`density_table`].
pub const DENSITY_INTERVALS: usize = 4096;

/// Tabulates the chosen density on `intervals` quadrature cells.
///
/// The substitution `v = m + r sin(theta)` (with `m`, `r` the support
/// midpoint and radius) turns the integrand into the smooth
/// `t / (pi sqrt(gamma1 gamma2) (m + r sin(theta)))` for the inverse
/// variant (mirrored for the complement), so composite Simpson over a
/// uniform `theta` grid converges fast despite the endpoint
/// singularities; the cumulative is accumulated over Simpson pairs, and
/// rows land on the even grid nodes.
pub fn density_table(
    t: f64,
    gamma1: f64,
    gamma2: f64,
    variant: DensityVariant,
    intervals: usize,
) -> Result<DensityTable> {
    check_gammas(gamma1, gamma2)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("density needs t > 0, got {t}")));
    }
    if gamma1 == gamma2 {
        let v = match variant {
            DensityVariant::Inverse => t / gamma1,
            DensityVariant::Complement => t * (1.0 - 1.0 / gamma1),
        };
        return Ok(DensityTable {
            t,
            gamma1,
            gamma2,
            variant,
            point_mass: Some(v),
            quadrature_total: 1.0,
            rows: Vec::new(),
        });
    }
    let intervals = intervals.max(8).next_multiple_of(2);
    let spec = DensitySpec::new(t, gamma1, gamma2, variant)?;
    let (lo, hi) = spec.support();
    let m = 0.5 * (lo + hi);
    let r = 0.5 * (hi - lo);
    // Smooth integrand in theta; the mirrored sign keeps the complement
    // variant oriented with increasing v.
    let c = t / (std::f64::consts::PI * (gamma1 * gamma2).sqrt());
    let g = |theta: f64| -> f64 {
        let v = m + r * theta.sin();
        match variant {
            DensityVariant::Inverse => c / v,
            DensityVariant::Complement => c / (t - v),
        }
    };
    let h = std::f64::consts::PI / intervals as f64;
    let theta = |i: usize| -> f64 { -std::f64::consts::FRAC_PI_2 + i as f64 * h };
    let mut rows = Vec::with_capacity(intervals / 2 - 1);
    let mut cdf = 0.0f64;
    for i in (0..intervals).step_by(2) {
        cdf += h / 3.0 * (g(theta(i)) + 4.0 * g(theta(i + 1)) + g(theta(i + 2)));
        if i + 2 < intervals {
            let v = m + r * theta(i + 2).sin();
            let pdf = density_at(&spec, v)?;
            rows.push((v, pdf, cdf));
        }
    }
    // The full integral is 1 analytically; fold the quadrature dust into
    // the table so the cumulative tops out at exactly 1.
    let total = cdf;
    for row in &mut rows {
        row.2 /= total;
    }
    Ok(DensityTable { t, gamma1, gamma2, variant, point_mass: None, quadrature_total: total, rows })
}

impl DensityTable {
    /// Cumulative distribution at `v`, interpolated linearly between rows
    /// (0 below the support, 1 above it; a step function for the point
    /// mass).
    pub fn cdf(&self, v: f64) -> f64 {
        if let Some(v0) = self.point_mass {
            return if v < v0 { 0.0 } else { 1.0 };
        }
        let spec = DensitySpec {
            t: self.t,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            variant: self.variant,
        };
        let (lo, hi) = spec.support();
        if v <= lo {
            return 0.0;
        }
        if v >= hi {
            return 1.0;
        }
        let idx = self.rows.partition_point(|row| row.0 < v);
        let (v0, c0) =
            if idx == 0 { (lo, 0.0) } else { (self.rows[idx - 1].0, self.rows[idx - 1].2) };
        let (v1, c1) =
            if idx == self.rows.len() { (hi, 1.0) } else { (self.rows[idx].0, self.rows[idx].2) };
        c0 + (v - v0) / (v1 - v0) * (c1 - c0)
    }

    /// Renders the table as CSV with columns `v, pdf, cdf`. The point
    /// mass becomes a single row with an infinite pdf.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("v,pdf,cdf\n");
        if let Some(v0) = self.point_mass {
            out.push_str(&format!("{v0},inf,1\n"));
            return out;
        }
        for (v, pdf, cdf) in &self.rows {
            out.push_str(&format!("{v},{pdf},{cdf}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    // Frozen reference values keep every digit of the external computation,
    // beyond what f64 can represent.
    #![allow(clippy::excessive_precision)]

    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wiener_grid_shape_and_determinism() {
        let w = simulate_wiener(1.0, 1.0, 3).unwrap();
        assert_eq!(w.values.len(), 2);
        assert_eq!(w.values[0], 0.0);
        let fine = simulate_wiener(1.0, 1e-4, 3).unwrap();
        assert_eq!(fine.values.len(), 10_001);
        let again = simulate_wiener(1.0, 1e-4, 3).unwrap();
        assert_eq!(fine.values, again.values);
        let other = simulate_wiener(1.0, 1e-4, 4).unwrap();
        assert_ne!(fine.values, other.values);
    }

    #[test]
    fn wiener_rejects_bad_dt() {
        assert!(simulate_wiener(1.0, 0.0, 1).is_err());
        assert!(simulate_wiener(1.0, -0.1, 1).is_err());
        assert!(simulate_wiener(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn wiener_terminal_variance() {
        let reps = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in 0..reps {
            let w = simulate_wiener(1.0, 0.05, seed::derive_u64(11, "test.wvar", r)).unwrap();
            let x = *w.values.last().unwrap();
            sum += x;
            sum_sq += x * x;
        }
        let n = reps as f64;
        let var = sum_sq / n - (sum / n).powi(2);
        // Sample variance of a unit normal has standard error sqrt(2/n).
        let se = (2.0 / n).sqrt();
        assert!((var - 1.0).abs() < 5.0 * se, "var {var}");
    }

    fn constant_sign_grid(sign: f64, k: usize) -> WienerGrid {
        WienerGrid { dt: 0.25, values: (0..=k).map(|i| sign * i as f64 * 0.1).collect(), seed: 0 }
    }

    #[test]
    fn functional_on_constant_sign_paths() {
        let up = constant_sign_grid(1.0, 8);
        let tc = additive_functional(&up, 2.0, 1.0).unwrap();
        for (k, a) in tc.a_values.iter().enumerate() {
            assert_relative_eq!(*a, 2.0 * k as f64 * 0.25, epsilon = 1e-12);
        }
        // W(0) = 0 counts as nonnegative, so a "negative" path built from
        // 0 downward still charges its first cell at gamma1.
        let down = constant_sign_grid(-1.0, 8);
        let tc = additive_functional(&down, 2.0, 1.0).unwrap();
        assert_relative_eq!(tc.a_values[1], 2.0 * 0.25, epsilon = 1e-12);
        assert_relative_eq!(tc.total(), 0.25 * (2.0 + 7.0), epsilon = 1e-12);
    }

    #[test]
    fn functional_equal_gammas_is_linear() {
        let w = simulate_wiener(2.0, 0.01, 9).unwrap();
        let tc = additive_functional(&w, 1.5, 1.5).unwrap();
        for (k, a) in tc.a_values.iter().enumerate() {
            assert_relative_eq!(*a, 1.5 * k as f64 * 0.01, epsilon = 1e-9);
        }
    }

    #[test]
    fn functional_monotonicity_and_bounds() {
        for seed in 0..20u64 {
            let w = simulate_wiener(1.0, 0.002, seed).unwrap();
            let tc = additive_functional(&w, 2.0, 1.0).unwrap();
            for k in 1..tc.a_values.len() {
                let da = tc.a_values[k] - tc.a_values[k - 1];
                assert!(da >= tc.dt * 1.0 - 1e-12);
                assert!(da <= tc.dt * 2.0 + 1e-12);
                let t = k as f64 * tc.dt;
                assert!(tc.a_values[k] >= 1.0 * t - 1e-9);
                assert!(tc.a_values[k] <= 2.0 * t + 1e-9);
            }
        }
    }

    #[test]
    fn functional_rejects_bad_gammas() {
        let w = simulate_wiener(1.0, 0.5, 1).unwrap();
        assert!(additive_functional(&w, 1.0, 2.0).is_err());
        assert!(additive_functional(&w, 2.0, 0.5).is_err());
    }

    #[test]
    fn inverse_of_linear_time_change() {
        let w = simulate_wiener(2.0, 0.125, 5).unwrap();
        let tc = additive_functional(&w, 2.0, 2.0).unwrap();
        assert_relative_eq!(inverse_time_change(&tc, 3.0).unwrap(), 1.5, epsilon = 1e-9);
        assert_relative_eq!(inverse_time_change(&tc, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_round_trip_and_contraction() {
        for seed in 0..10u64 {
            let w = simulate_wiener(1.0, 0.001, 100 + seed).unwrap();
            let tc = additive_functional(&w, 2.0, 1.0).unwrap();
            let total = tc.total();
            // Round trip through grid points is exact up to one cell.
            for k in [0usize, 1, 250, 999, 1000] {
                let t = k as f64 * tc.dt;
                let back = inverse_time_change(&tc, tc.a_values[k]).unwrap();
                assert!((back - t).abs() <= tc.dt + 1e-12);
            }
            // A^{-1}(u + v) - A^{-1}(u) <= v since A grows at least at
            // unit speed.
            let mut rng = seed::rng_for(seed, "test.contract", 0);
            for _ in 0..50 {
                let u: f64 = rng.random::<f64>() * total;
                let v: f64 = rng.random::<f64>() * (total - u);
                let a = inverse_time_change(&tc, u).unwrap();
                let b = inverse_time_change(&tc, u + v).unwrap();
                assert!(b - a <= v + 1e-12);
                assert!(b >= a);
            }
            // Lemma-style bounds s/gamma1 <= A^{-1}(s) <= s/gamma2.
            for s in [0.3 * total, 0.7 * total, total] {
                let x = inverse_time_change(&tc, s).unwrap();
                assert!(x >= s / 2.0 - 1e-12 && x <= s / 1.0 + 1e-12);
            }
        }
        let w = simulate_wiener(1.0, 0.01, 1).unwrap();
        let tc = additive_functional(&w, 2.0, 1.0).unwrap();
        assert!(inverse_time_change(&tc, tc.total() + 0.1).is_err());
        assert!(inverse_time_change(&tc, -0.1).is_err());
    }

    #[test]
    fn oscillating_bm_identity_and_scaling() {
        let w = simulate_wiener(1.0, 0.01, 17).unwrap();
        let times: Vec<f64> = (0..=100).map(|k| k as f64 * 0.01).collect();
        let y = oscillating_bm(&w, 1.0, 1.0, &times).unwrap();
        for (k, t) in times.iter().enumerate() {
            assert_relative_eq!(y[k], w.value_at(*t), epsilon = 1e-9);
        }
        // Equal gammas contract time: Y(t) = W(t / gamma).
        let y2 = oscillating_bm(&w, 2.0, 2.0, &[1.0]).unwrap();
        assert_relative_eq!(y2[0], w.value_at(0.5), epsilon = 1e-9);
    }

    #[test]
    fn oscillating_bm_variance_under_contraction() {
        let reps = 4000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for r in 0..reps {
            let w = simulate_wiener(1.0, 1.0 / 512.0, seed::derive_u64(23, "test.ybm", r)).unwrap();
            let y = oscillating_bm(&w, 2.0, 2.0, &[1.0]).unwrap()[0];
            sum += y;
            sum_sq += y * y;
        }
        let n = reps as f64;
        let var = sum_sq / n - (sum / n).powi(2);
        // Var Y(1) = 1/gamma = 0.5; SE of the sample variance is about
        // 0.5 * sqrt(2/n).
        let se = 0.5 * (2.0 / n).sqrt();
        assert!((var - 0.5).abs() < 5.0 * se, "var {var}");
    }

    #[test]
    fn inverse_density_frozen_values() {
        let spec = DensitySpec::new(1.0, 2.0, 1.0, DensityVariant::Inverse).unwrap();
        assert_eq!(spec.support(), (0.5, 1.0));
        assert_relative_eq!(
            inverse_density(&spec, 0.75).unwrap(),
            1.200_421_754_876_141_43,
            epsilon = 1e-14
        );
        assert_eq!(inverse_density(&spec, 0.4).unwrap(), 0.0);
        assert_eq!(inverse_density(&spec, 1.2).unwrap(), 0.0);
        assert!(matches!(inverse_density(&spec, 0.5), Err(Error::Singularity { .. })));
        assert!(matches!(inverse_density(&spec, 1.0), Err(Error::Singularity { .. })));

        let spec2 = DensitySpec::new(2.0, 3.0, 1.5, DensityVariant::Inverse).unwrap();
        assert_relative_eq!(
            inverse_density(&spec2, 1.0).unwrap(),
            0.900_316_316_157_106_07,
            epsilon = 1e-14
        );
    }

    #[test]
    fn complement_density_matches_substitution() {
        let inv = DensitySpec::new(1.0, 2.0, 1.0, DensityVariant::Inverse).unwrap();
        let comp = DensitySpec::new(1.0, 2.0, 1.0, DensityVariant::Complement).unwrap();
        assert_eq!(comp.support(), (0.0, 0.5));
        assert_relative_eq!(
            complement_density(&comp, 0.25).unwrap(),
            1.200_421_754_876_141_43,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            complement_density(&comp, 0.2).unwrap(),
            1.148_601_865_462_066_77,
            epsilon = 1e-14
        );
        for v in [0.05, 0.1, 0.31, 0.49] {
            assert_relative_eq!(
                complement_density(&comp, v).unwrap(),
                inverse_density(&inv, 1.0 - v).unwrap(),
                epsilon = 1e-12
            );
        }
        assert!(inverse_density(&comp, 0.25).is_err());
        assert!(complement_density(&inv, 0.75).is_err());
    }

    #[test]
    fn density_table_integrates_to_one_and_matches_cdf() {
        // Closed-form cumulative used as an independent check:
        // F(v) = 1 - (2/pi) asin(sqrt((t - g2 v) / ((g1 - g2) v))).
        let table =
            density_table(1.0, 2.0, 1.0, DensityVariant::Inverse, DENSITY_INTERVALS).unwrap();
        assert!(table.point_mass.is_none());
        assert_relative_eq!(table.quadrature_total, 1.0, epsilon = 1e-9);
        let f = |v: f64| 1.0 - 2.0 / std::f64::consts::PI * ((1.0 - v) / v).sqrt().asin();
        for (v, expected) in [
            (0.75, 0.608_173_447_969_392_73),
            (0.6, 0.391_826_552_030_607_27),
            (0.9, 0.783_653_104_061_214_54),
        ] {
            assert_relative_eq!(f(v), expected, epsilon = 1e-14);
            assert_relative_eq!(table.cdf(v), expected, epsilon = 1e-6);
        }
        assert_eq!(table.cdf(0.2), 0.0);
        assert_eq!(table.cdf(1.3), 1.0);
        // Rows are sorted with monotone cdf topping out near 1.
        for pair in table.rows.windows(2) {
            assert!(pair[0].0 < pair[1].0);
            assert!(pair[0].2 <= pair[1].2);
        }
        let last = table.rows.last().unwrap();
        assert!(last.2 <= 1.0 && last.2 > 0.99);

        let comp =
            density_table(1.0, 2.0, 1.0, DensityVariant::Complement, DENSITY_INTERVALS).unwrap();
        assert_relative_eq!(comp.quadrature_total, 1.0, epsilon = 1e-9);
        let fc = |v: f64| 2.0 / std::f64::consts::PI * (v / (1.0 - v)).sqrt().asin();
        assert_relative_eq!(fc(0.25), 0.391_826_552_030_607_27, epsilon = 1e-14);
        assert_relative_eq!(comp.cdf(0.25), fc(0.25), epsilon = 1e-6);
    }

    #[test]
    fn density_table_point_mass() {
        let table = density_table(1.0, 2.0, 2.0, DensityVariant::Inverse, 64).unwrap();
        assert_eq!(table.point_mass, Some(0.5));
        assert!(table.rows.is_empty());
        assert_eq!(table.cdf(0.49), 0.0);
        assert_eq!(table.cdf(0.5), 1.0);
        let csv = table.to_csv();
        assert_eq!(csv, "v,pdf,cdf\n0.5,inf,1\n");
    }

    #[test]
    fn density_table_csv_shape() {
        let table = density_table(1.0, 2.0, 1.0, DensityVariant::Inverse, 64).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "v,pdf,cdf");
        let first = lines.next().unwrap();
        assert_eq!(first.split(',').count(), 3);
    }
}
