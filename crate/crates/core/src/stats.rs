//! Small statistical helpers shared by the verification suite: empirical
//! CDFs, Kolmogorov-Smirnov distances, least squares and total variation.

use crate::error::{Error, Result};

/// Sorts a sample in place; NaNs are rejected by the callers before this.
pub fn sort_sample(xs: &mut [f64]) {
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
}

/// One-sample Kolmogorov-Smirnov distance between `xs` and the reference
/// CDF `cdf`. Both one-sided deviations around each jump are taken, so this
/// is the exact sup-distance.
pub fn ks_one_sample<F: Fn(f64) -> f64>(xs: &mut [f64], cdf: F) -> f64 {
    assert!(!xs.is_empty(), "empty sample");
    sort_sample(xs);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Two-sample Kolmogorov-Smirnov distance. Symmetric in its arguments.
pub fn ks_two_sample(xs: &mut [f64], ys: &mut [f64]) -> f64 {
    assert!(!xs.is_empty() && !ys.is_empty(), "empty sample");
    sort_sample(xs);
    sort_sample(ys);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64, mean: f64, std_dev: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(mean, std_dev).expect("bad normal parameters").cdf(x)
}

/// Ordinary least squares `y = slope * x + intercept` with `r_squared`.
/// Errors with [`Error::TooFewPoints`] below 3 points or when all `x`
/// coincide.
pub fn least_squares(points: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, got: points.len() });
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 * sxx.max(1.0) {
        return Err(Error::InvalidParameter("regression abscissae coincide".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let y_mean = sy / n;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - y_mean).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|p| (p.1 - slope * p.0 - intercept).powi(2)).sum();
    let r_squared = if ss_tot <= 1e-300 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((slope, intercept, r_squared))
}

/// Median of a sample (average of the middle pair for even lengths).
pub fn median(xs: &mut [f64]) -> f64 {
    assert!(!xs.is_empty(), "empty sample");
    sort_sample(xs);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Total variation distance `(1/2) * sum |p_i - q_i|` between two discrete
/// distributions given as (key, mass) iterators over a shared key type.
pub fn total_variation<K: Ord + Clone>(
    p: &std::collections::BTreeMap<K, f64>,
    q: &std::collections::BTreeMap<K, f64>,
) -> f64 {
    let mut keys: Vec<K> = p.keys().cloned().collect();
    keys.extend(q.keys().cloned());
    keys.sort();
    keys.dedup();
    0.5 * keys
        .iter()
        .map(|k| (p.get(k).copied().unwrap_or(0.0) - q.get(k).copied().unwrap_or(0.0)).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::BTreeMap;

    #[test]
    fn ks_one_sample_exact_small_case() {
        // Uniform(0,1) reference, sample {0.25, 0.75}: empirical CDF steps
        // 0 -> 1/2 at 0.25 and 1/2 -> 1 at 0.75, so D = 1/4.
        let mut xs = vec![0.75, 0.25];
        let d = ks_one_sample(&mut xs, |x| x.clamp(0.0, 1.0));
        assert_relative_eq!(d, 0.25, epsilon = 1e-12);
    }

    #[test]
    fn ks_two_sample_identical_is_zero() {
        let mut a = vec![1.0, 2.0, 3.0, 4.0];
        let mut b = vec![4.0, 3.0, 2.0, 1.0];
        assert_relative_eq!(ks_two_sample(&mut a, &mut b), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn ks_two_sample_known_value() {
        // From a hand-checked configuration: D = 0.25.
        let mut a = vec![1.0, 1.0, 4.0, 4.0];
        let mut b = vec![1.0, 1.0, 1.0, 4.0];
        assert_relative_eq!(ks_two_sample(&mut a, &mut b), 0.25, epsilon = 1e-12);
    }

    #[test]
    fn ks_two_sample_is_symmetric() {
        let mut a = vec![0.4, 0.1, 0.9, 0.5, 0.3];
        let mut b = vec![0.2, 0.8, 0.55];
        let d1 = ks_two_sample(&mut a.clone(), &mut b.clone());
        let d2 = ks_two_sample(&mut b, &mut a);
        assert_relative_eq!(d1, d2, epsilon = 1e-15);
    }

    #[test]
    fn least_squares_exact_on_collinear_input() {
        let pts: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let (slope, intercept, r2) = least_squares(&pts).unwrap();
        assert_relative_eq!(slope, 3.0, epsilon = 1e-12);
        assert_relative_eq!(intercept, -1.0, epsilon = 1e-12);
        assert_relative_eq!(r2, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn least_squares_rejects_two_points() {
        assert!(least_squares(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    }

    #[test]
    fn median_odd_even() {
        assert_relative_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_relative_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn total_variation_disjoint_is_one() {
        let p: BTreeMap<i64, f64> = [(0, 1.0)].into();
        let q: BTreeMap<i64, f64> = [(1, 1.0)].into();
        assert_relative_eq!(total_variation(&p, &q), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn normal_cdf_midpoint() {
        assert_relative_eq!(normal_cdf(0.0, 0.0, 1.0), 0.5, epsilon = 1e-12);
        // Var 1/2 <=> std 1/sqrt(2); one-sigma point.
        let s = 0.5f64.sqrt();
        assert_relative_eq!(normal_cdf(s, 0.0, s), normal_cdf(1.0, 0.0, 1.0), epsilon = 1e-12);
    }
}
