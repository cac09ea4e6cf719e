//! Log-log least squares for exponent estimation, plus the small statistics
//! used by the Monte Carlo estimators (Wilson intervals, bootstrap CIs).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Xoshiro256;

/// Fitted log-log slope with uncertainty and fit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 for an exact fit or 2 points).
    pub stderr: f64,
    pub r_squared: f64,
    /// Range of log-x covered by the fit.
    pub x_range: (f64, f64),
    pub points_used: usize,
}

/// Least-squares line through `(ln x, ln y)`, optionally weighted. The
/// exponent of the counting law is `-2 * slope`.
pub fn fit_exponent(points: &[(f64, f64)], weights: Option<&[f64]>) -> Result<ExponentEstimate> {
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::argument("weights", "length mismatch"));
        }
        if w.iter().any(|&wi| wi <= 0.0 || !wi.is_finite()) {
            return Err(Error::argument("weights", "weights must be positive"));
        }
    }
    for &(x, y) in points {
        if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::argument(
                "points",
                format!("nonpositive or non-finite point ({x}, {y})"),
            ));
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mut distinct = logs.iter().map(|&(x, _)| x).collect::<Vec<_>>();
    distinct.sort_by(|a, b| a.total_cmp(b));
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::argument("points", "need >= 2 distinct x"));
    }

    let w_of = |i: usize| weights.map_or(1.0, |w| w[i]);
    let wsum: f64 = (0..logs.len()).map(w_of).sum();
    let xbar: f64 = logs.iter().enumerate().map(|(i, &(x, _))| w_of(i) * x).sum::<f64>() / wsum;
    let ybar: f64 = logs.iter().enumerate().map(|(i, &(_, y))| w_of(i) * y).sum::<f64>() / wsum;
    let sxx: f64 = logs
        .iter()
        .enumerate()
        .map(|(i, &(x, _))| w_of(i) * (x - xbar) * (x - xbar))
        .sum();
    let sxy: f64 = logs
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| w_of(i) * (x - xbar) * (y - ybar))
        .sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;

    let ss_res: f64 = logs
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| {
            let r = y - (intercept + slope * x);
            w_of(i) * r * r
        })
        .sum();
    let ss_tot: f64 = logs
        .iter()
        .enumerate()
        .map(|(i, &(_, y))| w_of(i) * (y - ybar) * (y - ybar))
        .sum();
    let m = logs.len();
    let stderr = if m > 2 {
        (ss_res / (m as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, _) in &logs {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
    }
    Ok(ExponentEstimate {
        slope,
        intercept,
        stderr,
        r_squared,
        x_range: (x_lo, x_hi),
        points_used: m,
    })
}

/// 95% Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Percentile bootstrap CI of the mean: 200 resamples, deterministic in the
/// seed, percentile levels 2.5 / 97.5.
pub fn bootstrap_mean_ci(values: &[f64], seed: u64) -> (f64, f64) {
    const RESAMPLES: usize = 200;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    if values.len() == 1 {
        return (values[0], values[0]);
    }
    let mut rng = Xoshiro256::seed_from(seed);
    let n = values.len();
    let mut means = Vec::with_capacity(RESAMPLES);
    for _ in 0..RESAMPLES {
        let mut sum = 0.0;
        for _ in 0..n {
            sum += values[rng.next_below(n as u64) as usize];
        }
        means.push(sum / n as f64);
    }
    means.sort_by(|a, b| a.total_cmp(b));
    let lo = means[(0.025 * (RESAMPLES - 1) as f64).round() as usize];
    let hi = means[(0.975 * (RESAMPLES - 1) as f64).round() as usize];
    (lo, hi)
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        // y = x^(-5/6) sampled at powers of two fits exactly.
        let points: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| (x, x.powf(-5.0 / 6.0)))
            .collect();
        let est = fit_exponent(&points, None).unwrap();
        assert!((est.slope + 5.0 / 6.0).abs() < 1e-12);
        assert!(est.stderr < 1e-9);
        assert!((est.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(est.points_used, 4);
    }

    #[test]
    fn constant_y_gives_zero_slope() {
        let points = vec![(1.0, 3.5), (2.0, 3.5), (7.0, 3.5)];
        let est = fit_exponent(&points, None).unwrap();
        assert!(est.slope.abs() < 1e-12);
    }

    #[test]
    fn noisy_inverse_law() {
        // y = c x^-1 (1 + noise <= 1%): slope within [-1.02, -0.98], checked
        // against an independently coded closed-form solution.
        let mut rng = Xoshiro256::seed_from(31);
        let c = 40.0;
        let points: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let x = 2f64.powi(i);
                let noise = 1.0 + 0.01 * (2.0 * rng.next_f64() - 1.0);
                (x, c / x * noise)
            })
            .collect();
        let est = fit_exponent(&points, None).unwrap();
        assert!(est.slope > -1.02 && est.slope < -0.98, "slope {}", est.slope);

        // Independent route: raw normal equations on (ln x, ln y).
        let n = points.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(x, y) in &points {
            let (lx, ly) = (x.ln(), y.ln());
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((est.slope - slope).abs() < 1e-10);
    }

    #[test]
    fn slope_invariant_under_scaling() {
        let base: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, (i as f64).powf(-0.7))).collect();
        let est0 = fit_exponent(&base, None).unwrap();
        let scaled_y: Vec<(f64, f64)> = base.iter().map(|&(x, y)| (x, 13.0 * y)).collect();
        let scaled_x: Vec<(f64, f64)> = base.iter().map(|&(x, y)| (5.0 * x, y)).collect();
        let est_y = fit_exponent(&scaled_y, None).unwrap();
        let est_x = fit_exponent(&scaled_x, None).unwrap();
        assert!((est0.slope - est_y.slope).abs() < 1e-12);
        assert!((est0.slope - est_x.slope).abs() < 1e-12);
        assert!((est_y.intercept - (est0.intercept + 13f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(fit_exponent(&[(1.0, 2.0)], None).is_err());
        assert!(fit_exponent(&[(1.0, 2.0), (1.0, 3.0)], None).is_err());
        assert!(fit_exponent(&[(1.0, 2.0), (2.0, 0.0)], None).is_err());
        assert!(fit_exponent(&[(1.0, 2.0), (-2.0, 1.0)], None).is_err());
        assert!(fit_exponent(&[(1.0, 1.0), (2.0, 1.0)], Some(&[1.0])).is_err());
    }

    #[test]
    fn wilson_sanity() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!(lo < 0.5 && 0.5 < hi);
        assert!(hi - lo < 0.25);
        let (lo0, _) = wilson_interval(0, 100);
        assert!(lo0.abs() < 1e-12);
        let (_, hi1) = wilson_interval(100, 100);
        assert!((hi1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bootstrap_is_deterministic_and_brackets_mean() {
        let values: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() + 2.0).collect();
        let a = bootstrap_mean_ci(&values, 9);
        let b = bootstrap_mean_ci(&values, 9);
        assert_eq!(a, b);
        let m = mean(&values);
        assert!(a.0 <= m && m <= a.1);
    }
}
