use serde::{Deserialize, Serialize};

use super::dfa::fit_loglog;
use crate::error::{Error, Result};

pub const DEFAULT_FIT_FRACTION: f64 = 0.01;
pub const DEFAULT_MIN_TAIL_POINTS: usize = 200;
const HARD_MIN_TAIL_POINTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFitResult {
    pub beta: f64,
    pub beta_stderr: f64,
    pub fit_range: (f64, f64),
    pub n_tail: usize,
}

/// Empirical complementary distribution: values sorted descending, paired
/// with `P(>= v) = k / n` for the k-th largest.
pub fn ccdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len() as f64;
    sorted
        .into_iter()
        .enumerate()
        .map(|(k, v)| (v, (k + 1) as f64 / n))
        .collect()
}

/// Least-squares power-law fit to the top `fit_fraction` of the CCDF, with at
/// least `DEFAULT_MIN_TAIL_POINTS` points when available.
pub fn ccdf_tail_fit(values: &[f64], fit_fraction: f64) -> Result<TailFitResult> {
    ccdf_tail_fit_with(values, fit_fraction, DEFAULT_MIN_TAIL_POINTS)
}

pub fn ccdf_tail_fit_with(values: &[f64], fit_fraction: f64, min_points: usize) -> Result<TailFitResult> {
    if !(fit_fraction > 0.0 && fit_fraction < 1.0) {
        return Err(Error::param(format!("fit fraction must lie in (0,1), got {fit_fraction}")));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::param("tail fit needs finite non-negative values"));
    }
    let n = values.len();
    let by_fraction = (fit_fraction * n as f64).floor() as usize;
    if by_fraction < HARD_MIN_TAIL_POINTS {
        return Err(Error::estimation(
            format!("only {by_fraction} tail points (need {HARD_MIN_TAIL_POINTS})"),
            None,
        ));
    }
    let n_tail = by_fraction.max(min_points).min(n);
    let tail: Vec<(f64, f64)> = ccdf(values).into_iter().take(n_tail).collect();
    let v_min = tail.last().unwrap().0;
    let v_max = tail[0].0;
    if v_min <= 0.0 || v_min >= v_max {
        return Err(Error::estimation("tail holds zero or constant values", None));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = tail.into_iter().unzip();
    let fit = fit_loglog(&xs, &ys);
    Ok(TailFitResult {
        beta: -fit.slope,
        beta_stderr: fit.slope_stderr,
        fit_range: (v_min, v_max),
        n_tail,
    })
}
