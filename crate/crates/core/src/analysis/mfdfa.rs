use serde::{Deserialize, Serialize};

use super::dfa::{check_input, fit_loglog, profile, window_variances, ScaleSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MfDfaResult {
    pub q_grid: Vec<f64>,
    pub scales: Vec<usize>,
    /// `fq[i][j]`: q-th order fluctuation of `q_grid[i]` at `scales[j]`.
    pub fq: Vec<Vec<f64>>,
    pub hq: Vec<f64>,
    pub tau: Vec<f64>,
}

/// `-4, -3.5, ..., 4`.
pub fn default_q_grid() -> Vec<f64> {
    (0..=16).map(|i| -4.0 + 0.5 * i as f64).collect()
}

fn q_order_fluctuation(vars: &[f64], q: f64) -> f64 {
    if q == 0.0 {
        let logs: Vec<f64> = vars.iter().filter(|&&v| v > 0.0).map(|v| v.ln()).collect();
        (0.5 * logs.iter().sum::<f64>() / logs.len() as f64).exp()
    } else if q < 0.0 {
        // Windows with exactly zero variance would dominate negative moments.
        let kept: Vec<f64> = vars.iter().copied().filter(|&v| v > 0.0).collect();
        let m = kept.iter().map(|v| v.powf(0.5 * q)).sum::<f64>() / kept.len() as f64;
        m.powf(1.0 / q)
    } else {
        let m = vars.iter().map(|v| v.powf(0.5 * q)).sum::<f64>() / vars.len() as f64;
        m.powf(1.0 / q)
    }
}

/// Multifractal DFA-1. `H(q)` is the log-log slope of `F_q(s)` and the mass
/// exponent is `tau(q) = q H(q) - 1`.
pub fn mfdfa(series: &[f64], q_grid: &[f64], spec: &ScaleSpec) -> Result<MfDfaResult> {
    mfdfa_with_order(series, q_grid, 1, spec)
}

pub fn mfdfa_with_order(
    series: &[f64],
    q_grid: &[f64],
    detrend_order: usize,
    spec: &ScaleSpec,
) -> Result<MfDfaResult> {
    check_input(series, detrend_order)?;
    if q_grid.is_empty() || q_grid.iter().any(|q| !q.is_finite()) {
        return Err(Error::param("q grid must be a non-empty list of finite values"));
    }
    let scales = spec.resolve(series.len())?;
    let mask = spec.fit_mask(&scales)?;
    let prof = profile(series);
    let per_scale: Vec<Vec<f64>> = scales
        .iter()
        .map(|&s| window_variances(&prof, s, detrend_order))
        .collect();
    if per_scale.iter().any(|v| v.iter().all(|&x| x <= 0.0)) {
        return Err(Error::estimation("every window has zero fluctuation at some scale", None));
    }

    let xs: Vec<f64> = scales.iter().zip(&mask).filter(|(_, &m)| m).map(|(&s, _)| s as f64).collect();
    let mut fq = Vec::with_capacity(q_grid.len());
    let mut hq = Vec::with_capacity(q_grid.len());
    let mut tau = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let f: Vec<f64> = per_scale.iter().map(|v| q_order_fluctuation(v, q)).collect();
        let ys: Vec<f64> = f.iter().zip(&mask).filter(|(_, &m)| m).map(|(&v, _)| v).collect();
        let h = fit_loglog(&xs, &ys).slope;
        if !h.is_finite() {
            return Err(Error::estimation(format!("H(q) is not finite at q = {q}"), None));
        }
        hq.push(h);
        tau.push(q * h - 1.0);
        fq.push(f);
    }
    Ok(MfDfaResult {
        q_grid: q_grid.to_vec(),
        scales,
        fq,
        hq,
        tau,
    })
}
