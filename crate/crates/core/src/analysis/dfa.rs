use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which window sizes to evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scales {
    /// About `count` distinct integers spaced evenly in log between `min` and
    /// `max` (`None` means a quarter of the series length).
    LogSpaced { min: usize, max: Option<usize>, count: usize },
    Explicit(Vec<usize>),
}

/// Window sizes plus the half-open range `[lo, hi)` used for the log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSpec {
    pub scales: Scales,
    pub fit_range: Option<(usize, usize)>,
}

impl Default for ScaleSpec {
    fn default() -> Self {
        ScaleSpec {
            scales: Scales::LogSpaced {
                min: 8,
                max: None,
                count: 30,
            },
            fit_range: None,
        }
    }
}

impl ScaleSpec {
    /// Default grid, fitted over `lo <= l < hi`.
    pub fn fitted(lo: usize, hi: usize) -> Self {
        ScaleSpec {
            fit_range: Some((lo, hi)),
            ..Default::default()
        }
    }

    pub fn explicit(scales: Vec<usize>) -> Self {
        ScaleSpec {
            scales: Scales::Explicit(scales),
            fit_range: None,
        }
    }

    pub(crate) fn resolve(&self, n: usize) -> Result<Vec<usize>> {
        let scales = match &self.scales {
            Scales::LogSpaced { min, max, count } => {
                let max = max.unwrap_or(n / 4);
                if *min < 2 || max < *min || *count < 2 {
                    return Err(Error::param(format!(
                        "series of length {n} is too short for scales {min}..{max}"
                    )));
                }
                let (lmin, lmax) = ((*min as f64).ln(), (max as f64).ln());
                let mut v: Vec<usize> = (0..*count)
                    .map(|i| (lmin + (lmax - lmin) * i as f64 / (*count - 1) as f64).exp().round() as usize)
                    .collect();
                v.dedup();
                v
            }
            Scales::Explicit(v) => {
                if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) || v[0] < 2 {
                    return Err(Error::param("explicit scales must be strictly increasing and >= 2"));
                }
                v.clone()
            }
        };
        let largest = *scales.last().unwrap();
        if n < 4 * largest {
            return Err(Error::param(format!(
                "series of length {n} is too short for largest scale {largest}"
            )));
        }
        Ok(scales)
    }

    pub(crate) fn fit_mask(&self, scales: &[usize]) -> Result<Vec<bool>> {
        let mask: Vec<bool> = match self.fit_range {
            Some((lo, hi)) => scales.iter().map(|&s| s >= lo && s < hi).collect(),
            None => vec![true; scales.len()],
        };
        if mask.iter().filter(|&&m| m).count() < 2 {
            return Err(Error::param("fit range holds fewer than two scales"));
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DfaResult {
    pub scales: Vec<usize>,
    pub fluctuations: Vec<f64>,
    pub hurst: f64,
    pub hurst_stderr: f64,
    pub fit_range: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares of `ln y` against `ln x`.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> LineFit {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_stderr = if lx.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        slope_stderr,
    }
}

/// Orthonormal polynomial basis of degree `order` on `0..len`, one row per degree.
fn poly_basis(len: usize, order: usize) -> Vec<Vec<f64>> {
    let half = (len as f64 - 1.0) / 2.0;
    let t: Vec<f64> = (0..len).map(|j| (j as f64 - half) / half.max(1.0)).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
    for d in 0..=order {
        let mut v: Vec<f64> = t.iter().map(|x| x.powi(d as i32)).collect();
        // Two passes of modified Gram-Schmidt.
        for _ in 0..2 {
            for q in &basis {
                let proj: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
            }
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        v.iter_mut().for_each(|a| *a /= norm);
        basis.push(v);
    }
    basis
}

fn residual_variance(segment: &[f64], basis: &[Vec<f64>], scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend_from_slice(segment);
    for q in basis {
        let proj: f64 = q.iter().zip(scratch.iter()).map(|(a, b)| a * b).sum();
        scratch.iter_mut().zip(q).for_each(|(a, b)| *a -= proj * b);
    }
    scratch.iter().map(|r| r * r).sum::<f64>() / segment.len() as f64
}

pub(crate) fn profile(series: &[f64]) -> Vec<f64> {
    let mean = series.iter().sum::<f64>() / series.len() as f64;
    let mut acc = 0.0;
    series
        .iter()
        .map(|v| {
            acc += v - mean;
            acc
        })
        .collect()
}

/// Detrended variance of every window of size `scale`: `floor(n/scale)`
/// windows from the start followed by the same number from the end.
pub fn window_variances(profile: &[f64], scale: usize, detrend_order: usize) -> Vec<f64> {
    let n = profile.len();
    let count = n / scale;
    let basis = poly_basis(scale, detrend_order);
    let mut scratch = Vec::with_capacity(scale);
    let mut out = Vec::with_capacity(2 * count);
    for v in 0..count {
        let start = v * scale;
        out.push(residual_variance(&profile[start..start + scale], &basis, &mut scratch));
    }
    for v in 0..count {
        let end = n - v * scale;
        out.push(residual_variance(&profile[end - scale..end], &basis, &mut scratch));
    }
    out
}

pub(crate) fn check_input(series: &[f64], detrend_order: usize) -> Result<()> {
    if detrend_order == 0 {
        return Err(Error::param("detrend order must be at least 1"));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("series holds non-finite values"));
    }
    Ok(())
}

/// Detrended fluctuation analysis with polynomial detrending of `detrend_order`.
pub fn dfa(series: &[f64], detrend_order: usize, spec: &ScaleSpec) -> Result<DfaResult> {
    check_input(series, detrend_order)?;
    let scales = spec.resolve(series.len())?;
    if scales[0] <= detrend_order + 1 {
        return Err(Error::param("smallest scale must exceed detrend order + 1"));
    }
    let mask = spec.fit_mask(&scales)?;
    let prof = profile(series);

    let fluctuations: Vec<f64> = scales
        .iter()
        .map(|&s| {
            let vars = window_variances(&prof, s, detrend_order);
            (vars.iter().sum::<f64>() / vars.len() as f64).sqrt()
        })
        .collect();

    let (xs, ys): (Vec<f64>, Vec<f64>) = scales
        .iter()
        .zip(&fluctuations)
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|((&s, &f), _)| (s as f64, f))
        .unzip();
    if ys.iter().any(|&f| f <= 0.0) {
        return Err(Error::estimation("zero fluctuation inside fit range (constant series?)", None));
    }
    let fit = fit_loglog(&xs, &ys);
    let fitted: Vec<usize> = scales.iter().zip(&mask).filter(|(_, &m)| m).map(|(&s, _)| s).collect();

    Ok(DfaResult {
        scales,
        fluctuations,
        hurst: fit.slope,
        hurst_stderr: fit.slope_stderr,
        fit_range: (fitted[0], *fitted.last().unwrap()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_is_increasing_and_bounded() {
        let s = ScaleSpec::default().resolve(40_000).unwrap();
        assert_eq!(s[0], 8);
        assert_eq!(*s.last().unwrap(), 10_000);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.len() >= 25);
    }

    #[test]
    fn short_series_is_rejected() {
        let x = vec![0.0; 30];
        assert!(matches!(dfa(&x, 1, &ScaleSpec::explicit(vec![8, 16])), Err(Error::Parameter(_))));
    }

    #[test]
    fn zero_detrend_order_is_rejected() {
        let x: Vec<f64> = (0..200).map(|i| (i as f64).sin()).collect();
        assert!(dfa(&x, 0, &ScaleSpec::explicit(vec![8, 16])).is_err());
    }

    #[test]
    fn basis_is_orthonormal() {
        let b = poly_basis(17, 3);
        for i in 0..4 {
            for j in 0..4 {
                let dot: f64 = b[i].iter().zip(&b[j]).map(|(a, c)| a * c).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn linear_trend_is_removed_exactly() {
        // A quadratic profile (linear series) leaves zero residual under order-2 detrending.
        let x: Vec<f64> = (0..400).map(|i| 0.3 * i as f64 + 1.0).collect();
        let prof = profile(&x);
        let vars = window_variances(&prof, 20, 2);
        assert!(vars.iter().all(|&v| v < 1e-18));
    }

    #[test]
    fn loglog_fit_of_exact_power_law() {
        let x: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v.powf(0.7)).collect();
        let fit = fit_loglog(&x, &y);
        assert!((fit.slope - 0.7).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-10);
    }
}
