//! Random inputs of the order-flow model: fractional Gaussian noise, long-memory
//! order signs, Student-t relative prices and the rank-ordering surrogate.

use std::ops::Deref;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::analysis::{dfa, ScaleSpec};
use crate::error::{Error, Result};
use crate::seed::RngSeed;

/// A non-empty series of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSeries(Vec<f64>);

impl RealSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("series must hold at least one value"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::param(format!("non-finite value at index {i}")));
        }
        Ok(RealSeries(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for RealSeries {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Order directions: `+1` buy, `-1` sell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSeries(Vec<i8>);

impl SignSeries {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("sign series must hold at least one value"));
        }
        if let Some(i) = values.iter().position(|&s| s != 1 && s != -1) {
            return Err(Error::param(format!("sign at index {i} is not +1/-1")));
        }
        Ok(SignSeries(values))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&s| f64::from(s)).collect()
    }
}

impl Deref for SignSeries {
    type Target = [i8];
    fn deref(&self) -> &[i8] {
        &self.0
    }
}

/// Autocovariance of unit-variance fGn at lag `k`.
pub fn fgn_autocovariance(k: usize, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

fn check_hurst(hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::param(format!("hurst must lie in (0,1), got {hurst}")));
    }
    Ok(())
}

/// Fractional Gaussian noise by circulant embedding (Davies-Harte).
///
/// The covariance of lags `0..n` is embedded in a circulant of size `2m`,
/// `m = next_pow2(n)`, whose eigenvalues are non-negative for fGn. A complex
/// Gaussian vector scaled by the square-rooted spectrum is transformed once; the
/// real part of the first `n` entries has exactly the target covariance.
pub fn gen_fgn(n: usize, hurst: f64, seed: RngSeed) -> Result<RealSeries> {
    let mut rng = seed.rng();
    gen_fgn_with(n, hurst, &mut rng)
}

pub(crate) fn gen_fgn_with<R: Rng + ?Sized>(n: usize, hurst: f64, rng: &mut R) -> Result<RealSeries> {
    check_hurst(hurst)?;
    if n == 0 {
        return Err(Error::param("fGn length must be positive"));
    }
    let half = n.next_power_of_two();
    let size = 2 * half;

    let mut spectrum: Vec<Complex64> = (0..size)
        .map(|j| {
            let lag = if j <= half { j } else { size - j };
            Complex64::new(fgn_autocovariance(lag, hurst), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    fft.process(&mut spectrum);

    let mut noise = Vec::with_capacity(size);
    for (k, eig) in spectrum.iter().enumerate() {
        let mut lambda = eig.re;
        if lambda < 0.0 {
            if lambda < -1e-9 * size as f64 {
                return Err(Error::estimation(
                    format!("circulant embedding eigenvalue {k} is negative ({lambda})"),
                    None,
                ));
            }
            lambda = 0.0;
        }
        let amp = (lambda / size as f64).sqrt();
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        noise.push(Complex64::new(amp * re, amp * im));
    }
    fft.process(&mut noise);

    RealSeries::new(noise.iter().take(n).map(|z| z.re).collect())
}

/// Calibration for turning fGn into a sign series with a prescribed DFA exponent.
pub const SIGN_CALIBRATION_LENGTH: usize = 1 << 17;
pub const SIGN_CALIBRATION_MAX_ITER: usize = 12;
pub const SIGN_CALIBRATION_TOLERANCE: f64 = 0.01;
const SIGN_CALIBRATION_SEED: RngSeed = RngSeed(0x5167_4e5f_ca11_b8a7);
const SIGN_CALIBRATION_UPPER: f64 = 0.995;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCalibration {
    pub target: f64,
    /// Hurst exponent of the underlying fGn.
    pub latent_hurst: f64,
    /// DFA exponent of the sign series at `latent_hurst` on the calibration sample.
    pub achieved: f64,
}

fn signs_of(values: &[f64]) -> Vec<i8> {
    values.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect()
}

fn sign_dfa_exponent(latent_hurst: f64) -> Result<f64> {
    let fgn = gen_fgn(SIGN_CALIBRATION_LENGTH, latent_hurst, SIGN_CALIBRATION_SEED)?;
    let signs: Vec<f64> = signs_of(&fgn).into_iter().map(f64::from).collect();
    Ok(dfa(&signs, 1, &ScaleSpec::default())?.hurst)
}

/// Finds the fGn Hurst exponent whose sign series has DFA exponent `target`.
///
/// Clipping fGn to its sign weakens the correlations, so the latent exponent is
/// searched by bisection on `[target, 0.995]` against a fixed calibration sample.
pub fn calibrate_sign_hurst(target: f64) -> Result<SignCalibration> {
    if !(0.5..1.0).contains(&target) {
        return Err(Error::param(format!("sign hurst must lie in [0.5,1), got {target}")));
    }
    if target == 0.5 {
        return Ok(SignCalibration {
            target,
            latent_hurst: 0.5,
            achieved: 0.5,
        });
    }

    let mut lo = target;
    let mut hi = SIGN_CALIBRATION_UPPER;
    let mut best = SignCalibration {
        target,
        latent_hurst: target,
        achieved: sign_dfa_exponent(target)?,
    };
    for _ in 0..SIGN_CALIBRATION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let achieved = sign_dfa_exponent(mid)?;
        if (achieved - target).abs() < (best.achieved - target).abs() {
            best = SignCalibration {
                target,
                latent_hurst: mid,
                achieved,
            };
        }
        if (achieved - target).abs() < 0.1 * SIGN_CALIBRATION_TOLERANCE {
            break;
        }
        if achieved < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best.achieved - target).abs() > SIGN_CALIBRATION_TOLERANCE {
        return Err(Error::estimation(
            format!("sign calibration for target {target} did not converge"),
            Some(best.achieved),
        ));
    }
    Ok(best)
}

/// Long-memory order signs: the sign of fGn generated at a calibrated exponent.
pub fn gen_sign_series(n: usize, target_hurst: f64, seed: RngSeed) -> Result<SignSeries> {
    let calibration = calibrate_sign_hurst(target_hurst)?;
    gen_sign_series_calibrated(n, &calibration, seed)
}

pub fn gen_sign_series_calibrated(
    n: usize,
    calibration: &SignCalibration,
    seed: RngSeed,
) -> Result<SignSeries> {
    let mut rng = seed.rng();
    gen_signs_with(n, calibration, &mut rng)
}

pub(crate) fn gen_signs_with<R: Rng + ?Sized>(
    n: usize,
    calibration: &SignCalibration,
    rng: &mut R,
) -> Result<SignSeries> {
    if n == 0 {
        return Err(Error::param("sign series length must be positive"));
    }
    // fGn at H = 0.5 is white noise; skip the transform.
    let signs = if calibration.latent_hurst == 0.5 {
        (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
    } else {
        signs_of(&gen_fgn_with(n, calibration.latent_hurst, rng)?)
    };
    SignSeries::new(signs)
}

/// Symmetric Student-t draws with `df` degrees of freedom, scaled by `scale`.
///
/// Uses `Z / sqrt(G / df)` with `Z ~ N(0,1)` and `G ~ Gamma(df/2, rate 1/2)`,
/// which is exact for any real `df > 0`.
pub fn sample_student_t(n: usize, df: f64, scale: f64, seed: RngSeed) -> Result<RealSeries> {
    let mut rng = seed.rng();
    sample_student_t_with(n, df, scale, &mut rng)
}

pub(crate) fn sample_student_t_with<R: Rng + ?Sized>(
    n: usize,
    df: f64,
    scale: f64,
    rng: &mut R,
) -> Result<RealSeries> {
    if !(df > 0.0 && df.is_finite()) {
        return Err(Error::param(format!("degrees of freedom must be positive, got {df}")));
    }
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::param(format!("scale must be positive, got {scale}")));
    }
    if n == 0 {
        return Err(Error::param("sample size must be positive"));
    }
    let chi2 = Gamma::new(0.5 * df, 2.0).map_err(|e| Error::param(e.to_string()))?;
    let draws = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            let g: f64 = chi2.sample(rng);
            // g underflows to zero only for tiny df; redraw keeps the value finite.
            let g = if g > 0.0 { g } else { f64::MIN_POSITIVE };
            scale * z / (g / df).sqrt()
        })
        .collect();
    RealSeries::new(draws)
}

/// Ranks of `values`, ties broken by position: `ranks[i]` is the 0-based rank.
pub fn ranks(values: &[f64]) -> Vec<usize> {
    let order = sort_order(values);
    let mut ranks = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r;
    }
    ranks
}

fn sort_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx
}

/// Rearranges `values` so that each output element has the rank its position
/// has in `template`. The output is a permutation of `values`.
pub fn rank_remap(values: &[f64], template: &[f64]) -> Result<RealSeries> {
    if values.len() != template.len() {
        return Err(Error::param(format!(
            "length mismatch: {} values vs {} template entries",
            values.len(),
            template.len()
        )));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let mut out = vec![0.0; values.len()];
    for (rank, &pos) in sort_order(template).iter().enumerate() {
        out[pos] = sorted[rank];
    }
    RealSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_remap_definitional_example() {
        let out = rank_remap(&[5.0, 1.0, 9.0], &[0.2, 0.9, 0.5]).unwrap();
        assert_eq!(&*out, &[1.0, 9.0, 5.0]);
    }

    #[test]
    fn rank_remap_identity_when_already_ordered() {
        let values = [3.0, -1.0, 7.5, 0.0];
        let template = [30.0, -10.0, 75.0, 0.0];
        assert_eq!(&*rank_remap(&values, &template).unwrap(), &values);
        assert_eq!(&*rank_remap(&values, &values).unwrap(), &values);
    }

    #[test]
    fn rank_remap_ties_do_not_panic() {
        let out = rank_remap(&[1.0, 1.0, 2.0], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(&*out, &[1.0, 1.0, 2.0]);
    }

    #[test]
    fn rank_remap_rejects_length_mismatch() {
        assert!(matches!(rank_remap(&[1.0], &[1.0, 2.0]), Err(Error::Parameter(_))));
    }

    #[test]
    fn fgn_rejects_bad_parameters() {
        assert!(gen_fgn(10, 0.0, RngSeed(1)).is_err());
        assert!(gen_fgn(10, 1.0, RngSeed(1)).is_err());
        assert!(gen_fgn(0, 0.5, RngSeed(1)).is_err());
    }

    #[test]
    fn fgn_single_increment() {
        let s = gen_fgn(1, 0.7, RngSeed(7)).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].is_finite() && s[0].abs() < 6.0);
    }

    #[test]
    fn fgn_is_deterministic() {
        let a = gen_fgn(1000, 0.8, RngSeed(3)).unwrap();
        let b = gen_fgn(1000, 0.8, RngSeed(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn autocovariance_lag_one() {
        let h: f64 = 0.8;
        let expected = 2f64.powf(2.0 * h - 1.0) - 1.0;
        assert!((fgn_autocovariance(1, h) - expected).abs() < 1e-12);
        assert_eq!(fgn_autocovariance(0, h), 1.0);
    }

    #[test]
    fn student_rejects_bad_parameters() {
        assert!(sample_student_t(10, 0.0, 1.0, RngSeed(1)).is_err());
        assert!(sample_student_t(10, 1.0, -1.0, RngSeed(1)).is_err());
    }

    #[test]
    fn sign_series_validates_codomain() {
        assert!(SignSeries::new(vec![1, -1, 0]).is_err());
        assert!(SignSeries::new(vec![1, -1, 1]).is_ok());
    }

    #[test]
    fn calibration_rejects_out_of_range_target() {
        assert!(calibrate_sign_hurst(0.4).is_err());
        assert!(calibrate_sign_hurst(1.0).is_err());
    }
}
