//! Repeated rounds, optional one-parameter sweeps and the exponent report.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{ccdf_tail_fit, dfa, ScaleSpec};
use crate::error::{Error, Result};
use crate::seed::RngSeed;
use crate::simulator::{run_round_calibrated, SeriesSet, SimConfig};
use crate::stochastic::{calibrate_sign_hurst, SignCalibration};

/// Estimator settings applied to every round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSettings {
    pub detrend_order: usize,
    /// Half-open DFA fit range `[fit_min, fit_max)`.
    pub fit_min: usize,
    pub fit_max: usize,
    pub tail_fraction: f64,
}

impl AnalysisSettings {
    /// Fit range used for the iid-price model.
    pub fn baseline() -> Self {
        AnalysisSettings {
            detrend_order: 1,
            fit_min: 8,
            fit_max: 7000,
            tail_fraction: 0.01,
        }
    }

    /// Fit range used for the long-memory-price model and its variants.
    pub fn modified() -> Self {
        AnalysisSettings {
            fit_max: 4500,
            ..Self::baseline()
        }
    }

    pub fn scale_spec(&self) -> ScaleSpec {
        ScaleSpec::fitted(self.fit_min, self.fit_max)
    }
}

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    HX,
    HS,
    AlphaX,
    SigmaX,
    CancelA,
    CancelB,
    PoissonRate,
}

impl SweepParam {
    pub const ALL: [SweepParam; 7] = [
        SweepParam::HX,
        SweepParam::HS,
        SweepParam::AlphaX,
        SweepParam::SigmaX,
        SweepParam::CancelA,
        SweepParam::CancelB,
        SweepParam::PoissonRate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepParam::HX => "h_x",
            SweepParam::HS => "h_s",
            SweepParam::AlphaX => "alpha_x",
            SweepParam::SigmaX => "sigma_x",
            SweepParam::CancelA => "cancel_a",
            SweepParam::CancelB => "cancel_b",
            SweepParam::PoissonRate => "poisson_rate",
        }
    }

    pub fn from_name(name: &str) -> Option<SweepParam> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn apply(self, config: &mut SimConfig, value: f64) {
        match self {
            SweepParam::HX => config.h_x = value,
            SweepParam::HS => config.h_s = value,
            SweepParam::AlphaX => config.alpha_x = value,
            SweepParam::SigmaX => config.sigma_x = value,
            SweepParam::CancelA => config.cancel.a = value,
            SweepParam::CancelB => config.cancel.b = value,
            SweepParam::PoissonRate => config.cancel.poisson_rate = value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub round: usize,
    pub seed: RngSeed,
    pub h_r: f64,
    pub h_v: f64,
    /// `None` when the volatility tail is degenerate.
    pub beta: Option<f64>,
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub sd: f64,
    pub n: usize,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Stats { mean, sd, n })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub sweep_value: Option<f64>,
    pub config: SimConfig,
    pub rounds: Vec<RoundSummary>,
    pub h_r: Stats,
    pub h_v: Stats,
    pub beta: Option<Stats>,
    /// Tail index of the volatility of all rounds pooled together.
    pub pooled_beta: Option<f64>,
    /// Event totals over all rounds.
    pub event_counts: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub base_seed: RngSeed,
    pub n_rounds: usize,
    pub analysis: AnalysisSettings,
    pub sweep_param: Option<SweepParam>,
    pub points: Vec<PointReport>,
}

/// Report plus the raw series of every round, grouped per grid point.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: ExperimentReport,
    pub series: Vec<Vec<SeriesSet>>,
}

/// Runs `n_rounds` rounds per grid point and reduces them.
///
/// Round `k` uses `base.seed.derive(k)` at every grid point, so grid points
/// differ only in the swept parameter. `jobs` bounds the worker threads and has
/// no effect on the result.
pub fn run_experiment(
    base: &SimConfig,
    n_rounds: usize,
    sweep: Option<&Sweep>,
    analysis: &AnalysisSettings,
    jobs: usize,
) -> Result<ExperimentOutput> {
    if n_rounds == 0 {
        return Err(Error::param("n_rounds must be at least 1"));
    }
    if jobs == 0 {
        return Err(Error::param("jobs must be at least 1"));
    }
    if analysis.fit_min < 2 || analysis.fit_max <= analysis.fit_min {
        return Err(Error::param(format!(
            "fit range [{}, {}) is empty",
            analysis.fit_min, analysis.fit_max
        )));
    }
    let configs: Vec<(Option<f64>, SimConfig)> = match sweep {
        None => vec![(None, base.clone())],
        Some(s) if s.values.is_empty() => return Err(Error::param("sweep has no values")),
        Some(s) => s
            .values
            .iter()
            .map(|&v| {
                let mut c = base.clone();
                s.param.apply(&mut c, v);
                (Some(v), c)
            })
            .collect(),
    };
    for (_, c) in &configs {
        c.validate()?;
    }

    let mut calibrations: Vec<SignCalibration> = Vec::new();
    for (_, c) in &configs {
        if !calibrations.iter().any(|k| k.target == c.h_s) {
            calibrations.push(calibrate_sign_hurst(c.h_s)?);
        }
    }

    let tasks: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|p| (0..n_rounds).map(move |k| (p, k)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::param(format!("cannot start {jobs} workers: {e}")))?;
    let spec = analysis.scale_spec();
    let results: Vec<Result<(RoundSummary, SeriesSet)>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(p, k)| {
                let mut config = configs[p].1.clone();
                config.seed = base.seed.derive(k as u64);
                let calib = calibrations
                    .iter()
                    .find(|c| c.target == config.h_s)
                    .expect("every h_s is calibrated");
                let series = run_round_calibrated(&config, calib)?;
                let h_r = dfa(&series.returns, analysis.detrend_order, &spec)?.hurst;
                let h_v = dfa(&series.volatility, analysis.detrend_order, &spec)?.hurst;
                let beta = ccdf_tail_fit(&series.volatility, analysis.tail_fraction)
                    .ok()
                    .map(|t| t.beta);
                let summary = RoundSummary {
                    round: k,
                    seed: config.seed,
                    h_r,
                    h_v,
                    beta,
                };
                Ok((summary, series))
            })
            .collect()
    });

    let mut results = results.into_iter();
    let mut points = Vec::with_capacity(configs.len());
    let mut all_series = Vec::with_capacity(configs.len());
    for (sweep_value, config) in configs {
        let mut rounds = Vec::with_capacity(n_rounds);
        let mut series = Vec::with_capacity(n_rounds);
        for _ in 0..n_rounds {
            let (r, s) = results.next().expect("one result per task")?;
            rounds.push(r);
            series.push(s);
        }
        let pick = |f: fn(&RoundSummary) -> Option<f64>| rounds.iter().filter_map(f).collect::<Vec<_>>();
        let pooled: Vec<f64> = series.iter().flat_map(|s| s.volatility.iter().copied()).collect();
        let mut event_counts = BTreeMap::new();
        for s in &series {
            for (k, v) in &s.event_counts {
                *event_counts.entry(k.clone()).or_insert(0) += v;
            }
        }
        points.push(PointReport {
            sweep_value,
            config,
            h_r: Stats::of(&pick(|r| Some(r.h_r))).expect("n_rounds >= 1"),
            h_v: Stats::of(&pick(|r| Some(r.h_v))).expect("n_rounds >= 1"),
            beta: Stats::of(&pick(|r| r.beta)),
            pooled_beta: ccdf_tail_fit(&pooled, analysis.tail_fraction).ok().map(|t| t.beta),
            event_counts,
            rounds,
        });
        all_series.push(series);
    }
    Ok(ExperimentOutput {
        report: ExperimentReport {
            base_seed: base.seed,
            n_rounds,
            analysis: *analysis,
            sweep_param: sweep.map(|s| s.param),
            points,
        },
        series: all_series,
    })
}
