//! One round of the order-flow model: pre-generated relative prices and signs
//! drive a limit order book for `total_steps` steps, followed by a cancelation
//! scan each step. Returns are log mid-price changes per step.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cancelation::{cancel_scan, CancelParams};
use crate::error::{Error, Result};
use crate::lob::{EmptySideRules, EventCounts, LimitOrderBook, Side};
use crate::seed::{streams, RngSeed};
use crate::stochastic::{
    calibrate_sign_hurst, gen_fgn_with, gen_signs_with, rank_remap, sample_student_t_with, RealSeries,
    SignCalibration, SignSeries,
};

/// Half spread of the two seed orders placed around log mid 0.
pub const SEED_HALF_SPREAD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelativePriceMode {
    /// Independent Student-t draws.
    Iid,
    /// The same draws reordered to follow the ranks of fGn with exponent `h_x`.
    LongMemory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub total_steps: usize,
    pub n_record: usize,
    pub h_s: f64,
    pub relative_price_mode: RelativePriceMode,
    pub h_x: f64,
    pub alpha_x: f64,
    pub sigma_x: f64,
    pub cancel: CancelParams,
    pub seed: RngSeed,
    /// Optional price grid in log units.
    pub tick: Option<f64>,
    pub empty_side: EmptySideRules,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            total_steps: 200_000,
            n_record: 40_000,
            h_s: 0.75,
            relative_price_mode: RelativePriceMode::Iid,
            h_x: 0.8,
            alpha_x: 1.3,
            sigma_x: 0.0024,
            cancel: CancelParams::default(),
            seed: RngSeed(0),
            tick: None,
            empty_side: EmptySideRules::carry_forward(),
        }
    }
}

impl SimConfig {
    pub fn modified() -> Self {
        SimConfig {
            relative_price_mode: RelativePriceMode::LongMemory,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_steps == 0 {
            return Err(Error::param("total_steps must be positive"));
        }
        if self.n_record == 0 || self.n_record > self.total_steps {
            return Err(Error::param(format!(
                "n_record must lie in 1..={}, got {}",
                self.total_steps, self.n_record
            )));
        }
        if !(0.5..1.0).contains(&self.h_s) {
            return Err(Error::param(format!("h_s must lie in [0.5,1), got {}", self.h_s)));
        }
        if self.relative_price_mode == RelativePriceMode::LongMemory && !(self.h_x > 0.0 && self.h_x < 1.0) {
            return Err(Error::param(format!("h_x must lie in (0,1), got {}", self.h_x)));
        }
        if !(self.alpha_x.is_finite() && self.alpha_x > 0.0 && self.sigma_x.is_finite() && self.sigma_x > 0.0) {
            return Err(Error::param("alpha_x and sigma_x must be positive"));
        }
        if let Some(t) = self.tick {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(Error::param(format!("tick must be non-negative, got {t}")));
            }
        }
        self.cancel.validate()
    }
}

/// Order-flow inputs of one round.
#[derive(Debug, Clone)]
pub struct RoundInputs {
    /// Student-t sample before any reordering.
    pub student: RealSeries,
    /// Relative prices fed to the book.
    pub relative_prices: RealSeries,
    pub signs: SignSeries,
}

pub fn generate_inputs(config: &SimConfig, calibration: &SignCalibration) -> Result<RoundInputs> {
    config.validate()?;
    let n = config.total_steps;
    let mut price_rng = config.seed.stream(streams::RELATIVE_PRICES);
    let student = sample_student_t_with(n, config.alpha_x, config.sigma_x, &mut price_rng)?;
    let relative_prices = match config.relative_price_mode {
        RelativePriceMode::Iid => student.clone(),
        RelativePriceMode::LongMemory => {
            let mut template_rng = config.seed.stream(streams::PRICE_TEMPLATE);
            let template = gen_fgn_with(n, config.h_x, &mut template_rng)?;
            rank_remap(&student, &template)?
        }
    };
    let mut sign_rng = config.seed.stream(streams::SIGNS);
    let signs = gen_signs_with(n, calibration, &mut sign_rng)?;
    Ok(RoundInputs {
        student,
        relative_prices,
        signs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSet {
    pub returns: Vec<f64>,
    pub volatility: Vec<f64>,
    pub event_counts: BTreeMap<String, u64>,
    /// Orders still resting when the round ended.
    pub final_resting: u64,
}

impl SeriesSet {
    fn new(returns: Vec<f64>, counts: EventCounts, final_resting: usize) -> Self {
        let volatility = returns.iter().map(|r| r.abs()).collect();
        let event_counts = BTreeMap::from([
            ("seeded".to_string(), counts.seeded),
            ("submitted".to_string(), counts.submitted),
            ("executed_on_arrival".to_string(), counts.executed_on_arrival),
            ("rested".to_string(), counts.rested),
            ("executed_as_counterparty".to_string(), counts.executed_as_counterparty),
            ("canceled".to_string(), counts.canceled),
        ]);
        SeriesSet {
            returns,
            volatility,
            event_counts,
            final_resting: final_resting as u64,
        }
    }

    pub fn count(&self, kind: &str) -> u64 {
        self.event_counts.get(kind).copied().unwrap_or(0)
    }

    /// Two-column CSV `return,volatility`, one row per recorded step.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["return", "volatility"])?;
        for (r, v) in self.returns.iter().zip(&self.volatility) {
            w.write_record([r.to_string(), v.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_round(config: &SimConfig) -> Result<SeriesSet> {
    config.validate()?;
    let calibration = calibrate_sign_hurst(config.h_s)?;
    run_round_calibrated(config, &calibration)
}

/// Same as [`run_round`] with the sign calibration supplied by the caller, so
/// that repeated rounds at one `h_s` calibrate once.
pub fn run_round_calibrated(config: &SimConfig, calibration: &SignCalibration) -> Result<SeriesSet> {
    if calibration.target != config.h_s {
        return Err(Error::param(format!(
            "calibration targets h_s = {}, config has {}",
            calibration.target, config.h_s
        )));
    }
    let inputs = generate_inputs(config, calibration)?;
    let mut book = LimitOrderBook::seeded(SEED_HALF_SPREAD)
        .with_tick(config.tick)
        .with_rules(config.empty_side);
    let returns = drive(&mut book, config, &inputs)?;
    Ok(SeriesSet::new(returns, book.counts(), book.len()))
}

/// Runs the step loop on `book` and returns the recorded tail of the returns.
pub fn drive(book: &mut LimitOrderBook, config: &SimConfig, inputs: &RoundInputs) -> Result<Vec<f64>> {
    let mut cancel_rng = config.seed.stream(streams::CANCELATION);
    let total = config.total_steps;
    let skip = total - config.n_record;
    let mut returns = Vec::with_capacity(config.n_record);
    let mut prev_mid = book.quote().mid_log;
    for t in 0..total {
        let step = t as u64 + 1;
        let side = Side::from_sign(inputs.signs[t]);
        book.submit(side, inputs.relative_prices[t], step)?;
        let doomed = cancel_scan(book, &config.cancel, &mut cancel_rng);
        book.cancel_sorted(&doomed, step)?;
        let mid = book.quote().mid_log;
        if t >= skip {
            returns.push(mid - prev_mid);
        }
        prev_mid = mid;
    }
    Ok(returns)
}
