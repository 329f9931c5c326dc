//! Presets and the flat `key = value` run configuration.

use std::fmt;
use std::path::PathBuf;

use crate::cancelation::{CancelMode, CancelParams, Imbalance};
use crate::experiment::{AnalysisSettings, Sweep, SweepParam};
use crate::lob::Reference;
use crate::seed::RngSeed;
use crate::simulator::{RelativePriceMode, SimConfig};

/// Default rate of the Poisson cancelation preset.
pub const POISSON_PRESET_RATE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    MfBaseline,
    Modified,
    Table1Sweep,
    PoissonVariant,
    SubdiffusionVariant,
    OrderflowDfa,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::MfBaseline,
        Preset::Modified,
        Preset::Table1Sweep,
        Preset::PoissonVariant,
        Preset::SubdiffusionVariant,
        Preset::OrderflowDfa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::MfBaseline => "mf-baseline",
            Preset::Modified => "modified",
            Preset::Table1Sweep => "table1-sweep",
            Preset::PoissonVariant => "poisson-variant",
            Preset::SubdiffusionVariant => "subdiffusion-variant",
            Preset::OrderflowDfa => "orderflow-dfa",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }
}

/// Everything one invocation needs after presets, file and flags are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub preset: Preset,
    pub sim: SimConfig,
    pub rounds: usize,
    pub analysis: AnalysisSettings,
    /// Set explicitly; otherwise orderflow-dfa fits the whole scale grid.
    pub fit_range_set: bool,
    pub sweep: Option<Sweep>,
    pub input: Option<PathBuf>,
}

impl RunConfig {
    pub fn preset(preset: Preset) -> RunConfig {
        let baseline = RunConfig {
            preset,
            sim: SimConfig::default(),
            rounds: 20,
            analysis: AnalysisSettings::baseline(),
            fit_range_set: false,
            sweep: None,
            input: None,
        };
        let modified = RunConfig {
            sim: SimConfig::modified(),
            analysis: AnalysisSettings::modified(),
            ..baseline.clone()
        };
        match preset {
            Preset::MfBaseline | Preset::OrderflowDfa => baseline,
            Preset::Modified => modified,
            Preset::Table1Sweep => RunConfig {
                rounds: 10,
                sweep: Some(Sweep {
                    param: SweepParam::HX,
                    values: vec![0.5, 0.6, 0.7, 0.8, 0.9],
                }),
                ..modified
            },
            Preset::PoissonVariant => {
                let mut c = modified;
                c.sim.cancel = CancelParams::poisson(POISSON_PRESET_RATE);
                c
            }
            Preset::SubdiffusionVariant => {
                let mut c = modified;
                c.sim.h_s = 0.5;
                c
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(key) = &self.key {
            write!(f, "key `{key}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: Some(key.to_string()),
        line: None,
        message: message.into(),
    }
}

pub const KEYS: &[&str] = &[
    "preset",
    "rounds",
    "seed",
    "total_steps",
    "n_record",
    "h_s",
    "relative_price_mode",
    "h_x",
    "alpha_x",
    "sigma_x",
    "cancel_mode",
    "cancel_a",
    "cancel_b",
    "poisson_rate",
    "imbalance",
    "tick",
    "empty_side_reference",
    "drop_unfillable",
    "detrend_order",
    "fit_min",
    "fit_max",
    "tail_fraction",
    "sweep_param",
    "sweep_values",
    "input",
];

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// unknown or repeated keys are errors.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |message: String, key: Option<String>| ConfigError {
            key,
            line: Some(i + 1),
            message,
        };
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| at("expected `key = value`".into(), None))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(at("unknown key".into(), Some(k.to_string())));
        }
        if out.iter().any(|(seen, _)| seen == k) {
            return Err(at("repeated key".into(), Some(k.to_string())));
        }
        out.push((k.to_string(), v.to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| err(key, format!("cannot parse `{v}`")))
}

/// Keys that map onto [`SimConfig`] fields.
pub const SIM_KEYS: &[&str] = &[
    "seed",
    "total_steps",
    "n_record",
    "h_s",
    "relative_price_mode",
    "h_x",
    "alpha_x",
    "sigma_x",
    "cancel_mode",
    "cancel_a",
    "cancel_b",
    "poisson_rate",
    "imbalance",
    "tick",
    "empty_side_reference",
    "drop_unfillable",
];

/// Sets one of [`SIM_KEYS`] on `sim`. Values are not range-checked here;
/// [`SimConfig::validate`] does that.
pub fn apply_sim(sim: &mut SimConfig, key: &str, v: &str) -> Result<(), ConfigError> {
    match key {
        "seed" => sim.seed = RngSeed(num(key, v)?),
        "total_steps" => sim.total_steps = num(key, v)?,
        "n_record" => sim.n_record = num(key, v)?,
        "h_s" => sim.h_s = num(key, v)?,
        "relative_price_mode" => {
            sim.relative_price_mode = match v {
                "iid" => RelativePriceMode::Iid,
                "long_memory" => RelativePriceMode::LongMemory,
                _ => return Err(err(key, format!("expected iid or long_memory, got `{v}`"))),
            }
        }
        "h_x" => sim.h_x = num(key, v)?,
        "alpha_x" => sim.alpha_x = num(key, v)?,
        "sigma_x" => sim.sigma_x = num(key, v)?,
        "cancel_mode" => {
            sim.cancel.mode = match v {
                "mike_farmer" => CancelMode::MikeFarmer,
                "poisson" => CancelMode::Poisson,
                _ => return Err(err(key, format!("expected mike_farmer or poisson, got `{v}`"))),
            }
        }
        "cancel_a" => sim.cancel.a = num(key, v)?,
        "cancel_b" => sim.cancel.b = num(key, v)?,
        "poisson_rate" => sim.cancel.poisson_rate = num(key, v)?,
        "imbalance" => {
            sim.cancel.imbalance = match v {
                "same_side_fraction" => Imbalance::SameSideFraction,
                "signed" => Imbalance::Signed,
                _ => return Err(err(key, format!("expected same_side_fraction or signed, got `{v}`"))),
            }
        }
        "tick" => sim.tick = if v == "none" { None } else { Some(num(key, v)?) },
        "empty_side_reference" => {
            sim.empty_side.reference = match v {
                "last_mid" => Reference::LastMid,
                "opposite" => Reference::Opposite,
                "last_own_best" => Reference::LastOwnBest,
                _ => {
                    return Err(err(
                        key,
                        format!("expected last_mid, opposite or last_own_best, got `{v}`"),
                    ))
                }
            }
        }
        "drop_unfillable" => sim.empty_side.drop_unfillable = num(key, v)?,
        _ => return Err(err(key, "unknown key")),
    }
    Ok(())
}

/// Applies one key to `config`. `preset` is handled by the caller.
pub fn apply(config: &mut RunConfig, key: &str, v: &str) -> Result<(), ConfigError> {
    if SIM_KEYS.contains(&key) {
        return apply_sim(&mut config.sim, key, v);
    }
    match key {
        "rounds" => config.rounds = num(key, v)?,
        "detrend_order" => config.analysis.detrend_order = num(key, v)?,
        "fit_min" => {
            config.analysis.fit_min = num(key, v)?;
            config.fit_range_set = true;
        }
        "fit_max" => {
            config.analysis.fit_max = num(key, v)?;
            config.fit_range_set = true;
        }
        "tail_fraction" => config.analysis.tail_fraction = num(key, v)?,
        "sweep_param" => {
            if v == "none" {
                config.sweep = None;
            } else {
                let param = SweepParam::from_name(v).ok_or_else(|| err(key, format!("unknown parameter `{v}`")))?;
                let values = config.sweep.take().map(|s| s.values).unwrap_or_default();
                config.sweep = Some(Sweep { param, values });
            }
        }
        "sweep_values" => {
            let values = v
                .split(',')
                .map(|s| num::<f64>(key, s.trim()))
                .collect::<Result<Vec<_>, _>>()?;
            match config.sweep.as_mut() {
                Some(s) => s.values = values,
                None => return Err(err(key, "set sweep_param before sweep_values")),
            }
        }
        "input" => config.input = Some(PathBuf::from(v)),
        _ => return Err(err(key, "unknown key")),
    }
    Ok(())
}

/// Builds the run configuration: preset defaults, then file pairs in order.
/// The preset comes from `preset` or, failing that, the file's `preset` key.
pub fn build(preset: Option<&str>, pairs: &[(String, String)]) -> Result<RunConfig, ConfigError> {
    let file_preset = pairs.iter().find(|(k, _)| k == "preset").map(|(_, v)| v.as_str());
    let name = preset
        .or(file_preset)
        .ok_or_else(|| err("preset", "no preset given"))?;
    let preset = Preset::from_name(name).ok_or_else(|| {
        let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
        err("preset", format!("unknown preset `{name}`; known: {}", known.join(", ")))
    })?;
    let mut config = RunConfig::preset(preset);
    for (k, v) in pairs {
        if k != "preset" {
            apply(&mut config, k, v)?;
        }
    }
    Ok(config)
}
