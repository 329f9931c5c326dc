//! Command-line experiment runner.
//!
//! Settings are merged in this order, later wins: preset defaults, the
//! `--config` file, command-line flags.

pub mod config;
mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{
    default_q_grid, dfa, mfdfa, read_orderflow_csv, relative_prices_from_orderflow, ScaleSpec,
};
use crate::error::Error;
use crate::experiment::{run_experiment, ExperimentReport};
use crate::seed::RngSeed;

pub use config::{ConfigError, Preset, RunConfig};
use output::Label;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_OUTPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "lobsim", version, about = "Order-book simulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a preset experiment and write results to the output directory.
    Run(RunArgs),
    /// List preset names.
    Presets,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Preset name (same as --preset).
    #[arg(value_name = "PRESET")]
    name: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Also write `returns_<point>_<round>.csv` for every round.
    #[arg(long)]
    emit_returns: bool,
    /// Order-flow CSV for orderflow-dfa.
    #[arg(long)]
    input: Option<PathBuf>,
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match cli.command {
        Command::Presets => {
            for p in Preset::ALL {
                println!("{}", p.name());
            }
            EXIT_OK
        }
        Command::Run(args) => match execute(&args) {
            Ok(()) => EXIT_OK,
            Err(f) => {
                eprintln!("lobsim: {}", f.message);
                f.code
            }
        },
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Failure {
        Failure {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }

    fn output(path: &Path, e: impl std::fmt::Display) -> Failure {
        Failure {
            code: EXIT_OUTPUT,
            message: format!("cannot write to {}: {e}", path.display()),
        }
    }

    fn run(e: Error) -> Failure {
        match e {
            Error::Parameter(_) => Failure::config(e),
            e => Failure {
                code: EXIT_FAILURE,
                message: e.to_string(),
            },
        }
    }
}

fn resolve(args: &RunArgs) -> Result<RunConfig, Failure> {
    if let (Some(a), Some(b)) = (&args.name, &args.preset) {
        if a != b {
            return Err(Failure::config(format!("preset given twice: `{a}` and `{b}`")));
        }
    }
    let pairs = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
            config::parse_pairs(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?
        }
        None => Vec::new(),
    };
    let preset = args.name.as_deref().or(args.preset.as_deref());
    let mut run = config::build(preset, &pairs).map_err(Failure::config)?;
    if let Some(r) = args.rounds {
        run.rounds = r;
    }
    if let Some(s) = args.seed {
        run.sim.seed = RngSeed(s);
    }
    if let Some(i) = &args.input {
        run.input = Some(i.clone());
    }
    Ok(run)
}

fn execute(args: &RunArgs) -> Result<(), Failure> {
    let run = resolve(args)?;
    fs::create_dir_all(&args.out).map_err(|e| Failure::output(&args.out, e))?;
    if run.preset == Preset::OrderflowDfa {
        orderflow(&run, &args.out)
    } else {
        simulate(&run, args)
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    preset: &'static str,
    report: &'a ExperimentReport,
}

fn simulate(run: &RunConfig, args: &RunArgs) -> Result<(), Failure> {
    let out = &args.out;
    let result =
        run_experiment(&run.sim, run.rounds, run.sweep.as_ref(), &run.analysis, args.jobs).map_err(Failure::run)?;
    let report = &result.report;
    let wr = |r: crate::Result<()>| r.map_err(|e| Failure::output(out, e));
    wr(output::write_json(
        out,
        "summary.json",
        &Summary {
            preset: run.preset.name(),
            report,
        },
    ))?;

    let spec = run.analysis.scale_spec();
    let q = default_q_grid();
    let mut dfas = Vec::new();
    let mut taus = Vec::new();
    for (p, (point, series)) in report.points.iter().zip(&result.series).enumerate() {
        let first = &series[0];
        for (name, s) in [("return", &first.returns), ("volatility", &first.volatility)] {
            dfas.push((p, point.sweep_value, name, dfa(s, run.analysis.detrend_order, &spec).map_err(Failure::run)?));
            taus.push((p, point.sweep_value, name, mfdfa(s, &q, &spec).map_err(Failure::run)?));
        }
    }
    let label = |p: usize, v: Option<f64>, s: &'static str| Label {
        point: p,
        sweep_value: v,
        series: s,
    };
    wr(output::write_dfa_curves(
        out,
        &dfas.iter().map(|(p, v, s, r)| (label(*p, *v, s), r)).collect::<Vec<_>>(),
    ))?;
    wr(output::write_tau_q(
        out,
        &taus.iter().map(|(p, v, s, r)| (label(*p, *v, s), r)).collect::<Vec<_>>(),
    ))?;
    let pooled: Vec<Vec<f64>> = result
        .series
        .iter()
        .map(|rounds| rounds.iter().flat_map(|s| s.volatility.iter().copied()).collect())
        .collect();
    wr(output::write_ccdf(
        out,
        &report
            .points
            .iter()
            .enumerate()
            .map(|(p, point)| (label(p, point.sweep_value, "volatility"), pooled[p].as_slice()))
            .collect::<Vec<_>>(),
    ))?;
    if args.emit_returns {
        for (p, rounds) in result.series.iter().enumerate() {
            for (k, s) in rounds.iter().enumerate() {
                let w = output::create(out, &format!("returns_{p}_{k}.csv")).map_err(|e| Failure::output(out, e))?;
                wr(s.write_csv(w))?;
            }
        }
    }

    for point in &report.points {
        let head = match (report.sweep_param, point.sweep_value) {
            (Some(param), Some(v)) => format!("{} = {v}: ", param.name()),
            _ => String::new(),
        };
        let beta = point
            .beta
            .map(|b| format!("{:.3} ± {:.3}", b.mean, b.sd))
            .unwrap_or_else(|| "n/a".into());
        println!(
            "{head}H_r = {:.3} ± {:.3}, H_v = {:.3} ± {:.3}, beta = {beta}",
            point.h_r.mean, point.h_r.sd, point.h_v.mean, point.h_v.sd
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct OrderflowSummary {
    preset: &'static str,
    input: String,
    n_records: usize,
    detrend_order: usize,
    fit_range: (usize, usize),
    h_x: f64,
    h_x_stderr: f64,
}

fn orderflow(run: &RunConfig, out: &Path) -> Result<(), Failure> {
    let path = run
        .input
        .as_ref()
        .ok_or_else(|| Failure::config("orderflow-dfa needs --input or the `input` key"))?;
    let file = fs::File::open(path).map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    let records = read_orderflow_csv(file).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let x = relative_prices_from_orderflow(&records).map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
    let spec = if run.fit_range_set {
        run.analysis.scale_spec()
    } else {
        ScaleSpec::default()
    };
    let r = dfa(&x, run.analysis.detrend_order, &spec).map_err(Failure::run)?;
    let wr = |res: crate::Result<()>| res.map_err(|e| Failure::output(out, e));
    wr(output::write_json(
        out,
        "summary.json",
        &OrderflowSummary {
            preset: run.preset.name(),
            input: path.display().to_string(),
            n_records: records.len(),
            detrend_order: run.analysis.detrend_order,
            fit_range: r.fit_range,
            h_x: r.hurst,
            h_x_stderr: r.hurst_stderr,
        },
    ))?;
    let label = Label {
        point: 0,
        sweep_value: None,
        series: "relative_price",
    };
    wr(output::write_dfa_curves(out, &[(label, &r)]))?;
    let mf = mfdfa(&x, &default_q_grid(), &spec).map_err(Failure::run)?;
    let label = Label {
        point: 0,
        sweep_value: None,
        series: "relative_price",
    };
    wr(output::write_tau_q(out, &[(label, &mf)]))?;
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    let label = Label {
        point: 0,
        sweep_value: None,
        series: "abs_relative_price",
    };
    wr(output::write_ccdf(out, &[(label, abs.as_slice())]))?;
    println!("H_x = {:.3} ± {:.3} over {} records", r.hurst, r.hurst_stderr, records.len());
    Ok(())
}
