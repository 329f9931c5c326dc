//! Files written by a run. Column orders are fixed; prices and returns are in
//! log units, exponents are dimensionless.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::analysis::{ccdf, DfaResult, MfDfaResult};
use crate::error::Result;

/// At most this many rows per CCDF curve; ranks are spaced evenly in log.
pub const CCDF_MAX_ROWS: usize = 1000;

pub fn create(dir: &Path, name: &str) -> Result<BufWriter<fs::File>> {
    Ok(BufWriter::new(fs::File::create(dir.join(name))?))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// One labelled curve set: grid point index, swept value and series name.
pub struct Label<'a> {
    pub point: usize,
    pub sweep_value: Option<f64>,
    pub series: &'a str,
}

impl Label<'_> {
    fn cells(&self) -> [String; 3] {
        [
            self.point.to_string(),
            self.sweep_value.map(|v| v.to_string()).unwrap_or_default(),
            self.series.to_string(),
        ]
    }
}

pub fn write_dfa_curves(dir: &Path, curves: &[(Label, &DfaResult)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(dir, "dfa_curves.csv")?);
    w.write_record(["point", "sweep_value", "series", "scale", "fluctuation", "in_fit"])?;
    for (label, r) in curves {
        let [p, s, n] = label.cells();
        for (&l, f) in r.scales.iter().zip(&r.fluctuations) {
            let in_fit = l >= r.fit_range.0 && l < r.fit_range.1;
            w.write_record([&p, &s, &n, &l.to_string(), &f.to_string(), &(in_fit as u8).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_tau_q(dir: &Path, curves: &[(Label, &MfDfaResult)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(dir, "tau_q.csv")?);
    w.write_record(["point", "sweep_value", "series", "q", "h_q", "tau"])?;
    for (label, r) in curves {
        let [p, s, n] = label.cells();
        for ((q, h), t) in r.q_grid.iter().zip(&r.hq).zip(&r.tau) {
            w.write_record([&p, &s, &n, &q.to_string(), &h.to_string(), &t.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_ccdf(dir: &Path, curves: &[(Label, &[f64])]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(dir, "ccdf.csv")?);
    w.write_record(["point", "sweep_value", "series", "value", "ccdf"])?;
    for (label, values) in curves {
        let [p, s, n] = label.cells();
        let full = ccdf(values);
        for k in thin_ranks(full.len(), CCDF_MAX_ROWS) {
            let (v, c) = full[k];
            if v > 0.0 {
                w.write_record([&p, &s, &n, &v.to_string(), &c.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Up to `max` distinct indices in `0..n`, spaced evenly in log of the rank.
fn thin_ranks(n: usize, max: usize) -> Vec<usize> {
    if n <= max {
        return (0..n).collect();
    }
    let top = (n as f64).ln();
    let mut out: Vec<usize> = (0..max)
        .map(|i| ((top * i as f64 / (max - 1) as f64).exp().round() as usize - 1).min(n - 1))
        .collect();
    out.dedup();
    out
}
