use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lob::Side;
use crate::stochastic::RealSeries;

/// One incoming order with the quotes prevailing just before it arrived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderFlowRecord {
    pub time: f64,
    pub side: Side,
    pub price: f64,
    pub best_bid: f64,
    pub best_ask: f64,
}

impl OrderFlowRecord {
    fn validate(&self, index: usize) -> Result<()> {
        let bad = |message: String| Error::Parse { index, message };
        for (name, v) in [("price", self.price), ("best_bid", self.best_bid), ("best_ask", self.best_ask)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(format!("{name} must be a positive number, got {v}")));
            }
        }
        if self.best_bid >= self.best_ask {
            return Err(bad(format!(
                "best_bid {} is not below best_ask {}",
                self.best_bid, self.best_ask
            )));
        }
        Ok(())
    }

    /// Log distance of the order price to the same-side best quote.
    pub fn relative_price(&self) -> f64 {
        match self.side {
            Side::Buy => self.price.ln() - self.best_bid.ln(),
            Side::Sell => self.best_ask.ln() - self.price.ln(),
        }
    }
}

pub fn relative_prices_from_orderflow(records: &[OrderFlowRecord]) -> Result<RealSeries> {
    let mut last_time = f64::NEG_INFINITY;
    let mut out = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        r.validate(i)?;
        if r.time < last_time {
            return Err(Error::Parse {
                index: i,
                message: format!("time {} precedes previous record", r.time),
            });
        }
        last_time = r.time;
        out.push(r.relative_price());
    }
    RealSeries::new(out)
}

#[derive(Deserialize)]
struct Row {
    time: f64,
    side: String,
    price: f64,
    best_bid: f64,
    best_ask: f64,
}

/// Reads `time,side,price,best_bid,best_ask` rows with `side` in `{B, S}`.
pub fn read_orderflow_csv<R: Read>(reader: R) -> Result<Vec<OrderFlowRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["time", "side", "price", "best_bid", "best_ask"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse {
            index: 0,
            message: format!("expected header {}, got {}", expected.join(","), headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::Parse {
            index: i,
            message: e.to_string(),
        })?;
        let side = match row.side.as_str() {
            "B" => Side::Buy,
            "S" => Side::Sell,
            other => {
                return Err(Error::Parse {
                    index: i,
                    message: format!("side must be B or S, got {other:?}"),
                })
            }
        };
        let rec = OrderFlowRecord {
            time: row.time,
            side,
            price: row.price,
            best_bid: row.best_bid,
            best_ask: row.best_ask,
        };
        rec.validate(i)?;
        out.push(rec);
    }
    Ok(out)
}
