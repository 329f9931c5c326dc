//! Stochastic cancelation of resting orders.
//!
//! In Mike-Farmer mode order `i` is canceled with probability
//! `A (1 - exp(-y_i)) (n_imb + B) / N_tot`, clamped to `[0, 1]`, where `y_i` is
//! its current distance to the opposite best relative to the distance at entry,
//! `n_imb` the fraction of resting orders on its side and `N_tot` the book size.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lob::{LimitOrderBook, Order, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CancelMode {
    MikeFarmer,
    Poisson,
}

/// How the imbalance term is measured for an order on side `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Imbalance {
    /// `N_s / N_tot`.
    #[default]
    SameSideFraction,
    /// `(N_s - N_opposite) / N_tot`.
    Signed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CancelParams {
    pub mode: CancelMode,
    pub a: f64,
    pub b: f64,
    pub poisson_rate: f64,
    #[serde(default)]
    pub imbalance: Imbalance,
}

impl Default for CancelParams {
    fn default() -> Self {
        CancelParams {
            mode: CancelMode::MikeFarmer,
            a: 1.12,
            b: 0.2,
            poisson_rate: 0.0,
            imbalance: Imbalance::SameSideFraction,
        }
    }
}

impl CancelParams {
    pub fn poisson(rate: f64) -> Self {
        CancelParams {
            mode: CancelMode::Poisson,
            poisson_rate: rate,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            CancelMode::MikeFarmer => {
                if !(self.a > 0.0 && self.a.is_finite()) {
                    return Err(Error::param(format!("cancel A must be positive, got {}", self.a)));
                }
                if !(self.b >= 0.0 && self.b.is_finite()) {
                    return Err(Error::param(format!("cancel B must be non-negative, got {}", self.b)));
                }
            }
            CancelMode::Poisson => {
                if !(0.0..=1.0).contains(&self.poisson_rate) {
                    return Err(Error::param(format!(
                        "poisson rate must lie in [0,1], got {}",
                        self.poisson_rate
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Mike-Farmer cancelation probability of one order.
pub fn mike_farmer_probability(y: f64, n_imb: f64, n_tot: usize, a: f64, b: f64) -> f64 {
    let p = a * (1.0 - (-y).exp()) * (n_imb + b) / n_tot as f64;
    p.clamp(0.0, 1.0)
}

/// Visits each order independently with probability `prob(order)`, where every
/// probability is at most `bound`. Candidates are located by geometric
/// skip-ahead at rate `bound` and then kept with probability `prob / bound`,
/// which gives the same independent Bernoulli outcome per order while drawing
/// randoms only for candidates.
fn thinned<R, F>(orders: &[Order], bound: f64, prob: F, rng: &mut R, out: &mut Vec<u64>)
where
    R: Rng + ?Sized,
    F: Fn(&Order) -> f64,
{
    if bound <= 0.0 || orders.is_empty() {
        return;
    }
    if bound >= 1.0 {
        for order in orders {
            if rng.gen::<f64>() < prob(order) {
                out.push(order.id);
            }
        }
        return;
    }
    let log_miss = (-bound).ln_1p();
    let mut i = 0usize;
    loop {
        let u: f64 = rng.gen();
        let skip = ((-u).ln_1p() / log_miss).floor();
        if skip >= (orders.len() - i) as f64 {
            break;
        }
        i += skip as usize;
        let order = &orders[i];
        if rng.gen::<f64>() * bound < prob(order) {
            out.push(order.id);
        }
        i += 1;
        if i >= orders.len() {
            break;
        }
    }
}

/// Ids of the orders to cancel this step, ascending. Each resting order is
/// canceled independently; orders whose opposite side is empty are skipped.
pub fn cancel_scan<R: Rng + ?Sized>(book: &LimitOrderBook, params: &CancelParams, rng: &mut R) -> Vec<u64> {
    let mut out = Vec::new();
    let n_tot = book.len();
    if n_tot == 0 {
        return out;
    }
    match params.mode {
        CancelMode::Poisson => {
            for side in [Side::Buy, Side::Sell] {
                let rate = params.poisson_rate;
                thinned(book.side_orders(side), rate, |_| rate, rng, &mut out);
            }
        }
        CancelMode::MikeFarmer => {
            let n_buy = book.side_count(Side::Buy) as f64;
            let n_sell = book.side_count(Side::Sell) as f64;
            for side in [Side::Buy, Side::Sell] {
                let Some(opposite) = book.best(side.opposite()) else { continue };
                let (own, other) = match side {
                    Side::Buy => (n_buy, n_sell),
                    Side::Sell => (n_sell, n_buy),
                };
                let n_imb = match params.imbalance {
                    Imbalance::SameSideFraction => own / n_tot as f64,
                    Imbalance::Signed => (own - other) / n_tot as f64,
                };
                // P_i = scale * (1 - exp(-y_i)) with the bracket in [0, 1).
                let scale = params.a * (n_imb + params.b) / n_tot as f64;
                let prob = |order: &Order| {
                    let y = if order.initial_distance > 0.0 {
                        order.distance_to(opposite) / order.initial_distance
                    } else {
                        1.0
                    };
                    (scale * (1.0 - (-y).exp())).clamp(0.0, 1.0)
                };
                thinned(book.side_orders(side), scale.min(1.0), prob, rng, &mut out);
            }
        }
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::RngSeed;

    #[test]
    fn single_fresh_order_probability() {
        let p = mike_farmer_probability(1.0, 1.0, 1, 1.12, 0.2);
        let want = 1.12 * (1.0 - (-1.0f64).exp()) * 1.2;
        assert!((p - want).abs() < 1e-15);
        assert!((p - 0.8496).abs() < 1e-4);
    }

    #[test]
    fn zero_distance_is_never_canceled() {
        assert_eq!(mike_farmer_probability(0.0, 0.7, 10, 1.12, 0.2), 0.0);
    }

    #[test]
    fn probability_is_clamped() {
        assert_eq!(mike_farmer_probability(50.0, 1.0, 1, 10.0, 0.2), 1.0);
        assert_eq!(mike_farmer_probability(1.0, -1.0, 1, 1.0, 0.2), 0.0);
    }

    #[test]
    fn monotone_in_distance_and_imbalance() {
        let ys = [0.1, 0.5, 1.0, 2.0, 5.0];
        for w in ys.windows(2) {
            assert!(mike_farmer_probability(w[0], 0.5, 20, 1.12, 0.2) < mike_farmer_probability(w[1], 0.5, 20, 1.12, 0.2));
        }
        assert!(mike_farmer_probability(1.0, 0.3, 20, 1.12, 0.2) < mike_farmer_probability(1.0, 0.6, 20, 1.12, 0.2));
        let p10 = mike_farmer_probability(1.0, 0.5, 10, 1.12, 0.2);
        let p20 = mike_farmer_probability(1.0, 0.5, 20, 1.12, 0.2);
        assert!((p10 - 2.0 * p20).abs() < 1e-15);
    }

    #[test]
    fn degenerate_poisson_rates() {
        let mut book = LimitOrderBook::seeded(0.01);
        for t in 0..10 {
            book.submit(Side::Buy, -0.001 * t as f64, t).unwrap();
        }
        let mut rng = RngSeed(1).rng();
        assert!(cancel_scan(&book, &CancelParams::poisson(0.0), &mut rng).is_empty());
        let all: Vec<u64> = book.resting_orders().iter().map(|o| o.id).collect();
        assert_eq!(all.len(), 12);
        assert_eq!(cancel_scan(&book, &CancelParams::poisson(1.0), &mut rng), all);
    }

    #[test]
    fn empty_book_scans_to_nothing() {
        let book = LimitOrderBook::new(0.0);
        let mut rng = RngSeed(1).rng();
        assert!(cancel_scan(&book, &CancelParams::default(), &mut rng).is_empty());
    }

    #[test]
    fn orders_without_opposite_quote_are_skipped() {
        let mut book = LimitOrderBook::seeded(0.01);
        book.cancel(1, 0).unwrap();
        let mut rng = RngSeed(1).rng();
        let params = CancelParams {
            a: 1e6,
            ..Default::default()
        };
        assert!(cancel_scan(&book, &params, &mut rng).is_empty());
    }

    #[test]
    fn validation() {
        assert!(CancelParams::default().validate().is_ok());
        assert!(CancelParams { a: 0.0, ..Default::default() }.validate().is_err());
        assert!(CancelParams { b: -0.1, ..Default::default() }.validate().is_err());
        assert!(CancelParams::poisson(1.5).validate().is_err());
    }
}
