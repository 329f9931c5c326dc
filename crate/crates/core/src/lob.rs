//! Continuous double auction in log-price space with unit-size orders and
//! strict price-time priority.

use std::cmp::Ordering;
use std::collections::{BTreeMap, VecDeque};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn from_sign(sign: i8) -> Side {
        if sign >= 0 {
            Side::Buy
        } else {
            Side::Sell
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    pub(crate) fn index(self) -> usize {
        match self {
            Side::Buy => 0,
            Side::Sell => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Buy => "buy",
            Side::Sell => "sell",
        }
    }
}

/// A resting unit-size limit order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order {
    pub id: u64,
    pub side: Side,
    pub log_price: f64,
    pub entry_time: u64,
    /// Log distance to the opposite best when the order was placed.
    pub initial_distance: f64,
}

impl Order {
    /// Current log distance to the opposite best quote.
    pub fn distance_to(&self, opposite_best: f64) -> f64 {
        match self.side {
            Side::Buy => opposite_best - self.log_price,
            Side::Sell => self.log_price - opposite_best,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Rested,
    Executed,
    Canceled,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Rested => "rested",
            EventKind::Executed => "executed",
            EventKind::Canceled => "canceled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BookEvent {
    pub kind: EventKind,
    pub order_id: u64,
    pub side: Side,
    pub log_price: f64,
    /// Present iff `kind == Executed`.
    pub trade_price_log: Option<f64>,
    pub step: u64,
    /// Resting order consumed by an executed incoming order.
    pub counterparty: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    /// Orders placed to initialize the book; not counted as submissions.
    pub seeded: u64,
    pub submitted: u64,
    pub executed_on_arrival: u64,
    pub rested: u64,
    pub executed_as_counterparty: u64,
    pub canceled: u64,
}

/// Price an order is placed against when its own side has no quote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    #[default]
    LastMid,
    /// The opposite best, or the last mid if that is missing too.
    Opposite,
    /// The last best quote the side had before it emptied.
    LastOwnBest,
}

/// Handling of one-sided books.
///
/// The default places against the last mid and lets an order rest when there is
/// nothing to trade with. Under Mike-Farmer cancelation that state can lock in:
/// bids keep stacking above the frozen mid and no ask ever comes back.
/// [`EmptySideRules::carry_forward`] avoids it by pricing against the last own
/// best and discarding orders that would cross the last opposite quote.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmptySideRules {
    pub reference: Reference,
    /// Discard an order that would cross the last opposite quote while the
    /// opposite side is empty. It is counted as rested and then canceled.
    pub drop_unfillable: bool,
}

impl EmptySideRules {
    pub fn carry_forward() -> Self {
        EmptySideRules {
            reference: Reference::LastOwnBest,
            drop_unfillable: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quote {
    pub best_bid_log: Option<f64>,
    pub best_ask_log: Option<f64>,
    pub spread_log: Option<f64>,
    pub mid_log: f64,
}

#[derive(Debug, Clone, Copy)]
struct PriceKey(f64);

impl PartialEq for PriceKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for PriceKey {}
impl PartialOrd for PriceKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for PriceKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

type Levels = BTreeMap<PriceKey, VecDeque<u64>>;

#[derive(Debug, Clone)]
pub struct LimitOrderBook {
    bids: Levels,
    asks: Levels,
    /// Resting orders per side (bids, asks), each sorted by id.
    resting: [Vec<Order>; 2],
    last_mid: f64,
    /// Last defined best price of each side.
    last_best: [Option<f64>; 2],
    rules: EmptySideRules,
    next_id: u64,
    tick: Option<f64>,
    counts: EventCounts,
    log: Option<Vec<BookEvent>>,
}

impl Default for LimitOrderBook {
    fn default() -> Self {
        Self::new(0.0)
    }
}

impl LimitOrderBook {
    /// Empty book whose mid falls back to `initial_mid` until both sides quote.
    pub fn new(initial_mid: f64) -> Self {
        LimitOrderBook {
            bids: Levels::new(),
            asks: Levels::new(),
            resting: [Vec::new(), Vec::new()],
            last_mid: initial_mid,
            last_best: [None, None],
            rules: EmptySideRules::default(),
            next_id: 0,
            tick: None,
            counts: EventCounts::default(),
            log: None,
        }
    }

    /// Book holding one bid at `-half_spread` and one ask at `+half_spread`.
    pub fn seeded(half_spread: f64) -> Self {
        let mut book = Self::new(0.0);
        book.seed_order(Side::Buy, -half_spread);
        book.seed_order(Side::Sell, half_spread);
        book
    }

    /// Rounds every new order price to a multiple of `tick` (log units).
    pub fn with_tick(mut self, tick: Option<f64>) -> Self {
        self.tick = tick.filter(|t| *t > 0.0);
        self
    }

    pub fn with_rules(mut self, rules: EmptySideRules) -> Self {
        self.rules = rules;
        self
    }

    pub fn rules(&self) -> EmptySideRules {
        self.rules
    }

    pub fn with_event_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    pub fn events(&self) -> &[BookEvent] {
        self.log.as_deref().unwrap_or(&[])
    }

    pub fn counts(&self) -> EventCounts {
        self.counts
    }

    pub fn len(&self) -> usize {
        self.resting[0].len() + self.resting[1].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn side_count(&self, side: Side) -> usize {
        self.resting[side.index()].len()
    }

    /// Resting orders of one side in ascending id order.
    pub fn side_orders(&self, side: Side) -> &[Order] {
        &self.resting[side.index()]
    }

    /// All resting orders in ascending id order.
    pub fn resting_orders(&self) -> Vec<Order> {
        let mut all: Vec<Order> = self.resting.iter().flatten().copied().collect();
        all.sort_by_key(|o| o.id);
        all
    }

    pub fn get(&self, id: u64) -> Option<&Order> {
        self.locate(id).map(|(s, i)| &self.resting[s][i])
    }

    pub fn best_bid(&self) -> Option<f64> {
        self.bids.last_key_value().map(|(k, _)| k.0)
    }

    pub fn best_ask(&self) -> Option<f64> {
        self.asks.first_key_value().map(|(k, _)| k.0)
    }

    pub fn best(&self, side: Side) -> Option<f64> {
        match side {
            Side::Buy => self.best_bid(),
            Side::Sell => self.best_ask(),
        }
    }

    pub fn quote(&self) -> Quote {
        let (b, a) = (self.best_bid(), self.best_ask());
        match (b, a) {
            (Some(b), Some(a)) => Quote {
                best_bid_log: Some(b),
                best_ask_log: Some(a),
                spread_log: Some(a - b),
                mid_log: 0.5 * (a + b),
            },
            _ => Quote {
                best_bid_log: b,
                best_ask_log: a,
                spread_log: None,
                mid_log: self.last_mid,
            },
        }
    }

    /// Price levels from best to worst with their FIFO queues of order ids.
    pub fn levels(&self, side: Side) -> Vec<(f64, Vec<u64>)> {
        let conv = |(k, q): (&PriceKey, &VecDeque<u64>)| (k.0, q.iter().copied().collect());
        match side {
            Side::Buy => self.bids.iter().rev().map(conv).collect(),
            Side::Sell => self.asks.iter().map(conv).collect(),
        }
    }

    fn locate(&self, id: u64) -> Option<(usize, usize)> {
        (0..2).find_map(|s| {
            self.resting[s]
                .binary_search_by_key(&id, |o| o.id)
                .ok()
                .map(|i| (s, i))
        })
    }

    fn levels_mut(&mut self, side: Side) -> &mut Levels {
        match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        }
    }

    fn refresh_mid(&mut self) {
        if let Some(b) = self.best_bid() {
            self.last_best[0] = Some(b);
        }
        if let Some(a) = self.best_ask() {
            self.last_best[1] = Some(a);
        }
        if let (Some(b), Some(a)) = (self.best_bid(), self.best_ask()) {
            self.last_mid = 0.5 * (a + b);
        }
    }

    fn record(&mut self, event: BookEvent) {
        if let Some(log) = self.log.as_mut() {
            log.push(event);
        }
    }

    fn round_price(&self, p: f64) -> f64 {
        match self.tick {
            Some(t) => (p / t).round() * t,
            None => p,
        }
    }

    pub fn seed_order(&mut self, side: Side, log_price: f64) {
        let id = self.next_id;
        self.next_id += 1;
        let opposite = self.best(side.opposite()).unwrap_or(self.last_mid);
        self.insert(Order {
            id,
            side,
            log_price,
            entry_time: 0,
            initial_distance: distance(side, log_price, opposite).max(0.0),
        });
        self.counts.seeded += 1;
        self.refresh_mid();
    }

    fn insert(&mut self, order: Order) {
        self.levels_mut(order.side)
            .entry(PriceKey(order.log_price))
            .or_default()
            .push_back(order.id);
        // Ids are issued in increasing order, so pushing keeps each side sorted.
        let queue = &mut self.resting[order.side.index()];
        debug_assert!(queue.last().is_none_or(|o| o.id < order.id));
        queue.push(order);
    }

    fn remove(&mut self, (side, idx): (usize, usize)) -> Order {
        let order = self.resting[side].remove(idx);
        let levels = self.levels_mut(order.side);
        let key = PriceKey(order.log_price);
        let queue = levels.get_mut(&key).expect("resting order has a price level");
        let pos = queue.iter().position(|&id| id == order.id).expect("order queued at its level");
        queue.remove(pos);
        if queue.is_empty() {
            levels.remove(&key);
        }
        order
    }

    /// Submits a unit order whose price is `x` log units from the same-side best
    /// (above the bid for buys, below the ask for sells). An order with `x` at
    /// least the spread executes against the head of the opposite best queue;
    /// anything else rests. With the own side empty the reference follows `rules`.
    pub fn submit(&mut self, side: Side, x: f64, step: u64) -> Result<BookEvent> {
        if !x.is_finite() {
            return Err(Error::param(format!("relative price must be finite, got {x}")));
        }
        let own = self.best(side);
        let opposite = self.best(side.opposite());
        let reference = match self.rules.reference {
            Reference::LastMid => own.unwrap_or(self.last_mid),
            Reference::Opposite => own.or(opposite).unwrap_or(self.last_mid),
            Reference::LastOwnBest => own.or(self.last_best[side.index()]).unwrap_or(self.last_mid),
        };
        let price = self.round_price(match side {
            Side::Buy => reference + x,
            Side::Sell => reference - x,
        });

        let id = self.next_id;
        self.next_id += 1;
        self.counts.submitted += 1;

        let marketable = opposite.is_some_and(|op| {
            let crosses = distance(side, price, op) <= 0.0;
            match own {
                Some(o) => x >= distance(side, o, op) || crosses,
                None => crosses,
            }
        });

        let unfillable = opposite.is_none() && self.rules.drop_unfillable && {
            let last_opp = self.last_best[side.opposite().index()].unwrap_or(self.last_mid);
            distance(side, price, last_opp) <= 0.0
        };
        let event = if unfillable {
            self.counts.canceled += 1;
            self.counts.rested += 1;
            BookEvent {
                kind: EventKind::Canceled,
                order_id: id,
                side,
                log_price: price,
                trade_price_log: None,
                step,
                counterparty: None,
            }
        } else if marketable {
            let levels = self.levels_mut(side.opposite());
            let entry = match side {
                Side::Buy => levels.first_entry(),
                Side::Sell => levels.last_entry(),
            }
            .expect("opposite side is non-empty");
            let trade_price = entry.key().0;
            let counter_id = *entry.get().front().expect("price levels are non-empty");
            let at = self.locate(counter_id).expect("queued order is resting");
            let counter = self.remove(at);
            self.counts.executed_on_arrival += 1;
            self.counts.executed_as_counterparty += 1;
            self.record(BookEvent {
                kind: EventKind::Executed,
                order_id: counter.id,
                side: counter.side,
                log_price: counter.log_price,
                trade_price_log: Some(trade_price),
                step,
                counterparty: Some(id),
            });
            BookEvent {
                kind: EventKind::Executed,
                order_id: id,
                side,
                log_price: price,
                trade_price_log: Some(trade_price),
                step,
                counterparty: Some(counter.id),
            }
        } else {
            let opp_ref = opposite.unwrap_or(self.last_mid);
            self.insert(Order {
                id,
                side,
                log_price: price,
                entry_time: step,
                initial_distance: distance(side, price, opp_ref).max(0.0),
            });
            self.counts.rested += 1;
            BookEvent {
                kind: EventKind::Rested,
                order_id: id,
                side,
                log_price: price,
                trade_price_log: None,
                step,
                counterparty: None,
            }
        };
        self.record(event);
        self.refresh_mid();
        Ok(event)
    }

    pub fn cancel(&mut self, order_id: u64, step: u64) -> Result<BookEvent> {
        let at = self.locate(order_id).ok_or(Error::NotFound(order_id))?;
        let order = self.remove(at);
        self.counts.canceled += 1;
        let event = BookEvent {
            kind: EventKind::Canceled,
            order_id,
            side: order.side,
            log_price: order.log_price,
            trade_price_log: None,
            step,
            counterparty: None,
        };
        self.record(event);
        self.refresh_mid();
        Ok(event)
    }

    /// Removes several orders at once. Ids must be resting and sorted ascending.
    pub(crate) fn cancel_sorted(&mut self, ids: &[u64], step: u64) -> Result<()> {
        for &id in ids {
            self.cancel(id, step)?;
        }
        Ok(())
    }
}

/// Signed log distance from an order at `price` to the opposite quote `opposite`;
/// positive while the order is not marketable.
fn distance(side: Side, price: f64, opposite: f64) -> f64 {
    match side {
        Side::Buy => opposite - price,
        Side::Sell => price - opposite,
    }
}

/// Writes `step,kind,order_id,side,log_price,trade_price_log`, one row per event.
pub fn write_events_csv<W: Write>(events: &[BookEvent], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["step", "kind", "order_id", "side", "log_price", "trade_price_log"])?;
    for e in events {
        w.write_record([
            e.step.to_string(),
            e.kind.as_str().to_string(),
            e.order_id.to_string(),
            e.side.as_str().to_string(),
            e.log_price.to_string(),
            e.trade_price_log.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
