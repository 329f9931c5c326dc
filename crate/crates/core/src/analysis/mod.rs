//! Estimators: detrended fluctuation analysis, its multifractal extension,
//! power-law tail fitting and relative prices from recorded order flow.

mod dfa;
mod mfdfa;
mod orderflow;
mod tail;

pub use dfa::{dfa, fit_loglog, window_variances, DfaResult, LineFit, ScaleSpec, Scales};
pub use mfdfa::{default_q_grid, mfdfa, MfDfaResult};
pub use orderflow::{read_orderflow_csv, relative_prices_from_orderflow, OrderFlowRecord};
pub use tail::{ccdf, ccdf_tail_fit, ccdf_tail_fit_with, TailFitResult, DEFAULT_FIT_FRACTION, DEFAULT_MIN_TAIL_POINTS};
