//! Order-driven market simulation with long-memory order flow, plus the
//! fluctuation-analysis and tail-fitting estimators used to study its output.

pub mod analysis;
pub mod cancelation;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod lob;
pub mod seed;
pub mod simulator;
pub mod stochastic;

pub use error::{Error, Result};
pub use seed::RngSeed;
