//! Stablecoin peg-stability toolkit.
//!
//! The crate is organised bottom-up:
//!
//! - [`ingest`] loads CoinGecko, FRED and FDIC exports and aligns them on a
//!   daily calendar.
//! - [`metrics`] computes peg deviation, rolling volatility and descriptive
//!   statistics.
//! - [`econometrics`] holds the OLS kernel, lagged design construction and the
//!   Augmented Dickey-Fuller test.
//! - [`calibration`] turns history into shock parameters for the simulator.
//! - [`rng`] and [`simulator`] run paired current-vs-hybrid Monte Carlo trials
//!   on common random numbers.
//! - [`analysis`] aggregates paired outcomes, runs sensitivity sweeps and
//!   evaluates the two-equilibrium bank-run example.
//! - [`report`] and [`svg`] render text tables and figures.

pub mod analysis;
pub mod calibration;
pub mod econometrics;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod simulator;
pub mod svg;

pub use error::{Error, ErrorKind, Result};
