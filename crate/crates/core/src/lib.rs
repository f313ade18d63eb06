//! Deterministic forecasting of hyperscaler data-center electricity demand,
//! its regional allocation, and a regional power-stress index.
//!
//! The library is organised bottom-up:
//!
//! - [`energy`]: site-level IT and facility energy, parameter evolution
//! - [`scenario`]: firm trajectories under growth scenarios, ensembles
//! - [`siting`]: expansion probabilities, allocation weights, regional split
//! - [`psi`]: supply extrapolation, stress index and banding, cross-check
//! - [`pipeline`]: config-driven end-to-end runs
//!
//! Energies are carried as [`Energy`] (MWh internally) and converted to
//! TWh only at the I/O boundary.

pub mod config;
pub mod domain;
pub mod energy;
pub mod error;
pub mod io;
pub mod output;
pub mod pipeline;
pub mod psi;
pub mod scenario;
pub mod siting;
pub mod units;

pub use config::RunConfig;
pub use domain::*;
pub use error::{Error, Result, Stage};
pub use pipeline::{run_pipeline, RunOptions, Through};
pub use units::Energy;
