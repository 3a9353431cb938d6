//! Command-line front end, file formats and a parallel Monte Carlo runner for
//! [`stable_arma_core`].

pub mod cli;
pub mod error;
pub mod io;
pub mod manifest;
pub mod report;
pub mod runner;

pub use error::{CliError, CliResult};
