//! Simulation and estimation for ARMA, GARCH and ARMA-GARCH processes driven
//! by symmetric α-stable (SαS) noise.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is a pure function
//! of its inputs and an explicit [`RngSeed`], so independent calls can run on
//! any number of threads and still give bit-identical results.
//!
//! Layout:
//! - [`stable`]: characteristic function, Chambers-Mallows-Stuck sampling,
//!   first absolute moment λ(α) and a quantile + ECF-regression fit.
//! - [`models`]: SαS-ARMA, SαS-GARCH and ARMA-SαS-GARCH simulators.
//! - [`dependence`]: normalized autocovariation and the modified
//!   Yule-Walker system built from it.
//! - [`arma`]: modified Hannan-Rissanen (MHR) plus LAD/LS M-estimators.
//! - [`garch`]: modified empirical characteristic function (MECF) GARCH(1,1)
//!   fitting and the combined ARMA-GARCH pipeline.
//! - [`montecarlo`]: replication harness for the M1-M4 study designs.
//! - [`diagnostics`]: KS tests, QQ data, residual autocovariation.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > a)` also rejects NaN

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arma;
pub mod dependence;
pub mod diagnostics;
mod error;
pub mod garch;
pub mod models;
pub mod montecarlo;
pub mod optim;
mod quantile_table;
mod rng;
mod series;
pub mod stable;
mod trig;

pub use error::{Error, Result};
pub use rng::{RngSeed, StreamRng};
pub use series::{SeriesMeta, SeriesSample, TrueParams};

/// `sign(x)` with `sign(0) = 0`.
#[inline]
pub(crate) fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
