//! Parallel Monte Carlo execution. Replications run on a rayon pool and are
//! aggregated in index order, so the report does not depend on the pool size.

use rayon::prelude::*;
use stable_arma_core::montecarlo::{aggregate, run_replication, McConfig, McReport, Replication};
use stable_arma_core::Error;

use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "STABLE_ARMA_THREADS";

/// Worker count: `STABLE_ARMA_THREADS` if set, else the available
/// parallelism.
pub fn worker_count() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(CliError::input(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run_mc_parallel(config: &McConfig, workers: usize) -> stable_arma_core::Result<McReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let reps: Vec<Replication> =
        pool.install(|| (0..config.reps).into_par_iter().map(|r| run_replication(config, r)).collect());
    Ok(aggregate(config, &reps))
}
