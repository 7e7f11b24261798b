//! Rayon drivers for the per-cell and per-point kernels. Results are
//! collected in index order, so they match the sequential versions exactly.

use rayon::prelude::*;

use lottery_ricker::basin::{BasinGrid, BasinSpec};
use lottery_ricker::stability::{self, PersistenceEstimate, ProbeSettings};
use lottery_ricker::{MapFamily, State};

use crate::error::{CliError, CliResult};

pub const THREADS_ENV: &str = "LRL_THREADS";

/// Worker pool capped by `LRL_THREADS` when it holds a positive integer.
pub fn pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => builder = builder.num_threads(n),
            _ => return Err(CliError::validation(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        }
    }
    builder.build().map_err(|e| CliError::validation(format!("thread pool: {e}")))
}

pub fn par_rasterize(spec: &BasinSpec) -> CliResult<BasinGrid> {
    let results = pool()?.install(|| (0..spec.cell_count()).into_par_iter().map(|i| spec.classify_cell(i)).collect());
    Ok(BasinGrid::from_results(spec, results)?)
}

pub fn par_probe(f: &MapFamily, points: &[State], settings: &ProbeSettings) -> CliResult<PersistenceEstimate> {
    if settings.horizon <= settings.burn_in {
        return Err(CliError::validation("horizon must exceed burn-in"));
    }
    let records = pool()?.install(|| points.par_iter().map(|&s| stability::probe_point(f, s, settings)).collect());
    Ok(stability::summarize(records, settings))
}
