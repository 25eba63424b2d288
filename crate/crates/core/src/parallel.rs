//! Replicate fan-out.
//!
//! Replicate `r` always receives `seed_derive(master, r)` and results come
//! back in replicate order, so output does not depend on the worker count.

use rayon::prelude::*;

use crate::error::{invalid, Result};

/// Run `job(r)` for `r in 0..replicates` on `workers` threads (0 = all cores).
pub fn fan_out<R, F>(replicates: u64, workers: usize, job: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(u64) -> Result<R> + Sync + Send,
{
    if workers == 1 {
        return (0..replicates).map(job).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("worker pool: {e}")))?;
    pool.install(|| (0..replicates).into_par_iter().map(job).collect())
}
