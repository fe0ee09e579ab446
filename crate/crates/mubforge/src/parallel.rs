//! Thread-pool drivers for sweeps and restarts. Work is cut into fixed
//! chunks and merged with a total order, so results do not depend on the
//! number of workers.

use anyhow::Result;
use mubforge_core::entropy::{
    minimize_restart, pick_best, sample_range, sweep_count, sweep_range, MinimizeConfig, Minimum,
    OverlapTable, SweepResult,
};
use mubforge_core::mub::MubSet;
use mubforge_core::Error;
use rayon::prelude::*;

/// Strings per work item.
const CHUNK: u128 = 4096;

pub fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t.max(1));
    }
    Ok(b.build()?)
}

fn merge_all(parts: Vec<SweepResult>) -> SweepResult {
    let mut it = parts.into_iter();
    let first = it.next().expect("at least one chunk");
    it.fold(first, SweepResult::merge)
}

pub fn sweep(ms: &MubSet, budget: u128, threads: Option<usize>) -> Result<SweepResult> {
    let total = sweep_count(ms.dim(), ms.len());
    if total > budget {
        return Err(Error::BudgetExceeded { required: total, budget }.into());
    }
    let table = OverlapTable::new(ms);
    let chunks = total.div_ceil(CHUNK) as u64;
    let parts = pool(threads)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c as u128 * CHUNK;
                sweep_range(&table, start, (start + CHUNK).min(total))
            })
            .collect::<Vec<_>>()
    });
    Ok(merge_all(parts))
}

pub fn sample(ms: &MubSet, samples: u64, seed: u64, threads: Option<usize>) -> Result<SweepResult> {
    let table = OverlapTable::new(ms);
    let chunk = CHUNK as u64;
    let chunks = samples.div_ceil(chunk).max(1);
    let parts = pool(threads)?.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| sample_range(&table, seed, c * chunk, ((c + 1) * chunk).min(samples)))
            .collect::<Vec<_>>()
    });
    Ok(merge_all(parts))
}

pub fn minimize(ms: &MubSet, cfg: &MinimizeConfig, threads: Option<usize>) -> Result<Minimum> {
    if cfg.restarts == 0 {
        return Err(Error::NoRestarts.into());
    }
    let results = pool(threads)?.install(|| {
        (0..cfg.restarts)
            .into_par_iter()
            .map(|r| minimize_restart(ms, cfg, r))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(pick_best(results).expect("at least one restart"))
}
