//! Datasets for the average min-entropy plots at `d = 4` and `d = 8`.

use std::fmt::Write as _;

use anyhow::Result;
use mubforge_core::classes::build_partition;
use mubforge_core::entropy::{avg_entropy, bounds, sweep_count, MinimizeConfig, State};
use mubforge_core::mub::{build_mub_set, invariant_states, ramp_states, trace_form_mub_set, MubSet};
use mubforge_core::pauli::build_gamma_generators;

use crate::parallel;

#[derive(Clone, Debug)]
pub struct FigureConfig {
    /// Run exhaustive sweeps even above `FULL_SWEEP_MAX_L`.
    pub full: bool,
    pub seed: u64,
    pub restarts: usize,
    pub threads: Option<usize>,
    /// Strings drawn per sampled sweep.
    pub samples: u64,
    pub budget: u128,
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self {
            full: false,
            seed: 1,
            restarts: 64,
            threads: None,
            samples: 200_000,
            budget: mubforge_core::entropy::DEFAULT_BUDGET,
        }
    }
}

/// Largest number of bases swept exhaustively unless `full` is set.
pub const FULL_SWEEP_MAX_L: usize = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct FigureRow {
    pub l: usize,
    pub d: usize,
    pub small_l: f64,
    pub large_l: f64,
    pub best: f64,
    /// `-log2 λ*` from the sweep.
    pub sweep_min: f64,
    pub sampled: bool,
    /// Best average min-entropy found by the minimizer.
    pub numeric_min: f64,
    /// Lowest average min-entropy over eigenvectors of the cycling unitary.
    pub invariant_min: Option<f64>,
    pub source: &'static str,
}

/// The set used for `L` bases on `n` qubits: the cycled construction when one
/// exists, otherwise a prefix of the field-based complete set.
pub fn figure_set(n: usize, l: usize) -> Result<(MubSet, &'static str)> {
    let gs = build_gamma_generators(n)?;
    if let Ok((part, _)) = build_partition(&gs, l) {
        return Ok((build_mub_set(&gs, &part)?, "cycled"));
    }
    Ok((trace_form_mub_set(n)?.prefix(l)?, "field"))
}

pub fn invariant_min(ms: &MubSet) -> Result<Option<f64>> {
    if ms.unitary.is_none() {
        return Ok(None);
    }
    let mut states: Vec<Vec<_>> = invariant_states(ms)?.into_iter().map(|s| s.state).collect();
    states.extend(ramp_states(ms)?.into_iter().map(|s| s.state));
    let mut best = f64::INFINITY;
    for s in states {
        best = best.min(avg_entropy(ms, &State::Pure(s), f64::INFINITY)?);
    }
    Ok(Some(best))
}

pub fn figure_row(n: usize, l: usize, cfg: &FigureConfig) -> Result<FigureRow> {
    let (ms, source) = figure_set(n, l)?;
    let d = ms.dim();
    let b = bounds(l, d);
    let exhaustive = l <= FULL_SWEEP_MAX_L || cfg.full || sweep_count(d, l) <= cfg.samples as u128;
    let sweep = if exhaustive {
        parallel::sweep(&ms, cfg.budget, cfg.threads)?
    } else {
        parallel::sample(&ms, cfg.samples, cfg.seed, cfg.threads)?
    };
    let min = parallel::minimize(&ms, &MinimizeConfig::new(f64::INFINITY, cfg.restarts, cfg.seed), cfg.threads)?;
    Ok(FigureRow {
        l,
        d,
        small_l: b.small_l,
        large_l: b.large_l,
        best: b.best,
        sweep_min: sweep.minus_log2(),
        sampled: sweep.sampled,
        numeric_min: min.value,
        invariant_min: invariant_min(&ms)?,
        source,
    })
}

/// Qubit count and range of `L` for figure 1 or 2.
pub fn figure_params(which: u8) -> Option<(usize, std::ops::RangeInclusive<usize>)> {
    match which {
        1 => Some((2, 2..=5)),
        2 => Some((3, 2..=9)),
        _ => None,
    }
}

pub fn figure(which: u8, cfg: &FigureConfig) -> Result<Vec<FigureRow>> {
    let (n, ls) = figure_params(which).ok_or_else(|| anyhow::anyhow!("figure must be 1 or 2"))?;
    ls.map(|l| figure_row(n, l, cfg)).collect()
}

pub fn figure_csv(rows: &[FigureRow]) -> String {
    let mut out = String::from("L,d,small_L,large_L,best,sweep_min,sweep_mode,numeric_min,invariant_min,source\n");
    for r in rows {
        let inv = r.invariant_min.map(|v| v.to_string()).unwrap_or_default();
        let mode = if r.sampled { "sampled" } else { "full" };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{mode},{},{inv},{}",
            r.l, r.d, r.small_l, r.large_l, r.best, r.sweep_min, r.numeric_min, r.source
        );
    }
    out
}

/// A gnuplot script drawing the bounds as lines, the sweep and minimizer
/// values as crosses and the invariant states as circles.
pub fn gnuplot_script(which: u8, csv_name: &str) -> String {
    let d = if which == 1 { 4 } else { 8 };
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead top left\n\
         set xlabel 'L'\n\
         set ylabel 'average min-entropy (bits)'\n\
         set title 'd = {d}'\n\
         set terminal pngcairo size 800,600\n\
         set output 'fig{which}.png'\n\
         plot '{csv_name}' using 1:3 with lines title 'small L bound', \\\n\
         \x20    '' using 1:4 with lines title 'large L bound', \\\n\
         \x20    '' using 1:6 with points pt 2 ps 2 title 'sweep', \\\n\
         \x20    '' using 1:8 with points pt 1 ps 2 title 'minimizer', \\\n\
         \x20    '' using 1:9 with points pt 6 ps 2 title 'invariant'\n"
    )
}
