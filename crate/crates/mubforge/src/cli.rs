//! Command-line entry points.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mubforge_core::classes::{build_partition, validate_partition};
use mubforge_core::entropy::{
    bounds, sweep_count, MinimizeConfig, Normalization, OverlapTable, SweepResult, DEFAULT_BUDGET,
};
use mubforge_core::mub::{build_mub_set, verify_cycle, MubSet};
use mubforge_core::pauli::build_gamma_generators;
use mubforge_core::wigner::{phase_space_report, wigner_entropy_bound, Assignment};
use serde_json::json;

use crate::figures::{self, FigureConfig};
use crate::io::{self, MatrixFile, MubSetFile, PartitionFile, ValidationFile};
use crate::parallel;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_ARGS: u8 = 4;

/// Default cap on the qubit count, overridable through `MUBFORGE_MAX_N`.
pub const DEFAULT_MAX_N: usize = 5;
/// Rows above which `sweep --all` refuses to list every string.
pub const MAX_LISTED_ROWS: u128 = 1 << 20;

#[derive(Parser, Debug)]
#[command(name = "mubforge", version, about = "Symmetric mutually unbiased bases and min-entropy bounds")]
pub struct Cli {
    /// Worker threads for sweeps and restarts.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Mean,
    Sum,
}

impl From<NormArg> for Normalization {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::Mean => Normalization::Mean,
            NormArg::Sum => Normalization::Sum,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SetArgs {
    /// Qubit count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of bases.
    #[arg(long = "L", short = 'L')]
    pub l: Option<usize>,
    /// A generated directory or a bases JSON file instead of `--n/--L`.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the classes, bases and cycling unitary and write them to a directory.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long = "L", short = 'L')]
        l: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-check a generated directory or bases file.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Table of both analytic bounds for d = 2, 4, … up to dmax.
    Bounds {
        #[arg(long, default_value_t = 32)]
        dmax: usize,
        #[arg(long, default_value_t = 33)]
        lmax: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Largest eigenvalue of P_b over all (or sampled) strings b.
    Sweep {
        #[command(flatten)]
        set: SetArgs,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = NormArg::Mean)]
        normalization: NormArg,
        /// Sample this many strings instead of enumerating all of them.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// List every string, not just the maximizer.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized minimization of the average Rényi entropy.
    Minimize {
        #[command(flatten)]
        set: SetArgs,
        /// Rényi order; `inf` for the min-entropy.
        #[arg(long, default_value = "inf")]
        alpha: String,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discrete Wigner function extrema of a complete set.
    Wigner {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
        /// JSON array of d+1 permutations, line index to basis element.
        #[arg(long)]
        assignment: Option<PathBuf>,
        #[arg(long)]
        verbose: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Data and a gnuplot script for figure 1 (d = 4) or 2 (d = 8).
    ReproduceFig {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long)]
        out: PathBuf,
        /// Exhaustive sweeps for every L (also enabled by MUBFORGE_FULL=1).
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 200_000)]
        samples: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
}

/// Error carrying a specific exit code.
#[derive(Debug)]
struct Coded(u8, String);

impl std::fmt::Display for Coded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Coded {}

fn coded(code: u8, msg: impl Into<String>) -> anyhow::Error {
    Coded(code, msg.into()).into()
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use mubforge_core::Error as E;
    if let Some(c) = e.downcast_ref::<Coded>() {
        return c.0;
    }
    for cause in e.chain() {
        if let Some(core) = cause.downcast_ref::<E>() {
            return match core {
                E::Unbiasedness { .. }
                | E::NoProjectorMatch { .. }
                | E::CycleCheck { .. }
                | E::NotSimultaneouslyDiagonalizable(_)
                | E::NotSignedMonomial(_)
                | E::NotUnitary(_)
                | E::InvalidBasis(_) => EXIT_VALIDATION,
                E::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_ARGS,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return EXIT_ARGS;
        }
    }
    1
}

fn max_n() -> usize {
    std::env::var("MUBFORGE_MAX_N").ok().and_then(|v| v.parse().ok()).unwrap_or(DEFAULT_MAX_N)
}

fn check_n(n: usize) -> Result<()> {
    let cap = max_n();
    if n == 0 || n > cap {
        return Err(coded(EXIT_ARGS, format!("n = {n} outside 1..={cap} (raise MUBFORGE_MAX_N to allow more)")));
    }
    Ok(())
}

fn unsupported(n: usize, l: usize) -> anyhow::Error {
    coded(
        EXIT_ARGS,
        format!(
            "no cycled construction for n = {n}, L = {l}: need L prime with L = 2n+1 or L dividing n \
             (or n = 2 with L = 3 or 4)"
        ),
    )
}

fn map_unsupported(e: mubforge_core::Error, n: usize, l: usize) -> anyhow::Error {
    match e {
        mubforge_core::Error::Unsupported { .. } => unsupported(n, l),
        other => other.into(),
    }
}

fn resolve_set(set: &SetArgs) -> Result<MubSet> {
    match (&set.input, set.n, set.l) {
        (Some(path), None, None) => io::load_set(path),
        (None, Some(n), Some(l)) => {
            check_n(n)?;
            let (ms, source) = figures::figure_set(n, l).map_err(|_| unsupported(n, l))?;
            if source == "field" {
                eprintln!("no cycled construction for n = {n}, L = {l}; using the first {l} field-based bases");
            }
            Ok(ms)
        }
        _ => Err(coded(EXIT_ARGS, "give either --input or both --n and --L")),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn to_json_text(v: &serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn full_requested(flag: bool) -> bool {
    flag || std::env::var("MUBFORGE_FULL").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn header(cli: &Cli) {
    eprintln!("mubforge {} threads={:?} format={:?}", env!("CARGO_PKG_VERSION"), cli.threads, cli.format);
    eprintln!("config {:?}", cli.command);
}

/// Parses arguments and runs the command.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_ARGS) } else { ExitCode::SUCCESS };
        }
    };
    header(&cli);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let threads = cli.threads;
    match &cli.command {
        Command::Generate { n, l, out } => generate(*n, *l, out),
        Command::Validate { input } => validate(input),
        Command::Bounds { dmax, lmax, out } => {
            let mut rows = Vec::new();
            let mut d = 2;
            while d <= *dmax {
                for l in 1..=*lmax {
                    rows.push((l, d, bounds(l, d)));
                }
                d *= 2;
            }
            let text = match cli.format {
                Format::Csv => io::bounds_csv(&rows),
                Format::Json => to_json_text(&json!(rows
                    .iter()
                    .map(|(l, d, b)| json!({"L": l, "d": d, "small_L": b.small_l, "large_L": b.large_l, "best": b.best, "deutsch": b.deutsch}))
                    .collect::<Vec<_>>()))?,
            };
            emit(out.as_deref(), &text)
        }
        Command::Sweep { set, budget, normalization, samples, seed, all, out } => {
            let ms = resolve_set(set)?;
            let scale = match Normalization::from(*normalization) {
                Normalization::Mean => 1.0,
                Normalization::Sum => ms.len() as f64,
            };
            let result = match samples {
                Some(s) => {
                    eprintln!("sampling {s} strings with seed {seed}");
                    parallel::sample(&ms, *s, *seed, threads)?
                }
                None => parallel::sweep(&ms, *budget, threads).map_err(|e| {
                    let msg = format!("{e:#}; pass --samples N for a sampled sweep or raise --budget");
                    if exit_code(&e) == EXIT_BUDGET {
                        coded(EXIT_BUDGET, msg)
                    } else {
                        e
                    }
                })?,
            };
            let bound = bounds(ms.len(), ms.dim());
            eprintln!(
                "strings={} lambda*={} -log2={} bound={} gap={}",
                result.count,
                result.lambda,
                result.minus_log2(),
                bound.best,
                result.minus_log2() - bound.best
            );
            let text = sweep_text(&ms, &result, scale, *all && samples.is_none(), cli.format)?;
            emit(out.as_deref(), &text)
        }
        Command::Minimize { set, alpha, restarts, seed, out } => {
            let ms = resolve_set(set)?;
            let alpha = parse_alpha(alpha)?;
            eprintln!("seed={seed} restarts={restarts} alpha={alpha}");
            let cfg = MinimizeConfig::new(alpha, *restarts, *seed);
            let m = parallel::minimize(&ms, &cfg, threads)?;
            let bound = bounds(ms.len(), ms.dim());
            let state: Vec<[f64; 2]> = m.state.iter().map(|z| [z.re, z.im]).collect();
            let text = match cli.format {
                Format::Csv => format!("L,d,alpha,seed,restarts,value,bound\n{},{},{alpha},{seed},{restarts},{},{}\n", ms.len(), ms.dim(), m.value, bound.best),
                Format::Json => to_json_text(&json!({
                    "L": ms.len(), "d": ms.dim(), "alpha": alpha.to_string(), "seed": seed,
                    "restarts": restarts, "value": m.value, "restart": m.restart,
                    "bound": bound.best, "state": state,
                }))?,
            };
            emit(out.as_deref(), &text)
        }
        Command::Wigner { n, input, assignment, verbose, out } => {
            let ms = match (input, n) {
                (Some(p), None) => io::load_set(p)?,
                (None, Some(n)) => {
                    check_n(*n)?;
                    figures::figure_set(*n, (1 << n) + 1)?.0
                }
                _ => return Err(coded(EXIT_ARGS, "give either --input or --n")),
            };
            let assign = match assignment {
                Some(p) => Assignment::new(io::read_json(p)?)?,
                None => Assignment::identity(ms.dim()),
            };
            let rows = phase_space_report(&ms, &assign)?;
            let wb = wigner_entropy_bound(&ms, &assign)?;
            eprintln!("wigner bound {} bits (max W {} at {:?}); max over phase-point strings {}", wb.bits, wb.w_max, wb.argmax, wb.pb_bits);
            if *verbose {
                eprintln!("literal reading -log2[d (W_max + 1)] = {}", wb.literal_bits);
                eprintln!("analytic best bound {}", bounds(ms.len(), ms.dim()).best);
            }
            let text = match cli.format {
                Format::Csv => io::phase_space_csv(&rows),
                Format::Json => to_json_text(&json!({
                    "bound": wb.bits, "literal": wb.literal_bits, "pb_bound": wb.pb_bits, "w_max": wb.w_max,
                    "points": rows.iter().map(|r| json!({"alpha_x": r.point.0, "alpha_y": r.point.1, "lambda_max": r.lambda_max, "W_max": r.w_max})).collect::<Vec<_>>(),
                }))?,
            };
            emit(out.as_deref(), &text)
        }
        Command::ReproduceFig { which, out, full, seed, restarts, samples, budget } => {
            let cfg = FigureConfig {
                full: full_requested(*full),
                seed: *seed,
                restarts: *restarts,
                threads,
                samples: *samples,
                budget: *budget,
            };
            fs::create_dir_all(out)?;
            let rows = figures::figure(*which, &cfg)?;
            for r in &rows {
                eprintln!(
                    "L={} bound={} sweep={} ({}) minimizer={} invariant={:?}",
                    r.l, r.best, r.sweep_min, if r.sampled { "sampled" } else { "full" }, r.numeric_min, r.invariant_min
                );
            }
            let csv = format!("fig{which}.csv");
            fs::write(out.join(&csv), figures::figure_csv(&rows))?;
            fs::write(out.join(format!("fig{which}.gp")), figures::gnuplot_script(*which, &csv))?;
            Ok(())
        }
    }
}

fn parse_alpha(s: &str) -> Result<f64> {
    let a = match s {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        _ => s.parse::<f64>().map_err(|_| coded(EXIT_ARGS, format!("alpha {s:?} is not a number")))?,
    };
    if !(a > 0.0) {
        return Err(coded(EXIT_ARGS, format!("alpha must be positive, got {s}")));
    }
    Ok(a)
}

fn sweep_text(ms: &MubSet, r: &SweepResult, scale: f64, all: bool, format: Format) -> Result<String> {
    let total = sweep_count(ms.dim(), ms.len());
    if all && total > MAX_LISTED_ROWS {
        return Err(coded(EXIT_BUDGET, format!("refusing to list {total} rows (limit {MAX_LISTED_ROWS})")));
    }
    match format {
        Format::Csv if all => {
            let table = OverlapTable::new(ms);
            let mut out = String::from(io::sweep_csv_header());
            for idx in 0..total {
                let b = mubforge_core::entropy::b_from_index(idx, ms.dim(), ms.len());
                io::sweep_csv_row(&mut out, &b, table.lambda(&b), scale);
            }
            Ok(out)
        }
        Format::Csv => Ok(io::sweep_summary_csv(r, scale)),
        Format::Json => to_json_text(&json!({
            "best": r.best, "lambda_max": r.lambda * scale, "minus_log2": r.minus_log2(),
            "count": r.count, "sampled": r.sampled, "histogram": r.histogram.bins,
        })),
    }
}

fn generate(n: usize, l: usize, out: &Path) -> Result<()> {
    check_n(n)?;
    let gs = build_gamma_generators(n)?;
    let (part, u) = build_partition(&gs, l).map_err(|e| map_unsupported(e, n, l))?;
    let report = validate_partition(&gs, &part, &u);
    fs::create_dir_all(out)?;
    io::write_json(&out.join(io::PARTITION_FILE), &PartitionFile::from_partition(&part))?;
    io::write_json(&out.join(io::UNITARY_FILE), &MatrixFile::from_matrix(u.matrix()))?;
    if !report.ok() {
        io::write_json(&out.join(io::REPORT_FILE), &ValidationFile::new(&report, None, None))?;
        return Err(coded(EXIT_VALIDATION, format!("partition failed validation: {report:?}")));
    }
    let ms = build_mub_set(&gs, &part)?;
    let cycle = verify_cycle(&ms)?;
    io::write_json(&out.join(io::BASES_FILE), &MubSetFile::from_set(&ms, Some(&cycle)))?;
    let vf = ValidationFile::new(&report, Some(ms.bias_deviation()), Some(cycle.worst_residual));
    io::write_json(&out.join(io::REPORT_FILE), &vf)?;
    println!(
        "generated {l} bases in d = {} (bias deviation {:e}, cycle residual {:e}) in {}",
        ms.dim(),
        ms.bias_deviation(),
        cycle.worst_residual,
        out.display()
    );
    Ok(())
}

fn validate(input: &Path) -> Result<()> {
    let ms = io::load_set(input)?;
    println!("{} bases in d = {}: bias deviation {:e}", ms.len(), ms.dim(), ms.bias_deviation());
    if ms.unitary.is_some() {
        let c = verify_cycle(&ms)?;
        println!("cycle residual {:e}, closure {:?}", c.worst_residual, c.closure);
        if !(c.worst_residual < 1e-8) {
            return Err(coded(EXIT_VALIDATION, "cycle residual above 1e-8"));
        }
    }
    if let (Some(part), Some(u)) = (&ms.partition, &ms.unitary) {
        let gs = build_gamma_generators(part.n)?;
        let report = validate_partition(&gs, part, u);
        println!("partition P1={} P2={} P3={}", report.p1, report.p2, report.p3);
        if !report.ok() {
            return Err(coded(EXIT_VALIDATION, format!("partition failed validation: {report:?}")));
        }
    }
    // Re-serialize and compare, so the files are known to be canonical.
    let bases = if input.is_dir() { input.join(io::BASES_FILE) } else { input.to_path_buf() };
    let stored: MubSetFile = io::read_json(&bases)?;
    let mut again = MubSetFile::from_set(&ms, None);
    again.cycle = stored.cycle.clone();
    if again != stored {
        return Err(coded(EXIT_VALIDATION, "stored bases are not in canonical form"));
    }
    println!("ok");
    Ok(())
}
