//! The `rankdep` command line.
//!
//! Exit codes: 0 success (and "not rejected" for `test`), 1 usage error,
//! 2 data error, 3 independence rejected by `test`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rankdep_core::copula::{rpv_measures, CopulaFamily, EmpiricalCopulaGrid};
use rankdep_core::mc::{AlternativeFamily, AlternativeSpec, NullJob, QuantileTable, DEFAULT_ITERATIONS, DEFAULT_PROBS};
use rankdep_core::ranks::{RankPositionVector, TiePolicy};
use rankdep_core::stats::{cutoffs, run_test, MfccParams, RankOrigin, StatParams, StatisticId, Window};
use rankdep_core::survival::{cg_estimate, Cause, CgOptions};

use crate::engine::Engine;
use crate::io::{self, PowerRow};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_REJECT: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => EXIT_USAGE,
            Self::Data(_) => EXIT_DATA,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "rankdep", version, about = "Rank-based tests of independence, empirical copulas and copula-graphic survival estimates")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a null quantile table.
    Quantiles(QuantilesArgs),
    /// Test independence of a two-column sample.
    Test(TestArgs),
    /// Estimate power over a grid of correlations.
    Power(PowerArgs),
    /// Empirical copula grid and association measures of a sample.
    Copula(CopulaArgs),
    /// Copula-graphic estimate of both margins from competing-risks data.
    CgEstimate(CgArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Master seed.
    #[arg(long, env = "RANKDEP_SEED", default_value_t = 42)]
    seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TiesArg {
    Error,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OriginArg {
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WindowArg {
    Rectangular,
    Hann,
}

#[derive(Debug, Args)]
struct StatArgs {
    /// Block size for T2.
    #[arg(long, default_value_t = 5)]
    block_size: usize,
    /// Number of mel filters for T5 and T6.
    #[arg(long, default_value_t = 20)]
    mfcc_filters: usize,
    /// Floor applied to filter energies before the log.
    #[arg(long, default_value_t = 1e-12)]
    log_floor: f64,
    #[arg(long, value_enum, default_value_t = WindowArg::Rectangular)]
    window: WindowArg,
    /// Rank origin of the signal fed to the DFT (T3 to T6).
    #[arg(long, value_enum, default_value_t = OriginArg::Zero)]
    origin: OriginArg,
    /// What to do with tied values.
    #[arg(long, value_enum, default_value_t = TiesArg::Error)]
    ties: TiesArg,
}

impl StatArgs {
    fn params(&self, seed: u64) -> Result<StatParams, CliError> {
        let p = StatParams {
            block_size: self.block_size,
            mfcc: MfccParams {
                num_filters: self.mfcc_filters,
                log_floor: self.log_floor,
                window: match self.window {
                    WindowArg::Rectangular => Window::Rectangular,
                    WindowArg::Hann => Window::Hann,
                },
            },
            origin: match self.origin {
                OriginArg::Zero => RankOrigin::Zero,
                OriginArg::One => RankOrigin::One,
            },
            ties: match self.ties {
                TiesArg::Error => TiePolicy::Error,
                TiesArg::Random => TiePolicy::RandomBreak(seed),
            },
        };
        p.validate().map_err(usage)?;
        Ok(p)
    }
}

fn parse_stat(s: &str) -> Result<StatisticId, String> {
    s.parse().map_err(|e: rankdep_core::Error| e.to_string())
}

fn parse_copula(s: &str) -> Result<CopulaFamily, String> {
    s.parse().map_err(|e: rankdep_core::Error| e.to_string())
}

#[derive(Debug, Args)]
struct QuantilesArgs {
    #[arg(long, value_parser = parse_stat)]
    stat: StatisticId,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    /// Comma-separated probabilities.
    #[arg(long, value_delimiter = ',')]
    probs: Option<Vec<f64>>,
    /// Output JSON; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    stat_args: StatArgs,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[arg(long, value_parser = parse_stat)]
    stat: StatisticId,
    #[arg(long)]
    input: PathBuf,
    /// Null quantile table; not needed for Tp.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Seed for random tie breaking.
    #[arg(long, env = "RANKDEP_SEED", default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    stat_args: StatArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AltArg {
    Normal,
    Rwalk,
}

#[derive(Debug, Args)]
struct PowerArgs {
    /// One or more statistics, comma-separated.
    #[arg(long, value_parser = parse_stat, value_delimiter = ',', required = true)]
    stat: Vec<StatisticId>,
    #[arg(long, value_enum)]
    alt: AltArg,
    /// Correlation grid `start:step:end`, a single value or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    r: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    /// Null quantile tables, one per statistic; missing ones are simulated.
    #[arg(long)]
    table: Vec<PathBuf>,
    /// Iterations for simulated null tables; defaults to `--iters`.
    #[arg(long)]
    null_iters: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
    #[command(flatten)]
    stat_args: StatArgs,
}

#[derive(Debug, Args)]
struct CopulaArgs {
    #[arg(long)]
    input: PathBuf,
    /// Output grid CSV; stdout if omitted and `--measures` is not given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print Spearman's rho, Kendall's t and Gini's g as JSON.
    #[arg(long)]
    measures: bool,
    #[arg(long, value_enum, default_value_t = TiesArg::Error)]
    ties: TiesArg,
    #[arg(long, env = "RANKDEP_SEED", default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CgArgs {
    #[arg(long)]
    input: PathBuf,
    /// independence, clayton:THETA or frank:THETA.
    #[arg(long, value_parser = parse_copula, default_value = "independence")]
    copula: CopulaFamily,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add the jackknife variance of the X-margin survival estimate.
    #[arg(long)]
    jackknife: bool,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

/// Parses `start:step:end` (inclusive within 1e-9), a comma list or one value.
pub fn parse_r_grid(spec: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("bad number {s:?} in r grid"));
    let values = match spec.split(':').collect::<Vec<_>>().as_slice() {
        [start, step, end] => {
            let (start, step, end) = (num(start)?, num(step)?, num(end)?);
            if step.is_nan() || step <= 0.0 || end < start {
                return Err(format!("r grid {spec:?} needs step > 0 and start <= end"));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize;
            (0..=count).map(|k| round9(start + k as f64 * step)).collect()
        }
        [single] => single.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("cannot parse r grid {spec:?}")),
    };
    if let Some(r) = values.iter().find(|r| !(-1.0..=1.0).contains(*r)) {
        return Err(format!("r = {r} is outside [-1, 1]"));
    }
    Ok(values)
}

fn round9(x: f64) -> f64 {
    let y = (x * 1e9).round() / 1e9;
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

/// Seed for a null table simulated on the fly for `stat`.
pub fn null_table_seed(seed: u64, stat: StatisticId) -> u64 {
    let tag = StatisticId::ALL.iter().position(|&s| s == stat).unwrap_or(0) as u64 + 1;
    splitmix64(seed ^ splitmix64(tag))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn engine(workers: usize) -> Result<Engine, CliError> {
    Engine::new(workers).map_err(usage)
}

fn io_err(e: io::IoError) -> CliError {
    data(e)
}

fn write_out(w: &mut dyn Write, text: &str) -> Result<(), CliError> {
    w.write_all(text.as_bytes()).and_then(|()| w.flush()).map_err(data)
}

fn quantiles(a: QuantilesArgs) -> Result<i32, CliError> {
    let params = a.stat_args.params(a.run.seed)?;
    let probs = a.probs.unwrap_or_else(|| DEFAULT_PROBS.to_vec());
    rankdep_core::mc::validate_probs(&probs).map_err(usage)?;
    rankdep_core::mc::check_iterations(a.iters).map_err(usage)?;
    NullJob::new(a.stat, a.n, a.run.seed, params).map_err(usage)?;
    let engine = engine(a.run.workers)?;
    let table = engine.null_quantiles(a.stat, a.n, a.iters, &probs, a.run.seed, &params).map_err(data)?;
    let text = io::table_to_json(&table).map_err(io_err)? + "\n";
    write_out(&mut *io::sink(a.out.as_deref()).map_err(io_err)?, &text)?;
    Ok(0)
}

fn test(a: TestArgs) -> Result<i32, CliError> {
    let params = a.stat_args.params(a.seed)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("alpha must lie in (0, 1), got {}", a.alpha)));
    }
    if a.table.is_none() && a.stat != StatisticId::Tp {
        return Err(usage(format!("--table is required for {}", a.stat)));
    }
    let sample = io::read_sample_csv(&a.input).map_err(io_err)?;
    let table = a.table.as_deref().map(io::read_table).transpose().map_err(io_err)?;
    let result = run_test(a.stat, &sample, table.as_ref(), a.alpha, &params).map_err(data)?;
    let text = serde_json::to_string_pretty(&result).map_err(data)? + "\n";
    write_out(&mut std::io::stdout().lock(), &text)?;
    Ok(if result.reject { EXIT_REJECT } else { 0 })
}

fn power(a: PowerArgs) -> Result<i32, CliError> {
    let seed = a.run.seed;
    let params = a.stat_args.params(seed)?;
    let rs = parse_r_grid(&a.r).map_err(usage)?;
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(usage(format!("alpha must lie in (0, 1), got {}", a.alpha)));
    }
    if a.iters == 0 {
        return Err(usage("--iters must be positive"));
    }
    let null_iters = a.null_iters.unwrap_or(a.iters);
    let family = match a.alt {
        AltArg::Normal => AlternativeFamily::CorrelatedNormal,
        AltArg::Rwalk => AlternativeFamily::RandomWalkNormal,
    };
    let mut stats: Vec<StatisticId> = Vec::new();
    for &s in &a.stat {
        if !stats.contains(&s) {
            stats.push(s);
        }
    }
    for &s in &stats {
        NullJob::new(s, a.n, seed, params).map_err(usage)?;
    }

    let mut loaded: Vec<QuantileTable> = Vec::new();
    for path in &a.table {
        let t = io::read_table(path).map_err(io_err)?;
        if !stats.contains(&t.statistic) {
            return Err(usage(format!("{} holds a table for {}, which is not in --stat", path.display(), t.statistic)));
        }
        loaded.push(t);
    }
    let needs_sim = stats.iter().any(|&s| s != StatisticId::Tp && !loaded.iter().any(|t| t.statistic == s));
    if needs_sim {
        rankdep_core::mc::check_iterations(null_iters).map_err(usage)?;
    }
    let mut out = io::sink(a.out.as_deref()).map_err(io_err)?;

    let engine = engine(a.run.workers)?;
    let mut rows = Vec::new();
    for &stat in &stats {
        let table = match loaded.iter().find(|t| t.statistic == stat) {
            Some(t) => Some(t.clone()),
            None if stat == StatisticId::Tp => None,
            None => Some(
                engine
                    .null_quantiles(stat, a.n, null_iters, &DEFAULT_PROBS, null_table_seed(seed, stat), &params)
                    .map_err(data)?,
            ),
        };
        cutoffs(stat, a.n, table.as_ref(), a.alpha).map_err(data)?;
        for &r in &rs {
            let alt = AlternativeSpec::new(family, r).map_err(usage)?;
            let p = engine.power(stat, alt, a.n, a.iters, table.as_ref(), a.alpha, seed, &params).map_err(data)?;
            rows.push(PowerRow {
                statistic: stat.name().to_owned(),
                n: a.n,
                r,
                alpha: a.alpha,
                iterations: a.iters,
                seed,
                power: p,
            });
        }
    }
    io::write_power_csv(&mut out, &rows).map_err(io_err)?;
    Ok(0)
}

fn copula(a: CopulaArgs) -> Result<i32, CliError> {
    let policy = match a.ties {
        TiesArg::Error => TiePolicy::Error,
        TiesArg::Random => TiePolicy::RandomBreak(a.seed),
    };
    let sample = io::read_sample_csv(&a.input).map_err(io_err)?;
    let rpv = RankPositionVector::from_sample(&sample, policy).map_err(data)?;
    let grid = EmpiricalCopulaGrid::from_rpv(&rpv);
    if a.out.is_some() || !a.measures {
        io::write_copula_grid(io::sink(a.out.as_deref()).map_err(io_err)?, &grid).map_err(io_err)?;
    }
    if a.measures {
        let text = io::measures_json(&rpv_measures(&rpv)).map_err(io_err)? + "\n";
        write_out(&mut std::io::stdout().lock(), &text)?;
    }
    Ok(0)
}

fn cg(a: CgArgs) -> Result<i32, CliError> {
    if !(a.tol.is_finite() && a.tol > 0.0) || a.max_iter == 0 {
        return Err(usage("--tol must be positive and --max-iter nonzero"));
    }
    let opts = CgOptions { tol: a.tol, max_iter: a.max_iter };
    let data_set = io::read_competing_risks_csv(&a.input).map_err(io_err)?;
    let est = cg_estimate(&data_set, &a.copula, &opts).map_err(data)?;
    let var = if a.jackknife {
        Some(engine(a.workers)?.jackknife_curve(&data_set, &a.copula, &opts, Cause::X).map_err(data)?)
    } else {
        None
    };
    io::write_survival_csv(io::sink(a.out.as_deref()).map_err(io_err)?, &est, var.as_deref()).map_err(io_err)?;
    Ok(0)
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Quantiles(a) => quantiles(a),
        Command::Test(a) => test(a),
        Command::Power(a) => power(a),
        Command::Copula(a) => copula(a),
        Command::CgEstimate(a) => cg(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("rankdep: {e}");
            e.exit_code()
        }
    }
}
