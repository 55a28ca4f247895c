use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use blowup_core::blowup_factor::{yk_euler, yk_gottsche, yk_hol, yk_main, YkRequest};
use blowup_core::cache::{EnumerationCache, Enumerator};
use blowup_core::coefficients::{sample_specialization, Coefficient, Rational, YMode, YRat};
use blowup_core::genera::{
    fixed_point_counts, max_n_for_order, z_series, zhat_series, Mode, SeriesParams, SeriesReport, SeriesRequest,
};
use blowup_core::qseries::QSeries;
use blowup_core::rank1::{w_series, WRequest, WSubstitution};
use blowup_core::verify::{
    default_order, verify_all, verify_corollary, verify_limit_consistency, verify_main_theorem, verify_rank1,
    CorollaryParams, MainTheoremParams, VerifyOptions, DEFAULT_SEEDS,
};
use blowup_core::Error;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Exact localization computations for framed sheaves on P2 and its blow-up.
///
/// Output is JSON on stdout (or --output); logs go to stderr (RUST_LOG).
/// Exit status: 0 pass, 1 verification failure or runtime error, 2 usage error.
#[derive(Parser, Debug)]
#[command(name = "blowup", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Directory for the fixed-point enumeration cache.
    #[arg(long, global = true, env = "BLOWUP_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Z at one specialization, through q^order.
    ComputeZ(SeriesArgs),
    /// Ẑ at one specialization, through q^order.
    ComputeZhat(SeriesArgs),
    /// The blow-up factor Y_k through q^order.
    ComputeYk(YkArgs),
    /// The rank-one series W through q^order.
    ComputeW(WArgs),
    /// Ẑ = Y_k·Z at several specializations.
    VerifyBlowup(VerifyArgs),
    /// The rank-one blow-up identity for W.
    VerifyRank1(Rank1Args),
    /// The y = 1 and y = 0 specializations of Y_k.
    VerifyCorollary(VerifyArgs),
    /// Equivariant against limit-mode quotients.
    VerifyLimits(VerifyArgs),
    /// Every check at its default size.
    VerifyAll(SeedArgs),
}

#[derive(Args, Debug)]
struct SeriesArgs {
    #[arg(long, default_value_t = 1)]
    rank: usize,
    /// Degree of the exceptional class (Ẑ only), 0 <= k < rank.
    #[arg(long, default_value_t = 0)]
    k: i64,
    #[arg(long, default_value_t = 8)]
    order: i64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// "symbolic" or a rational such as 1, 0, -3/7.
    #[arg(long, default_value = "symbolic")]
    y: YMode,
    #[arg(long, value_enum, default_value_t = ModeArg::Equivariant)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct YkArgs {
    #[arg(long, default_value_t = 1)]
    rank: usize,
    #[arg(long, default_value_t = 0)]
    k: i64,
    #[arg(long, default_value_t = 8)]
    order: i64,
    #[arg(long, value_enum, default_value_t = Form::Main)]
    form: Form,
}

#[derive(Args, Debug)]
struct WArgs {
    #[arg(long, default_value_t = 8)]
    order: i64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "symbolic")]
    y: YMode,
    #[arg(long, value_enum, default_value_t = SubstitutionArg::Identity)]
    substitution: SubstitutionArg,
}

#[derive(Args, Debug)]
struct SeedArgs {
    /// Number of seeds, counted from --seed-base.
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed_base: u64,
    /// Explicit comma-separated seeds; overrides --seeds.
    #[arg(long, value_delimiter = ',')]
    seed_list: Option<Vec<u64>>,
}

impl SeedArgs {
    fn resolve(&self, default_count: usize) -> Vec<u64> {
        if let Some(list) = &self.seed_list {
            return list.clone();
        }
        match self.seeds {
            Some(n) => (0..n).map(|i| self.seed_base + i).collect(),
            None if self.seed_base == 1 => DEFAULT_SEEDS[..default_count].to_vec(),
            None => (0..default_count as u64).map(|i| self.seed_base + i).collect(),
        }
    }
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    rank: usize,
    #[arg(long, default_value_t = 0)]
    k: i64,
    /// Checked through q^order (default: n <= 8, 4, 2 on Z for rank 1, 2, >= 3).
    #[arg(long)]
    order: Option<i64>,
    #[command(flatten)]
    seeds: SeedArgs,
    #[arg(long, default_value = "symbolic")]
    y: YMode,
    #[arg(long, value_enum, default_value_t = ModeArg::Equivariant)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
struct Rank1Args {
    #[arg(long, default_value_t = 8)]
    order: i64,
    #[command(flatten)]
    seeds: SeedArgs,
    /// Add q to the left side (negative control; the check must fail).
    #[arg(long)]
    perturb: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Equivariant,
    Limit,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Equivariant => Mode::Equivariant,
            ModeArg::Limit => Mode::Limit,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Form {
    Main,
    Gottsche,
    Euler,
    Hol,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SubstitutionArg {
    Identity,
    T2OverT1,
    T1OverT2,
}

impl From<SubstitutionArg> for WSubstitution {
    fn from(s: SubstitutionArg) -> Self {
        match s {
            SubstitutionArg::Identity => WSubstitution::Identity,
            SubstitutionArg::T2OverT1 => WSubstitution::T2OverT1,
            SubstitutionArg::T1OverT2 => WSubstitution::T1OverT2,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::Parse(_) | Error::ModeMismatch(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::ComputeZ(_) => "compute-z",
        Command::ComputeZhat(_) => "compute-zhat",
        Command::ComputeYk(_) => "compute-yk",
        Command::ComputeW(_) => "compute-w",
        Command::VerifyBlowup(_) => "verify-blowup",
        Command::VerifyRank1(_) => "verify-rank1",
        Command::VerifyCorollary(_) => "verify-corollary",
        Command::VerifyLimits(_) => "verify-limits",
        Command::VerifyAll(_) => "verify-all",
    }
}

fn emit(global: &Global, value: &impl Serialize) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    text.push('\n');
    match &global.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn elapsed(global: &Global, start: Instant) -> Option<u64> {
    global.timing.then(|| start.elapsed().as_millis() as u64)
}

fn compute_series<C: Coefficient>(which: &str, a: &SeriesArgs, en: &Enumerator) -> Result<SeriesReport, Failure> {
    let mode = Mode::from(a.mode);
    let max_n = max_n_for_order(a.rank, a.order);
    let spec = sample_specialization(a.rank, a.seed, a.y.clone());
    let req = SeriesRequest::new(a.rank, a.k, max_n, spec.clone(), mode);
    let (series, counts) = if which == "z" {
        (z_series::<C>(&req, en)?, fixed_point_counts(a.rank, None, max_n, en)?)
    } else {
        (
            zhat_series::<C>(&req, en)?,
            fixed_point_counts(a.rank, Some(a.k), max_n, en)?,
        )
    };
    let params = SeriesParams {
        rank: a.rank,
        k: (which == "zhat").then_some(a.k),
        order: a.order,
        max_n: Some(max_n),
        seed: Some(a.seed),
        specialization: Some(spec),
        mode: Some(mode),
        ..Default::default()
    };
    let mut report = SeriesReport::new(which, params, &series.truncate(a.order + 1));
    report.fixed_point_counts = counts;
    Ok(report)
}

fn compute_yk(a: &YkArgs) -> Result<SeriesReport, Failure> {
    let req = YkRequest::new(a.rank, a.k, a.order);
    let params = SeriesParams {
        rank: a.rank,
        k: Some(a.k),
        order: a.order,
        form: Some(format!("{:?}", a.form).to_lowercase()),
        ..Default::default()
    };
    Ok(match a.form {
        Form::Main => SeriesReport::new("yk", params, &yk_main(req)?),
        Form::Gottsche => SeriesReport::new("yk", params, &yk_gottsche(req)?),
        Form::Euler => SeriesReport::new("yk", params, &yk_euler(req)?),
        Form::Hol => {
            let hol = yk_hol(req)?;
            let mut report = SeriesReport::new("yk", params, &hol.computed);
            report.notes.push(format!("stated value: {}", hol.stated));
            if !hol.agrees() {
                report
                    .notes
                    .push("computed Y_k at y=0 differs from the stated value (documented discrepancy)".into());
            }
            report
        }
    })
}

fn compute_w<C: Coefficient>(a: &WArgs) -> Result<SeriesReport, Failure> {
    let spec = sample_specialization(1, a.seed, a.y.clone());
    let w: QSeries<C> = w_series(&WRequest {
        spec: spec.clone(),
        substitution: a.substitution.into(),
        order: a.order,
    })?;
    let params = SeriesParams {
        rank: 1,
        order: a.order,
        seed: Some(a.seed),
        specialization: Some(spec),
        substitution: Some(format!("{:?}", WSubstitution::from(a.substitution))),
        ..Default::default()
    };
    Ok(SeriesReport::new("w", params, &w))
}

fn main_params(a: &VerifyArgs) -> MainTheoremParams {
    let order = a.order.unwrap_or_else(|| default_order(a.rank.max(1), a.k.max(0)));
    let mut p = MainTheoremParams::new(a.rank, a.k, order, a.seeds.resolve(DEFAULT_SEEDS.len()));
    p.mode = a.mode.into();
    p.y = a.y.clone();
    p
}

/// Runs the command; `Ok(false)` means a verification failed.
fn run(cli: &Cli) -> Result<bool, Failure> {
    let global = &cli.global;
    if let Some(n) = global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let enumerator = match &global.cache_dir {
        Some(dir) => Enumerator::with_cache(EnumerationCache::new(dir)?),
        None => Enumerator::new(),
    };
    let opts = VerifyOptions {
        enumerator,
        timing: global.timing,
    };
    let start = Instant::now();
    let symbolic = |y: &YMode| matches!(y, YMode::Symbolic);
    let series = |mut report: SeriesReport| -> Result<bool, Failure> {
        report.elapsed_ms = elapsed(global, start);
        tracing::info!(series = %report.series, lowest = ?report.lowest_term, "computed");
        emit(global, &report)?;
        Ok(true)
    };
    match &cli.command {
        Command::ComputeZ(a) | Command::ComputeZhat(a) => {
            let which = if matches!(cli.command, Command::ComputeZ(_)) {
                "z"
            } else {
                "zhat"
            };
            let report = if symbolic(&a.y) {
                compute_series::<YRat>(which, a, &opts.enumerator)?
            } else {
                compute_series::<Rational>(which, a, &opts.enumerator)?
            };
            series(report)
        }
        Command::ComputeYk(a) => series(compute_yk(a)?),
        Command::ComputeW(a) => series(if symbolic(&a.y) {
            compute_w::<YRat>(a)?
        } else {
            compute_w::<Rational>(a)?
        }),
        Command::VerifyBlowup(a) => {
            let report = verify_main_theorem(&main_params(a), &opts)?;
            emit(global, &report)?;
            Ok(report.passed())
        }
        Command::VerifyLimits(a) => {
            let report = verify_limit_consistency(&main_params(a), &opts)?;
            emit(global, &report)?;
            Ok(report.passed())
        }
        Command::VerifyCorollary(a) => {
            let p = main_params(a);
            let report = verify_corollary(
                &CorollaryParams {
                    rank: p.rank,
                    k: p.k,
                    order: p.order,
                    seeds: p.seeds,
                },
                &opts,
            )?;
            for d in &report.discrepancies {
                tracing::warn!(quantity = %d.quantity, stated = %d.stated, computed = %d.computed, "documented discrepancy");
            }
            emit(global, &report)?;
            Ok(report.passed())
        }
        Command::VerifyRank1(a) => {
            let report = verify_rank1(a.order, &a.seeds.resolve(3), a.perturb, &opts)?;
            emit(global, &report)?;
            Ok(report.passed())
        }
        Command::VerifyAll(a) => {
            let report = verify_all(&a.resolve(DEFAULT_SEEDS.len()), &opts)?;
            for r in &report.reports {
                tracing::info!(check = %r.check, rank = r.params.rank, k = ?r.params.k, outcome = ?r.outcome, "result");
            }
            emit(global, &report)?;
            Ok(report.outcome.is_pass())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_ansi(std::io::IsTerminal::is_terminal(&std::io::stderr()))
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .init();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            tracing::error!("verification failed");
            ExitCode::from(EXIT_FAIL)
        }
        Err(Failure::Usage(msg)) => {
            let name = subcommand_name(&cli.command);
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(name)
                .map(|sub| sub.render_long_help().to_string())
                .unwrap_or_default();
            eprintln!("error: {msg}\n\n{usage}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAIL)
        }
    }
}
