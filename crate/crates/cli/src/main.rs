mod commands;
mod table;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polystrat::graded::SymConvention;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "POLYSTRAT_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "polystrat",
    version,
    about = "Exact counts, Euler characteristics and stable Betti numbers for spaces of \
             irreducible multivariate polynomials",
    after_help = "Set POLYSTRAT_THREADS to fix the worker thread count. Output is identical for \
                  every thread count."
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Point counts of Poly, Irr and every stratum, as polynomials in q.
    Count(CountArgs),
    /// Compactly supported Euler characteristics of Irr_{d,n}.
    Euler(EulerArgs),
    /// Exact ratios |Irr_{d,n}(F_q)| / q^(C(d+n,n)-1) against q/(q-1).
    Carlitz(CarlitzArgs),
    /// Stabilization in n of the low coefficients of |Irr_{d,n}|.
    Hyde(HydeArgs),
    /// Stable Betti numbers b_i(d) from the E_1 window and differential rules.
    Betti(BettiArgs),
    /// The stable E_1 page of the stratification spectral sequence.
    E1(E1Args),
    /// Stability and vanishing thresholds, stratum dimensions, r(d).
    Bounds(BoundsArgs),
    /// Brute-force census over F_p, checked against the exact counts.
    Brute(BruteArgs),
    /// Stable Poincaré series P_d(t) for d <= 3.
    Series(SeriesArgs),
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(short = 'd', long)]
    pub d: usize,
    #[arg(short = 'n', long)]
    pub n: usize,
    /// Emit the counts as polynomials in q (the default when no -q is given).
    #[arg(long)]
    pub symbolic: bool,
    /// Evaluate the counts at this prime power.
    #[arg(short = 'q', long)]
    pub q: Option<u64>,
}

#[derive(Args, Debug)]
pub struct EulerArgs {
    #[arg(long, default_value_t = 8)]
    pub d_max: usize,
    #[arg(long, default_value_t = 6)]
    pub n_max: usize,
}

#[derive(Args, Debug)]
pub struct CarlitzArgs {
    /// A prime.
    #[arg(short = 'q', long, default_value_t = 2)]
    pub q: u64,
    #[arg(short = 'n', long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub d_max: usize,
}

#[derive(Args, Debug)]
pub struct HydeArgs {
    #[arg(short = 'd', long)]
    pub d: usize,
    /// Track the coefficients of q^0 through q^WINDOW.
    #[arg(long, default_value_t = 6)]
    pub window: usize,
    #[arg(long, default_value_t = 12)]
    pub n_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleSet {
    /// The differential rules shipped for d = 3 and d = 4.
    Shipped,
    /// No rules: unresolved differentials widen results into intervals.
    None,
}

#[derive(Args, Debug)]
pub struct BettiArgs {
    #[arg(short = 'd', long)]
    pub d: usize,
    #[arg(long, default_value_t = 11)]
    pub max_degree: usize,
    #[arg(long, default_value_t = SymConvention::Koszul)]
    pub convention: SymConvention,
    #[arg(long, value_enum, default_value_t = RuleSet::Shipped)]
    pub rules: RuleSet,
}

#[derive(Args, Debug)]
pub struct E1Args {
    #[arg(short = 'd', long)]
    pub d: usize,
    #[arg(long, default_value_t = 12)]
    pub max_degree: usize,
    #[arg(long, default_value_t = SymConvention::Koszul)]
    pub convention: SymConvention,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(short = 'd', long)]
    pub d: usize,
    #[arg(short = 'n', long)]
    pub n: usize,
    /// Also run the vanishing audit for 2 <= d <= D_MAX (at most 6).
    #[arg(long, value_name = "D_MAX")]
    pub audit: Option<usize>,
    #[arg(long, default_value_t = SymConvention::Koszul)]
    pub convention: SymConvention,
}

#[derive(Args, Debug)]
pub struct BruteArgs {
    /// A case `d,n,p`; repeatable. Without cases, a default suite runs.
    #[arg(long = "case", value_name = "D,N,P", value_parser = parse_case)]
    pub cases: Vec<(usize, usize, u64)>,
    /// Exit nonzero if any brute-force count disagrees with the exact count.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    #[arg(short = 'd', long)]
    pub d: usize,
    #[arg(long, default_value_t = 40)]
    pub trunc: usize,
    #[arg(long, default_value_t = SymConvention::Koszul)]
    pub convention: SymConvention,
}

fn parse_case(s: &str) -> Result<(usize, usize, u64), String> {
    let fields: Vec<&str> = s.split(',').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(format!("expected d,n,p, got {s:?}"));
    }
    let bad = |f: &str| format!("{f:?} is not a nonnegative integer");
    Ok((
        fields[0].parse().map_err(|_| bad(fields[0]))?,
        fields[1].parse().map_err(|_| bad(fields[1]))?,
        fields[2].parse().map_err(|_| bad(fields[2]))?,
    ))
}

/// A finished command: the document to emit and whether its checks passed.
pub struct Outcome {
    pub document: String,
    pub passed: bool,
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot start {threads} worker threads: {e}"))
}

fn run(cli: &Cli) -> Result<Outcome, String> {
    configure_threads()?;
    let fmt = cli.format;
    let outcome = match &cli.command {
        Command::Count(a) => commands::count(a, fmt),
        Command::Euler(a) => commands::euler(a, fmt),
        Command::Carlitz(a) => commands::carlitz(a, fmt),
        Command::Hyde(a) => commands::hyde(a, fmt),
        Command::Betti(a) => commands::betti(a, fmt),
        Command::E1(a) => commands::e1(a, fmt),
        Command::Bounds(a) => commands::bounds(a, fmt),
        Command::Brute(a) => commands::brute(a, fmt),
        Command::Series(a) => commands::series(a, fmt),
    }
    .map_err(|e| e.to_string())?;
    let mut document = outcome.document;
    if !document.ends_with('\n') {
        document.push('\n');
    }
    match &cli.out {
        Some(path) => std::fs::write(path, &document)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => std::io::stdout()
            .write_all(document.as_bytes())
            .map_err(|e| format!("cannot write to stdout: {e}"))?,
    }
    Ok(Outcome {
        document,
        passed: outcome.passed,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) if outcome.passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("polystrat: verification failed");
            ExitCode::from(1)
        }
        Err(msg) => {
            eprintln!("polystrat: {msg}");
            ExitCode::from(2)
        }
    }
}
