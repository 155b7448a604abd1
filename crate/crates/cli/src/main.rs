//! Command-line front end: correlation spectra of return series against the
//! Wishart benchmark, shuffle surrogates, sector attribution and a factor
//! -model market simulator.
//!
//! Exit codes: 0 success, 1 data/computation error (JSON on stderr),
//! 2 flag misuse.

mod artifacts;
mod commands;
mod error;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::analyze::AnalyzeCmd;
use commands::simulate::SimulateCmd;
use commands::surrogate::SurrogateCmd;
use commands::AnalysisOptions;
use error::CliError;
use xcorr_core::ingest::LeadingGapPolicy;

/// Output directory fallback when `--out-dir` is absent.
const OUT_DIR_ENV: &str = "XCORR_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "xcorr",
    version,
    about = "Cross-correlation spectra of return series vs. the Wishart benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a price dataset: correlation matrix, spectrum, sector report
    Analyze(AnalyzeArgs),
    /// Generate a synthetic market from a factor-model config
    Simulate(SimulateArgs),
    /// Shuffle-surrogate test of an empirical dataset
    Surrogate(SurrogateArgs),
    /// Print the Wishart eigenvalue bounds for N series of length T
    MpBounds(MpBoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum LeadingGapArg {
    /// Backfill from the first observed price
    Backfill,
    /// Reject tickers with no price on the first calendar date
    Reject,
}

impl From<LeadingGapArg> for LeadingGapPolicy {
    fn from(arg: LeadingGapArg) -> Self {
        match arg {
            LeadingGapArg::Backfill => LeadingGapPolicy::Backfill,
            LeadingGapArg::Reject => LeadingGapPolicy::Reject,
        }
    }
}

#[derive(Args)]
struct AnalysisFlags {
    /// Jacobi convergence threshold relative to the Frobenius norm
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Finite-size margin on the deviating-eigenvalue cut
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    /// Bin width of the correlation-element histogram over [-1, 1]
    #[arg(long, default_value_t = 0.02)]
    bin_width: f64,
    /// Bin width of the eigenvalue histogram
    #[arg(long, default_value_t = 0.05)]
    eig_bin_width: f64,
    /// Component thresholds u_c for the composition table
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.08, 0.12])]
    thresholds: Vec<f64>,
    /// Modes for composition/component output (default: first four)
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<usize>>,
    /// Shuffle replicates to fold into the report (0 = skip)
    #[arg(long, default_value_t = 0)]
    surrogate_replicates: usize,
    /// Also write corr.csv (full correlation matrix)
    #[arg(long)]
    dump_corr: bool,
}

impl AnalysisFlags {
    fn into_options(self, seed: u64) -> AnalysisOptions {
        AnalysisOptions {
            tol: self.tol,
            margin: self.margin,
            bin_width: self.bin_width,
            eig_bin_width: self.eig_bin_width,
            thresholds: self.thresholds,
            modes: self.modes,
            surrogate_replicates: self.surrogate_replicates,
            seed,
            dump_corr: self.dump_corr,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Long-format price CSV with header date,ticker,close
    #[arg(long)]
    prices: PathBuf,
    /// Sector CSV with header ticker,business_sector,category
    #[arg(long)]
    sectors: Option<PathBuf>,
    /// Output directory (default: $XCORR_OUT_DIR or .)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Return interval in calendar-index steps
    #[arg(long, default_value_t = 1)]
    dt: usize,
    /// Policy for tickers with no price on the first calendar date
    #[arg(long, value_enum, default_value_t = LeadingGapArg::Backfill)]
    leading_gap: LeadingGapArg,
    /// Write the aligned wide-format price grid to this path
    #[arg(long)]
    dump_table: Option<PathBuf>,
    /// Master seed for surrogate shuffling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    analysis: AnalysisFlags,
}

#[derive(Args)]
struct SimulateArgs {
    /// Factor-model config JSON
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $XCORR_OUT_DIR or .)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Use one shared profit factor process for all categories
    #[arg(long)]
    shared_profit_factor: bool,
    /// Chain directly into the analysis pipeline using the truth labels
    #[arg(long)]
    analyze: bool,
    #[command(flatten)]
    analysis: AnalysisFlags,
}

#[derive(Args)]
struct SurrogateArgs {
    /// Long-format price CSV with header date,ticker,close
    #[arg(long)]
    prices: PathBuf,
    /// Output directory (default: $XCORR_OUT_DIR or .)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Return interval in calendar-index steps
    #[arg(long, default_value_t = 1)]
    dt: usize,
    /// Policy for tickers with no price on the first calendar date
    #[arg(long, value_enum, default_value_t = LeadingGapArg::Backfill)]
    leading_gap: LeadingGapArg,
    /// Jacobi convergence threshold relative to the Frobenius norm
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Master seed for the shuffles
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of shuffle replicates
    #[arg(long)]
    replicates: usize,
}

#[derive(Args)]
struct MpBoundsArgs {
    /// Number of series N
    n: usize,
    /// Series length T
    t: usize,
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze(args) => {
            let dir = out_dir(args.out_dir);
            let cmd = AnalyzeCmd {
                prices: args.prices,
                sectors: args.sectors,
                dt: args.dt,
                leading_gap: args.leading_gap.into(),
                dump_table: args.dump_table,
                opts: args.analysis.into_options(args.seed),
            };
            commands::analyze::run(&cmd, &dir)
        }
        Command::Simulate(args) => {
            let dir = out_dir(args.out_dir);
            let cmd = SimulateCmd {
                config: args.config,
                seed: args.seed,
                shared_profit_factor: args.shared_profit_factor,
                analyze: args.analyze,
                opts: args.analysis.into_options(0),
            };
            commands::simulate::run(&cmd, &dir)
        }
        Command::Surrogate(args) => {
            let dir = out_dir(args.out_dir);
            let cmd = SurrogateCmd {
                prices: args.prices,
                dt: args.dt,
                leading_gap: args.leading_gap.into(),
                tol: args.tol,
                seed: args.seed,
                replicates: args.replicates,
            };
            commands::surrogate::run(&cmd, &dir)
        }
        Command::MpBounds(args) => commands::mp_bounds::run(args.n, args.t),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        match &err {
            CliError::Usage(message) => eprintln!("error: {message}"),
            _ => eprintln!("{}", err.to_json()),
        }
        std::process::exit(err.exit_code());
    }
}
