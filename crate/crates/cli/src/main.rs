//! `parsearch`: seeded experiments for parallel multi-item quantum search.
//!
//! Exit status: 0 on success, 1 on usage errors, 2 when an instance is too
//! large to enumerate.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use parsearch_core::harness::{self, BoundsCell, MaxloadConfig};
use parsearch_core::{Error, ExperimentConfig, Fallback, Filler, Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "parsearch",
    version,
    about = "Parallel multi-item quantum search experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the partitioned parallel search on random databases.
    Search(SearchArgs),
    /// Monte-Carlo check of the per-cell load bound.
    Maxload(MaxloadArgs),
    /// Measured rounds against the lower and upper bound formulas.
    Bounds(BoundsArgs),
    /// Brute-force the adversary graph and check its statistics.
    Adversary(AdversaryArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FallbackArg {
    None,
    Unknown,
}

#[derive(Debug, Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Address width; the database has 2^n addresses.
    #[arg(long)]
    n: u32,
    /// Number of database copies.
    #[arg(long)]
    d: usize,
    /// Number of target items.
    #[arg(long)]
    k: usize,
    /// Item width in bits (defaults to n).
    #[arg(long)]
    m: Option<u32>,
    /// Override the per-cell item cap.
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fill non-target addresses with the all-zeros item.
    #[arg(long)]
    zero_filler: bool,
    /// What a cell search does after a missed known-count step.
    #[arg(long, value_enum, default_value = "none")]
    fallback: FallbackArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct MaxloadArgs {
    #[arg(long, default_value_t = 10)]
    n: u32,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    t: usize,
    #[arg(long, default_value_t = 100_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Address widths to sweep (comma separated).
    #[arg(long, value_delimiter = ',')]
    n: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct AdversaryArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    m: u32,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Infeasible { .. } => 2,
        _ => 1,
    }
}

fn run(command: Command) -> Result<(), Error> {
    let (report, output) = match command {
        Command::Search(args) => {
            let cfg = ExperimentConfig {
                n: args.n,
                d: args.d,
                k: args.k,
                m: args.m,
                trials: args.trials,
                seed: args.seed,
                t: args.t,
                filler: if args.zero_filler {
                    Filler::Zero
                } else {
                    Filler::Distinct
                },
                fallback: match args.fallback {
                    FallbackArg::None => Fallback::None,
                    FallbackArg::Unknown => Fallback::Unknown,
                },
            };
            let report = harness::run_search_experiment(&cfg)?;
            for warning in &report.warnings {
                eprintln!("warning: {warning}");
            }
            (Report::Search(report), args.output)
        }
        Command::Maxload(args) => {
            let cfg = MaxloadConfig {
                n: args.n,
                d: args.d,
                k: args.k,
                t: args.t,
                trials: args.trials,
                seed: args.seed,
            };
            (
                Report::Maxload(harness::run_maxload_check(&cfg)?),
                args.output,
            )
        }
        Command::Bounds(args) => {
            let mut cells = Vec::new();
            for &n in &args.n {
                for &d in &args.d {
                    for &k in &args.k {
                        cells.push(BoundsCell { n, d, k });
                    }
                }
            }
            (
                Report::Bounds(harness::run_bound_table(&cells, args.trials, args.seed)?),
                args.output,
            )
        }
        Command::Adversary(args) => (
            Report::Adversary(harness::run_adversary_check(
                args.n, args.m, args.d, args.k,
            )?),
            args.output,
        ),
    };

    let format = match output.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    match output.out {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            report.write(format, &mut file)?;
            file.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            report.write(format, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}
