//! `fieldprobe`: sample, survey and lift polynomial systems over prime fields.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 bad input, 3 no modular solutions.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fieldprobe_cli::commands::{self, CliError, LiftMode, LiftRequest, ScanRequest, SurveyRequest};
use fieldprobe_cli::report::{self, Format};

#[derive(Parser)]
#[command(name = "fieldprobe", version, about = "Experiments with polynomial systems over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Worker threads: 1 runs sequentially, 0 uses every core.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Sample random points and count those on the variety.
    Scan {
        system: PathBuf,
        #[arg(short = 'p', long = "prime")]
        prime: u64,
        #[arg(long)]
        trials: u64,
        /// Tally the Jacobian rank at every hit and estimate components per codimension.
        #[arg(long)]
        ranks: bool,
        /// Tally the value of a single polynomial at every sample.
        #[arg(long)]
        values: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Search for k hits at several primes and fit the codimension.
    Survey {
        /// `quadric-rank-le:<r>` or `always`.
        #[arg(long, conflicts_with = "system", required_unless_present = "system")]
        predicate: Option<String>,
        /// Use the vanishing locus of a system file as the predicate.
        #[arg(long)]
        system: Option<PathBuf>,
        #[arg(short = 'p', long = "prime", required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value_t = 50)]
        k: u64,
        #[arg(long, default_value_t = fieldprobe::scan::DEFAULT_CAP)]
        cap: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Find modular solutions and lift them to the integers or rationals.
    Lift {
        system: PathBuf,
        #[arg(short = 'p', long = "prime")]
        primes: Vec<u64>,
        /// Use every prime up to this bound (in addition to any -p).
        #[arg(long)]
        primes_up_to: Option<u64>,
        #[arg(long, value_enum, default_value_t = LiftMode::Crt)]
        mode: LiftMode,
        /// Newton doublings per root.
        #[arg(long, default_value_t = 4)]
        steps: usize,
        /// Largest number of points enumerated per prime.
        #[arg(long, default_value_t = fieldprobe::lift::DEFAULT_BUDGET)]
        budget: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli, invocation: Vec<String>) -> Result<(report::Report, Format), CliError> {
    match cli.command {
        Command::Scan {
            system,
            prime,
            trials,
            ranks,
            values,
            common,
        } => {
            let req = ScanRequest {
                path: &system,
                p: prime,
                trials,
                seed: common.seed,
                ranks,
                values,
                workers: common.workers,
            };
            Ok((commands::scan(req, invocation)?, common.format))
        }
        Command::Survey {
            predicate,
            system,
            primes,
            k,
            cap,
            common,
        } => {
            let req = SurveyRequest {
                predicate: predicate.as_deref(),
                system: system.as_deref(),
                primes: &primes,
                k,
                seed: common.seed,
                cap,
                workers: common.workers,
            };
            Ok((commands::survey(req, invocation)?, common.format))
        }
        Command::Lift {
            system,
            mut primes,
            primes_up_to,
            mode,
            steps,
            budget,
            common,
        } => {
            if let Some(bound) = primes_up_to {
                primes.extend(commands::primes_up_to(bound));
                primes.sort_unstable();
                primes.dedup();
            }
            let req = LiftRequest {
                path: &system,
                primes,
                mode,
                steps,
                budget,
                seed: common.seed,
                workers: common.workers,
            };
            Ok((commands::lift(req, invocation)?, common.format))
        }
    }
}

fn main() -> ExitCode {
    let invocation: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli, invocation) {
        Ok((report, format)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.render(format).as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(report.status.code as u8)
        }
        Err(e) => {
            eprintln!("fieldprobe: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
