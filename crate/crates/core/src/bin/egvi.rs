use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use egvi::bench::{self, BenchError};

/// Extragradient solvers for monotone variational inequalities.
#[derive(Parser)]
#[command(name = "egvi", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every solver of an experiment configuration.
    Run { config: PathBuf },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// List the problem families and their parameters.
    ListProblems,
}

const CONFIG_ERROR: u8 = 1;
const RUN_FAILURE: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(CONFIG_ERROR),
            };
        }
    };
    match cli.command {
        Command::ListProblems => {
            print!("{}", bench::list_problems());
            ExitCode::SUCCESS
        }
        Command::Validate { config } => match bench::parse_config(&config) {
            Ok(c) => {
                println!(
                    "{}: ok ({} on {}, {} solver(s))",
                    config.display(),
                    c.problem.family,
                    c.out_dir.display(),
                    c.solvers.len()
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{}: {e}", config.display());
                ExitCode::from(CONFIG_ERROR)
            }
        },
        Command::Run { config } => {
            let parsed = match bench::parse_config(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}: {e}", config.display());
                    return ExitCode::from(CONFIG_ERROR);
                }
            };
            match bench::run_experiment(&parsed) {
                Ok(report) => {
                    for c in &report.cells {
                        println!(
                            "{:<24} {:<8} iters={:<8} eg={:.3e} {}",
                            c.solver,
                            c.problem,
                            c.iterations,
                            c.final_eg_residual.unwrap_or(f64::NAN),
                            c.status
                        );
                    }
                    println!("summary: {}", report.summary_path.display());
                    if report.any_failed() {
                        ExitCode::from(RUN_FAILURE)
                    } else {
                        ExitCode::SUCCESS
                    }
                }
                Err(BenchError::Config(e)) => {
                    eprintln!("{e}");
                    ExitCode::from(CONFIG_ERROR)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(RUN_FAILURE)
                }
            }
        }
    }
}
