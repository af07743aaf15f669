use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nijenhuis_cli::{emit_report, load_scenario, run_scenario, Format, RunOptions};
use nijenhuis_core::expr::set_degree_cap;

#[derive(Parser)]
#[command(name = "nijenhuis", version, about = "Exact checks for Nijenhuis, Dirac and Poisson-Nijenhuis scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check in a scenario file.
    Check {
        file: PathBuf,
        /// Seed for the sampling oracle.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample points per check; 0 turns the oracle off.
        #[arg(long, default_value_t = 16)]
        sample: usize,
        #[arg(long, value_enum, default_value_t = OutFormat::Text)]
        format: OutFormat,
        /// Total-degree cap for numerators and denominators.
        #[arg(long)]
        max_degree: Option<u32>,
        /// Report 0 ms for every check, so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Check { file, seed, sample, format, max_degree, no_timing } = cli.command;
    if let Some(d) = max_degree {
        set_degree_cap(d);
    }
    // panics inside checks become "error" verdicts; keep stderr quiet
    std::panic::set_hook(Box::new(|_| {}));
    let scenario = match load_scenario(&file) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions { seed, sample, timing: !no_timing, ..RunOptions::default() };
    let report = run_scenario(&scenario, &opts);
    let format = match format {
        OutFormat::Text => Format::Text,
        OutFormat::Json => Format::Json,
    };
    print!("{}", emit_report(&report, format));
    ExitCode::from(report.exit_code() as u8)
}
