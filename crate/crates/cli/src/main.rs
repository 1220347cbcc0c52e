//! `dwellcut`: cut tail times, least-deviation quasipolynomials and critical
//! dwell bounds from the command line.
//!
//! Exit codes: 0 success, 1 malformed input or usage, 2 non-Hurwitz input,
//! 3 numerical failure. Errors are printed to stderr as a single JSON line.

mod commands;
mod failure;
mod input;
mod report;
mod settings;

use clap::{Args, Parser, Subcommand};

use commands::{dwell::DwellArgs, least_deviation::LeastDeviationArgs, tcut::TcutArgs};
use failure::Failure;
use report::{CommandEcho, Format, Output};

#[derive(Debug, Parser)]
#[command(name = "dwellcut", version, about = "Cut tail times and critical dwell bounds of linear systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cut tail time of a Hurwitz matrix.
    Tcut(TcutArgs),
    /// Least-deviation quasipolynomial with p(T) = 1 on [0, T].
    LeastDeviation(LeastDeviationArgs),
    /// Critical upper dwell bounds m + T_cut of a switching system.
    Dwell(DwellArgs),
}

/// Output options shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, short = 'o')]
    pub output: Option<String>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Leave wall-clock timings out of the report.
    #[arg(long)]
    pub no_timings: bool,
}

impl Common {
    pub fn output(&self) -> Output {
        Output {
            path: self.output.clone(),
            format: self.format,
            timings: !self.no_timings,
        }
    }
}

fn run(cli: Cli, args: Vec<String>) -> Result<(), Failure> {
    match &cli.command {
        Command::Tcut(a) => commands::tcut::run(a, CommandEcho { name: "tcut", args }),
        Command::LeastDeviation(a) => commands::least_deviation::run(a, CommandEcho { name: "least-deviation", args }),
        Command::Dwell(a) => commands::dwell::run(a, CommandEcho { name: "dwell", args }),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                std::process::exit(0);
            }
            let message = e.to_string();
            let text: Vec<&str> = message
                .lines()
                .take_while(|l| !l.starts_with("Usage:"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let text = text.join(" ");
            eprintln!("{}", Failure::usage(text.trim_start_matches("error: ")).to_line());
            std::process::exit(failure::EXIT_INPUT);
        }
    };
    if let Err(f) = run(cli, args) {
        eprintln!("{}", f.to_line());
        std::process::exit(f.code);
    }
}
