use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qhe_cli::scenario::{parse_formats, parse_seed};
use qhe_cli::{CliError, Format, RunOptions, ScenarioKind};

#[derive(Parser)]
#[command(
    name = "qhe",
    version,
    about = "Quantum heat engine and photocell calculations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its CSV/SVG artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides scenario.output_dir).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma-separated formats: csv, svg.
        #[arg(long, value_parser = formats)]
        format: Option<Formats>,
    },
    /// Run the brute-force verification suites.
    Verify {
        #[arg(long, value_parser = seed, default_value_t = qhe_core::oracle::DEFAULT_SEED)]
        seed: u64,
    },
    /// List the available scenario kinds.
    ListScenarios,
}

#[derive(Clone)]
struct Formats(Vec<Format>);

fn formats(s: &str) -> Result<Formats, String> {
    parse_formats(s).map(Formats)
}

fn seed(s: &str) -> Result<u64, String> {
    parse_seed(s).ok_or_else(|| format!("`{s}` is not a u64 seed"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            format,
        } => qhe_cli::run(
            &config,
            &RunOptions {
                output_dir: out,
                formats: format.map(|f| f.0),
            },
        )
        .map(|r| {
            println!("{}", r.summary);
            for p in r.written {
                eprintln!("wrote {}", p.display());
            }
        }),
        Command::Verify { seed } => qhe_cli::verify(seed).map(|o| println!("{}", o.summary)),
        Command::ListScenarios => {
            for k in ScenarioKind::ALL {
                println!("{:<26} {}", k.name(), k.description());
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(e),
    }
}

fn report(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}
