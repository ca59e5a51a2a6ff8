use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use dampwave_cli::config::{parse_config, Sources};
use dampwave_cli::run::execute;

/// Simulate damped string models and check their stability certificates.
#[derive(Debug, Parser)]
#[command(name = "dampwave", version)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,

    /// simulate | certify | check-iss | converge | sweep-sigma | thermoacoustic-equiv
    #[arg(long)]
    experiment: Option<String>,

    /// Output directory for artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Dotted key=value applied on top of the file, e.g. params.sigma=0.3
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn main() -> ExitCode {
    let args = Args::parse();
    let sources = Sources {
        config_path: args.config.as_deref(),
        experiment: args.experiment.as_deref(),
        overrides: &args.overrides,
    };
    let config = match parse_config(&sources) {
        Ok(c) => c,
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let outcome = match execute(&config, &args.out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    for check in &outcome.checks {
        println!(
            "{} {}: {}",
            if check.pass { "ok  " } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    if outcome.truncated {
        println!("FAIL trajectory truncated at a non-finite state");
    }
    println!("{} files written to {}", outcome.files.len() + 1, args.out.display());
    if outcome.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}
