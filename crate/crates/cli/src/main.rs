use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wulffcap_cli::config::CheckSelection;
use wulffcap_cli::{catalog, output, run, CliError, RunConfig};

/// Numerical verification of anisotropic capillary identities.
#[derive(Parser)]
#[command(name = "wulffcap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a configuration and write the report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Restrict to these checks (repeatable); overrides the config.
        #[arg(long = "check")]
        checks: Vec<String>,
        /// Comma-separated grid sizes; overrides the config.
        #[arg(long, value_delimiter = ',')]
        resolution: Option<Vec<usize>>,
        /// Output directory; without one the report goes to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the check catalog.
    ListChecks {
        /// Emit JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Write the configured surface as a mesh CSV.
    ExportMesh {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Grid size; defaults to the finest configured resolution.
        #[arg(long)]
        resolution: Option<usize>,
    },
}

/// Applies `WULFFCAP_THREADS` to the global worker pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("WULFFCAP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("WULFFCAP_THREADS must be a positive integer, got \"{value}\"")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn verify(config: PathBuf, checks: Vec<String>, resolution: Option<Vec<usize>>, output: Option<PathBuf>, seed: Option<u64>) -> Result<bool, CliError> {
    let mut config = RunConfig::load(&config)?;
    if !checks.is_empty() {
        config.checks = CheckSelection::List(checks);
    }
    if let Some(resolutions) = resolution {
        config.resolutions = resolutions;
    }
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let output = output.or_else(|| config.output.clone());
    let outcome = run::run(&config)?;
    for report in &outcome.report.checks {
        eprintln!(
            "{} {:<18} relative residual {:.3e} (tolerance {:.1e})",
            if report.pass { "PASS" } else { "FAIL" },
            report.name,
            report.relative_residual,
            report.tolerance
        );
        for warning in &report.warnings {
            eprintln!("     {warning}");
        }
    }
    match output {
        Some(dir) => {
            output::write_outcome(&dir, &outcome)?;
            eprintln!("wrote {}", dir.join("report.json").display());
        }
        None => println!("{}", outcome.report.to_json()),
    }
    Ok(outcome.report.pass)
}

fn list_checks(json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(catalog::catalog()).expect("catalog serialises"));
        return;
    }
    for entry in catalog::catalog() {
        println!("{:<16} {}", entry.name, entry.description);
        println!("{:<16} statement: {}; default tolerance {:e}", "", entry.anchor, entry.default_tolerance);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Verify {
            config,
            checks,
            resolution,
            output,
            seed,
        } => verify(config, checks, resolution, output, seed),
        Command::ListChecks { json } => {
            list_checks(json);
            Ok(true)
        }
        Command::ExportMesh { config, output, resolution } => {
            let config = RunConfig::load(&config)?;
            let csv = run::export_mesh(&config, resolution)?;
            output::write_atomic(&output, csv.as_bytes())?;
            Ok(true)
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
