use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spinmz_cli::{parse_config, run_experiment, CliError, ConfigOverrides};

/// Simulate the adiabatic Mach-Zehnder interferometer of a dipolar spin-1
/// condensate and write the data of each experiment.
#[derive(Parser, Debug)]
#[command(name = "spinmz", version)]
struct Args {
    /// spectra | split | phase-scan | fringes | squeezing | geometry | interferometer
    experiment: String,
    /// JSON document with default settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n_atoms: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h_z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    h_x_init: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    rate: Option<f64>,
    /// Transverse-field change per propagation step.
    #[arg(long)]
    step: Option<f64>,
    /// start:stop:count, log:start:stop:count or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Longitudinal fields for the end-to-end runs of `fringes`.
    #[arg(long, allow_hyphen_values = true)]
    h_z_grid: Option<String>,
    /// Number of levels in `spectra`.
    #[arg(long)]
    levels: Option<usize>,
    /// Sampling stride in steps for trajectory experiments.
    #[arg(long)]
    sample_every: Option<usize>,
    /// Output directory.
    #[arg(long)]
    output: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
}

fn run(args: Args) -> Result<(), CliError> {
    let doc = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            ConfigOverrides::from_json(&text)?
        }
        None => ConfigOverrides::default(),
    };
    let flags = ConfigOverrides {
        experiment: Some(args.experiment),
        n_atoms: args.n_atoms,
        c: args.c,
        h_z: args.h_z,
        h_x_init: args.h_x_init,
        rate: args.rate,
        step: args.step,
        grid: args.grid,
        h_z_grid: args.h_z_grid,
        levels: args.levels,
        sample_every: args.sample_every,
        output: args.output,
        format: args.format,
    };
    let cfg = parse_config(doc.merged(flags))?;
    let manifest = run_experiment(&cfg)?;
    for w in &manifest.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let _ = writeln!(std::io::stdout(), "{text}");
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            let err = CliError::Usage(first.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
