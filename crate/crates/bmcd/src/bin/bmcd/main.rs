//! Batch front door: ingest -> fit -> diagnose -> simulate -> risk over a
//! directory of station files, with reproducible seeding and
//! machine-readable outputs. See SCHEMAS.md for every table layout.

mod config;
mod outputs;
mod pipeline;
mod pool;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use config::RunConfig;
use outputs::{OutputFormat, Table};
use pipeline::{
    fits_table, run_diagnostics, run_fits, run_ingest, run_risk, run_simulate, spells_table,
    IngestResult,
};

#[derive(Parser)]
#[command(
    name = "bmcd",
    about = "Duration-augmented binary Markov chain modelling of daily rainfall occurrence",
    version
)]
struct Cli {
    /// TOML configuration file; flags below override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (every stochastic step derives from it).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for tables: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    /// Input station files or directories (repeatable).
    #[arg(long = "input", global = true)]
    inputs: Vec<PathBuf>,
    /// Input file format: ecad or generic_csv.
    #[arg(long, global = true)]
    input_format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse station files into per-season spell datasets.
    Ingest,
    /// Fit all model families per station and season.
    Fit,
    /// Exit-probability curves, GOF tests, autocorrelation, Q-Q envelopes.
    Diagnose,
    /// Simulate daily occurrence series from a fitted station-season.
    Simulate {
        /// Station identifier as it appears in spells.csv.
        #[arg(long)]
        station: String,
        /// Season to simulate: spring, summer, autumn or winter.
        #[arg(long)]
        season: String,
        /// Independent season blocks to generate.
        #[arg(long, default_value_t = 100)]
        n_years: u32,
    },
    /// Mean residual dry-spell duration and long-dry-spell time fraction.
    Risk,
    /// Run ingest, fit, diagnose and risk in one pass.
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("completed with {n} input error(s); partial results written");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    if !cli.inputs.is_empty() {
        config.inputs = cli.inputs.clone();
    }
    if let Some(fmt) = &cli.input_format {
        config.format = fmt.clone();
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: Cli) -> Result<usize> {
    let format: OutputFormat = cli.format.parse().map_err(|e: String| anyhow!(e))?;
    let config = build_config(&cli)?;
    let out_dir = config.out_dir.clone();

    let ingest = run_ingest(&config)?;

    let mut written: Vec<String> = Vec::new();
    let write = |table: &Table, written: &mut Vec<String>| -> Result<()> {
        let path = table.write(&out_dir, format)?;
        written.push(path.display().to_string());
        Ok(())
    };

    match &cli.command {
        Command::Ingest => {
            write(&spells_table(&ingest.datasets), &mut written)?;
            write_datasets_json(&out_dir, &ingest)?;
        }
        Command::Fit => {
            let fits = run_fits(&ingest.datasets, &config);
            write(&fits_table(&fits), &mut written)?;
        }
        Command::Diagnose => {
            let fits = run_fits(&ingest.datasets, &config);
            let tables = run_diagnostics(&fits, &ingest.datasets, &config);
            write(&tables.exitcurves, &mut written)?;
            write(&tables.gof, &mut written)?;
            write(&tables.acf, &mut written)?;
            write(&tables.qq, &mut written)?;
        }
        Command::Simulate { station, season, n_years } => {
            let season: bmcd::ingest::Season =
                season.parse().map_err(|e: String| anyhow!(e))?;
            let fits = run_fits(&ingest.datasets, &config);
            let fit = fits
                .iter()
                .find(|f| &f.station_id == station && f.season == season)
                .ok_or_else(|| {
                    anyhow!("no fitted dataset for station {station} in {}", season.as_str())
                })?;
            write(&run_simulate(fit, *n_years, &config)?, &mut written)?;
        }
        Command::Risk => {
            let fits = run_fits(&ingest.datasets, &config);
            write(&run_risk(&fits, &config), &mut written)?;
        }
        Command::All => {
            write(&spells_table(&ingest.datasets), &mut written)?;
            write_datasets_json(&out_dir, &ingest)?;
            let fits = run_fits(&ingest.datasets, &config);
            write(&fits_table(&fits), &mut written)?;
            let tables = run_diagnostics(&fits, &ingest.datasets, &config);
            write(&tables.exitcurves, &mut written)?;
            write(&tables.gof, &mut written)?;
            write(&tables.acf, &mut written)?;
            write(&tables.qq, &mut written)?;
            write(&run_risk(&fits, &config), &mut written)?;
        }
    }

    write_manifest(&out_dir, &config, &ingest, &written)?;
    Ok(ingest.n_errors)
}

fn write_datasets_json(out_dir: &std::path::Path, ingest: &IngestResult) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join("datasets.json");
    let body = serde_json::to_string_pretty(&ingest.datasets)?;
    std::fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn write_manifest(
    out_dir: &std::path::Path,
    config: &RunConfig,
    ingest: &IngestResult,
    written: &[String],
) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let manifest = serde_json::json!({
        "created_utc": chrono::Utc::now().to_rfc3339(),
        "config": config,
        "stations": ingest.reports,
        "outputs": written,
        "input_errors": ingest.n_errors,
    });
    let path = out_dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
