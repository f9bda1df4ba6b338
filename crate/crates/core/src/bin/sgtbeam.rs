use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sgtbeam::cli_io::{parse_config, run, Mode};
use sgtbeam::Error;

/// Strain-gradient piezo micro-cantilever simulator.
#[derive(Debug, Parser)]
#[command(version)]
struct Cli {
    /// Config file of `section.key = value` lines; defaults apply without one.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides `run.mode`.
    #[arg(long, value_parser = ["simulate", "modal", "sweep"])]
    mode: Option<String>,
    /// Output directory. Falls back to `output.dir`, then $SGTBEAM_OUT.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check quadrature energy against the matrix form at every sample.
    #[arg(long)]
    debug_energy: bool,
    /// Reserved; the simulator is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.kind());
            match e {
                Error::ConfigParse { .. } | Error::ConfigValue { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn execute(cli: &Cli) -> sgtbeam::Result<String> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut cfg = parse_config(&text)?;
    if let Some(mode) = &cli.mode {
        cfg.mode = mode.parse::<Mode>().expect("clap restricts the values");
    }
    let dir_from_config = !cfg.defaulted.0.iter().any(|k| k == "output.dir");
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    } else if !dir_from_config {
        if let Some(env) = std::env::var_os("SGTBEAM_OUT") {
            cfg.output_dir = PathBuf::from(env);
        }
    }
    cfg.debug_energy |= cli.debug_energy;
    cfg.validate()?;
    let summary = run(&cfg)?;
    Ok(summary.to_text(&cfg))
}
