//! Drives a full run from configuration text, as the command-line tool
//! does, and reads the trajectory back.

use sgtbeam::cli_io::{parse_config, read_trajectory_csv, run};

const CONFIG: &str = "\
# half the default horizon, every fifth step recorded
integrator.t_end = 25
integrator.stride = 5
controller.k_u = 0.6
initial.kind = eigenmode
initial.mode = 1
";

fn main() -> sgtbeam::Result<()> {
    let mut cfg = parse_config(CONFIG)?;
    cfg.output_dir = std::env::temp_dir().join("sgtbeam_config_run");
    let summary = run(&cfg)?;
    print!("{}", summary.to_text(&cfg));

    let rows = read_trajectory_csv(&summary.runs[0].trajectory_file)?;
    let last = rows.last().unwrap();
    println!("{} samples, last at t = {:.3}: E = {:.3e}", rows.len(), last.t, last.energy);
    Ok(())
}
