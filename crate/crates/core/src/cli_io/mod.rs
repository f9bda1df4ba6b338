//! Configuration parsing, run orchestration and CSV output.

mod config;
mod model;
mod output;
mod run;

pub use config::{parse_config, Mode, Provenance, RunConfig, KEYS};
pub use model::CantileverModel;
pub use output::{
    dof_labels, read_spectrum_csv, read_trajectory_csv, trajectory_rows, write_spectrum_csv,
    write_trajectory_csv, Spectrum, TrajectoryRow, TRAJECTORY_HEADER,
};
pub use run::{run, GainRun, RunSummary};
