//! Orchestration of one CLI invocation.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use super::config::{Mode, RunConfig};
use super::model::CantileverModel;
use super::output::{
    trajectory_rows, write_spectrum_csv, write_trajectory_csv, Spectrum, TrajectoryRow,
};
use crate::control_diag::{lyapunov_energy, matrix_energy, verify_decay_identity, ControllerConfig};
use crate::dynamics::{eigenfrequencies, make_initial_condition, simulate, Trajectory};
use crate::error::{Error, Result};

/// Outcome of one closed- or open-loop simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct GainRun {
    /// Nondimensional gain actually applied (0 when feedback is disabled).
    pub gain: f64,
    pub gain_si: f64,
    pub e0: f64,
    pub e_end: f64,
    /// `E(t_end)/E(0)`, or 0 when the run starts at rest.
    pub decay_ratio: f64,
    /// Largest |u| in nondimensional voltage units.
    pub max_voltage: f64,
    /// Normalized energy-rate identity residual; `None` below 3 samples.
    pub max_residual: Option<f64>,
    /// Largest gap between quadrature and matrix energy relative to E(0),
    /// when the dual-path check is on.
    pub energy_path_gap: Option<f64>,
    pub trajectory_file: PathBuf,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub mode: Mode,
    pub omega1_si: f64,
    /// Nondimensional ω1..ωk.
    pub omegas: Vec<f64>,
    pub runs: Vec<GainRun>,
    /// Sweep only: whether E(t_end) is nonincreasing along the listed gains.
    pub gain_direction_ok: Option<bool>,
    pub files: Vec<PathBuf>,
    pub wall_clock: Duration,
    pub defaulted: Vec<String>,
}

impl RunSummary {
    /// Decay ratio of the first simulation, if any ran.
    pub fn decay_ratio(&self) -> Option<f64> {
        self.runs.first().map(|r| r.decay_ratio)
    }

    pub fn to_text(&self, cfg: &RunConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "mode: {}", self.mode);
        let _ = writeln!(s, "elements: {}", cfg.n_elements);
        let _ = writeln!(s, "omega1_si_rad_per_s: {:.10e}", self.omega1_si);
        let _ = writeln!(s, "omega1_si_hz: {:.10e}", self.omega1_si / (2.0 * std::f64::consts::PI));
        for (i, w) in self.omegas.iter().enumerate() {
            let _ = writeln!(s, "omega{}_nondim: {:.10e}", i + 1, w);
        }
        for run in &self.runs {
            let _ = writeln!(s, "run k_u = {} (SI {:.6e} V*s)", run.gain, run.gain_si);
            let _ = writeln!(s, "  E0: {:.10e}", run.e0);
            let _ = writeln!(s, "  E_end: {:.10e}", run.e_end);
            let _ = writeln!(s, "  decay_ratio: {:.10e}", run.decay_ratio);
            let _ = writeln!(s, "  max_abs_u: {:.10e}", run.max_voltage);
            match run.max_residual {
                Some(r) => {
                    let _ = writeln!(s, "  max_decay_residual: {r:.6e}");
                }
                None => {
                    let _ = writeln!(s, "  max_decay_residual: unavailable (fewer than 3 samples)");
                }
            }
            if let Some(gap) = run.energy_path_gap {
                let _ = writeln!(s, "  energy_path_gap: {gap:.6e}");
            }
            let _ = writeln!(s, "  trajectory: {}", run.trajectory_file.display());
        }
        if let Some(ok) = self.gain_direction_ok {
            let _ = writeln!(s, "E_end_nonincreasing_in_gain: {ok}");
        }
        let _ = writeln!(s, "wall_clock_s: {:.3}", self.wall_clock.as_secs_f64());
        let _ = writeln!(s, "defaults used ({} keys):", self.defaulted.len());
        for key in &self.defaulted {
            let _ = writeln!(s, "  {key}");
        }
        s
    }
}

/// Files created so far; removed again unless the run completes.
struct Outputs {
    files: Vec<PathBuf>,
    done: bool,
}

impl Outputs {
    fn track(&mut self, path: PathBuf) -> PathBuf {
        self.files.push(path.clone());
        path
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.done {
            for f in &self.files {
                let _ = fs::remove_file(f);
            }
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs the configured mode and writes its files into `cfg.output_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunSummary> {
    let started = Instant::now();
    cfg.validate()?;
    let model = CantileverModel::build(&cfg.laminate, cfg.n_elements, cfg.quadrature_order)?;
    let n_modes = cfg.n_modes.min(model.system.n_dofs());
    let modes = eigenfrequencies(&model.system, n_modes)?;

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut out = Outputs {
        files: Vec::new(),
        done: false,
    };

    let config_path = out.track(dir.join("config.txt"));
    fs::write(&config_path, cfg.to_text()).map_err(io_err(&config_path))?;

    let mut runs = Vec::new();
    let mut gain_direction_ok = None;
    match cfg.mode {
        Mode::Modal => {
            let path = out.track(dir.join("modal.csv"));
            let spectrum = Spectrum::from_modes(&modes, model.omega1_si(), &model.system);
            write_spectrum_csv(&path, &spectrum)?;
        }
        Mode::Simulate => {
            let (run, rows) = simulate_gain(&model, cfg, cfg.controller, dir.join("trajectory.csv"))?;
            write_trajectory_csv(&out.track(run.trajectory_file.clone()), &rows)?;
            runs.push(run);
        }
        Mode::Sweep => {
            let results: Vec<Result<(GainRun, Vec<TrajectoryRow>)>> = std::thread::scope(|scope| {
                let handles: Vec<_> = cfg
                    .sweep_gains
                    .iter()
                    .map(|&g| {
                        let model = &model;
                        let path = dir.join(format!("trajectory_ku_{g}.csv"));
                        scope.spawn(move || simulate_gain(model, cfg, ControllerConfig::closed_loop(g), path))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sweep worker panicked"))
                    .collect()
            });
            // Written in gain order after all workers finish, so output does
            // not depend on thread scheduling.
            for result in results {
                let (run, rows) = result?;
                write_trajectory_csv(&out.track(run.trajectory_file.clone()), &rows)?;
                runs.push(run);
            }
            gain_direction_ok = Some(runs.windows(2).all(|w| w[1].e_end <= w[0].e_end));
            let path = out.track(dir.join("sweep.csv"));
            write_sweep_csv(&path, &runs)?;
        }
    }

    let mut summary = RunSummary {
        mode: cfg.mode,
        omega1_si: model.omega1_si(),
        omegas: modes.omegas,
        runs,
        gain_direction_ok,
        files: Vec::new(),
        wall_clock: Duration::ZERO,
        defaulted: cfg.defaulted.0.clone(),
    };
    let summary_path = out.track(dir.join("summary.txt"));
    summary.wall_clock = started.elapsed();
    fs::write(&summary_path, summary.to_text(cfg)).map_err(io_err(&summary_path))?;
    summary.files = out.files.clone();
    out.done = true;
    Ok(summary)
}

fn simulate_gain(
    model: &CantileverModel,
    cfg: &RunConfig,
    controller: ControllerConfig,
    path: PathBuf,
) -> Result<(GainRun, Vec<TrajectoryRow>)> {
    let h = model.coefficients().h;
    controller.validate(h)?;
    let gain = controller.effective_gain();
    let ic = make_initial_condition(cfg.initial, &model.system)?;
    let traj = simulate(&model.system, gain, &ic, &cfg.integrator)?;
    let rows = trajectory_rows(&traj, h, &controller);
    let energy = traj.energy();
    let (e0, e_end) = (energy[0], *energy.last().expect("at least one sample"));
    let max_residual = match verify_decay_identity(&traj, model.coefficients(), &controller) {
        Ok(r) => Some(r),
        Err(Error::InvalidParameter { .. }) => None,
        Err(e) => return Err(e),
    };
    let energy_path_gap = if cfg.debug_energy {
        Some(energy_path_gap(model, &traj)?)
    } else {
        None
    };
    let run = GainRun {
        gain,
        gain_si: model.params.scales.gain_to_si(gain) + 0.0,
        e0,
        e_end,
        decay_ratio: if e0 > 0.0 { e_end / e0 } else { 0.0 },
        max_voltage: traj.voltage.iter().fold(0.0, |m, u| m.max(u.abs())),
        max_residual,
        energy_path_gap,
        trajectory_file: path,
    };
    Ok((run, rows))
}

/// Compares the matrix quadratic form with the element quadrature of the
/// energy integral at every sample.
fn energy_path_gap(model: &CantileverModel, traj: &Trajectory) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..traj.len() {
        let state = traj.state(i);
        let (k, p) = matrix_energy(&model.system, &state);
        let quad = lyapunov_energy(&state, model.coefficients(), &model.mesh, model.quadrature_order)?;
        worst = worst.max((quad.total - (k + p)).abs());
        scale = scale.max(k + p);
    }
    Ok(if scale > 0.0 { worst / scale } else { worst })
}

fn write_sweep_csv(path: &Path, runs: &[GainRun]) -> Result<()> {
    let mut text = String::from("k_u,E0,E_end,decay_ratio,max_abs_u,max_decay_residual\n");
    for r in runs {
        let residual = r.max_residual.map_or(String::from("NaN"), |v| format!("{v:.16e}"));
        let _ = writeln!(
            text,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.gain, r.e0, r.e_end, r.decay_ratio, r.max_voltage, residual
        );
    }
    fs::write(path, text).map_err(io_err(path))
}
