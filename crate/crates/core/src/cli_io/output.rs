//! CSV writers and readers. Values use `{:.16e}`, which round-trips every
//! finite `f64` exactly; lines end in `\n`.

use std::fs::File;
use std::path::Path;

use nalgebra::DMatrix;

use crate::assembly::GlobalSystem;
use crate::control_diag::{energy_reports, ControllerConfig};
use crate::dynamics::{Modes, Trajectory};
use crate::error::{Error, Result};
use crate::fem_element::DOFS_PER_NODE;

pub const TRAJECTORY_HEADER: [&str; 9] = [
    "t",
    "v_tip",
    "alpha_tip",
    "alpha_dot_tip",
    "u",
    "E",
    "kinetic",
    "potential",
    "decay_residual",
];

/// One sample of the trajectory CSV. `decay_residual` is the observed
/// minus the analytic energy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub t: f64,
    pub v_tip: f64,
    pub alpha_tip: f64,
    pub alpha_dot_tip: f64,
    pub u: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub decay_residual: f64,
}

impl TrajectoryRow {
    fn values(&self) -> [f64; 9] {
        [
            self.t,
            self.v_tip,
            self.alpha_tip,
            self.alpha_dot_tip,
            self.u,
            self.energy,
            self.kinetic,
            self.potential,
            self.decay_residual,
        ]
    }

    fn from_values(v: &[f64]) -> Self {
        TrajectoryRow {
            t: v[0],
            v_tip: v[1],
            alpha_tip: v[2],
            alpha_dot_tip: v[3],
            u: v[4],
            energy: v[5],
            kinetic: v[6],
            potential: v[7],
            decay_residual: v[8],
        }
    }
}

pub fn trajectory_rows(traj: &Trajectory, h: f64, cfg: &ControllerConfig) -> Vec<TrajectoryRow> {
    energy_reports(traj, h, cfg)
        .iter()
        .enumerate()
        .map(|(i, r)| TrajectoryRow {
            t: traj.times[i],
            v_tip: traj.tip_deflection[i],
            alpha_tip: traj.tip_rotation[i],
            alpha_dot_tip: traj.tip_rotation_rate[i],
            u: traj.voltage[i],
            energy: r.total,
            kinetic: r.kinetic,
            potential: r.potential,
            decay_residual: r.residual(),
        })
        .collect()
}

/// Modal table: one row per mode with nondimensional and SI frequency and
/// the mass-normalized shape over the free DOFs.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omegas: Vec<f64>,
    /// Frequencies in rad/s.
    pub omegas_si: Vec<f64>,
    /// One column per mode.
    pub shapes: DMatrix<f64>,
    pub dof_labels: Vec<String>,
}

impl Spectrum {
    pub fn from_modes(modes: &Modes, omega1_si: f64, system: &GlobalSystem) -> Self {
        Spectrum {
            omegas: modes.omegas.clone(),
            omegas_si: modes.omegas.iter().map(|w| w * omega1_si).collect(),
            shapes: modes.shapes.clone(),
            dof_labels: dof_labels(system),
        }
    }
}

/// `v_1, vx_1, alpha_1, alphax_1, v_2, ...` with node 0 at the clamp.
pub fn dof_labels(system: &GlobalSystem) -> Vec<String> {
    let first = if system.is_clamped() { 1 } else { 0 };
    (first..system.n_nodes())
        .flat_map(|node| {
            ["v", "vx", "alpha", "alphax"]
                .into_iter()
                .map(move |name| format!("{name}_{node}"))
        })
        .collect()
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

fn reader(path: &Path) -> Result<csv::Reader<File>> {
    csv::Reader::from_path(path).map_err(csv_err(path))
}

fn parse_field(path: &Path, row: usize, field: &str) -> Result<f64> {
    field.parse().map_err(|_| Error::Csv {
        path: path.to_path_buf(),
        source: csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("row {row}: `{field}` is not a number"),
        )),
    })
}

fn schema_error(path: &Path, message: String) -> Error {
    Error::Csv {
        path: path.to_path_buf(),
        source: csv::Error::from(std::io::Error::new(std::io::ErrorKind::InvalidData, message)),
    }
}

pub fn write_trajectory_csv(path: &Path, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row.values().map(fmt)).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_trajectory_csv(path: &Path) -> Result<Vec<TrajectoryRow>> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(csv_err(path))?;
    if header.iter().ne(TRAJECTORY_HEADER) {
        return Err(schema_error(path, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let values = record
            .iter()
            .map(|f| parse_field(path, i + 1, f))
            .collect::<Result<Vec<_>>>()?;
        rows.push(TrajectoryRow::from_values(&values));
    }
    Ok(rows)
}

pub fn write_spectrum_csv(path: &Path, spectrum: &Spectrum) -> Result<()> {
    let mut w = writer(path)?;
    let mut header = vec!["index".to_string(), "omega".into(), "omega_si".into()];
    header.extend(spectrum.dof_labels.iter().cloned());
    w.write_record(&header).map_err(csv_err(path))?;
    for (j, (&omega, &omega_si)) in spectrum.omegas.iter().zip(&spectrum.omegas_si).enumerate() {
        let mut record = vec![(j + 1).to_string(), fmt(omega), fmt(omega_si)];
        record.extend(spectrum.shapes.column(j).iter().map(|&v| fmt(v)));
        w.write_record(&record).map_err(csv_err(path))?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum> {
    let mut r = reader(path)?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    let fixed: Vec<&str> = header.iter().take(3).collect();
    if fixed != ["index", "omega", "omega_si"] || (header.len() - 3) % DOFS_PER_NODE != 0 {
        return Err(schema_error(path, format!("unexpected header {header:?}")));
    }
    let dof_labels: Vec<String> = header.iter().skip(3).map(str::to_string).collect();
    let (mut omegas, mut omegas_si, mut columns) = (Vec::new(), Vec::new(), Vec::new());
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_err(path))?;
        let index: usize = record[0]
            .parse()
            .map_err(|_| schema_error(path, format!("row {}: bad index", i + 1)))?;
        if index != i + 1 {
            return Err(schema_error(path, format!("row {}: index {index} out of order", i + 1)));
        }
        omegas.push(parse_field(path, i + 1, &record[1])?);
        omegas_si.push(parse_field(path, i + 1, &record[2])?);
        let shape = record
            .iter()
            .skip(3)
            .map(|f| parse_field(path, i + 1, f))
            .collect::<Result<Vec<_>>>()?;
        columns.push(shape);
    }
    let shapes = DMatrix::from_fn(dof_labels.len(), columns.len(), |r, c| columns[c][r]);
    Ok(Spectrum {
        omegas,
        omegas_si,
        shapes,
        dof_labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::Mesh;
    use crate::dynamics::eigenfrequencies;
    use crate::model_params::LumpedCoefficients;

    fn system() -> GlobalSystem {
        let coeffs = LumpedCoefficients {
            a: 0.17,
            b: 0.001,
            c: 1e-4,
            d: 0.013,
            e: 0.004,
            f: 0.008,
            g: 4.7,
            h: 0.037,
        };
        GlobalSystem::cantilever(&Mesh::uniform(1.0, 3).unwrap(), &coeffs, 4).unwrap()
    }

    #[test]
    fn labels_skip_the_clamp() {
        let labels = dof_labels(&system());
        assert_eq!(labels.len(), 12);
        assert_eq!(labels[0], "v_1");
        assert_eq!(labels[11], "alphax_3");
    }

    #[test]
    fn spectrum_round_trip() {
        let sys = system();
        let modes = eigenfrequencies(&sys, 4).unwrap();
        let spectrum = Spectrum::from_modes(&modes, 1.1e7, &sys);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("modal.csv");
        write_spectrum_csv(&path, &spectrum).unwrap();
        assert_eq!(read_spectrum_csv(&path).unwrap(), spectrum);
    }

    #[test]
    fn trajectory_round_trip_is_bit_exact() {
        let rows: Vec<TrajectoryRow> = (0..5)
            .map(|i| {
                let x = i as f64;
                TrajectoryRow::from_values(&[x, -0.0, 1e-300, 3.0 / 7.0, -x / 3.0, 1.0, 0.1, 0.9, f64::MIN_POSITIVE])
            })
            .collect();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_trajectory_csv(&path, &rows).unwrap();
        let back = read_trajectory_csv(&path).unwrap();
        for (a, b) in rows.iter().zip(&back) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("t,v_tip,alpha_tip,alpha_dot_tip,u,E,kinetic,potential,decay_residual\n"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn wrong_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "t,x\n1,2\n").unwrap();
        assert!(matches!(read_trajectory_csv(&path), Err(Error::Csv { .. })));
    }
}
