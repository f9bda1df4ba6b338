//! Boundary feedback law and the Lyapunov energy of the beam.
//!
//! The energy functional is the mechanical part of the beam energy,
//!
//! ```text
//! E = 1/2 ∫ [A v_t² + B α_t² + C α_xx² + D α_x² + E (v_xx + α_x)²
//!           + F (2α_x − v_xx)² + G (v_x − α)²] dx,
//! ```
//!
//! and under `u = k_u α_t(L)` it decays at the rate `dE/dt = −½ H k_u α_t(L)²`.

use nalgebra::DVector;

use crate::assembly::{GlobalSystem, Mesh};
use crate::dynamics::{State, Trajectory};
use crate::error::{Error, Result};
use crate::fem_element::{gauss_legendre, operator_rows, DOFS_PER_NODE};
use crate::model_params::LumpedCoefficients;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    /// Feedback gain k_u (nondimensional).
    pub gain: f64,
    pub enabled: bool,
}

impl ControllerConfig {
    /// Gain used for the reference closed-loop runs.
    pub const REFERENCE_GAIN: f64 = 0.6;

    pub fn closed_loop(gain: f64) -> Self {
        ControllerConfig {
            gain,
            enabled: true,
        }
    }

    pub fn open_loop() -> Self {
        ControllerConfig {
            gain: 0.0,
            enabled: false,
        }
    }

    /// Gain actually applied: zero when disabled.
    pub fn effective_gain(&self) -> f64 {
        if self.enabled {
            self.gain
        } else {
            0.0
        }
    }

    /// Rejects negative gains, and active feedback whose product with the
    /// coupling `h` is not positive (which would pump energy in, or do
    /// nothing at all).
    pub fn validate(&self, h: f64) -> Result<()> {
        if !(self.gain >= 0.0 && self.gain.is_finite()) {
            return Err(Error::ConfigValue {
                key: "controller.k_u".into(),
                message: format!("must be finite and >= 0, got {}", self.gain),
            });
        }
        if self.enabled && self.gain > 0.0 && !(h * self.gain > 0.0) {
            return Err(Error::ConfigValue {
                key: "controller.k_u".into(),
                message: format!(
                    "destabilizing sign combination: H*k_u = {} must be > 0",
                    h * self.gain
                ),
            });
        }
        Ok(())
    }
}

/// Piezo voltage `u = k_u α̇(L)`.
pub fn control_voltage(state: &State, cfg: &ControllerConfig, tip_index: usize) -> f64 {
    cfg.effective_gain() * state.qdot[tip_index]
}

/// Kinetic and potential energy as `½ q̇ᵀ M q̇` and `½ qᵀ K q`.
pub fn matrix_energy(system: &GlobalSystem, state: &State) -> (f64, f64) {
    let kinetic = 0.5 * state.qdot.dot(&(&system.mass * &state.qdot));
    let potential = 0.5 * state.q.dot(&(&system.stiffness * &state.q));
    (kinetic, potential)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovEnergy {
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
}

/// Evaluates the energy integral element by element from the Hermite
/// interpolated fields, with the same Gauss rule as the element kernels.
///
/// `state` may cover all mesh DOFs or only the clamped system's DOFs, in
/// which case node 0 is taken as fixed.
pub fn lyapunov_energy(
    state: &State,
    coeffs: &LumpedCoefficients,
    mesh: &Mesh,
    quadrature_order: usize,
) -> Result<LyapunovEnergy> {
    let full_len = DOFS_PER_NODE * mesh.n_nodes();
    let expand = |v: &DVector<f64>| -> Result<DVector<f64>> {
        if v.len() == full_len {
            Ok(v.clone())
        } else if v.len() + DOFS_PER_NODE == full_len {
            let mut full = DVector::zeros(full_len);
            full.rows_mut(DOFS_PER_NODE, v.len()).copy_from(v);
            Ok(full)
        } else {
            Err(Error::DimensionMismatch {
                context: "state vs mesh DOFs",
                expected: full_len,
                actual: v.len(),
            })
        }
    };
    let q = expand(&state.q)?;
    let qdot = expand(&state.qdot)?;
    let (xi, wi) = gauss_legendre(quadrature_order)?;

    let (mut kinetic, mut potential) = (0.0, 0.0);
    for (e, &le) in mesh.element_lengths().iter().enumerate() {
        let qe = q.rows(DOFS_PER_NODE * e, 8);
        let ve = qdot.rows(DOFS_PER_NODE * e, 8);
        for (s, w) in xi.iter().zip(&wi) {
            let x = 0.5 * le * (s + 1.0);
            let w = 0.5 * le * w;
            let r = operator_rows(x, le)?;
            let dot = |row: &nalgebra::SMatrix<f64, 1, 8>, v: &nalgebra::DVectorView<f64>| {
                row.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>()
            };
            let v_t = dot(&r.d1, &ve);
            let a_t = dot(&r.d2, &ve);
            kinetic += 0.5 * w * (coeffs.a * v_t * v_t + coeffs.b * a_t * a_t);
            let axx = dot(&r.b1, &qe);
            let ax = dot(&r.b2, &qe);
            let s3 = dot(&r.b3, &qe);
            let s4 = dot(&r.b4, &qe);
            let s5 = dot(&r.b5, &qe);
            potential += 0.5
                * w
                * (coeffs.c * axx * axx
                    + coeffs.d * ax * ax
                    + coeffs.e * s3 * s3
                    + coeffs.f * s4 * s4
                    + coeffs.g * s5 * s5);
        }
    }
    Ok(LyapunovEnergy {
        total: kinetic + potential,
        kinetic,
        potential,
    })
}

/// Energy balance at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub time: f64,
    pub total: f64,
    pub kinetic: f64,
    pub potential: f64,
    /// `−½ H k_u α̇(L)²`
    pub analytic_rate: f64,
    /// Finite-difference `dE/dt` of the sampled energy.
    pub observed_rate: f64,
}

impl EnergyReport {
    pub fn residual(&self) -> f64 {
        self.observed_rate - self.analytic_rate
    }
}

pub fn analytic_rate(h: f64, gain: f64, tip_rotation_rate: f64) -> f64 {
    -0.5 * h * gain * tip_rotation_rate * tip_rotation_rate
}

/// Second-order finite-difference derivative of `y` on a uniform grid:
/// central in the interior, three-point one-sided at the ends.
fn fd_derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    if n < 3 {
        return vec![f64::NAN; n];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        d[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
    }
    let h0 = t[1] - t[0];
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h0);
    let h1 = t[n - 1] - t[n - 2];
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h1);
    d
}

/// Per-sample energy balance. With fewer than three samples the observed
/// rate is unavailable and is reported equal to the analytic one.
pub fn energy_reports(traj: &Trajectory, h: f64, cfg: &ControllerConfig) -> Vec<EnergyReport> {
    let energy = traj.energy();
    let observed = fd_derivative(&traj.times, &energy);
    let gain = cfg.effective_gain();
    (0..traj.len())
        .map(|i| {
            let analytic = analytic_rate(h, gain, traj.tip_rotation_rate[i]);
            EnergyReport {
                time: traj.times[i],
                total: energy[i],
                kinetic: traj.kinetic[i],
                potential: traj.potential[i],
                analytic_rate: analytic,
                observed_rate: if observed[i].is_nan() { analytic } else { observed[i] },
            }
        })
        .collect()
}

/// Largest mismatch between the central-difference energy rate and
/// `−½ H k_u α̇(L)²` over the interior samples, relative to the size of
/// the rate.
///
/// The normalizer is the largest of the peak analytic rate, the peak
/// observed rate and `max E / (t_last − t_first)`; the last term keeps the
/// open-loop measure (both rates ≈ 0) a relative energy drift.
pub fn verify_decay_identity(
    traj: &Trajectory,
    coeffs: &LumpedCoefficients,
    cfg: &ControllerConfig,
) -> Result<f64> {
    let n = traj.len();
    if n < 3 {
        return Err(Error::invalid(
            "trajectory",
            format!("need at least 3 samples, got {n}"),
        ));
    }
    let energy = traj.energy();
    let observed = fd_derivative(&traj.times, &energy);
    let gain = cfg.effective_gain();
    let mut worst: f64 = 0.0;
    let mut peak_analytic: f64 = 0.0;
    let mut peak_observed: f64 = 0.0;
    for i in 1..n - 1 {
        let a = analytic_rate(coeffs.h, gain, traj.tip_rotation_rate[i]);
        worst = worst.max((observed[i] - a).abs());
        peak_analytic = peak_analytic.max(a.abs());
        peak_observed = peak_observed.max(observed[i].abs());
    }
    let span = traj.times[n - 1] - traj.times[0];
    let e_max = energy.iter().copied().fold(0.0, f64::max);
    let scale = peak_analytic.max(peak_observed).max(e_max / span);
    Ok(if scale > 0.0 { worst / scale } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::dynamics::{make_initial_condition, simulate, InitialCondition, IntegratorConfig};

    fn coeffs() -> LumpedCoefficients {
        LumpedCoefficients {
            a: 0.17,
            b: 0.001,
            c: 1e-4,
            d: 0.013,
            e: 0.004,
            f: 0.008,
            g: 4.7,
            h: 0.037,
        }
    }

    #[test]
    fn voltage_law() {
        let mut s = State::zeros(8);
        let cfg = ControllerConfig::closed_loop(0.6);
        assert_eq!(control_voltage(&s, &cfg, 6), 0.0);
        s.qdot[6] = 1.0;
        assert_eq!(control_voltage(&s, &cfg, 6), 0.6);
        s.qdot[6] = -0.5;
        assert_eq!(control_voltage(&s, &ControllerConfig::closed_loop(2.0), 6), -1.0);
        assert_eq!(control_voltage(&s, &ControllerConfig { gain: 2.0, enabled: false }, 6), 0.0);
    }

    #[test]
    fn controller_validation() {
        assert!(ControllerConfig::closed_loop(0.6).validate(0.04).is_ok());
        assert!(ControllerConfig::closed_loop(0.0).validate(0.04).is_ok());
        assert!(ControllerConfig::closed_loop(-0.6).validate(0.04).is_err());
        assert!(ControllerConfig::closed_loop(0.6).validate(-0.04).is_err());
        assert!(ControllerConfig::closed_loop(0.6).validate(0.0).is_err());
        assert!(ControllerConfig { gain: 0.6, enabled: false }.validate(-0.04).is_ok());
    }

    #[test]
    fn zero_state_has_zero_energy() {
        let mesh = Mesh::uniform(1.0, 3).unwrap();
        let e = lyapunov_energy(&State::zeros(12), &coeffs(), &mesh, 4).unwrap();
        assert_eq!(e.total, 0.0);
        assert!(lyapunov_energy(&State::zeros(7), &coeffs(), &mesh, 4).is_err());
    }

    #[test]
    fn rigid_displacement_has_no_potential() {
        let mesh = Mesh::uniform(1.0, 4).unwrap();
        let n = 4 * mesh.n_nodes();
        let mut s = State::zeros(n);
        for (node, x) in mesh.node_positions().iter().enumerate() {
            s.q[4 * node] = 0.3 + 2.0 * x;
            s.q[4 * node + 1] = 2.0;
            s.q[4 * node + 2] = 2.0;
        }
        let e = lyapunov_energy(&s, &coeffs(), &mesh, 4).unwrap();
        assert!(e.potential.abs() < 1e-12);
    }

    #[test]
    fn quadrature_energy_matches_quadratic_form() {
        let mesh = Mesh::uniform(1.0, 6).unwrap();
        let els = mesh.element_matrices(&coeffs(), 4).unwrap();
        let sys = assemble(&mesh, &els).unwrap().apply_clamp().unwrap();
        let n = sys.n_dofs();
        let s = State {
            q: DVector::from_fn(n, |i, _| ((i * 7 + 3) % 11) as f64 / 11.0 - 0.4),
            qdot: DVector::from_fn(n, |i, _| ((i * 5 + 1) % 13) as f64 / 13.0 - 0.5),
            t: 0.0,
        };
        let (k, p) = matrix_energy(&sys, &s);
        let e = lyapunov_energy(&s, &coeffs(), &mesh, 4).unwrap();
        assert!((e.kinetic - k).abs() <= 1e-12 * k);
        assert!((e.potential - p).abs() <= 1e-12 * p);
    }

    #[test]
    fn decay_identity_needs_three_samples() {
        let traj = Trajectory::default();
        assert!(verify_decay_identity(&traj, &coeffs(), &ControllerConfig::open_loop()).is_err());
    }

    #[test]
    fn open_loop_residual_is_drift_only() {
        let mesh = Mesh::uniform(1.0, 5).unwrap();
        let sys = GlobalSystem::cantilever(&mesh, &coeffs(), 4).unwrap();
        let ic = make_initial_condition(InitialCondition::StaticTipLoad { amplitude: 0.01 }, &sys).unwrap();
        let traj = simulate(&sys, 0.0, &ic, &IntegratorConfig::average_acceleration(0.02, 20.0)).unwrap();
        let r = verify_decay_identity(&traj, &coeffs(), &ControllerConfig::open_loop()).unwrap();
        assert!(r <= 1e-6, "residual {r}");
    }

    #[test]
    fn stationary_tip_gives_zero_rates() {
        // Tip rotation never moves when the system starts at rest.
        let mesh = Mesh::uniform(1.0, 3).unwrap();
        let sys = GlobalSystem::cantilever(&mesh, &coeffs(), 4).unwrap();
        let traj = simulate(&sys, 0.6, &State::zeros(sys.n_dofs()), &IntegratorConfig::average_acceleration(0.1, 1.0)).unwrap();
        let cfg = ControllerConfig::closed_loop(0.6);
        for r in energy_reports(&traj, coeffs().h, &cfg) {
            assert_eq!(r.analytic_rate, 0.0);
            assert_eq!(r.observed_rate, 0.0);
        }
        assert_eq!(verify_decay_identity(&traj, &coeffs(), &cfg).unwrap(), 0.0);
    }
}
