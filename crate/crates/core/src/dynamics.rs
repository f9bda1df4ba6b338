//! Modal analysis and time integration of `M q̈ + K q = f u(t)` under the
//! tip-rotation-rate feedback `u = k_u α̇(L)`.

use nalgebra::{Complex, DMatrix, DVector};

use crate::assembly::GlobalSystem;
use crate::control_diag::{self, ControllerConfig};
use crate::error::{Error, Result};

/// Generalized displacements and velocities at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub q: DVector<f64>,
    pub qdot: DVector<f64>,
    pub t: f64,
}

impl State {
    pub fn zeros(n: usize) -> Self {
        State {
            q: DVector::zeros(n),
            qdot: DVector::zeros(n),
            t: 0.0,
        }
    }

    pub fn check(&self, n: usize) -> Result<()> {
        for (ctx, len) in [("state q", self.q.len()), ("state qdot", self.qdot.len())] {
            if len != n {
                return Err(Error::DimensionMismatch {
                    context: ctx,
                    expected: n,
                    actual: len,
                });
            }
        }
        if self.q.iter().chain(self.qdot.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "state",
                time: self.t,
            });
        }
        Ok(())
    }
}

/// Newmark-β settings. The defaults (β = 1/4, γ = 1/2) give the
/// average-acceleration rule: unconditionally stable, no numerical damping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub t_end: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Record every `stride`-th step.
    pub stride: usize,
}

impl IntegratorConfig {
    pub fn average_acceleration(dt: f64, t_end: f64) -> Self {
        IntegratorConfig {
            dt,
            t_end,
            beta: 0.25,
            gamma: 0.5,
            stride: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("integrator.dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end >= self.dt && self.t_end.is_finite()) {
            return Err(Error::invalid(
                "integrator.t_end",
                format!("must be >= dt, got {}", self.t_end),
            ));
        }
        if !(0.0..=0.5).contains(&self.beta) {
            return Err(Error::invalid(
                "integrator.beta",
                format!("must lie in [0, 0.5], got {}", self.beta),
            ));
        }
        if !(self.gamma >= 0.5 && self.gamma.is_finite()) {
            return Err(Error::invalid(
                "integrator.gamma",
                format!("must be >= 0.5, got {}", self.gamma),
            ));
        }
        if self.stride == 0 {
            return Err(Error::invalid("integrator.stride", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }
}

/// Natural frequencies with mass-normalized mode shapes (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Modes {
    pub omegas: Vec<f64>,
    pub shapes: DMatrix<f64>,
}

/// Solves `K φ = ω² M φ` and returns the `count` lowest positive
/// frequencies in ascending order, with `φᵀ M φ = 1`.
///
/// Zero-energy (rigid-body) pairs of an unclamped system are skipped.
pub fn eigenfrequencies(system: &GlobalSystem, count: usize) -> Result<Modes> {
    let n = system.n_dofs();
    if count > n {
        return Err(Error::invalid(
            "count",
            format!("{count} modes requested from a {n}-DOF system"),
        ));
    }
    let (omegas, raw_shapes) = match system.stiffness.clone().cholesky() {
        Some(k_chol) => stiffness_route(&system.mass, k_chol.l(), count)?,
        None => mass_route(system, count)?,
    };

    let tip = system.tip_deflection_index();
    let mut shapes = DMatrix::zeros(n, count);
    for (j, mut phi) in raw_shapes.into_iter().enumerate() {
        let norm = phi.dot(&(&system.mass * &phi)).sqrt();
        phi /= norm;
        // Fix the sign so runs are reproducible: positive tip deflection,
        // or positive largest entry when the tip does not move.
        let pivot = if phi[tip].abs() > 1e-12 * phi.amax() {
            phi[tip]
        } else {
            phi[phi.iamax()]
        };
        if pivot < 0.0 {
            phi.neg_mut();
        }
        shapes.set_column(j, &phi);
    }
    Ok(Modes { omegas, shapes })
}

/// Congruence `L⁻¹ A L⁻ᵀ` for a lower-triangular factor `L`.
fn congruence(l: &DMatrix<f64>, a: &DMatrix<f64>, what: &'static str) -> Result<DMatrix<f64>> {
    let x = l.solve_lower_triangular(a).ok_or(Error::Singular(what))?;
    let s = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(Error::Singular(what))?;
    Ok((&s + s.transpose()) * 0.5)
}

type RawModes = (Vec<f64>, Vec<DVector<f64>>);

/// Positive definite K: solve for the largest eigenvalues of `K⁻¹M`.
/// Rounding then scales with 1/ω1² instead of ωmax², so the low modes stay
/// accurate on fine meshes where ωmax/ω1 is huge.
fn stiffness_route(mass: &DMatrix<f64>, l: DMatrix<f64>, count: usize) -> Result<RawModes> {
    let s = congruence(&l, mass, "stiffness Cholesky factor")?;
    let eig = s.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 0.0)
        .collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    if order.len() < count {
        return Err(Error::invalid(
            "count",
            format!("only {} positive eigenvalues available", order.len()),
        ));
    }
    let lt = l.transpose();
    let mut omegas = Vec::with_capacity(count);
    let mut shapes = Vec::with_capacity(count);
    for &i in &order[..count] {
        omegas.push(eig.eigenvalues[i].sqrt().recip());
        let phi = lt
            .solve_upper_triangular(&eig.eigenvectors.column(i).into_owned())
            .ok_or(Error::Singular("stiffness Cholesky factor"))?;
        shapes.push(phi);
    }
    Ok((omegas, shapes))
}

/// Semi-definite K (unclamped systems): work with `M⁻¹K` and drop the
/// near-zero rigid modes.
fn mass_route(system: &GlobalSystem, count: usize) -> Result<RawModes> {
    let chol = system
        .mass
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("mass matrix"))?;
    let l = chol.l();
    let s = congruence(&l, &system.stiffness, "mass Cholesky factor")?;
    let eig = s.symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > 1e-10 * scale)
        .collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    if order.len() < count {
        return Err(Error::invalid(
            "count",
            format!("only {} positive eigenvalues available", order.len()),
        ));
    }
    let lt = l.transpose();
    let mut omegas = Vec::with_capacity(count);
    let mut shapes = Vec::with_capacity(count);
    for &i in &order[..count] {
        omegas.push(eig.eigenvalues[i].sqrt());
        let phi = lt
            .solve_upper_triangular(&eig.eigenvectors.column(i).into_owned())
            .ok_or(Error::Singular("mass Cholesky factor"))?;
        shapes.push(phi);
    }
    Ok((omegas, shapes))
}

/// Damping matrix of the closed loop. With `u = k_u e_tipᵀ q̇`, the load
/// `f u` moves to the left-hand side as `C q̇` with `C = −k_u f e_tipᵀ`.
pub fn build_feedback_damping(system: &GlobalSystem, gain: f64) -> Result<DMatrix<f64>> {
    if !(gain >= 0.0 && gain.is_finite()) {
        return Err(Error::invalid(
            "controller.k_u",
            format!("must be finite and >= 0, got {gain}"),
        ));
    }
    let n = system.n_dofs();
    let mut c = DMatrix::zeros(n, n);
    if gain != 0.0 {
        let tip = system.tip_alpha_index();
        c.set_column(tip, &(&system.coupling * (-gain)));
    }
    Ok(c)
}

/// Supported initial conditions. Mode indices start at 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    Zero,
    /// Static deflection under a transverse tip load of the given size.
    StaticTipLoad { amplitude: f64 },
    Eigenmode { index: usize, amplitude: f64 },
}

pub fn make_initial_condition(kind: InitialCondition, system: &GlobalSystem) -> Result<State> {
    let n = system.n_dofs();
    let mut state = State::zeros(n);
    match kind {
        InitialCondition::Zero => {}
        InitialCondition::StaticTipLoad { amplitude } => {
            let mut load = DVector::zeros(n);
            load[system.tip_deflection_index()] = amplitude;
            let chol = system
                .stiffness
                .clone()
                .cholesky()
                .ok_or(Error::Singular("stiffness matrix (static tip load)"))?;
            state.q = chol.solve(&load);
        }
        InitialCondition::Eigenmode { index, amplitude } => {
            if index == 0 {
                return Err(Error::invalid("initial.mode", "mode indices start at 1"));
            }
            let modes = eigenfrequencies(system, index)?;
            state.q = modes.shapes.column(index - 1) * amplitude;
        }
    }
    Ok(state)
}

/// One eigenpair of the closed-loop pencil `λ²M + λC + K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedLoopMode {
    pub eigenvalue: Complex<f64>,
    /// Displacement part of the eigenvector, scaled to unit tip deflection.
    pub shape: DVector<Complex<f64>>,
}

impl ClosedLoopMode {
    /// Damped natural frequency `Im λ`.
    pub fn frequency(&self) -> f64 {
        self.eigenvalue.im.abs()
    }

    /// Damping ratio `−Re λ / |λ|`.
    pub fn damping_ratio(&self) -> f64 {
        -self.eigenvalue.re / self.eigenvalue.norm()
    }

    /// Real state `Re(a φ e^{λt})` at `t = 0`. Released from it, the closed
    /// loop stays on this single mode, with no other content excited.
    pub fn state(&self, amplitude: f64) -> State {
        let lambda = self.eigenvalue;
        State {
            q: self.shape.map(|z| (z * amplitude).re),
            qdot: self.shape.map(|z| (z * lambda * amplitude).re),
            t: 0.0,
        }
    }
}

/// Closed-loop mode whose eigenvalue lies nearest `i·omega_guess`.
///
/// Rayleigh-quotient iteration on the first-order companion form.
pub fn closed_loop_mode(system: &GlobalSystem, gain: f64, omega_guess: f64) -> Result<ClosedLoopMode> {
    if !(omega_guess.is_finite() && omega_guess > 0.0) {
        return Err(Error::invalid("omega_guess", "must be finite and > 0"));
    }
    let n = system.n_dofs();
    let damping = build_feedback_damping(system, gain)?;
    let m_chol = system
        .mass
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("mass matrix"))?;
    let mut companion = DMatrix::<f64>::zeros(2 * n, 2 * n);
    companion
        .view_mut((0, n), (n, n))
        .copy_from(&DMatrix::identity(n, n));
    companion
        .view_mut((n, 0), (n, n))
        .copy_from(&-m_chol.solve(&system.stiffness));
    companion
        .view_mut((n, n), (n, n))
        .copy_from(&-m_chol.solve(&damping));
    let a = companion.map(|v| Complex::new(v, 0.0));
    let scale = companion.norm();

    let mut shift = Complex::new(0.0, omega_guess);
    let mut z = DVector::from_element(2 * n, Complex::new(1.0, 0.0));
    let mut lambda = shift;
    for iter in 0..60 {
        let shifted = &a - DMatrix::identity(2 * n, 2 * n) * shift;
        let next = match shifted.lu().solve(&z) {
            Some(next) => next,
            // Exact hit on an eigenvalue: the current vector is the answer.
            None => break,
        };
        z = &next / Complex::new(next.norm(), 0.0);
        let az = &a * &z;
        lambda = z.dotc(&az);
        let residual = (&az - &z * lambda).norm();
        if residual <= 1e-13 * scale {
            break;
        }
        // A few fixed-shift sweeps first so the iteration locks onto the
        // mode nearest the guess before the shift starts to move.
        if iter >= 3 {
            shift = lambda;
        }
    }
    let az = &a * &z;
    if (&az - &z * lambda).norm() > 1e-9 * scale {
        return Err(Error::Singular("closed-loop eigen iteration did not converge"));
    }

    let mut shape = z.rows(0, n).into_owned();
    let tip = shape[system.tip_deflection_index()];
    if tip.norm() == 0.0 {
        return Err(Error::Singular("closed-loop mode with stationary tip"));
    }
    shape /= tip;
    Ok(ClosedLoopMode {
        eigenvalue: if lambda.im < 0.0 { lambda.conj() } else { lambda },
        shape: if lambda.im < 0.0 { shape.map(|c| c.conj()) } else { shape },
    })
}

/// Sampled response of one simulation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub q: Vec<DVector<f64>>,
    pub qdot: Vec<DVector<f64>>,
    /// Control voltage `u = k_u α̇(L)`.
    pub voltage: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub potential: Vec<f64>,
    pub tip_deflection: Vec<f64>,
    pub tip_rotation: Vec<f64>,
    pub tip_rotation_rate: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn energy(&self) -> Vec<f64> {
        self.kinetic
            .iter()
            .zip(&self.potential)
            .map(|(k, p)| k + p)
            .collect()
    }

    pub fn state(&self, i: usize) -> State {
        State {
            q: self.q[i].clone(),
            qdot: self.qdot[i].clone(),
            t: self.times[i],
        }
    }

    fn record(&mut self, system: &GlobalSystem, gain: f64, state: &State) {
        let tip_a = system.tip_alpha_index();
        let (kinetic, potential) = control_diag::matrix_energy(system, state);
        self.times.push(state.t);
        self.voltage.push(control_diag::control_voltage(
            state,
            &ControllerConfig::closed_loop(gain),
            tip_a,
        ));
        self.kinetic.push(kinetic);
        self.potential.push(potential);
        self.tip_deflection.push(state.q[system.tip_deflection_index()]);
        self.tip_rotation.push(state.q[tip_a]);
        self.tip_rotation_rate.push(state.qdot[tip_a]);
        self.q.push(state.q.clone());
        self.qdot.push(state.qdot.clone());
    }
}

/// Integrates the closed loop `M q̈ + C q̇ + K q = 0` with Newmark-β.
///
/// The feedback is carried implicitly by `C` in the effective matrix
/// `M + γ dt C + β dt² K`, which is factored once.
pub fn simulate(
    system: &GlobalSystem,
    gain: f64,
    ic: &State,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let n = system.n_dofs();
    ic.check(n)?;
    let damping = build_feedback_damping(system, gain)?;
    let (dt, beta, gamma) = (cfg.dt, cfg.beta, cfg.gamma);

    let m_chol = system
        .mass
        .clone()
        .cholesky()
        .ok_or(Error::NotPositiveDefinite("mass matrix"))?;
    let effective = &system.mass + &damping * (gamma * dt) + &system.stiffness * (beta * dt * dt);
    let eff_lu = effective.lu();
    if !eff_lu.is_invertible() {
        return Err(Error::Singular("Newmark effective matrix"));
    }

    let mut state = ic.clone();
    let mut acc = m_chol.solve(&(-(&damping * &state.qdot) - &system.stiffness * &state.q));
    let mut traj = Trajectory::default();
    traj.record(system, gain, &state);

    let t0 = state.t;
    let n_steps = cfg.n_steps();
    for step in 1..=n_steps {
        let q_pred = &state.q + &state.qdot * dt + &acc * ((0.5 - beta) * dt * dt);
        let v_pred = &state.qdot + &acc * ((1.0 - gamma) * dt);
        let rhs = -(&damping * &v_pred) - &system.stiffness * &q_pred;
        acc = eff_lu
            .solve(&rhs)
            .ok_or(Error::Singular("Newmark effective matrix"))?;
        state.q = q_pred + &acc * (beta * dt * dt);
        state.qdot = v_pred + &acc * (gamma * dt);
        state.t = t0 + step as f64 * dt;
        if !state.q.iter().chain(state.qdot.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "Newmark step",
                time: state.t,
            });
        }
        if step % cfg.stride == 0 {
            traj.record(system, gain, &state);
        }
    }
    Ok(traj)
}
