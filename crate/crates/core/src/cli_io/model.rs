use crate::assembly::{GlobalSystem, Mesh};
use crate::dynamics::eigenfrequencies;
use crate::error::Result;
use crate::model_params::{nondimensionalize, Laminate, LumpedCoefficients, NondimParams, NondimScales};

/// A clamped cantilever discretized in nondimensional units.
///
/// Lengths are scaled by L, time by 1/ω1 and masses by ρ^b L³, so the
/// first natural frequency of `system` is 1 by construction.
#[derive(Debug, Clone)]
pub struct CantileverModel {
    pub laminate: Laminate,
    /// Lumped coefficients in SI units.
    pub si_coefficients: LumpedCoefficients,
    pub params: NondimParams,
    /// Mesh of the unit interval.
    pub mesh: Mesh,
    pub system: GlobalSystem,
    pub quadrature_order: usize,
}

impl CantileverModel {
    pub fn build(laminate: &Laminate, n_elements: usize, quadrature_order: usize) -> Result<Self> {
        laminate.validate()?;
        let si = laminate.lumped()?;
        let mesh = Mesh::uniform(1.0, n_elements)?;

        // With a unit reference frequency the scaled pencil keeps SI time,
        // so its lowest eigenvalue is ω1² in rad²/s².
        let provisional = NondimScales::for_laminate(laminate, 1.0);
        let trial = GlobalSystem::cantilever(&mesh, &provisional.scale_coefficients(&si), quadrature_order)?;
        let omega1 = eigenfrequencies(&trial, 1)?.omegas[0];

        let scales = NondimScales::for_laminate(laminate, omega1);
        let params = nondimensionalize(&si, laminate, &scales)?;
        let system = GlobalSystem::cantilever(&mesh, &params.coeffs, quadrature_order)?;
        Ok(CantileverModel {
            laminate: *laminate,
            si_coefficients: si,
            params,
            mesh,
            system,
            quadrature_order,
        })
    }

    /// Nondimensional lumped coefficients used by the kernels.
    pub fn coefficients(&self) -> &LumpedCoefficients {
        &self.params.coeffs
    }

    /// First natural frequency in rad/s.
    pub fn omega1_si(&self) -> f64 {
        self.params.scales.omega1
    }
}
