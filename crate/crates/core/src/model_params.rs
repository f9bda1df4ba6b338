//! Material and geometry parameters of the laminated micro-cantilever.
//!
//! Raw layer data (elastic moduli, density, piezo constant, cross-section)
//! is reduced here to the lumped one-dimensional coefficients `A..H` that
//! multiply the kinetic, strain and electromechanical terms of the beam
//! energy:
//!
//! ```text
//! T = 1/2 ∫ (A v_t² + B α_t²) dx
//! U = 1/2 ∫ (C α_xx² + D α_x² + E (v_xx + α_x)² + F (2 α_x − v_xx)² + G (v_x − α)²) dx
//! W = ∫ H α_x u(t) dx
//! ```
//!
//! and then to the nondimensional set used by every numerical kernel.

use crate::error::{Error, Result};

/// Vacuum permittivity (F/m).
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Effective piezoelectric stress constant of the PZT layer (C/m²).
pub const PZT_E13: f64 = -3.621;

/// One homogeneous layer of the laminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialLayer {
    /// Young's modulus (Pa).
    pub young_modulus: f64,
    pub poisson_ratio: f64,
    /// Mass density (kg/m³).
    pub density: f64,
    /// Layer thickness (m).
    pub thickness: f64,
    /// Layer width (m).
    pub width: f64,
    /// Piezoelectric stress constant e13 (C/m²); zero for passive layers.
    pub e13: f64,
    /// Permittivity ε33 (F/m); zero for passive layers.
    pub permittivity_33: f64,
}

impl MaterialLayer {
    /// Silicon dioxide beam layer, 10 µm × 30 µm.
    pub fn silicon_dioxide() -> Self {
        MaterialLayer {
            young_modulus: 73.0e9,
            poisson_ratio: 0.17,
            density: 2200.0,
            thickness: 10.0e-6,
            width: 30.0e-6,
            e13: 0.0,
            permittivity_33: 3.9 * VACUUM_PERMITTIVITY,
        }
    }

    /// PZT actuator layer, 10 µm × 30 µm.
    pub fn pzt() -> Self {
        MaterialLayer {
            young_modulus: 71.0e9,
            poisson_ratio: 0.31,
            density: 7700.0,
            thickness: 10.0e-6,
            width: 30.0e-6,
            e13: PZT_E13,
            permittivity_33: 1700.0 * VACUUM_PERMITTIVITY,
        }
    }

    /// Checks every layer invariant, including strictly positive density.
    pub fn validate(&self, label: &str) -> Result<()> {
        self.validate_elastic(label)?;
        positive(&format!("{label}.density"), self.density)
    }

    fn validate_elastic(&self, label: &str) -> Result<()> {
        positive(&format!("{label}.young_modulus"), self.young_modulus)?;
        let nu = self.poisson_ratio;
        if !(nu > -1.0 && nu < 0.5) {
            return Err(Error::invalid(
                format!("{label}.poisson_ratio"),
                format!("must lie in (-1, 0.5), got {nu}"),
            ));
        }
        positive(&format!("{label}.thickness"), self.thickness)?;
        positive(&format!("{label}.width"), self.width)?;
        finite(&format!("{label}.e13"), self.e13)?;
        finite(&format!("{label}.permittivity_33"), self.permittivity_33)
    }
}

/// Material length scales of the strain gradient theory (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainGradientScales {
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
}

impl StrainGradientScales {
    /// All scales zero: the classical Timoshenko beam.
    pub const CLASSICAL: Self = StrainGradientScales {
        l0: 0.0,
        l1: 0.0,
        l2: 0.0,
    };

    pub fn uniform(l: f64) -> Self {
        StrainGradientScales { l0: l, l1: l, l2: l }
    }

    pub fn scaled(&self, s: f64) -> Self {
        StrainGradientScales {
            l0: self.l0 * s,
            l1: self.l1 * s,
            l2: self.l2 * s,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("l0", self.l0), ("l1", self.l1), ("l2", self.l2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(
                    format!("scales.{name}"),
                    format!("must be finite and >= 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Elastic moduli and section properties derived from one layer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedModuli {
    pub bulk_modulus: f64,
    pub shear_modulus: f64,
    /// Timoshenko shear correction coefficient.
    pub shear_coefficient: f64,
    /// Cross-section area (m²).
    pub area: f64,
    /// Second moment of area about the layer's own centroid (m⁴).
    pub second_moment: f64,
}

pub fn derive_moduli(layer: &MaterialLayer) -> Result<DerivedModuli> {
    layer.validate_elastic("layer")?;
    let e = layer.young_modulus;
    let nu = layer.poisson_ratio;
    Ok(DerivedModuli {
        bulk_modulus: e / (3.0 * (1.0 - 2.0 * nu)),
        shear_modulus: e / (2.0 * (1.0 + nu)),
        shear_coefficient: (5.0 + 5.0 * nu) / (6.0 + 5.0 * nu),
        area: layer.thickness * layer.width,
        second_moment: layer.width * layer.thickness.powi(3) / 12.0,
    })
}

/// Piezoelectric stress constant `e13 = Σ d3i c1i` from the strain
/// constants and the first row of the elastic stiffness matrix.
pub fn compute_e13(piezo_strain_constants: &[f64], stiffness_row: &[f64]) -> Result<f64> {
    if piezo_strain_constants.len() != 3 {
        return Err(Error::DimensionMismatch {
            context: "piezo strain constants",
            expected: 3,
            actual: piezo_strain_constants.len(),
        });
    }
    if stiffness_row.len() != 3 {
        return Err(Error::DimensionMismatch {
            context: "stiffness row",
            expected: 3,
            actual: stiffness_row.len(),
        });
    }
    Ok(piezo_strain_constants
        .iter()
        .zip(stiffness_row)
        .map(|(d, c)| d * c)
        .sum())
}

/// Per-layer stiffness constants `k1..k5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerStiffness {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
}

pub fn compute_ki(moduli: &DerivedModuli, scales: &StrainGradientScales) -> LayerStiffness {
    let DerivedModuli {
        bulk_modulus: k,
        shear_modulus: mu,
        shear_coefficient: ks,
        area,
        second_moment: i,
    } = *moduli;
    let StrainGradientScales { l0, l1, l2 } = *scales;
    LayerStiffness {
        k1: mu * i * (2.0 * l0 * l0 + 0.8 * l1 * l1),
        k2: i * (k + 4.0 * mu / 3.0) + 2.0 * mu * area * l0 * l0,
        k3: mu * area * l2 * l2 / 4.0,
        k4: 8.0 * mu * area * l1 * l1 / 15.0,
        k5: ks * mu * area,
    }
}

/// Lumped coefficients of the one-dimensional beam model.
///
/// The same type carries SI values and nondimensional values; which one a
/// given instance holds is decided by whoever produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LumpedCoefficients {
    /// Mass per unit length.
    pub a: f64,
    /// Rotary inertia per unit length.
    pub b: f64,
    /// Rotation-curvature gradient stiffness (multiplies α_xx²).
    pub c: f64,
    /// Bending stiffness (multiplies α_x²).
    pub d: f64,
    /// Multiplies (v_xx + α_x)².
    pub e: f64,
    /// Multiplies (2α_x − v_xx)².
    pub f: f64,
    /// Shear stiffness (multiplies (v_x − α)²).
    pub g: f64,
    /// Voltage coupling.
    pub h: f64,
}

impl LumpedCoefficients {
    /// Validates the sign constraints required by the element kernels.
    pub fn validate(&self) -> Result<()> {
        positive("coeffs.a", self.a)?;
        positive("coeffs.b", self.b)?;
        for (name, v) in [
            ("coeffs.c", self.c),
            ("coeffs.d", self.d),
            ("coeffs.e", self.e),
            ("coeffs.f", self.f),
            ("coeffs.g", self.g),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        finite("coeffs.h", self.h)
    }
}

/// Sums the per-layer constants into the lumped beam coefficients.
///
/// `moment_arm` is the representative distance from the piezo layer to the
/// composite mid-plane used in `H = z e13 b^p`.
pub fn compute_lumped(
    beam: &MaterialLayer,
    piezo: &MaterialLayer,
    scales: &StrainGradientScales,
    moment_arm: f64,
) -> Result<LumpedCoefficients> {
    positive("moment_arm", moment_arm)?;
    scales.validate()?;
    for (label, layer) in [("beam", beam), ("piezo", piezo)] {
        if !(layer.density >= 0.0 && layer.density.is_finite()) {
            return Err(Error::invalid(
                format!("{label}.density"),
                format!("must be finite and >= 0, got {}", layer.density),
            ));
        }
    }
    let mb = derive_moduli(beam)?;
    let mp = derive_moduli(piezo)?;
    let kb = compute_ki(&mb, scales);
    let kp = compute_ki(&mp, scales);
    Ok(LumpedCoefficients {
        a: piezo.density * piezo.thickness * piezo.width + beam.density * beam.thickness * beam.width,
        b: piezo.density * mp.second_moment + beam.density * mb.second_moment,
        c: kp.k1 + kb.k1,
        d: kp.k2 + kb.k2,
        e: kp.k3 + kb.k3,
        f: kp.k4 + kb.k4,
        g: kp.k5 + kb.k5,
        h: moment_arm * piezo.e13 * piezo.width,
    })
}

/// Physical description of the laminated cantilever.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laminate {
    pub beam: MaterialLayer,
    pub piezo: MaterialLayer,
    /// Beam length (m). The piezo layer covers the full length.
    pub length: f64,
    pub scales: StrainGradientScales,
    /// Representative moment arm z of the piezo coupling (m).
    pub moment_arm: f64,
}

impl Laminate {
    /// SiO2 beam with a PZT layer: 90 µm long, both layers 10 µm × 30 µm,
    /// length scales at half the beam thickness.
    pub fn reference() -> Self {
        let beam = MaterialLayer::silicon_dioxide();
        let piezo = MaterialLayer::pzt();
        Laminate {
            beam,
            piezo,
            length: 90.0e-6,
            scales: StrainGradientScales::uniform(beam.thickness / 2.0),
            moment_arm: (beam.thickness + piezo.thickness) / 2.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.beam.validate("beam")?;
        self.piezo.validate("piezo")?;
        positive("geometry.length", self.length)?;
        positive("geometry.moment_arm", self.moment_arm)?;
        self.scales.validate()
    }

    pub fn lumped(&self) -> Result<LumpedCoefficients> {
        compute_lumped(&self.beam, &self.piezo, &self.scales, self.moment_arm)
    }
}

/// Reference quantities of the nondimensionalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimScales {
    /// Beam length (m).
    pub length: f64,
    /// First natural frequency (rad/s); time is measured in units of 1/ω1.
    pub omega1: f64,
    /// Beam density (kg/m³).
    pub density: f64,
    /// Beam Young's modulus (Pa).
    pub modulus: f64,
    /// Piezo constant (C/m²). Carries its sign, so the nondimensional e13 is +1.
    pub e13: f64,
}

impl NondimScales {
    pub fn for_laminate(laminate: &Laminate, omega1: f64) -> Self {
        NondimScales {
            length: laminate.length,
            omega1,
            density: laminate.beam.density,
            modulus: laminate.beam.young_modulus,
            e13: if laminate.piezo.e13 != 0.0 { laminate.piezo.e13 } else { 1.0 },
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("scales.length", self.length)?;
        positive("scales.omega1", self.omega1)?;
        positive("scales.density", self.density)?;
        positive("scales.modulus", self.modulus)?;
        if !(self.e13 != 0.0 && self.e13.is_finite()) {
            return Err(Error::invalid("scales.e13", "must be finite and nonzero"));
        }
        Ok(())
    }

    /// Energy unit ρ L⁵ ω².
    pub fn energy(&self) -> f64 {
        self.density * self.length.powi(5) * self.omega1 * self.omega1
    }

    /// Stress unit ρ L² ω² used for elastic constants.
    pub fn stress(&self) -> f64 {
        self.density * self.length.powi(2) * self.omega1 * self.omega1
    }

    /// Voltage unit: `u = ũ · ρ L³ ω² / e13`.
    pub fn voltage(&self) -> f64 {
        self.density * self.length.powi(3) * self.omega1 * self.omega1 / self.e13
    }

    pub fn time(&self) -> f64 {
        1.0 / self.omega1
    }

    /// Converts a nondimensional feedback gain (voltage per tip rotation
    /// rate) to SI units (V·s).
    pub fn gain_to_si(&self, gain: f64) -> f64 {
        gain * self.voltage() * self.time()
    }

    /// Divisors mapping SI lumped coefficients to nondimensional ones.
    fn coefficient_units(&self) -> LumpedCoefficients {
        let (rho, l, w2) = (self.density, self.length, self.omega1 * self.omega1);
        LumpedCoefficients {
            a: rho * l.powi(2),
            b: rho * l.powi(4),
            c: rho * l.powi(8) * w2,
            d: rho * l.powi(6) * w2,
            e: rho * l.powi(6) * w2,
            f: rho * l.powi(6) * w2,
            g: rho * l.powi(4) * w2,
            h: self.e13 * l.powi(2),
        }
    }

    pub fn scale_coefficients(&self, si: &LumpedCoefficients) -> LumpedCoefficients {
        let u = self.coefficient_units();
        LumpedCoefficients {
            a: si.a / u.a,
            b: si.b / u.b,
            c: si.c / u.c,
            d: si.d / u.d,
            e: si.e / u.e,
            f: si.f / u.f,
            g: si.g / u.g,
            h: si.h / u.h,
        }
    }

    pub fn unscale_coefficients(&self, nd: &LumpedCoefficients) -> LumpedCoefficients {
        let u = self.coefficient_units();
        LumpedCoefficients {
            a: nd.a * u.a,
            b: nd.b * u.b,
            c: nd.c * u.c,
            d: nd.d * u.d,
            e: nd.e * u.e,
            f: nd.f * u.f,
            g: nd.g * u.g,
            h: nd.h * u.h,
        }
    }
}

/// Nondimensional layer data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimLayer {
    pub width: f64,
    pub thickness: f64,
    pub density: f64,
    pub second_moment: f64,
    pub young_modulus: f64,
    pub e13: f64,
}

/// Full nondimensional parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondimParams {
    pub scales: NondimScales,
    /// Always 1.
    pub length: f64,
    pub beam: NondimLayer,
    pub piezo: NondimLayer,
    pub l0: f64,
    pub l1: f64,
    pub l2: f64,
    pub moment_arm: f64,
    pub coeffs: LumpedCoefficients,
}

pub fn nondimensionalize(
    coeffs: &LumpedCoefficients,
    laminate: &Laminate,
    scales: &NondimScales,
) -> Result<NondimParams> {
    scales.validate()?;
    let l = scales.length;
    let layer = |m: &MaterialLayer| NondimLayer {
        width: m.width / l,
        thickness: m.thickness / l,
        density: m.density / scales.density,
        second_moment: m.width * m.thickness.powi(3) / 12.0 / l.powi(4),
        young_modulus: m.young_modulus / scales.modulus,
        e13: m.e13 / scales.e13,
    };
    Ok(NondimParams {
        scales: *scales,
        length: laminate.length / l,
        beam: layer(&laminate.beam),
        piezo: layer(&laminate.piezo),
        l0: laminate.scales.l0 / l,
        l1: laminate.scales.l1 / l,
        l2: laminate.scales.l2 / l,
        moment_arm: laminate.moment_arm / l,
        coeffs: scales.scale_coefficients(coeffs),
    })
}

impl NondimParams {
    pub fn position(&self, x: f64) -> f64 {
        x / self.scales.length
    }

    pub fn time(&self, t: f64) -> f64 {
        t * self.scales.omega1
    }

    pub fn voltage(&self, u: f64) -> f64 {
        u / self.scales.voltage()
    }

    /// Inverse of [`nondimensionalize`]. Passive material data that does
    /// not enter the scaling (Poisson ratios, permittivities) is taken from
    /// `template`.
    pub fn redimensionalize(&self, template: &Laminate) -> (LumpedCoefficients, Laminate) {
        let s = &self.scales;
        let l = s.length;
        let layer = |nd: &NondimLayer, t: &MaterialLayer| MaterialLayer {
            young_modulus: nd.young_modulus * s.modulus,
            poisson_ratio: t.poisson_ratio,
            density: nd.density * s.density,
            thickness: nd.thickness * l,
            width: nd.width * l,
            e13: nd.e13 * s.e13,
            permittivity_33: t.permittivity_33,
        };
        let laminate = Laminate {
            beam: layer(&self.beam, &template.beam),
            piezo: layer(&self.piezo, &template.piezo),
            length: self.length * l,
            scales: StrainGradientScales {
                l0: self.l0 * l,
                l1: self.l1 * l,
                l2: self.l2 * l,
            },
            moment_arm: self.moment_arm * l,
        };
        (s.unscale_coefficients(&self.coeffs), laminate)
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}
