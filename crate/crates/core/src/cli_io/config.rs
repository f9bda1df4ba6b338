//! Line-oriented `section.key = value` run configuration.
//!
//! ```text
//! # comments start with '#'
//! beam.poisson_ratio = 0.17
//! controller.k_u = 0.6
//! run.mode = simulate
//! sweep.gains = 0, 0.1, 0.3, 0.6
//! ```
//!
//! Material and geometry values are SI; integrator times and the feedback
//! gain are nondimensional (time unit 1/ω1). Keys that are not given take
//! the SiO2/PZT reference profile and are listed in the run summary.

use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::control_diag::ControllerConfig;
use crate::dynamics::{InitialCondition, IntegratorConfig};
use crate::error::{Error, Result};
use crate::fem_element::DEFAULT_QUADRATURE_ORDER;
use crate::model_params::{Laminate, MaterialLayer, NondimScales};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Modal,
    Sweep,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "modal" => Ok(Mode::Modal),
            "sweep" => Ok(Mode::Sweep),
            other => Err(format!("unknown mode `{other}` (simulate|modal|sweep)")),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Simulate => "simulate",
            Mode::Modal => "modal",
            Mode::Sweep => "sweep",
        })
    }
}

/// Keys that were filled from defaults. Ignored by equality.
#[derive(Debug, Clone, Default)]
pub struct Provenance(pub Vec<String>);

impl PartialEq for Provenance {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub laminate: Laminate,
    pub n_elements: usize,
    pub quadrature_order: usize,
    pub controller: ControllerConfig,
    pub integrator: IntegratorConfig,
    pub initial: InitialCondition,
    /// Number of modes reported by `modal` (and in every summary).
    pub n_modes: usize,
    pub sweep_gains: Vec<f64>,
    pub mode: Mode,
    pub output_dir: PathBuf,
    pub debug_energy: bool,
    pub defaulted: Provenance,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            laminate: Laminate::reference(),
            n_elements: 10,
            quadrature_order: DEFAULT_QUADRATURE_ORDER,
            controller: ControllerConfig::closed_loop(ControllerConfig::REFERENCE_GAIN),
            integrator: IntegratorConfig::average_acceleration(
                2.0 * std::f64::consts::PI / 200.0,
                50.0,
            ),
            initial: InitialCondition::StaticTipLoad { amplitude: 0.01 },
            n_modes: 5,
            sweep_gains: vec![0.0, 0.1, 0.3, 0.6],
            mode: Mode::Simulate,
            output_dir: PathBuf::from("sgtbeam_out"),
            debug_energy: false,
            defaulted: Provenance::default(),
        }
    }
}

/// Every recognised key, in the order written by [`RunConfig::to_text`].
pub const KEYS: &[&str] = &[
    "beam.young_modulus",
    "beam.poisson_ratio",
    "beam.density",
    "beam.thickness",
    "beam.width",
    "beam.e13",
    "beam.permittivity_33",
    "piezo.young_modulus",
    "piezo.poisson_ratio",
    "piezo.density",
    "piezo.thickness",
    "piezo.width",
    "piezo.e13",
    "piezo.permittivity_33",
    "geometry.length",
    "geometry.moment_arm",
    "scales.l0",
    "scales.l1",
    "scales.l2",
    "mesh.n_elements",
    "mesh.quadrature_order",
    "controller.k_u",
    "controller.enabled",
    "integrator.dt",
    "integrator.t_end",
    "integrator.beta",
    "integrator.gamma",
    "integrator.stride",
    "initial.kind",
    "initial.amplitude",
    "initial.mode",
    "modal.count",
    "sweep.gains",
    "run.mode",
    "run.debug_energy",
    "output.dir",
];

fn layer_field<'a>(layer: &'a mut MaterialLayer, field: &str) -> Option<&'a mut f64> {
    Some(match field {
        "young_modulus" => &mut layer.young_modulus,
        "poisson_ratio" => &mut layer.poisson_ratio,
        "density" => &mut layer.density,
        "thickness" => &mut layer.thickness,
        "width" => &mut layer.width,
        "e13" => &mut layer.e13,
        "permittivity_33" => &mut layer.permittivity_33,
        _ => return None,
    })
}

fn parse_value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::ConfigParse {
        line,
        message: format!("`{key}`: cannot parse `{raw}`"),
    })
}

/// Initial-condition fields are collected first because the kind decides
/// which of them apply.
#[derive(Default)]
struct InitialFields {
    kind: Option<String>,
    amplitude: Option<f64>,
    mode: Option<usize>,
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: Vec<&str> = Vec::new();
    let mut initial = InitialFields::default();
    let mut moment_arm_set = false;
    let mut scales_set = [false; 3];

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigParse {
            line,
            message: format!("expected `section.key = value`, got `{content}`"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| Error::ConfigParse {
            line,
            message: format!("unknown key `{key}`"),
        })?;
        if seen.contains(known) {
            return Err(Error::ConfigParse {
                line,
                message: format!("duplicate key `{key}`"),
            });
        }
        seen.push(known);
        if value.is_empty() {
            return Err(Error::ConfigParse {
                line,
                message: format!("`{key}` has no value"),
            });
        }

        let (section, field) = key.split_once('.').expect("known keys are dotted");
        match section {
            "beam" | "piezo" => {
                let layer = if section == "beam" {
                    &mut cfg.laminate.beam
                } else {
                    &mut cfg.laminate.piezo
                };
                let slot = layer_field(layer, field).expect("known layer field");
                *slot = parse_value(line, key, value)?;
            }
            "geometry" => match field {
                "length" => cfg.laminate.length = parse_value(line, key, value)?,
                _ => {
                    cfg.laminate.moment_arm = parse_value(line, key, value)?;
                    moment_arm_set = true;
                }
            },
            "scales" => {
                let v = parse_value(line, key, value)?;
                match field {
                    "l0" => (cfg.laminate.scales.l0, scales_set[0]) = (v, true),
                    "l1" => (cfg.laminate.scales.l1, scales_set[1]) = (v, true),
                    _ => (cfg.laminate.scales.l2, scales_set[2]) = (v, true),
                }
            }
            "mesh" => match field {
                "n_elements" => cfg.n_elements = parse_value(line, key, value)?,
                _ => cfg.quadrature_order = parse_value(line, key, value)?,
            },
            "controller" => match field {
                "k_u" => cfg.controller.gain = parse_value(line, key, value)?,
                _ => cfg.controller.enabled = parse_value(line, key, value)?,
            },
            "integrator" => match field {
                "dt" => cfg.integrator.dt = parse_value(line, key, value)?,
                "t_end" => cfg.integrator.t_end = parse_value(line, key, value)?,
                "beta" => cfg.integrator.beta = parse_value(line, key, value)?,
                "gamma" => cfg.integrator.gamma = parse_value(line, key, value)?,
                _ => cfg.integrator.stride = parse_value(line, key, value)?,
            },
            "initial" => match field {
                "kind" => initial.kind = Some(value.to_string()),
                "amplitude" => initial.amplitude = Some(parse_value(line, key, value)?),
                _ => initial.mode = Some(parse_value(line, key, value)?),
            },
            "modal" => cfg.n_modes = parse_value(line, key, value)?,
            "sweep" => {
                cfg.sweep_gains = value
                    .split(',')
                    .map(|g| parse_value(line, key, g.trim()))
                    .collect::<Result<_>>()?;
            }
            "run" => match field {
                "mode" => {
                    cfg.mode = value.parse().map_err(|message| Error::ConfigParse { line, message })?
                }
                _ => cfg.debug_energy = parse_value(line, key, value)?,
            },
            _ => cfg.output_dir = PathBuf::from(value),
        }
    }

    // Defaults tied to other inputs follow those inputs.
    let beam_t = cfg.laminate.beam.thickness;
    if !moment_arm_set {
        cfg.laminate.moment_arm = 0.5 * (beam_t + cfg.laminate.piezo.thickness);
    }
    for (set, l) in scales_set.iter().zip([
        &mut cfg.laminate.scales.l0,
        &mut cfg.laminate.scales.l1,
        &mut cfg.laminate.scales.l2,
    ]) {
        if !set {
            *l = 0.5 * beam_t;
        }
    }
    cfg.initial = build_initial(&initial, cfg.initial)?;
    cfg.defaulted = Provenance(
        KEYS.iter()
            .filter(|k| !seen.contains(k))
            .map(|k| k.to_string())
            .collect(),
    );
    cfg.validate()?;
    Ok(cfg)
}

fn build_initial(fields: &InitialFields, default: InitialCondition) -> Result<InitialCondition> {
    let amplitude = fields.amplitude.unwrap_or(match default {
        InitialCondition::StaticTipLoad { amplitude } | InitialCondition::Eigenmode { amplitude, .. } => {
            amplitude
        }
        InitialCondition::Zero => 0.01,
    });
    let kind = fields.kind.as_deref().unwrap_or("static_tip_load");
    match kind {
        "zero" => Ok(InitialCondition::Zero),
        "static_tip_load" => Ok(InitialCondition::StaticTipLoad { amplitude }),
        "eigenmode" => Ok(InitialCondition::Eigenmode {
            index: fields.mode.unwrap_or(1),
            amplitude,
        }),
        other => Err(Error::ConfigValue {
            key: "initial.kind".into(),
            message: format!("unknown kind `{other}` (zero|static_tip_load|eigenmode)"),
        }),
    }
}

fn as_config_error(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::ConfigValue {
            key: name,
            message: reason,
        },
        other => other,
    }
}

impl RunConfig {
    /// Re-checks every module-level invariant.
    pub fn validate(&self) -> Result<()> {
        self.laminate.validate().map_err(as_config_error)?;
        let value_err = |key: &str, message: String| Error::ConfigValue {
            key: key.into(),
            message,
        };
        if self.n_elements == 0 {
            return Err(value_err("mesh.n_elements", "must be >= 1".into()));
        }
        if self.quadrature_order == 0 {
            return Err(value_err("mesh.quadrature_order", "must be >= 1".into()));
        }
        if self.n_modes == 0 {
            return Err(value_err("modal.count", "must be >= 1".into()));
        }
        self.integrator.validate().map_err(as_config_error)?;
        let h = self.nondim_coupling()?;
        self.controller.validate(h)?;
        if self.mode == Mode::Sweep {
            if self.sweep_gains.is_empty() {
                return Err(value_err("sweep.gains", "needs at least one gain".into()));
            }
            for &g in &self.sweep_gains {
                ControllerConfig::closed_loop(g)
                    .validate(h)
                    .map_err(|e| value_err("sweep.gains", e.to_string()))?;
            }
        }
        match self.initial {
            InitialCondition::Zero => {}
            InitialCondition::StaticTipLoad { amplitude } => {
                if !amplitude.is_finite() {
                    return Err(value_err("initial.amplitude", "must be finite".into()));
                }
            }
            InitialCondition::Eigenmode { index, amplitude } => {
                if index == 0 {
                    return Err(value_err("initial.mode", "mode indices start at 1".into()));
                }
                if !amplitude.is_finite() {
                    return Err(value_err("initial.amplitude", "must be finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Nondimensional coupling H̃; its sign is what the feedback check uses.
    pub fn nondim_coupling(&self) -> Result<f64> {
        let si = self.laminate.lumped().map_err(as_config_error)?;
        Ok(NondimScales::for_laminate(&self.laminate, 1.0)
            .scale_coefficients(&si)
            .h)
    }

    /// Serializes every key. Parsing the result yields an equal config.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let lam = &self.laminate;
        for (name, layer) in [("beam", &lam.beam), ("piezo", &lam.piezo)] {
            for (field, v) in [
                ("young_modulus", layer.young_modulus),
                ("poisson_ratio", layer.poisson_ratio),
                ("density", layer.density),
                ("thickness", layer.thickness),
                ("width", layer.width),
                ("e13", layer.e13),
                ("permittivity_33", layer.permittivity_33),
            ] {
                let _ = writeln!(out, "{name}.{field} = {v:?}");
            }
        }
        let _ = writeln!(out, "geometry.length = {:?}", lam.length);
        let _ = writeln!(out, "geometry.moment_arm = {:?}", lam.moment_arm);
        let _ = writeln!(out, "scales.l0 = {:?}", lam.scales.l0);
        let _ = writeln!(out, "scales.l1 = {:?}", lam.scales.l1);
        let _ = writeln!(out, "scales.l2 = {:?}", lam.scales.l2);
        let _ = writeln!(out, "mesh.n_elements = {}", self.n_elements);
        let _ = writeln!(out, "mesh.quadrature_order = {}", self.quadrature_order);
        let _ = writeln!(out, "controller.k_u = {:?}", self.controller.gain);
        let _ = writeln!(out, "controller.enabled = {}", self.controller.enabled);
        let i = &self.integrator;
        let _ = writeln!(out, "integrator.dt = {:?}", i.dt);
        let _ = writeln!(out, "integrator.t_end = {:?}", i.t_end);
        let _ = writeln!(out, "integrator.beta = {:?}", i.beta);
        let _ = writeln!(out, "integrator.gamma = {:?}", i.gamma);
        let _ = writeln!(out, "integrator.stride = {}", i.stride);
        match self.initial {
            InitialCondition::Zero => {
                let _ = writeln!(out, "initial.kind = zero");
            }
            InitialCondition::StaticTipLoad { amplitude } => {
                let _ = writeln!(out, "initial.kind = static_tip_load");
                let _ = writeln!(out, "initial.amplitude = {amplitude:?}");
            }
            InitialCondition::Eigenmode { index, amplitude } => {
                let _ = writeln!(out, "initial.kind = eigenmode");
                let _ = writeln!(out, "initial.amplitude = {amplitude:?}");
                let _ = writeln!(out, "initial.mode = {index}");
            }
        }
        let _ = writeln!(out, "modal.count = {}", self.n_modes);
        let gains: Vec<String> = self.sweep_gains.iter().map(|g| format!("{g:?}")).collect();
        let _ = writeln!(out, "sweep.gains = {}", gains.join(", "));
        let _ = writeln!(out, "run.mode = {}", self.mode);
        let _ = writeln!(out, "run.debug_energy = {}", self.debug_energy);
        let _ = writeln!(out, "output.dir = {}", self.output_dir.display());
        out
    }
}
