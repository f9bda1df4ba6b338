//! Finite-element model of a strain-gradient Timoshenko micro-cantilever
//! carrying a laminated piezoelectric actuator, with tip-rotation-rate
//! voltage feedback and Lyapunov energy diagnostics.
//!
//! The pipeline runs bottom-up through the modules:
//!
//! - [`model_params`]: layer data to lumped coefficients and nondimensional units
//! - [`fem_element`]: Hermite element kernels
//! - [`assembly`]: global matrices and the clamped end
//! - [`dynamics`]: modal analysis and Newmark time stepping
//! - [`control_diag`]: feedback law and energy balance
//! - [`cli_io`]: configuration, orchestration and CSV output

pub mod assembly;
pub mod control_diag;
pub mod dynamics;
pub mod error;
pub mod fem_element;
pub mod model_params;
pub mod cli_io;

pub use error::{Error, Result};
