//! Mass, stiffness and coupling of a single Hermite element, and the two
//! strain-free motions its stiffness must ignore.

use nalgebra::SVector;
use sgtbeam::fem_element::{ElementMatrices, DEFAULT_QUADRATURE_ORDER};
use sgtbeam::model_params::{Laminate, NondimScales};

fn main() -> sgtbeam::Result<()> {
    let lam = Laminate::reference();
    let coeffs = NondimScales::for_laminate(&lam, 1.0e7).scale_coefficients(&lam.lumped()?);
    let le = 0.1;
    let e = ElementMatrices::compute(le, &coeffs, DEFAULT_QUADRATURE_ORDER)?;

    println!("element length {le}");
    println!("mass{:.3e}", e.mass);
    println!("stiffness{:.3e}", e.stiffness);
    println!("coupling{:.3e}", e.coupling.transpose());

    // DOF order per node: v, v_x, alpha, alpha_x
    let translation = SVector::<f64, 8>::from_column_slice(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    let rotation = SVector::<f64, 8>::from_column_slice(&[0.0, 1.0, 1.0, 0.0, le, 1.0, 1.0, 0.0]);
    println!("|K t| = {:.2e}", (e.stiffness * translation).norm());
    println!("|K r| = {:.2e}", (e.stiffness * rotation).norm());
    println!("translational mass = {:.6e} (A * le = {:.6e})", translation.dot(&(e.mass * translation)), coeffs.a * le);
    Ok(())
}
