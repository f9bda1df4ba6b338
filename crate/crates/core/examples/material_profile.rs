//! Lumped beam coefficients of the SiO2/PZT reference laminate, in SI and
//! in model units.

use sgtbeam::cli_io::CantileverModel;
use sgtbeam::model_params::{compute_ki, derive_moduli, Laminate};

fn main() -> sgtbeam::Result<()> {
    let lam = Laminate::reference();
    for (name, layer) in [("SiO2 beam", &lam.beam), ("PZT layer", &lam.piezo)] {
        let m = derive_moduli(layer)?;
        let k = compute_ki(&m, &lam.scales);
        println!("{name}");
        println!("  bulk {:.4e} Pa  shear {:.4e} Pa  ks {:.6}", m.bulk_modulus, m.shear_modulus, m.shear_coefficient);
        println!("  k1..k5 = {:.4e} {:.4e} {:.4e} {:.4e} {:.4e}", k.k1, k.k2, k.k3, k.k4, k.k5);
    }

    let si = lam.lumped()?;
    println!("\nSI coefficients: {si:#?}");

    let model = CantileverModel::build(&lam, 10, 4)?;
    println!("omega1 = {:.6e} rad/s ({:.4} MHz)", model.omega1_si(), model.omega1_si() / (2e6 * std::f64::consts::PI));
    println!("model-unit coefficients: {:#?}", model.coefficients());
    Ok(())
}
