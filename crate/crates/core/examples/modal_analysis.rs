//! Natural frequencies of the reference cantilever and their convergence
//! under mesh refinement.

use sgtbeam::cli_io::CantileverModel;
use sgtbeam::dynamics::eigenfrequencies;
use sgtbeam::model_params::Laminate;

fn main() -> sgtbeam::Result<()> {
    let lam = Laminate::reference();
    let model = CantileverModel::build(&lam, 10, 4)?;
    let modes = eigenfrequencies(&model.system, 5)?;
    println!("mode  omega/omega1  f (MHz)");
    for (i, w) in modes.omegas.iter().enumerate() {
        let hz = w * model.omega1_si() / (2.0 * std::f64::consts::PI);
        println!("{:>4}  {:>12.6}  {:>8.4}", i + 1, w, hz / 1e6);
    }

    let reference = CantileverModel::build(&lam, 256, 4)?.omega1_si();
    println!("\nelements  omega1 (rad/s)    rel. error vs 256");
    for n in [2, 4, 8, 16, 32, 64] {
        let w = CantileverModel::build(&lam, n, 4)?.omega1_si();
        println!("{n:>8}  {w:.9e}  {:.3e}", (w - reference) / reference);
    }
    Ok(())
}
