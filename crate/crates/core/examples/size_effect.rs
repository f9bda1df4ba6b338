//! Strain-gradient stiffening: frequencies with material length scales
//! against the classical Timoshenko beam, as the scales grow.

use sgtbeam::cli_io::CantileverModel;
use sgtbeam::dynamics::eigenfrequencies;
use sgtbeam::model_params::{Laminate, StrainGradientScales};

fn frequencies(lam: &Laminate) -> sgtbeam::Result<Vec<f64>> {
    let model = CantileverModel::build(lam, 32, 4)?;
    Ok(eigenfrequencies(&model.system, 3)?
        .omegas
        .iter()
        .map(|w| w * model.omega1_si())
        .collect())
}

fn main() -> sgtbeam::Result<()> {
    let mut lam = Laminate::reference();
    let h = lam.beam.thickness;
    lam.scales = StrainGradientScales::CLASSICAL;
    let classical = frequencies(&lam)?;
    println!("l/h    w1/w1c   w2/w2c   w3/w3c");
    for ratio in [0.0, 0.1, 0.25, 0.5, 1.0] {
        lam.scales = StrainGradientScales::uniform(ratio * h);
        let w = frequencies(&lam)?;
        println!(
            "{ratio:<5}  {:.4}   {:.4}   {:.4}",
            w[0] / classical[0],
            w[1] / classical[1],
            w[2] / classical[2]
        );
    }
    Ok(())
}
