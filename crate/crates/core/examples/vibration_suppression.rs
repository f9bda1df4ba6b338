//! Release from a static tip load, with and without tip-rotation-rate
//! feedback.

use sgtbeam::cli_io::CantileverModel;
use sgtbeam::dynamics::{make_initial_condition, simulate, InitialCondition, IntegratorConfig};
use sgtbeam::model_params::Laminate;

fn main() -> sgtbeam::Result<()> {
    let model = CantileverModel::build(&Laminate::reference(), 10, 4)?;
    let ic = make_initial_condition(InitialCondition::StaticTipLoad { amplitude: 0.01 }, &model.system)?;
    let cfg = IntegratorConfig::average_acceleration(2.0 * std::f64::consts::PI / 200.0, 50.0);

    let open = simulate(&model.system, 0.0, &ic, &cfg)?;
    let closed = simulate(&model.system, 0.6, &ic, &cfg)?;
    println!("    t   v_tip open   v_tip closed        u   E closed/E0");
    let e0 = closed.energy()[0];
    for i in (0..closed.len()).step_by(100) {
        println!(
            "{:>5.1}  {:>11.4e}  {:>13.4e}  {:>8.4}  {:>10.3e}",
            closed.times[i],
            open.tip_deflection[i],
            closed.tip_deflection[i],
            closed.voltage[i],
            (closed.kinetic[i] + closed.potential[i]) / e0
        );
    }
    let e = closed.energy();
    println!("E(50)/E(0): open {:.6}, closed {:.3e}", open.energy().last().unwrap() / e0, e.last().unwrap() / e0);
    Ok(())
}
