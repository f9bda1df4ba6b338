//! Effect of the feedback gain on the first closed-loop mode and on the
//! energy left after a fixed horizon.

use sgtbeam::cli_io::CantileverModel;
use sgtbeam::dynamics::{closed_loop_mode, make_initial_condition, simulate, InitialCondition, IntegratorConfig};
use sgtbeam::model_params::Laminate;

fn main() -> sgtbeam::Result<()> {
    let model = CantileverModel::build(&Laminate::reference(), 10, 4)?;
    let ic = make_initial_condition(InitialCondition::StaticTipLoad { amplitude: 0.01 }, &model.system)?;
    let cfg = IntegratorConfig::average_acceleration(2.0 * std::f64::consts::PI / 800.0, 50.0);
    println!("   k_u  k_u (V*s)    lambda1              zeta1    E(50)/E(0)");
    for gain in [0.0, 0.1, 0.3, 0.6, 1.0, 2.0, 5.0] {
        let mode = closed_loop_mode(&model.system, gain, 1.0)?;
        let e = simulate(&model.system, gain, &ic, &cfg)?.energy();
        println!(
            "{gain:>6.2}  {:>9.3e}  {:>8.4} {:+.4}i  {:>6.4}  {:>10.3e}",
            model.params.scales.gain_to_si(gain) + 0.0,
            mode.eigenvalue.re,
            mode.eigenvalue.im,
            mode.damping_ratio(),
            e.last().unwrap() / e[0]
        );
    }
    Ok(())
}
