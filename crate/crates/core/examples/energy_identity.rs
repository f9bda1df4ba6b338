//! The energy balance dE/dt = -H k_u alpha_dot(L)^2 / 2 checked on sampled
//! trajectories at shrinking time steps.

use sgtbeam::cli_io::CantileverModel;
use sgtbeam::control_diag::{verify_decay_identity, ControllerConfig};
use sgtbeam::dynamics::{closed_loop_mode, make_initial_condition, simulate, InitialCondition, IntegratorConfig};
use sgtbeam::model_params::Laminate;

fn main() -> sgtbeam::Result<()> {
    let model = CantileverModel::build(&Laminate::reference(), 10, 4)?;
    let controller = ControllerConfig::closed_loop(0.6);
    let starts = [
        ("closed-loop mode 1", closed_loop_mode(&model.system, 0.6, 1.0)?.state(0.01)),
        (
            "static tip load",
            make_initial_condition(InitialCondition::StaticTipLoad { amplitude: 0.01 }, &model.system)?,
        ),
    ];
    for (name, ic) in starts {
        println!("{name}");
        let mut previous: Option<f64> = None;
        for div in [200.0, 400.0, 800.0, 1600.0] {
            let cfg = IntegratorConfig::average_acceleration(2.0 * std::f64::consts::PI / div, 50.0);
            let traj = simulate(&model.system, 0.6, &ic, &cfg)?;
            let r = verify_decay_identity(&traj, model.coefficients(), &controller)?;
            match previous {
                Some(p) => println!("  dt = T1/{div:<5} residual {r:.3e}  ratio {:.2}", p / r),
                None => println!("  dt = T1/{div:<5} residual {r:.3e}"),
            }
            previous = Some(r);
        }
    }
    Ok(())
}
