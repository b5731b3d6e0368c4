//! V(y) = ¼(‖y‖² − 1)² along a trajectory of the undriven flow. Outside the
//! unit shell the rate is negative. The ring sits slightly inside the shell
//! (r★² = 1 − 1/κ), so on the last stretch V creeps up to ¼κ⁻².

use fhrn::lyapunov::{lyapunov_rate, lyapunov_value};
use fhrn::operators::rotation_generator;
use fhrn::{simulate, IntegratorConfig, ModelParams, ReentryFlow, ReentryOperator, StateVector};

fn main() -> fhrn::Result<()> {
    let params = ModelParams { kappa: 5.0, ..ModelParams::default() };
    let flow = ReentryFlow::autonomous(ReentryOperator::new(rotation_generator(3))?, params)?;

    let traj = simulate(flow.field(), &StateVector::from_slice(&[2.0, 1.0, -1.0]), &IntegratorConfig::rk4(1e-3, 3.0))?;
    println!("{:>6} {:>10} {:>14} {:>14}", "t", "‖y‖", "V", "dV/dt");
    for (t, y) in traj.times().iter().zip(traj.states()).step_by(250) {
        let rate = lyapunov_rate(y, &flow.eval(y)?);
        println!("{t:>6.2} {:>10.6} {:>14.6e} {:>14.6e}", y.radius(), lyapunov_value(y), rate);
    }
    println!("¼κ⁻² = {:.6e}", 0.25 / (params.kappa * params.kappa));
    Ok(())
}
