//! Trajectories of the autonomous flow with a rotational reentry operator
//! settle on the circle of radius sqrt(θ² − 1/κ), whatever the starting radius.

use fhrn::operators::rotation_generator;
use fhrn::{ring_radius, simulate, IntegratorConfig, ModelParams, ReentryFlow, ReentryOperator, StateVector};

fn main() -> fhrn::Result<()> {
    let params = ModelParams::default();
    let op = ReentryOperator::new(rotation_generator(2))?;
    let flow = ReentryFlow::autonomous(op, params)?;
    let r_star = ring_radius(params.kappa, params.theta).expect("κθ² > 1");

    println!("r★ = {r_star:.6}");
    for r0 in [0.05, 0.2, 0.5, 2.0, 3.0] {
        let traj = simulate(flow.field(), &StateVector::from_slice(&[r0, 0.0]), &IntegratorConfig::rk4(0.01, 50.0))?;
        let last = traj.last().unwrap().as_slice();
        println!(
            "r0 = {r0:<4}  r(50) = {:.9}  phase = {:+.3} rad",
            traj.final_radius().unwrap(),
            last[1].atan2(last[0])
        );
    }
    Ok(())
}
