//! Input-to-state certificate for the driven network with a Hebbian fast-weight
//! trace. Constants are fitted on a few calibration runs and then checked on
//! fresh seeds.

use fhrn::lyapunov::{fit_iss_constants, simulate_driven, DrivenRun};
use fhrn::operators::{random_antisymmetric, scale_to_norm};
use fhrn::rng::stream;
use fhrn::{DriveSpec, DrivenFlow, HebbRule, IntegratorConfig, ModelParams, ReentryOperator, StateVector};

fn run(seed: u64) -> fhrn::Result<DrivenRun> {
    let d = 3;
    let mut rng = stream(seed, "iss-example", 0);
    let op = ReentryOperator::new(scale_to_norm(&random_antisymmetric(d, &mut rng), 0.5))?;
    let drive = DriveSpec::random_ball(d, 5.0, 10, 1.0, &mut rng);
    let params = ModelParams { kappa: 5.0, ..ModelParams::default() };
    let flow = DrivenFlow::new(op, params, drive, HebbRule::OuterProduct)?;
    simulate_driven(&flow, &StateVector::from_slice(&[1.2, 0.0, 0.3]), &IntegratorConfig::rk4(0.01, 50.0))
}

fn main() -> fhrn::Result<()> {
    let calibration: Vec<DrivenRun> = (100..105).map(run).collect::<fhrn::Result<_>>()?;
    let mut k = fit_iss_constants(&calibration, 1.0)?;
    println!("fitted  c = {}, c_A = {:.4}, c_x = {:.4}", k.c_contract, k.c_a, k.c_x);
    k.c_a *= 2.0;
    k.c_x *= 2.0;

    for seed in 0..5 {
        let report = run(seed)?.certify(&k)?;
        println!(
            "seed {seed}: sup‖y‖ = {:.4}, certified = {}, violations = {}",
            report.sup_norm,
            report.certified,
            report.violations.len()
        );
    }
    Ok(())
}
