//! The discrete network: each step feeds the gated previous output back into
//! the block input, reads out through H plus the fast-weight trace, then
//! updates the trace with a decaying Hebbian term.

use fhrn::operators::rotation_generator;
use fhrn::{discrete_step, BlockMapping, FastWeightTrace, ModelParams, ReentryOperator, StateVector};
use nalgebra::{DMatrix, DVector};

fn main() -> fhrn::Result<()> {
    let d = 2;
    let params = ModelParams { gamma: 0.5, beta: 0.5, lambda_a: 2.0, ..ModelParams::default() };
    let op = ReentryOperator::new(rotation_generator(d))?;
    let h = BlockMapping::SaturatingAffine { m: DMatrix::identity(d, d), b: DVector::zeros(d) };
    let x_ex = DVector::from_column_slice(&[0.8, 0.0]);

    let mut y = StateVector::from_slice(&[1.0, 0.0]);
    let mut trace = FastWeightTrace::zeros(d);
    for step in 1..=40 {
        let (next_y, next_trace) = discrete_step(&x_ex, &y, &trace, &h, &op, &params, 0.1)?;
        y = next_y;
        trace = next_trace;
        if step % 5 == 0 {
            println!(
                "step {step:>2}: y = [{:+.5}, {:+.5}]  ‖y‖ = {:.5}  ‖A‖ = {:.5}",
                y.as_slice()[0],
                y.as_slice()[1],
                y.radius(),
                trace.matrix().norm()
            );
        }
    }
    Ok(())
}
