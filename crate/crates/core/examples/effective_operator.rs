//! Linearizing a nonlinear block mapping H around the external input gives the
//! effective reentry operator J_H(x_ex)·W. The first-order remainder shrinks
//! quadratically with the reentry gain.

use fhrn::operators::gaussian_matrix;
use fhrn::rng::stream;
use fhrn::{default_fd_step, effective_operator, taylor_remainder, BlockMapping, ModelParams, ReentryOperator, StateVector};
use nalgebra::DVector;

fn main() -> fhrn::Result<()> {
    let mut rng = stream(1, "effective-operator", 0);
    let d = 3;
    let h = BlockMapping::SaturatingAffine {
        m: gaussian_matrix(d, &mut rng) * 0.7,
        b: DVector::from_column_slice(&[0.1, -0.2, 0.05]),
    };
    let w = gaussian_matrix(d, &mut rng);
    let x_ex = DVector::from_column_slice(&[0.3, -0.1, 0.4]);
    let step = default_fd_step(&x_ex);

    let eff = effective_operator(&h, &x_ex, &w, step)?;
    println!("W_eff = {:.4}", eff.matrix());

    let op = ReentryOperator::new(w)?;
    let y = StateVector::from_slice(&[0.6, 0.8, 0.2]);
    let mut prev = None;
    for gamma in [0.4, 0.2, 0.1, 0.05, 0.025] {
        let params = ModelParams { gamma, ..ModelParams::default() };
        let r = taylor_remainder(&h, &x_ex, &y, &op, &params, step)?;
        match prev {
            Some(p) => println!("γ = {gamma:<6} remainder {r:.3e}  ratio {:.2}", p / r),
            None => println!("γ = {gamma:<6} remainder {r:.3e}"),
        }
        prev = Some(r);
    }
    Ok(())
}
