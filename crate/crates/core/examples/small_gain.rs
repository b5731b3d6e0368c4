//! Small-gain test: is the feedback path ‖γW‖ beaten by leak plus homeostatic
//! dissipation? On the ring itself the tangential direction is neutral, so the
//! right-hand side is 0 and the test can only hold off the ring.

use fhrn::operators::rotation_generator;
use fhrn::{ring_radius, small_gain_check, ModelParams, ReentryOperator, StateVector};

fn main() -> fhrn::Result<()> {
    let op = ReentryOperator::new(rotation_generator(2))?;
    let r_star = ring_radius(10.0, 1.0).unwrap();
    for r in [r_star, 1.1, 1.3] {
        println!("‖y‖ = {r:.4}");
        for gamma in [0.5, 2.0, 8.0] {
            let params = ModelParams { gamma, ..ModelParams::default() };
            let sg = small_gain_check(&StateVector::from_slice(&[r, 0.0]), &op, &params)?;
            println!("  γ = {gamma:<4} lhs {:.4}  rhs {:.4}  margin {:+.4}  holds {}", sg.lhs, sg.rhs, sg.margin, sg.holds);
        }
    }
    Ok(())
}
