//! Effective-gain prediction r_e = γ·g(r)·‖W‖₂ < 1 against simulation, over a
//! (β, ‖W‖) grid. The agreement depends on the operator ensemble: for normal
//! operators whose top eigenvalue carries the norm it is essentially exact,
//! for generic non-normal ones the norm is only an upper bound.
//!
//!     cargo run --release --example stability_sweep -- /tmp/sweep.csv

use fhrn::operators::OperatorFamily;
use fhrn::spectral::GridAxis;
use fhrn::sweep::{critical_norm, prediction_agreement, sweep_grid, SweepSpec};

fn main() -> fhrn::Result<()> {
    let spec = SweepSpec {
        gamma_axis: vec![1.0],
        beta_axis: GridAxis::linspace("beta", 0.1, 5.0, 21).values,
        wnorm_axis: GridAxis::linspace("w_norm", 0.0, 3.0, 21).values,
        empirical: true,
        seeds: 3,
        ..SweepSpec::default()
    };
    println!("‖W‖_crit at β = 1, r = 1.1: {:.4}", critical_norm(1.0, 1.0, spec.fixed_radius)?);

    for family in [OperatorFamily::RotatingExpansive { mu: 0.5 }, OperatorFamily::default()] {
        let grid = sweep_grid(&spec, &family)?;
        let a = prediction_agreement(&grid, 0.2);
        println!("{family:?}: {}/{} cells agree", a.matching, a.compared);
        if let Some(path) = std::env::args().nth(1) {
            if matches!(family, OperatorFamily::RotatingExpansive { .. }) {
                grid.to_csv().write_to(path.as_ref())?;
            }
        }
    }
    Ok(())
}
