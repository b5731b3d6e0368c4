//! Spectral abscissa of the Jacobian over the (y₁, y₂) plane. The zero
//! level set is where linear stability changes; for a rotational operator it
//! sits on the ring attractor.
//!
//!     cargo run --release --example spectral_map -- /tmp/specmap.csv

use fhrn::operators::rotation_generator;
use fhrn::{ring_radius, stability_map, ModelParams, ReentryOperator, StatePlane};

fn main() -> fhrn::Result<()> {
    let params = ModelParams::default();
    let op = ReentryOperator::new(rotation_generator(2))?;
    let plane = StatePlane::new([-1.5, 1.5, -1.5, 1.5], 201, 201);
    let grid = stability_map(&plane, &op, &params)?;

    let stable = grid.cells.iter().filter(|c| c.predicted_stable).count();
    println!("{stable} of {} cells linearly stable", grid.cells.len());
    for (k, line) in grid.contours.iter().enumerate() {
        let radii: Vec<f64> = line.iter().map(|p| p[0].hypot(p[1])).collect();
        let mean = radii.iter().sum::<f64>() / radii.len() as f64;
        println!("contour {k}: {} points, mean radius {mean:.5}", line.len());
    }
    println!("ring radius {:.5}", ring_radius(params.kappa, params.theta).unwrap());

    if let Some(path) = std::env::args().nth(1) {
        grid.to_csv().write_to(path.as_ref())?;
        println!("wrote {path}");
    }
    Ok(())
}
