use fhrn::oja::{simulate_oja, OjaConfig};

fn main() -> fhrn::Result<()> {
    for (x, w0) in [(1.0, 0.5), (2.0, 0.1), (-1.0, 0.7), (0.5, -0.2)] {
        let trace = simulate_oja(&OjaConfig { w0, x, ..OjaConfig::default() })?;
        println!(
            "x = {x:+}, w0 = {w0:+}: w(20) = {:+.8}, y(20) = {:+.8}, max |w·x − y| = {:.2e}",
            trace.w.last().unwrap(),
            trace.y_direct.last().unwrap(),
            trace.max_error()
        );
    }
    Ok(())
}
