//! Spectrum and spectral abscissa of a dense matrix.
//!
//!     cargo run --example eigenvalues -- 0,-1,0 1,0,0 0,0,-0.5
//!
//! Each argument is one row. Without arguments a fixed 4×4 example is used.

use fhrn::eigenvalues;
use nalgebra::DMatrix;

fn main() -> fhrn::Result<()> {
    let rows: Vec<Vec<f64>> = std::env::args()
        .skip(1)
        .map(|r| r.split(',').map(|v| v.trim().parse().expect("number")).collect())
        .collect();
    let m = if rows.is_empty() {
        DMatrix::from_row_slice(4, 4, &[
            -1.0, 2.0, 0.0, 0.5,
            -2.0, -1.0, 0.3, 0.0,
            0.0, 0.1, 0.4, 1.0,
            0.2, 0.0, -1.0, 0.4,
        ])
    } else {
        let n = rows.len();
        DMatrix::from_row_iterator(n, n, rows.into_iter().flatten())
    };

    let report = eigenvalues(&m)?;
    for z in &report.eigenvalues {
        println!("{:+.10} {:+.10}i", z.re, z.im);
    }
    println!("abscissa {:+.6} -> {}", report.abscissa, if report.stable { "stable" } else { "not stable" });
    Ok(())
}
