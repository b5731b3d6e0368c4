//! Small dense helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};

/// Power-iteration budget: stops after this many steps or on relative change below
/// [`POWER_TOL`], whichever comes first.
pub const POWER_MAX_ITERS: usize = 200;
pub const POWER_TOL: f64 = 1e-10;

/// Spectral norm ‖m‖₂ by power iteration on mᵀm.
pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    spectral_norm_with(m, POWER_MAX_ITERS, POWER_TOL)
}

pub fn spectral_norm_with(m: &DMatrix<f64>, max_iters: usize, tol: f64) -> f64 {
    let n = m.ncols();
    if n == 0 || m.nrows() == 0 {
        return 0.0;
    }
    let gram = m.transpose() * m;
    // Irregular start so that structured matrices do not start in an invariant subspace.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.37 * (i as f64 + 1.0).sqrt());
    v /= v.norm();
    let mut estimate = 0.0;
    for _ in 0..max_iters {
        let w = &gram * &v;
        let lambda = w.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = w / lambda;
        let converged = (lambda - estimate).abs() <= tol * lambda;
        estimate = lambda;
        if converged {
            break;
        }
    }
    estimate.sqrt()
}

/// Exact spectral norm from the singular values.
pub fn spectral_norm_exact(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

pub fn antisymmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

pub fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub(crate) fn is_finite_matrix(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

pub(crate) fn is_finite_vector(v: &DVector<f64>) -> bool {
    v.iter().all(|x| x.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_matches_svd() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.5, 0.3, 1.5, -2.0, 1.0, 0.0, 0.7]);
        let exact = spectral_norm_exact(&m);
        assert!((spectral_norm(&m) - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn rotation_has_unit_norm() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
        assert!((spectral_norm(&m) - 1.0).abs() < 1e-12);
    }
}
