//! Reentry operator generators.
//!
//! Random draws take an explicit generator so that callers control the
//! seed stream.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{antisymmetric_part, spectral_norm_exact, symmetric_part};

/// 90° rotation generator in the (y₁, y₂) plane, zero elsewhere.
pub fn rotation_generator(dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    if dim >= 2 {
        m[(0, 1)] = -1.0;
        m[(1, 0)] = 1.0;
    }
    m
}

pub fn gaussian_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |_, _| rng.sample(StandardNormal))
}

pub fn random_antisymmetric<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    antisymmetric_part(&gaussian_matrix(dim, rng))
}

pub fn random_symmetric<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    symmetric_part(&gaussian_matrix(dim, rng))
}

/// Random orthogonal matrix (QR of a Gaussian matrix with sign-fixed R).
pub fn random_orthogonal<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let qr = gaussian_matrix(dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Rescales `m` so that ‖m‖₂ = `target`. A zero matrix stays zero.
pub fn scale_to_norm(m: &DMatrix<f64>, target: f64) -> DMatrix<f64> {
    let n = spectral_norm_exact(m);
    if n == 0.0 {
        m.clone()
    } else {
        m * (target / n)
    }
}

/// Rule that draws a reentry matrix with a prescribed spectral norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorFamily {
    /// `Q_a + mu·Q_s` with Gaussian antisymmetric and symmetric parts.
    Mixed { mu: f64 },
    /// Symmetric positive definite, eigenvalues in `[0.1, 1]·norm` with the top one at `norm`.
    SymmetricPositive,
    /// Normal operator `Oᵀ (1 ⊕ s ⊕ mu·R ⊕ …) O`: one expanding direction carrying the
    /// norm, a second real direction `s ∈ [-1, 1]`, and rotation blocks of magnitude `mu`.
    RotatingExpansive { mu: f64 },
    /// Gaussian antisymmetric (purely rotational).
    Antisymmetric,
}

impl Default for OperatorFamily {
    fn default() -> Self {
        OperatorFamily::Mixed { mu: 0.5 }
    }
}

impl OperatorFamily {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidArgument("operator dimension must be ≥ 1".into()));
        }
        match *self {
            OperatorFamily::Mixed { mu } if !mu.is_finite() => {
                Err(Error::InvalidArgument("mixing weight must be finite".into()))
            }
            OperatorFamily::RotatingExpansive { mu } if !(0.0..=1.0).contains(&mu) => Err(
                Error::InvalidArgument("rotation magnitude must lie in [0, 1]".into()),
            ),
            OperatorFamily::RotatingExpansive { .. } if dim < 3 => Err(Error::InvalidArgument(
                "rotating-expansive family needs dim ≥ 3".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Draws one matrix with ‖W‖₂ = `w_norm`.
    pub fn sample<R: Rng + ?Sized>(&self, dim: usize, w_norm: f64, rng: &mut R) -> DMatrix<f64> {
        let unit = match *self {
            OperatorFamily::Mixed { mu } => {
                random_antisymmetric(dim, rng) + random_symmetric(dim, rng) * mu
            }
            OperatorFamily::Antisymmetric => random_antisymmetric(dim, rng),
            OperatorFamily::SymmetricPositive => {
                let o = random_orthogonal(dim, rng);
                let mut diag = DMatrix::zeros(dim, dim);
                diag[(0, 0)] = 1.0;
                for i in 1..dim {
                    diag[(i, i)] = rng.gen_range(0.1..1.0);
                }
                &o * diag * o.transpose()
            }
            OperatorFamily::RotatingExpansive { mu } => {
                let o = random_orthogonal(dim, rng);
                let mut core = DMatrix::zeros(dim, dim);
                core[(0, 0)] = 1.0;
                let mut i = 1;
                if (dim - 1) % 2 == 1 {
                    core[(1, 1)] = rng.gen_range(-1.0..1.0);
                    i = 2;
                }
                while i + 1 < dim {
                    core[(i, i + 1)] = -mu;
                    core[(i + 1, i)] = mu;
                    i += 2;
                }
                &o * core * o.transpose()
            }
        };
        scale_to_norm(&unit, w_norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn families_hit_requested_norm() {
        let mut rng = stream(1, "test", 0);
        for fam in [
            OperatorFamily::Mixed { mu: 0.5 },
            OperatorFamily::SymmetricPositive,
            OperatorFamily::RotatingExpansive { mu: 0.5 },
            OperatorFamily::Antisymmetric,
        ] {
            for dim in [3, 4, 5] {
                let w = fam.sample(dim, 1.7, &mut rng);
                assert!((spectral_norm_exact(&w) - 1.7).abs() < 1e-10, "{fam:?} dim {dim}");
            }
        }
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = stream(2, "test", 0);
        let q = random_orthogonal(5, &mut rng);
        let err = (q.transpose() * &q - DMatrix::identity(5, 5)).abs().max();
        assert!(err < 1e-12);
    }

    #[test]
    fn rotating_expansive_needs_three_dims() {
        assert!(OperatorFamily::RotatingExpansive { mu: 0.5 }.validate(2).is_err());
        assert!(OperatorFamily::RotatingExpansive { mu: 0.5 }.validate(4).is_ok());
    }
}
