//! Parameter sweeps over reentry gain γ, gain steepness β and operator norm ‖W‖₂.
//!
//! At a fixed activity radius `r` the linearized feedback is `γ·g(r)·W`, so
//! the predicted boundary is the effective gain `r_e = γ·g(r)·‖W‖₂ = 1`, or
//! equivalently `‖W‖_crit = 1 / (γ·g(r))`. Empirical cells integrate the
//! frozen-gain flow `ẏ = −y + γ·g(r)·W·y` from random states on the
//! `‖y‖ = r` shell and call the cell unstable if any run leaves the ball of
//! radius `10·θ` or becomes non-finite.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{gain, ModelParams};
use crate::error::{Error, Result};
use crate::integrate::{propagate, IntegratorConfig};
use crate::io::CsvTable;
use crate::operators::OperatorFamily;
use crate::rng::stream;
use crate::spectral::{GridAxis, GridCell, StabilityGrid};

/// Escape radius, in units of θ, that marks an empirical run as unstable.
pub const DIVERGENCE_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub gamma_axis: Vec<f64>,
    pub beta_axis: Vec<f64>,
    pub wnorm_axis: Vec<f64>,
    /// Activity radius at which the gain is evaluated.
    pub fixed_radius: f64,
    pub empirical: bool,
    /// Initial conditions per empirical cell.
    pub seeds: usize,
    /// State dimension of the empirical flow.
    pub dim: usize,
    pub theta: f64,
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            gamma_axis: GridAxis::linspace("gamma", 0.25, 2.0, 8).values,
            beta_axis: GridAxis::linspace("beta", 0.1, 5.0, 41).values,
            wnorm_axis: GridAxis::linspace("w_norm", 0.0, 3.0, 41).values,
            fixed_radius: 1.1,
            empirical: false,
            seeds: 5,
            dim: 4,
            theta: 1.0,
            dt: 1e-2,
            horizon: 50.0,
            seed: 0,
        }
    }
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::ConfigInvalid(format!("{name} must not be empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) {
        return Err(Error::ConfigInvalid(format!("{name} must be finite")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::ConfigInvalid(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        check_axis("gamma_axis", &self.gamma_axis)?;
        check_axis("beta_axis", &self.beta_axis)?;
        check_axis("wnorm_axis", &self.wnorm_axis)?;
        if self.gamma_axis[0] < 0.0 || self.beta_axis[0] <= 0.0 || self.wnorm_axis[0] < 0.0 {
            return Err(Error::ConfigInvalid("gamma, w_norm must be ≥ 0 and beta > 0".into()));
        }
        if !(self.fixed_radius > 0.0 && self.fixed_radius.is_finite()) {
            return Err(Error::ConfigInvalid("fixed_radius must be > 0".into()));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::ConfigInvalid("theta must be > 0".into()));
        }
        if self.empirical {
            if self.seeds == 0 {
                return Err(Error::ConfigInvalid("empirical sweeps need seeds ≥ 1".into()));
            }
            if self.dim == 0 {
                return Err(Error::ConfigInvalid("dim must be ≥ 1".into()));
            }
            self.integrator().validate()?;
        }
        Ok(())
    }

    pub fn integrator(&self) -> IntegratorConfig {
        IntegratorConfig::rk4(self.dt, self.horizon)
    }

    pub fn cell_count(&self) -> usize {
        self.gamma_axis.len() * self.beta_axis.len() * self.wnorm_axis.len()
    }
}

/// `‖W‖_crit = 1 / (γ·g(r))`.
pub fn critical_norm(gamma: f64, beta: f64, radius: f64) -> Result<f64> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument("gamma must be finite and ≥ 0".into()));
    }
    if gamma == 0.0 {
        return Err(Error::GammaZero);
    }
    let g = gain(radius, beta)?;
    Ok(1.0 / (gamma * g))
}

/// `r_e = γ·g(r)·‖W‖₂`.
pub fn effective_gain(gamma: f64, beta: f64, radius: f64, w_norm: f64) -> Result<f64> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidArgument("gamma must be finite and ≥ 0".into()));
    }
    let g = gain(radius, beta)?;
    Ok(gamma * g * w_norm)
}

/// Critical surface over (γ, β) as CSV `gamma, beta, w_crit`; γ = 0 rows carry `inf`.
pub fn critical_surface(spec: &SweepSpec) -> Result<CsvTable> {
    let mut table = CsvTable::new(&["gamma", "beta", "w_crit"]);
    for &gamma in &spec.gamma_axis {
        for &beta in &spec.beta_axis {
            let w = match critical_norm(gamma, beta, spec.fixed_radius) {
                Ok(w) => w,
                Err(Error::GammaZero) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            table.push_numbers(&[gamma, beta, w]);
        }
    }
    Ok(table)
}

/// Empirical class of one cell: `true` when every run stays inside the escape ball.
pub fn classify_cell(spec: &SweepSpec, family: &OperatorFamily, cell: usize, gamma: f64, beta: f64, w_norm: f64) -> Result<bool> {
    let g = gain(spec.fixed_radius, beta)?;
    let mut op_rng = stream(spec.seed, "sweep-operator", cell as u64);
    let w = family.sample(spec.dim, w_norm, &mut op_rng);
    let feedback = w * (gamma * g);
    let d = spec.dim;
    let field = |_t: f64, y: &[f64], out: &mut [f64]| {
        for i in 0..d {
            let mut acc = -y[i];
            for j in 0..d {
                acc += feedback[(i, j)] * y[j];
            }
            out[i] = acc;
        }
    };
    let escape = DIVERGENCE_FACTOR * spec.theta;
    let cfg = spec.integrator();
    for s in 0..spec.seeds {
        let mut rng = stream(spec.seed, "sweep-initial", (cell * spec.seeds + s) as u64);
        let dir = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y0 = dir.normalize() * spec.fixed_radius;
        let mut escaped = false;
        let diverged = propagate(field, y0.as_slice(), &cfg, |_t, y| {
            escaped = y.iter().map(|v| v * v).sum::<f64>().sqrt() > escape;
            !escaped
        })?;
        if escaped || diverged.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluates every (γ, β, ‖W‖) cell. Cells are independent and run in
/// parallel; output order is fixed by the axes (γ slowest, ‖W‖ fastest).
pub fn sweep_grid(spec: &SweepSpec, family: &OperatorFamily) -> Result<StabilityGrid> {
    spec.validate()?;
    if spec.empirical {
        family.validate(spec.dim)?;
    }
    let nb = spec.beta_axis.len();
    let nw = spec.wnorm_axis.len();
    let cells: Vec<GridCell> = (0..spec.cell_count())
        .into_par_iter()
        .map(|idx| {
            let gamma = spec.gamma_axis[idx / (nb * nw)];
            let beta = spec.beta_axis[(idx / nw) % nb];
            let w_norm = spec.wnorm_axis[idx % nw];
            let r_e = match effective_gain(gamma, beta, spec.fixed_radius, w_norm) {
                Ok(v) => v,
                Err(e) => return GridCell::failed(&e),
            };
            let empirical_stable = if spec.empirical {
                match classify_cell(spec, family, idx, gamma, beta, w_norm) {
                    Ok(b) => Some(b),
                    Err(e) => return GridCell::failed(&e),
                }
            } else {
                None
            };
            GridCell {
                value: r_e,
                predicted_stable: r_e < 1.0,
                empirical_stable,
                error: None,
            }
        })
        .collect();
    let axes = vec![
        GridAxis::new("gamma", spec.gamma_axis.clone()),
        GridAxis::new("beta", spec.beta_axis.clone()),
        GridAxis::new("w_norm", spec.wnorm_axis.clone()),
    ];
    let params = ModelParams {
        theta: spec.theta,
        ..ModelParams::default()
    };
    StabilityGrid::new("r_e", axes, cells, params)
}

/// Agreement between predicted and empirical classes on cells with `|r_e − 1| > band`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Agreement {
    pub matching: usize,
    pub compared: usize,
}

impl Agreement {
    pub fn fraction(&self) -> f64 {
        if self.compared == 0 {
            1.0
        } else {
            self.matching as f64 / self.compared as f64
        }
    }
}

pub fn prediction_agreement(grid: &StabilityGrid, band: f64) -> Agreement {
    let mut a = Agreement {
        matching: 0,
        compared: 0,
    };
    for cell in &grid.cells {
        if let Some(emp) = cell.empirical_stable {
            if (cell.value - 1.0).abs() > band {
                a.compared += 1;
                if emp == cell.predicted_stable {
                    a.matching += 1;
                }
            }
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_norm_examples() {
        assert_eq!(critical_norm(1.0, 3.0, 1.0).unwrap(), 1.0);
        assert_eq!(critical_norm(2.0, 0.7, 1.0).unwrap(), 0.5);
        assert!((critical_norm(1.0, 1.0, 1.1).unwrap() - 1.21).abs() < 1e-14);
        assert_eq!(critical_norm(0.0, 1.0, 1.0).unwrap_err(), Error::GammaZero);
        assert_eq!(critical_norm(1.0, 2.0, 0.0).unwrap_err().kind(), "GainSingularity");
    }

    #[test]
    fn effective_gain_examples() {
        let w = critical_norm(1.3, 2.0, 1.1).unwrap();
        assert!((effective_gain(1.3, 2.0, 1.1, w).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(effective_gain(0.5, 1.0, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(effective_gain(1.5, 1.0, 1.0, 1.0).unwrap(), 1.5);
    }

    #[test]
    fn zero_norm_cells_are_stable() {
        let spec = SweepSpec {
            gamma_axis: vec![0.5, 2.0],
            beta_axis: vec![0.5, 3.0],
            wnorm_axis: vec![0.0],
            empirical: true,
            seeds: 2,
            horizon: 5.0,
            ..SweepSpec::default()
        };
        let grid = sweep_grid(&spec, &OperatorFamily::default()).unwrap();
        for cell in &grid.cells {
            assert_eq!(cell.value, 0.0);
            assert!(cell.predicted_stable);
            assert_eq!(cell.empirical_stable, Some(true));
        }
    }

    #[test]
    fn strong_symmetric_feedback_escapes() {
        // r_e ≥ 1.5 with a symmetric positive-definite operator.
        let spec = SweepSpec {
            gamma_axis: vec![1.0],
            beta_axis: vec![0.1, 0.5],
            wnorm_axis: vec![2.0, 3.0],
            empirical: true,
            seeds: 3,
            ..SweepSpec::default()
        };
        let grid = sweep_grid(&spec, &OperatorFamily::SymmetricPositive).unwrap();
        for cell in &grid.cells {
            assert!(cell.value >= 1.5);
            assert_eq!(cell.empirical_stable, Some(false));
        }
    }

    #[test]
    fn gamma_zero_surface_is_infinite() {
        let spec = SweepSpec {
            gamma_axis: vec![0.0, 1.0],
            beta_axis: vec![1.0],
            wnorm_axis: vec![1.0],
            ..SweepSpec::default()
        };
        let csv = critical_surface(&spec).unwrap();
        let lines: Vec<&str> = csv.as_str().lines().collect();
        assert_eq!(lines[1], "0,1,inf");
        let w: f64 = lines[2].rsplit(',').next().unwrap().parse().unwrap();
        assert!((w - 1.21).abs() < 1e-14);
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::default().validate().is_ok());
        let bad = SweepSpec {
            beta_axis: vec![1.0, 0.5],
            ..SweepSpec::default()
        };
        assert!(bad.validate().is_err());
        let bad = SweepSpec {
            fixed_radius: 0.0,
            ..SweepSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
