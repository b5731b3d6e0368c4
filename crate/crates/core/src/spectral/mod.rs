//! Jacobians, spectra and stability maps of the reentry flow.

pub mod contour;
pub mod eigen;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{ModelParams, ReentryOperator, StateVector};
use crate::error::{check_dim, Error, Result};
use crate::io::{fmt17, fmt_bool, CsvTable};
use crate::linalg::spectral_norm;

pub use contour::{marching_squares, Polyline};
pub use eigen::{eigenvalues_of, MAX_DIM};

/// Spectrum of a matrix together with its spectral abscissa.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub jacobian: DMatrix<f64>,
    pub eigenvalues: Vec<Complex<f64>>,
    /// max Re λ.
    pub abscissa: f64,
    /// `abscissa < 0`.
    pub stable: bool,
}

pub fn eigenvalues(m: &DMatrix<f64>) -> Result<SpectralReport> {
    let eigenvalues = eigenvalues_of(m)?;
    let abscissa = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectralReport {
        jacobian: m.clone(),
        eigenvalues,
        abscissa,
        stable: abscissa < 0.0,
    })
}

/// Differential of the homeostatic field, `−κ[(‖y‖² − θ²)I + 2yyᵀ]`.
pub fn homeostatic_jacobian(y: &StateVector, kappa: f64, theta: f64) -> DMatrix<f64> {
    let v = y.as_vector();
    let d = v.len();
    let shell = v.norm_squared() - theta * theta;
    (DMatrix::identity(d, d) * shell + v * v.transpose() * 2.0) * (-kappa)
}

/// Jacobian of the intrinsic flow: `−I + γW + Dg_h(y)`.
pub fn jacobian(y: &StateVector, op: &ReentryOperator, params: &ModelParams) -> Result<DMatrix<f64>> {
    check_dim(op.dim(), y.dim())?;
    let d = y.dim();
    Ok(-DMatrix::identity(d, d) + op.matrix() * params.gamma + homeostatic_jacobian(y, params.kappa, params.theta))
}

/// λ_min(−Dg_h(y)) in closed form: `−Dg_h = κ[(r² − θ²)I + 2yyᵀ]` has eigenvalue
/// `κ(r² − θ²)` on y⊥ and `κ(3r² − θ²)` along y.
pub fn homeostatic_dissipation(y: &StateVector, kappa: f64, theta: f64) -> f64 {
    let r2 = y.as_vector().norm_squared();
    let across = kappa * (r2 - theta * theta);
    let along = kappa * (3.0 * r2 - theta * theta);
    if y.dim() >= 2 {
        across.min(along)
    } else {
        along
    }
}

/// Outcome of the small-gain test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallGain {
    pub holds: bool,
    /// `rhs − lhs`.
    pub margin: f64,
    /// ‖γW‖₂.
    pub lhs: f64,
    /// `1 + λ_min(−Dg_h(y★))`.
    pub rhs: f64,
}

/// Sufficient local-stability test `‖γW‖₂ < 1 + λ_min(−Dg_h(y★))`.
///
/// The right side is the dissipation of the leak plus the homeostatic field:
/// when it exceeds the feedback gain, the symmetric part of the Jacobian is
/// negative definite and every eigenvalue has negative real part.
pub fn small_gain_check(y_star: &StateVector, op: &ReentryOperator, params: &ModelParams) -> Result<SmallGain> {
    check_dim(op.dim(), y_star.dim())?;
    let lhs = spectral_norm(&(op.matrix() * params.gamma));
    let rhs = 1.0 + homeostatic_dissipation(y_star, params.kappa, params.theta);
    Ok(SmallGain {
        holds: lhs < rhs,
        margin: rhs - lhs,
        lhs,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
}

impl GridAxis {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        GridAxis {
            name: name.into(),
            values,
        }
    }

    pub fn linspace(name: impl Into<String>, lo: f64, hi: f64, n: usize) -> Self {
        let values = match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        };
        Self::new(name, values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridCell {
    /// Spectral abscissa (state maps) or effective gain (parameter sweeps).
    pub value: f64,
    pub predicted_stable: bool,
    pub empirical_stable: Option<bool>,
    /// Set when the cell could not be evaluated; `value` is NaN then.
    pub error: Option<String>,
}

impl GridCell {
    pub fn failed(err: &Error) -> Self {
        GridCell {
            value: f64::NAN,
            predicted_stable: false,
            empirical_stable: None,
            error: Some(err.to_string()),
        }
    }
}

/// Lattice of stability results. Cells are stored with the first axis varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityGrid {
    pub quantity: String,
    pub axes: Vec<GridAxis>,
    pub cells: Vec<GridCell>,
    pub params: ModelParams,
    pub contours: Vec<Polyline>,
}

impl StabilityGrid {
    pub fn new(quantity: impl Into<String>, axes: Vec<GridAxis>, cells: Vec<GridCell>, params: ModelParams) -> Result<Self> {
        let expected: usize = axes.iter().map(GridAxis::len).product();
        if cells.len() != expected {
            return Err(Error::LengthMismatch {
                what: "grid cells",
                expected,
                found: cells.len(),
            });
        }
        Ok(StabilityGrid {
            quantity: quantity.into(),
            axes,
            cells,
            params,
            contours: Vec::new(),
        })
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(GridAxis::len).collect()
    }

    /// Axis coordinates of cell `index`.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            coords[k] = axis.values[rem % axis.len()];
            rem /= axis.len();
        }
        coords
    }

    pub fn values(&self) -> Vec<f64> {
        self.cells.iter().map(|c| c.value).collect()
    }

    pub fn has_empirical(&self) -> bool {
        self.cells.iter().any(|c| c.empirical_stable.is_some())
    }

    /// `axis…, quantity, predicted_stable[, empirical_stable]`. Booleans are 1/0;
    /// a missing empirical class is written as an empty field.
    pub fn to_csv(&self) -> CsvTable {
        let empirical = self.has_empirical();
        let mut header: Vec<String> = self.axes.iter().map(|a| a.name.clone()).collect();
        header.push(self.quantity.clone());
        header.push("predicted_stable".into());
        if empirical {
            header.push("empirical_stable".into());
        }
        let mut table = CsvTable::new(&header);
        for (idx, cell) in self.cells.iter().enumerate() {
            let mut row: Vec<String> = self.coordinates(idx).into_iter().map(fmt17).collect();
            row.push(fmt17(cell.value));
            row.push(fmt_bool(cell.predicted_stable).into());
            if empirical {
                row.push(cell.empirical_stable.map_or(String::new(), |b| fmt_bool(b).into()));
            }
            table.push_fields(&row);
        }
        table
    }

    /// JSON sidecar with axes, parameters, contours and flagged cells.
    pub fn sidecar(&self) -> serde_json::Value {
        let flagged: Vec<_> = self
            .cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.error.as_ref().map(|e| serde_json::json!({ "index": i, "error": e })))
            .collect();
        serde_json::json!({
            "quantity": self.quantity,
            "axes": self.axes,
            "params": self.params,
            "contours": self.contours,
            "flagged_cells": flagged,
        })
    }
}

/// Rectangular sample of the (y₁, y₂) plane.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePlane {
    pub y1: Vec<f64>,
    pub y2: Vec<f64>,
}

impl StatePlane {
    /// `nx × ny` lattice over `[x_lo, x_hi] × [y_lo, y_hi]`.
    pub fn new(extent: [f64; 4], nx: usize, ny: usize) -> Self {
        StatePlane {
            y1: GridAxis::linspace("y_1", extent[0], extent[1], nx).values,
            y2: GridAxis::linspace("y_2", extent[2], extent[3], ny).values,
        }
    }
}

/// Spectral abscissa of the Jacobian at every point of a 2-D state plane,
/// with the zero-level contour attached.
pub fn stability_map(plane: &StatePlane, op: &ReentryOperator, params: &ModelParams) -> Result<StabilityGrid> {
    check_dim(2, op.dim())?;
    let ny = plane.y2.len();
    let cells: Vec<GridCell> = (0..plane.y1.len() * ny)
        .into_par_iter()
        .map(|idx| {
            let y = StateVector::from_slice(&[plane.y1[idx / ny], plane.y2[idx % ny]]);
            match jacobian(&y, op, params).and_then(|j| eigenvalues(&j)) {
                Ok(rep) => GridCell {
                    value: rep.abscissa,
                    predicted_stable: rep.stable,
                    empirical_stable: None,
                    error: None,
                },
                Err(e) => GridCell::failed(&e),
            }
        })
        .collect();
    let axes = vec![GridAxis::new("y_1", plane.y1.clone()), GridAxis::new("y_2", plane.y2.clone())];
    let mut grid = StabilityGrid::new("abscissa", axes, cells, *params)?;
    grid.contours = marching_squares(&plane.y1, &plane.y2, &grid.values(), 0.0);
    Ok(grid)
}
