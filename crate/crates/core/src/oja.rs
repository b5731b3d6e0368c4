//! Oja's rule for a single neuron with constant input, and its image in
//! activity space.
//!
//! With `y = w·x` the weight flow `ẇ = x·y − y²·w` maps to
//! `ẏ = y(x² − y²)`, the scalar homeostatic ODE with `θ = |x|` and `κ = 1`.
//! Both sides are integrated independently with RK4 and compared.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::CsvTable;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OjaConfig {
    pub w0: f64,
    pub x: f64,
    pub dt: f64,
    pub horizon: f64,
}

impl Default for OjaConfig {
    fn default() -> Self {
        OjaConfig {
            w0: 0.5,
            x: 1.0,
            dt: 1e-3,
            horizon: 20.0,
        }
    }
}

impl OjaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.w0.is_finite() && self.x.is_finite()) {
            return Err(Error::ConfigInvalid("w0 and x must be finite".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::ConfigInvalid("dt must be > 0".into()));
        }
        if !(self.horizon > self.dt && self.horizon.is_finite()) {
            return Err(Error::ConfigInvalid("horizon must exceed dt".into()));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.horizon / self.dt).round().max(1.0) as usize
    }
}

/// Right side of Oja's rule, `ẇ = x·y − y²·w` with `y = w·x`.
pub fn oja_rate(w: f64, x: f64) -> f64 {
    let y = w * x;
    x * y - y * y * w
}

/// Right side of the activity-space image, `ẏ = y(x² − y²)`.
pub fn activity_rate(y: f64, x: f64) -> f64 {
    y * (x * x - y * y)
}

fn rk4_scalar(f: impl Fn(f64) -> f64, u: f64, h: f64) -> f64 {
    let k1 = f(u);
    let k2 = f(u + 0.5 * h * k1);
    let k3 = f(u + 0.5 * h * k2);
    let k4 = f(u + h * k3);
    u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Paired traces on the uniform grid `t_k = k·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct OjaTrace {
    pub times: Vec<f64>,
    /// Weight `w(t)` from Oja's rule.
    pub w: Vec<f64>,
    /// `w(t)·x`.
    pub y_from_w: Vec<f64>,
    /// `y(t)` integrated directly in activity space.
    pub y_direct: Vec<f64>,
}

impl OjaTrace {
    pub fn abs_errors(&self) -> impl Iterator<Item = f64> + '_ {
        self.y_from_w.iter().zip(&self.y_direct).map(|(a, b)| (a - b).abs())
    }

    pub fn max_error(&self) -> f64 {
        self.abs_errors().fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> CsvTable {
        let mut table = CsvTable::new(&["t", "w", "y_from_w", "y_direct", "abs_error"]);
        for k in 0..self.times.len() {
            let err = (self.y_from_w[k] - self.y_direct[k]).abs();
            table.push_numbers(&[self.times[k], self.w[k], self.y_from_w[k], self.y_direct[k], err]);
        }
        table
    }
}

/// Integrates both sides of the equivalence.
pub fn simulate_oja(cfg: &OjaConfig) -> Result<OjaTrace> {
    cfg.validate()?;
    let n = cfg.steps();
    let x = cfg.x;
    let mut trace = OjaTrace {
        times: Vec::with_capacity(n + 1),
        w: Vec::with_capacity(n + 1),
        y_from_w: Vec::with_capacity(n + 1),
        y_direct: Vec::with_capacity(n + 1),
    };
    let mut w = cfg.w0;
    let mut y = cfg.w0 * x;
    for k in 0..=n {
        let t = k as f64 * cfg.dt;
        if !(w.is_finite() && y.is_finite()) {
            return Err(Error::NonFiniteState { time: t });
        }
        trace.times.push(t);
        trace.w.push(w);
        trace.y_from_w.push(w * x);
        trace.y_direct.push(y);
        if k < n {
            w = rk4_scalar(|u| oja_rate(u, x), w, cfg.dt);
            y = rk4_scalar(|u| activity_rate(u, x), y, cfg.dt);
        }
    }
    Ok(trace)
}

/// `max_t |w(t)·x − y(t)|`.
pub fn oja_equivalence(cfg: &OjaConfig) -> Result<f64> {
    Ok(simulate_oja(cfg)?.max_error())
}
