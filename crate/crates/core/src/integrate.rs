//! Deterministic time integration.
//!
//! Fields are plain closures `(t, y, out)` writing `ẏ` into `out`, so the
//! same integrators drive the reentry flow, the stacked `(y, A)` system and
//! the scalar Oja equations.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::io::CsvTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "rk4")]
    Rk4,
    #[serde(rename = "rk45-adaptive", alias = "rk45")]
    Rk45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step (rk4) or initial step (adaptive).
    pub dt: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub horizon: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            method: Method::Rk4,
            dt: 1e-2,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            horizon: 50.0,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(dt: f64, horizon: f64) -> Self {
        IntegratorConfig {
            dt,
            horizon,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::ConfigInvalid("dt must be > 0".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::ConfigInvalid("horizon must be > 0".into()));
        }
        if self.dt >= self.horizon {
            return Err(Error::ConfigInvalid("dt must be smaller than the horizon".into()));
        }
        if self.method == Method::Rk45Adaptive && !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::ConfigInvalid("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Sampled solution of a flow.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<StateVector>,
    norms: Vec<f64>,
    inputs: Option<Vec<DVector<f64>>>,
}

impl Trajectory {
    /// Builds a trajectory; `times` must be strictly increasing and match `states`.
    pub fn new(times: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::LengthMismatch {
                what: "states",
                expected: times.len(),
                found: states.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("times must be strictly increasing".into()));
        }
        let norms = states.iter().map(StateVector::radius).collect();
        Ok(Trajectory {
            times,
            states,
            norms,
            inputs: None,
        })
    }

    pub fn with_inputs(mut self, inputs: Vec<DVector<f64>>) -> Result<Self> {
        if inputs.len() != self.times.len() {
            return Err(Error::LengthMismatch {
                what: "inputs",
                expected: self.times.len(),
                found: inputs.len(),
            });
        }
        self.inputs = Some(inputs);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn inputs(&self) -> Option<&[DVector<f64>]> {
        self.inputs.as_deref()
    }

    pub fn last(&self) -> Option<&StateVector> {
        self.states.last()
    }

    pub fn final_radius(&self) -> Option<f64> {
        self.norms.last().copied()
    }

    pub fn sup_norm(&self) -> f64 {
        self.norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, StateVector::dim)
    }

    /// CSV with columns `t, y_1..y_d, norm`, keeping every `stride`-th sample
    /// plus the final one.
    pub fn to_csv(&self, stride: usize) -> CsvTable {
        let d = self.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=d).map(|i| format!("y_{i}")));
        header.push("norm".into());
        let mut table = CsvTable::new(&header);
        let stride = stride.max(1);
        let n = self.len();
        let mut row = Vec::with_capacity(d + 2);
        for k in (0..n).filter(|k| k % stride == 0 || *k + 1 == n) {
            row.clear();
            row.push(self.times[k]);
            row.extend_from_slice(self.states[k].as_slice());
            row.push(self.norms[k]);
            table.push_numbers(&row);
        }
        table
    }
}

/// Result of a run that may stop early on a non-finite state.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    /// Samples up to the last finite state.
    pub trajectory: Trajectory,
    /// Time of the first step that produced a non-finite state.
    pub diverged_at: Option<f64>,
}

/// Raw sampled solution over stacked states.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub diverged_at: Option<f64>,
}

struct Rk4Work {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4Work {
    fn new(n: usize) -> Self {
        Rk4Work {
            k1: vec![0.0; n],
            k2: vec![0.0; n],
            k3: vec![0.0; n],
            k4: vec![0.0; n],
            tmp: vec![0.0; n],
        }
    }
}

fn rk4_advance<F>(field: &F, t: f64, y: &[f64], dt: f64, out: &mut [f64], w: &mut Rk4Work)
where
    F: Fn(f64, &[f64], &mut [f64]) + ?Sized,
{
    let n = y.len();
    field(t, y, &mut w.k1);
    for i in 0..n {
        w.tmp[i] = y[i] + 0.5 * dt * w.k1[i];
    }
    field(t + 0.5 * dt, &w.tmp, &mut w.k2);
    for i in 0..n {
        w.tmp[i] = y[i] + 0.5 * dt * w.k2[i];
    }
    field(t + 0.5 * dt, &w.tmp, &mut w.k3);
    for i in 0..n {
        w.tmp[i] = y[i] + dt * w.k3[i];
    }
    field(t + dt, &w.tmp, &mut w.k4);
    for i in 0..n {
        out[i] = y[i] + dt / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step<F>(field: F, y: &StateVector, t: f64, dt: f64) -> Result<StateVector>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument("dt must be > 0".into()));
    }
    let mut work = Rk4Work::new(y.dim());
    let mut out = vec![0.0; y.dim()];
    rk4_advance(&field, t, y.as_slice(), dt, &mut out, &mut work);
    if out.iter().all(|v| v.is_finite()) {
        Ok(StateVector::from(out))
    } else {
        Err(Error::NonFiniteState { time: t + dt })
    }
}

// Dormand–Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const MAX_ADAPTIVE_STEPS: usize = 10_000_000;

fn propagate_rk4<F>(field: &F, y0: &[f64], cfg: &IntegratorConfig, observe: &mut dyn FnMut(f64, &[f64]) -> bool) -> Option<f64>
where
    F: Fn(f64, &[f64], &mut [f64]) + ?Sized,
{
    let n = y0.len();
    let steps = (cfg.horizon / cfg.dt).ceil() as usize;
    let mut work = Rk4Work::new(n);
    let mut y = y0.to_vec();
    let mut next = vec![0.0; n];
    let mut t = 0.0;
    if !observe(t, &y) {
        return None;
    }
    for k in 1..=steps {
        let t_next = (k as f64 * cfg.dt).min(cfg.horizon);
        rk4_advance(field, t, &y, t_next - t, &mut next, &mut work);
        if !next.iter().all(|v| v.is_finite()) {
            return Some(t_next);
        }
        std::mem::swap(&mut y, &mut next);
        t = t_next;
        if !observe(t, &y) {
            break;
        }
    }
    None
}

fn propagate_dopri<F>(field: &F, y0: &[f64], cfg: &IntegratorConfig, observe: &mut dyn FnMut(f64, &[f64]) -> bool) -> Option<f64>
where
    F: Fn(f64, &[f64], &mut [f64]) + ?Sized,
{
    let n = y0.len();
    let min_step = 1e-14 * cfg.horizon.max(1.0);
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut y = y0.to_vec();
    let mut t = 0.0;
    let mut h = cfg.dt;
    if !observe(t, &y) {
        return None;
    }
    field(t, &y, &mut k[0]);
    for _ in 0..MAX_ADAPTIVE_STEPS {
        if t >= cfg.horizon {
            break;
        }
        h = h.min(cfg.horizon - t);
        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += h * DP_A[s][j] * kj[i];
                }
                tmp[i] = acc;
            }
            field(t + DP_C[s] * h, &tmp, &mut k[s]);
        }
        // The last stage is evaluated at the 5th-order solution (FSAL).
        y_new.copy_from_slice(&tmp);
        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += DP_E[j] * kj[i];
            }
            let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(y_new[i].abs());
            err += (h * e / scale).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() || !y_new.iter().all(|v| v.is_finite()) {
            if h < min_step {
                return Some(t + h);
            }
            h *= 0.2;
            continue;
        }
        if err <= 1.0 {
            t = if cfg.horizon - (t + h) < min_step { cfg.horizon } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            k.swap(0, 6);
            if !observe(t, &y) {
                break;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < min_step {
            return Some(t);
        }
    }
    None
}

/// Integrates without storing samples. `observe` sees every accepted state
/// (including the initial one) and stops the run by returning `false`.
/// Returns the divergence time if a non-finite state was produced.
pub fn propagate<F, O>(field: F, y0: &[f64], cfg: &IntegratorConfig, mut observe: O) -> Result<Option<f64>>
where
    F: Fn(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]) -> bool,
{
    cfg.validate()?;
    if !y0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFiniteState { time: 0.0 });
    }
    Ok(match cfg.method {
        Method::Rk4 => propagate_rk4(&field, y0, cfg, &mut observe),
        Method::Rk45Adaptive => propagate_dopri(&field, y0, cfg, &mut observe),
    })
}

/// Integrates a stacked state over `[0, horizon]`, sampling every accepted step.
pub fn solve<F>(field: F, y0: &[f64], cfg: &IntegratorConfig) -> Result<Solution>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let mut times = Vec::new();
    let mut states = Vec::new();
    let diverged_at = propagate(field, y0, cfg, |t, y| {
        times.push(t);
        states.push(y.to_vec());
        true
    })?;
    Ok(Solution {
        times,
        states,
        diverged_at,
    })
}

/// Like [`simulate`], but reports divergence as part of the outcome.
pub fn simulate_outcome<F>(field: F, y0: &StateVector, cfg: &IntegratorConfig) -> Result<SimulationOutcome>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let sol = solve(field, y0.as_slice(), cfg)?;
    let states = sol.states.into_iter().map(StateVector::from).collect();
    Ok(SimulationOutcome {
        trajectory: Trajectory::new(sol.times, states)?,
        diverged_at: sol.diverged_at,
    })
}

/// Integrates `field` from `y0` to the configured horizon.
pub fn simulate<F>(field: F, y0: &StateVector, cfg: &IntegratorConfig) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let outcome = simulate_outcome(field, y0, cfg)?;
    match outcome.diverged_at {
        Some(time) => Err(Error::NonFiniteState { time }),
        None => Ok(outcome.trajectory),
    }
}
