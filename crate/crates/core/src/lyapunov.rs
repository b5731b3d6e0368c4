//! Radial energy `V(y) = ¼(‖y‖² − 1)²`, its rate along the flow, and
//! input-to-state certificates of the form
//!
//! ```text
//! V̇ ≤ −c·(‖y‖² − 1)² + c_A·‖A‖² + c_x·‖x‖²
//! ```
//!
//! checked sample by sample along a trajectory. `V̇` always comes from the
//! vector field itself, never from differencing the trajectory.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dynamics::{DrivenFlow, StateVector};
use crate::error::{Error, Result};
use crate::integrate::{solve, IntegratorConfig, Trajectory};

/// Absolute slack allowed when checking the certificate inequality.
pub const ISS_SLACK: f64 = 1e-8;

pub fn lyapunov_value(y: &StateVector) -> f64 {
    let e = y.as_vector().norm_squared() - 1.0;
    0.25 * e * e
}

/// `V̇ = (‖y‖² − 1)·yᵀ·ẏ` for `ẏ = field_value`.
pub fn lyapunov_rate(y: &StateVector, field_value: &DVector<f64>) -> f64 {
    let v = y.as_vector();
    (v.norm_squared() - 1.0) * v.dot(field_value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IssConstants {
    /// Net radial contraction `c`.
    pub c_contract: f64,
    pub c_a: f64,
    pub c_x: f64,
    /// Sector constants `(L_y, L_A, L_x)` of the forcing term, when known.
    pub lipschitz: (f64, f64, f64),
}

impl IssConstants {
    pub fn new(c_contract: f64, c_a: f64, c_x: f64) -> Self {
        IssConstants {
            c_contract,
            c_a,
            c_x,
            lipschitz: (0.0, 0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (ly, la, lx) = self.lipschitz;
        let all = [self.c_contract, self.c_a, self.c_x, ly, la, lx];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidArgument("ISS constants must be finite and ≥ 0".into()));
        }
        if self.c_contract <= 0.0 {
            return Err(Error::InvalidArgument("c_contract must be > 0".into()));
        }
        Ok(())
    }

    /// Right side of the certificate inequality.
    pub fn bound(&self, y_norm: f64, trace_norm: f64, input_norm: f64) -> f64 {
        let e = y_norm * y_norm - 1.0;
        -self.c_contract * e * e + self.c_a * trace_norm * trace_norm + self.c_x * input_norm * input_norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Violation {
    pub t: f64,
    pub v_dot: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IssReport {
    pub certified: bool,
    pub sup_norm: f64,
    pub violations: Vec<Violation>,
}

impl IssReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch { what, expected, found })
    }
}

/// Checks the certificate inequality at every sample of `traj`.
///
/// `rates[i]` is `V̇` at sample `i`, evaluated from the field. A trajectory
/// with at most one sample spans no time and is certified vacuously.
pub fn iss_certificate(
    traj: &Trajectory,
    rates: &[f64],
    trace_norms: &[f64],
    input_norms: &[f64],
    k: &IssConstants,
) -> Result<IssReport> {
    k.validate()?;
    let n = traj.len();
    check_len("rates", n, rates.len())?;
    check_len("trace_norms", n, trace_norms.len())?;
    check_len("input_norms", n, input_norms.len())?;
    if n <= 1 {
        return Ok(IssReport {
            certified: true,
            sup_norm: traj.norms().first().copied().unwrap_or(0.0),
            violations: Vec::new(),
        });
    }
    let mut violations = Vec::new();
    for i in 0..n {
        let bound = k.bound(traj.norms()[i], trace_norms[i], input_norms[i]);
        if !(rates[i] <= bound + ISS_SLACK) {
            violations.push(Violation {
                t: traj.times()[i],
                v_dot: rates[i],
                bound,
            });
        }
    }
    Ok(IssReport {
        certified: violations.is_empty(),
        sup_norm: traj.sup_norm(),
        violations,
    })
}

/// Driven run with the per-sample quantities the certificate needs.
#[derive(Debug, Clone)]
pub struct DrivenRun {
    /// `y(t)` with the drive `x_ex(t)` attached as inputs.
    pub trajectory: Trajectory,
    pub rates: Vec<f64>,
    /// Frobenius norm of the fast-weight trace.
    pub trace_norms: Vec<f64>,
    pub input_norms: Vec<f64>,
}

impl DrivenRun {
    pub fn certify(&self, k: &IssConstants) -> Result<IssReport> {
        iss_certificate(&self.trajectory, &self.rates, &self.trace_norms, &self.input_norms, k)
    }
}

/// Integrates a driven flow from `y0` with `A(0) = 0` and evaluates `V̇`,
/// `‖A‖` and `‖x‖` at every sample.
pub fn simulate_driven(flow: &DrivenFlow, y0: &StateVector, cfg: &IntegratorConfig) -> Result<DrivenRun> {
    let d = flow.dim();
    let state0 = flow.pack(y0, &nalgebra::DMatrix::zeros(d, d));
    let sol = solve(flow.field(), &state0, cfg)?;
    if let Some(time) = sol.diverged_at {
        return Err(Error::NonFiniteState { time });
    }
    let n = sol.times.len();
    let mut ys = Vec::with_capacity(n);
    let mut inputs = Vec::with_capacity(n);
    let mut rates = Vec::with_capacity(n);
    let mut trace_norms = Vec::with_capacity(n);
    let mut input_norms = Vec::with_capacity(n);
    for (t, s) in sol.times.iter().zip(&sol.states) {
        let (y, a) = flow.unpack(s);
        let x = flow.drive().x_ex(*t)?;
        let ydot = flow.y_rate(*t, s)?;
        rates.push(lyapunov_rate(&y, &ydot));
        trace_norms.push(a.norm());
        input_norms.push(x.norm());
        inputs.push(x);
        ys.push(y);
    }
    let trajectory = Trajectory::new(sol.times, ys)?.with_inputs(inputs)?;
    Ok(DrivenRun {
        trajectory,
        rates,
        trace_norms,
        input_norms,
    })
}

/// Smallest `(c_A, c_x)` for which the certificate holds on every sample of
/// `runs`, for a fixed contraction `c_contract`.
///
/// "Smallest" means minimal mean bound `c_A·mean‖A‖² + c_x·mean‖x‖²`. The
/// feasible set is a convex polygon, so the optimum is found by a
/// golden-section search over `c_A` with `c_x` set to its least feasible
/// value.
pub fn fit_iss_constants(runs: &[DrivenRun], c_contract: f64) -> Result<IssConstants> {
    if !(c_contract > 0.0 && c_contract.is_finite()) {
        return Err(Error::InvalidArgument("c_contract must be > 0".into()));
    }
    // (slack, ‖A‖², ‖x‖²) for samples where the contraction alone is not enough.
    let mut rows = Vec::new();
    let mut sum_a = 0.0;
    let mut sum_x = 0.0;
    let mut count = 0usize;
    for run in runs {
        for i in 0..run.trajectory.len() {
            let r = run.trajectory.norms()[i];
            let e = r * r - 1.0;
            let a2 = run.trace_norms[i].powi(2);
            let x2 = run.input_norms[i].powi(2);
            sum_a += a2;
            sum_x += x2;
            count += 1;
            let slack = run.rates[i] + c_contract * e * e;
            if slack > 0.0 {
                rows.push((slack, a2, x2));
            }
        }
    }
    if rows.is_empty() {
        return Ok(IssConstants::new(c_contract, 0.0, 0.0));
    }
    let weight_a = sum_a / count as f64;
    let weight_x = sum_x / count as f64;

    let mut lo = 0.0f64;
    let mut hi = 0.0f64;
    for &(s, a2, x2) in &rows {
        match (a2 > 0.0, x2 > 0.0) {
            (false, false) => {
                return Err(Error::InvalidArgument(format!(
                    "certificate infeasible: V̇ exceeds −c·(‖y‖²−1)² by {s:e} with zero trace and input"
                )))
            }
            (true, false) => lo = lo.max(s / a2),
            (true, true) => hi = hi.max(s / a2),
            (false, true) => {}
        }
    }
    hi = hi.max(lo);
    let least_cx = |c_a: f64| -> f64 {
        rows.iter()
            .filter(|r| r.2 > 0.0)
            .map(|&(s, a2, x2)| (s - c_a * a2) / x2)
            .fold(0.0, f64::max)
    };
    let cost = |c_a: f64| weight_a * c_a + weight_x * least_cx(c_a);

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut p = b - ratio * (b - a);
    let mut q = a + ratio * (b - a);
    let (mut fp, mut fq) = (cost(p), cost(q));
    for _ in 0..200 {
        if b - a <= 1e-15 * b.abs().max(1.0) {
            break;
        }
        if fp <= fq {
            b = q;
            q = p;
            fq = fp;
            p = b - ratio * (b - a);
            fp = cost(p);
        } else {
            a = p;
            p = q;
            fp = fq;
            q = a + ratio * (b - a);
            fq = cost(q);
        }
    }
    let candidates = [lo, hi, 0.5 * (a + b)];
    let c_a = candidates
        .iter()
        .copied()
        .min_by(|x, y| cost(*x).total_cmp(&cost(*y)))
        .expect("non-empty");
    Ok(IssConstants::new(c_contract, c_a, least_cx(c_a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{vector_field, ModelParams, ReentryOperator};
    use crate::integrate::IntegratorConfig;
    use crate::operators::rotation_generator;

    #[test]
    fn value_examples() {
        assert_eq!(lyapunov_value(&StateVector::from_slice(&[0.6, 0.8])), 0.0);
        assert_eq!(lyapunov_value(&StateVector::from_slice(&[2.0, 0.0])), 2.25);
        assert_eq!(lyapunov_value(&StateVector::zeros(2)), 0.25);
    }

    #[test]
    fn rate_examples() {
        let on_shell = StateVector::from_slice(&[0.0, 1.0]);
        assert_eq!(lyapunov_rate(&on_shell, &DVector::from_vec(vec![3.0, -7.0])), 0.0);

        let y = StateVector::from_slice(&[2.0, 0.0]);
        let p = ModelParams {
            gamma: 0.0,
            kappa: 1.0,
            ..ModelParams::default()
        };
        let f = vector_field(&y, &ReentryOperator::identity(2), &p, &DVector::zeros(2)).unwrap();
        assert_eq!(lyapunov_rate(&y, &f), -48.0);
    }

    #[test]
    fn antisymmetric_reentry_contributes_no_rate() {
        let op = ReentryOperator::new(rotation_generator(2)).unwrap();
        let y = StateVector::from_slice(&[1.3, -0.4]);
        let rot = op.matrix() * y.as_vector();
        assert!(lyapunov_rate(&y, &rot).abs() < 1e-15);
    }

    #[test]
    fn zero_length_trajectory_is_vacuous() {
        let traj = Trajectory::new(vec![0.0], vec![StateVector::from_slice(&[3.0, 4.0])]).unwrap();
        let k = IssConstants::new(1.0, 0.0, 0.0);
        let rep = iss_certificate(&traj, &[1e9], &[0.0], &[0.0], &k).unwrap();
        assert!(rep.certified);
        assert_eq!(rep.sup_norm, 5.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let traj = Trajectory::new(vec![0.0, 1.0], vec![StateVector::zeros(1), StateVector::zeros(1)]).unwrap();
        let k = IssConstants::new(1.0, 0.0, 0.0);
        let err = iss_certificate(&traj, &[0.0], &[0.0, 0.0], &[0.0, 0.0], &k).unwrap_err();
        assert_eq!(err.kind(), "LengthMismatch");
    }

    #[test]
    fn autonomous_outside_shell_has_no_violations() {
        // kappa = 2, A = 0, x = 0, c = 1: −r²(r²−1)(1+κ(r²−1)) ≤ −(r²−1)² for r ≥ 1.
        let op = ReentryOperator::new(rotation_generator(2)).unwrap();
        let p = ModelParams {
            gamma: 1.0,
            kappa: 2.0,
            ..ModelParams::default()
        };
        let flow = crate::dynamics::ReentryFlow::autonomous(op.clone(), p).unwrap();
        let traj = crate::integrate::simulate(flow.field(), &StateVector::from_slice(&[2.5, 0.0]), &IntegratorConfig::rk4(1e-3, 3.0)).unwrap();
        let keep: Vec<usize> = (0..traj.len()).filter(|&i| traj.norms()[i] >= 1.0).collect();
        assert!(keep.len() > 10);
        let times: Vec<f64> = keep.iter().map(|&i| traj.times()[i]).collect();
        let states: Vec<StateVector> = keep.iter().map(|&i| traj.states()[i].clone()).collect();
        let rates: Vec<f64> = states
            .iter()
            .map(|y| lyapunov_rate(y, &vector_field(y, &op, &p, &DVector::zeros(2)).unwrap()))
            .collect();
        let sub = Trajectory::new(times, states).unwrap();
        let zeros = vec![0.0; sub.len()];
        let rep = iss_certificate(&sub, &rates, &zeros, &zeros, &IssConstants::new(1.0, 0.0, 0.0)).unwrap();
        assert!(rep.certified, "{:?}", rep.violations.first());
    }

    #[test]
    fn violations_are_reported() {
        let traj = Trajectory::new(vec![0.0, 1.0], vec![StateVector::from_slice(&[2.0]), StateVector::from_slice(&[1.0])]).unwrap();
        let rep = iss_certificate(&traj, &[-10.0, 1.0], &[0.0, 0.0], &[0.0, 0.0], &IssConstants::new(1.0, 0.0, 0.0)).unwrap();
        assert!(!rep.certified);
        assert_eq!(rep.violations.len(), 1);
        assert_eq!(rep.violations[0].t, 1.0);
        assert!(rep.to_json().contains("\"certified\": false"));
    }

    #[test]
    fn constants_are_validated() {
        assert!(IssConstants::new(0.0, 1.0, 1.0).validate().is_err());
        assert!(IssConstants::new(1.0, -1.0, 1.0).validate().is_err());
    }
}
