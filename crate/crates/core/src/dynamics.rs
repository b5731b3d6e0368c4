//! State, parameters and vector fields of the reentry network.
//!
//! The discrete update injects the previous activity back into the block
//! input through `γ·W_r·g(‖y‖)`, and the continuous flow obtained in the
//! small-step limit is
//!
//! ```text
//! ẏ = −y + γ·W·y − κ(‖y‖² − θ²)·y + c
//! ```
//!
//! where `W` is either the raw reentry matrix or the effective operator
//! `J_H(x_ex)·W_r`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{antisymmetric_part, is_finite_matrix, is_finite_vector, symmetric_part};

/// Smallest admissible denominator of the homeostatic gain.
pub const GAIN_GUARD: f64 = 1e-6;

/// Population activity `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<f64>);

impl StateVector {
    pub fn new(y: DVector<f64>) -> Self {
        StateVector(y)
    }

    pub fn from_slice(y: &[f64]) -> Self {
        StateVector(DVector::from_column_slice(y))
    }

    pub fn zeros(dim: usize) -> Self {
        StateVector(DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Euclidean norm `r = ‖y‖`.
    pub fn radius(&self) -> f64 {
        self.0.norm()
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        is_finite_vector(&self.0)
    }
}

impl From<DVector<f64>> for StateVector {
    fn from(v: DVector<f64>) -> Self {
        StateVector(v)
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(DVector::from_vec(v))
    }
}

/// Scalar parameters of the reentry dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Reentry gain γ ≥ 0.
    pub gamma: f64,
    /// Gain steepness β > 0.
    pub beta: f64,
    /// Homeostatic rate κ ≥ 0.
    pub kappa: f64,
    /// Target radius θ > 0.
    pub theta: f64,
    /// Fast-weight decay λ > 0.
    pub lambda_a: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            gamma: 1.0,
            beta: 1.0,
            kappa: 10.0,
            theta: 1.0,
            lambda_a: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma, self.beta, self.kappa, self.theta, self.lambda_a];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("model parameters must be finite".into()));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidArgument("gamma must be ≥ 0".into()));
        }
        if self.beta <= 0.0 {
            return Err(Error::InvalidArgument("beta must be > 0".into()));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidArgument("kappa must be ≥ 0".into()));
        }
        if self.theta <= 0.0 {
            return Err(Error::InvalidArgument("theta must be > 0".into()));
        }
        if self.lambda_a <= 0.0 {
            return Err(Error::InvalidArgument("lambda_a must be > 0".into()));
        }
        Ok(())
    }
}

/// Reentry matrix together with its antisymmetric and symmetric parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ReentryOperator {
    w: DMatrix<f64>,
    w_anti: DMatrix<f64>,
    w_sym: DMatrix<f64>,
}

impl ReentryOperator {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        if !w.is_square() {
            return Err(Error::DimensionMismatch {
                expected: w.nrows(),
                found: w.ncols(),
            });
        }
        if !is_finite_matrix(&w) {
            return Err(Error::InvalidArgument("reentry matrix must be finite".into()));
        }
        let w_anti = antisymmetric_part(&w);
        let w_sym = symmetric_part(&w);
        Ok(ReentryOperator { w, w_anti, w_sym })
    }

    pub fn identity(dim: usize) -> Self {
        Self::new(DMatrix::identity(dim, dim)).expect("identity is square and finite")
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }

    /// `W_a = (W − Wᵀ)/2`, the rotational part.
    pub fn antisymmetric(&self) -> &DMatrix<f64> {
        &self.w_anti
    }

    /// `W_s = (W + Wᵀ)/2`, the stretching part.
    pub fn symmetric(&self) -> &DMatrix<f64> {
        &self.w_sym
    }
}

/// Hebbian drive Φ(y, x) of the fast-weight trace.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HebbRule {
    /// Φ(y, x) = y·xᵀ.
    #[default]
    OuterProduct,
    /// Φ ≡ 0: pure decay.
    Zero,
}

impl HebbRule {
    pub fn drive(&self, y: &DVector<f64>, x: &DVector<f64>) -> DMatrix<f64> {
        match self {
            HebbRule::OuterProduct => y * x.transpose(),
            HebbRule::Zero => DMatrix::zeros(y.len(), x.len()),
        }
    }
}

/// Fast associative memory `A`, optionally carried as low-rank factors `A = Uᵀ·V`.
#[derive(Debug, Clone, PartialEq)]
pub struct FastWeightTrace {
    a: DMatrix<f64>,
    rank_factors: Option<(DMatrix<f64>, DMatrix<f64>)>,
    hebb_rule: HebbRule,
}

impl FastWeightTrace {
    pub fn zeros(dim: usize) -> Self {
        FastWeightTrace {
            a: DMatrix::zeros(dim, dim),
            rank_factors: None,
            hebb_rule: HebbRule::default(),
        }
    }

    pub fn from_matrix(a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        Ok(FastWeightTrace {
            a,
            rank_factors: None,
            hebb_rule: HebbRule::default(),
        })
    }

    /// Builds `A = Uᵀ·V` from two `k×d` factors.
    pub fn from_factors(u: DMatrix<f64>, v: DMatrix<f64>) -> Result<Self> {
        check_dim(u.nrows(), v.nrows())?;
        check_dim(u.ncols(), v.ncols())?;
        let a = u.transpose() * &v;
        Ok(FastWeightTrace {
            a,
            rank_factors: Some((u, v)),
            hebb_rule: HebbRule::default(),
        })
    }

    pub fn with_rule(mut self, rule: HebbRule) -> Self {
        self.hebb_rule = rule;
        self
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn rank_factors(&self) -> Option<(&DMatrix<f64>, &DMatrix<f64>)> {
        self.rank_factors.as_ref().map(|(u, v)| (u, v))
    }

    pub fn hebb_rule(&self) -> HebbRule {
        self.hebb_rule
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    /// Largest entry of `|UᵀV − A|`, if factors are carried.
    pub fn factor_error(&self) -> Option<f64> {
        self.rank_factors
            .as_ref()
            .map(|(u, v)| (u.transpose() * v - &self.a).abs().max())
    }

    /// One explicit Euler step of `Ȧ = −λA + Φ(y, x)`.
    ///
    /// Factors stay exact: the decay rescales `U` and an outer-product drive
    /// appends the row pair `(dt·yᵀ, xᵀ)`.
    pub fn advance(&self, y: &DVector<f64>, x: &DVector<f64>, lambda: f64, dt: f64) -> Self {
        let decay = 1.0 - dt * lambda;
        let a = &self.a * decay + self.hebb_rule.drive(y, x) * dt;
        let rank_factors = self.rank_factors.as_ref().map(|(u, v)| match self.hebb_rule {
            HebbRule::Zero => (u * decay, v.clone()),
            HebbRule::OuterProduct => {
                let k = u.nrows();
                let mut u2 = (u * decay).insert_row(k, 0.0);
                let mut v2 = v.clone().insert_row(k, 0.0);
                u2.row_mut(k).copy_from(&(y.transpose() * dt));
                v2.row_mut(k).copy_from(&x.transpose());
                (u2, v2)
            }
        });
        FastWeightTrace {
            a,
            rank_factors,
            hebb_rule: self.hebb_rule,
        }
    }
}

/// Time-dependent external embedding `x_ex(t)`.
#[derive(Clone)]
pub enum DriveSignal {
    Constant(DVector<f64>),
    /// Holds `values[k]` on `[k·period, (k+1)·period)`, cycling through the list.
    Piecewise {
        period: f64,
        values: Vec<DVector<f64>>,
    },
    Custom(Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>),
}

impl fmt::Debug for DriveSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriveSignal::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            DriveSignal::Piecewise { period, values } => f
                .debug_struct("Piecewise")
                .field("period", period)
                .field("len", &values.len())
                .finish(),
            DriveSignal::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// External drive: the fast input `x_ex(t)` and the slow offset `c = H(x_ex)`.
#[derive(Debug, Clone)]
pub struct DriveSpec {
    dim: usize,
    signal: DriveSignal,
    c: DVector<f64>,
}

impl DriveSpec {
    pub fn new(signal: DriveSignal, c: DVector<f64>) -> Self {
        DriveSpec {
            dim: c.len(),
            signal,
            c,
        }
    }

    pub fn none(dim: usize) -> Self {
        Self::new(DriveSignal::Constant(DVector::zeros(dim)), DVector::zeros(dim))
    }

    pub fn constant(x_ex: DVector<f64>, c: DVector<f64>) -> Self {
        Self::new(DriveSignal::Constant(x_ex), c)
    }

    /// Piecewise-constant drive drawn uniformly from the ball of radius `max_norm`.
    pub fn random_ball<R: Rng + ?Sized>(
        dim: usize,
        period: f64,
        pieces: usize,
        max_norm: f64,
        rng: &mut R,
    ) -> Self {
        let values = (0..pieces.max(1))
            .map(|_| {
                let dir = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                let n = dir.norm();
                let radius = max_norm * rng.gen::<f64>().powf(1.0 / dim as f64);
                if n == 0.0 {
                    DVector::zeros(dim)
                } else {
                    dir * (radius / n)
                }
            })
            .collect();
        Self::new(DriveSignal::Piecewise { period, values }, DVector::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn x_ex(&self, t: f64) -> Result<DVector<f64>> {
        let v = match &self.signal {
            DriveSignal::Constant(v) => v.clone(),
            DriveSignal::Piecewise { period, values } => {
                let k = (t / period).floor().max(0.0) as usize % values.len();
                values[k].clone()
            }
            DriveSignal::Custom(f) => f(t),
        };
        check_dim(self.dim, v.len())?;
        if !is_finite_vector(&v) {
            return Err(Error::InvalidArgument(format!("drive is not finite at t = {t}")));
        }
        Ok(v)
    }
}

/// Simplified block mapping `H`.
#[derive(Clone)]
pub enum BlockMapping {
    /// `H(x) = M·x`.
    Linear(DMatrix<f64>),
    /// `H(x) = tanh(M·x + b)`, componentwise.
    SaturatingAffine { m: DMatrix<f64>, b: DVector<f64> },
    Custom(Arc<dyn Fn(&DVector<f64>) -> DVector<f64> + Send + Sync>),
}

impl fmt::Debug for BlockMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockMapping::Linear(m) => f.debug_tuple("Linear").field(m).finish(),
            BlockMapping::SaturatingAffine { m, b } => f
                .debug_struct("SaturatingAffine")
                .field("m", m)
                .field("b", b)
                .finish(),
            BlockMapping::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl BlockMapping {
    pub fn identity(dim: usize) -> Self {
        BlockMapping::Linear(DMatrix::identity(dim, dim))
    }

    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&DVector<f64>) -> DVector<f64> + Send + Sync + 'static,
    {
        BlockMapping::Custom(Arc::new(f))
    }

    /// Built-in kinds add the fast-weight readout `A·x` to their output.
    pub fn supports_readout(&self) -> bool {
        !matches!(self, BlockMapping::Custom(_))
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            BlockMapping::Linear(m) => {
                check_dim(m.ncols(), x.len())?;
                Ok(m * x)
            }
            BlockMapping::SaturatingAffine { m, b } => {
                check_dim(m.ncols(), x.len())?;
                check_dim(m.nrows(), b.len())?;
                Ok((m * x + b).map(f64::tanh))
            }
            BlockMapping::Custom(f) => Ok(f(x)),
        }
    }

    /// `J_H(x)`: exact for linear maps, central differences with step `fd_step` otherwise.
    pub fn jacobian(&self, x: &DVector<f64>, fd_step: f64) -> Result<DMatrix<f64>> {
        if let BlockMapping::Linear(m) = self {
            check_dim(m.ncols(), x.len())?;
            return Ok(m.clone());
        }
        if !(fd_step > 0.0 && fd_step.is_finite()) {
            return Err(Error::InvalidArgument("fd_step must be > 0".into()));
        }
        let n = x.len();
        let rows = self.apply(x)?.len();
        let mut jac = DMatrix::zeros(rows, n);
        let mut probe = x.clone();
        for j in 0..n {
            probe[j] = x[j] + fd_step;
            let plus = self.apply(&probe)?;
            probe[j] = x[j] - fd_step;
            let minus = self.apply(&probe)?;
            probe[j] = x[j];
            check_dim(rows, plus.len())?;
            for i in 0..rows {
                let q = (plus[i] - minus[i]) / (2.0 * fd_step);
                if !q.is_finite() {
                    return Err(Error::NonFiniteJacobian { row: i, col: j });
                }
                jac[(i, j)] = q;
            }
        }
        Ok(jac)
    }
}

/// Homeostatic gain `g(r) = 1 / (1 + β(r² − 1))`.
pub fn gain(r: f64, beta: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be finite and ≥ 0, got {r}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be finite and > 0, got {beta}")));
    }
    let denominator = 1.0 + beta * (r * r - 1.0);
    if denominator < GAIN_GUARD {
        return Err(Error::GainSingularity {
            radius: r,
            beta,
            denominator,
        });
    }
    Ok(1.0 / denominator)
}

/// Radial restoring field `−κ(‖y‖² − θ²)·y`.
pub fn homeostatic_field(y: &StateVector, kappa: f64, theta: f64) -> DVector<f64> {
    let r2 = y.as_vector().norm_squared();
    y.as_vector() * (-kappa * (r2 - theta * theta))
}

/// `ẏ = −y + γ·W·y + g_h(y) + c`.
pub fn vector_field(
    y: &StateVector,
    op: &ReentryOperator,
    params: &ModelParams,
    c: &DVector<f64>,
) -> Result<DVector<f64>> {
    check_dim(op.dim(), y.dim())?;
    check_dim(op.dim(), c.len())?;
    let yv = y.as_vector();
    Ok(-yv + op.matrix() * yv * params.gamma + homeostatic_field(y, params.kappa, params.theta) + c)
}

/// Block input of the discrete update: `x_ex + γ·W_r·g(‖y_prev‖)·y_prev`.
pub fn reentry_input(
    x_ex: &DVector<f64>,
    y_prev: &StateVector,
    op: &ReentryOperator,
    params: &ModelParams,
) -> Result<DVector<f64>> {
    check_dim(op.dim(), y_prev.dim())?;
    check_dim(op.dim(), x_ex.len())?;
    let g = gain(y_prev.radius(), params.beta)?;
    Ok(x_ex + op.matrix() * y_prev.as_vector() * (params.gamma * g))
}

/// Default central-difference step `1e-5·(1 + ‖x_ex‖)`.
pub fn default_fd_step(x_ex: &DVector<f64>) -> f64 {
    1e-5 * (1.0 + x_ex.norm())
}

/// Effective reentry operator `W_r★ = J_H(x_ex)·W_r`.
pub fn effective_operator(
    h: &BlockMapping,
    x_ex: &DVector<f64>,
    w_r: &DMatrix<f64>,
    fd_step: f64,
) -> Result<ReentryOperator> {
    let jac = h.jacobian(x_ex, fd_step)?;
    check_dim(jac.ncols(), w_r.nrows())?;
    ReentryOperator::new(jac * w_r)
}

/// Remainder of the first-order expansion `‖H(x_ex + R) − H(x_ex) − J_H(x_ex)·R‖`
/// with `R = γ·W_r·g(‖y‖)·y`.
pub fn taylor_remainder(
    h: &BlockMapping,
    x_ex: &DVector<f64>,
    y: &StateVector,
    op: &ReentryOperator,
    params: &ModelParams,
    fd_step: f64,
) -> Result<f64> {
    let x_t = reentry_input(x_ex, y, op, params)?;
    let reentry = &x_t - x_ex;
    let jac = h.jacobian(x_ex, fd_step)?;
    let exact = h.apply(&x_t)?;
    let linear = h.apply(x_ex)? + jac * reentry;
    Ok((exact - linear).norm())
}

/// One step of the discrete network.
///
/// Forms `x_t` from the reentry input, reads out `y_t = H(x_t) + A·x_t`
/// (the readout is skipped for custom mappings), then advances the trace
/// with `A ← A + dt·(−λA + Φ(y_t, x_t))`.
#[allow(clippy::too_many_arguments)]
pub fn discrete_step(
    x_ex: &DVector<f64>,
    y_prev: &StateVector,
    trace: &FastWeightTrace,
    h: &BlockMapping,
    op: &ReentryOperator,
    params: &ModelParams,
    dt: f64,
) -> Result<(StateVector, FastWeightTrace)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument("dt must be > 0".into()));
    }
    check_dim(op.dim(), trace.dim())?;
    let x_t = reentry_input(x_ex, y_prev, op, params)?;
    let mut y_t = h.apply(&x_t)?;
    if h.supports_readout() {
        check_dim(trace.dim(), y_t.len())?;
        y_t += trace.matrix() * &x_t;
    }
    let next = trace.advance(&y_t, &x_t, params.lambda_a, dt);
    Ok((StateVector::new(y_t), next))
}

/// Intrinsic flow `ẏ = −y + γ·W·y + g_h(y) + c` in allocation-free form.
#[derive(Debug, Clone)]
pub struct ReentryFlow {
    op: ReentryOperator,
    params: ModelParams,
    c: DVector<f64>,
}

impl ReentryFlow {
    pub fn new(op: ReentryOperator, params: ModelParams, c: DVector<f64>) -> Result<Self> {
        params.validate()?;
        check_dim(op.dim(), c.len())?;
        Ok(ReentryFlow { op, params, c })
    }

    /// Autonomous flow (`c = 0`).
    pub fn autonomous(op: ReentryOperator, params: ModelParams) -> Result<Self> {
        let d = op.dim();
        Self::new(op, params, DVector::zeros(d))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &ReentryOperator {
        &self.op
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn eval_into(&self, y: &[f64], out: &mut [f64]) {
        let w = self.op.matrix();
        let p = &self.params;
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let radial = -p.kappa * (r2 - p.theta * p.theta);
        let d = y.len();
        for i in 0..d {
            let mut wy = 0.0;
            for j in 0..d {
                wy += w[(i, j)] * y[j];
            }
            out[i] = -y[i] + p.gamma * wy + radial * y[i] + self.c[i];
        }
    }

    pub fn eval(&self, y: &StateVector) -> Result<DVector<f64>> {
        vector_field(y, &self.op, &self.params, &self.c)
    }

    /// Closure form accepted by the integrators.
    pub fn field(&self) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
        move |_t, y, out| self.eval_into(y, out)
    }
}

/// Driven flow with fast-weight coupling, on the stacked state `(y, vec(A))`:
///
/// ```text
/// ẏ = −y + γ·W·y + A·y + x_ex(t) + c + g_h(y)
/// Ȧ = −λ·A + Φ(y, x_ex(t))
/// ```
#[derive(Debug, Clone)]
pub struct DrivenFlow {
    op: ReentryOperator,
    params: ModelParams,
    drive: DriveSpec,
    rule: HebbRule,
}

impl DrivenFlow {
    pub fn new(op: ReentryOperator, params: ModelParams, drive: DriveSpec, rule: HebbRule) -> Result<Self> {
        params.validate()?;
        check_dim(op.dim(), drive.dim())?;
        Ok(DrivenFlow {
            op,
            params,
            drive,
            rule,
        })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    /// Length of the stacked state.
    pub fn state_len(&self) -> usize {
        let d = self.dim();
        d + d * d
    }

    pub fn drive(&self) -> &DriveSpec {
        &self.drive
    }

    /// Stacks `y` and row-major `A`.
    pub fn pack(&self, y: &StateVector, a: &DMatrix<f64>) -> Vec<f64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(self.state_len());
        out.extend_from_slice(y.as_slice());
        for i in 0..d {
            for j in 0..d {
                out.push(a[(i, j)]);
            }
        }
        out
    }

    pub fn unpack(&self, state: &[f64]) -> (StateVector, DMatrix<f64>) {
        let d = self.dim();
        let y = StateVector::from_slice(&state[..d]);
        let a = DMatrix::from_row_slice(d, d, &state[d..d + d * d]);
        (y, a)
    }

    /// ẏ only, at time `t` on the stacked state.
    pub fn y_rate(&self, t: f64, state: &[f64]) -> Result<DVector<f64>> {
        let mut out = vec![0.0; self.state_len()];
        self.eval_into(t, state, &mut out)?;
        Ok(DVector::from_column_slice(&out[..self.dim()]))
    }

    pub fn eval_into(&self, t: f64, state: &[f64], out: &mut [f64]) -> Result<()> {
        let d = self.dim();
        let x = self.drive.x_ex(t)?;
        let (y, a) = self.unpack(state);
        let yv = y.as_vector();
        let ydot = -yv
            + self.op.matrix() * yv * self.params.gamma
            + &a * yv
            + &x
            + self.drive.c()
            + homeostatic_field(&y, self.params.kappa, self.params.theta);
        let adot = &a * (-self.params.lambda_a) + self.rule.drive(yv, &x);
        out[..d].copy_from_slice(ydot.as_slice());
        for i in 0..d {
            for j in 0..d {
                out[d + i * d + j] = adot[(i, j)];
            }
        }
        Ok(())
    }

    /// Closure form for the integrators; drive errors surface as NaN so the
    /// integrator reports a non-finite state.
    pub fn field(&self) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
        move |t, s, out| {
            if self.eval_into(t, s, out).is_err() {
                out.iter_mut().for_each(|v| *v = f64::NAN);
            }
        }
    }
}
