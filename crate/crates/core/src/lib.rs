//! Simulation and stability analysis for homeostatic reentry networks.
//!
//! The network state `y` evolves under leak, reentrant feedback through an
//! operator `W`, and a radial homeostatic field:
//!
//! ```text
//! ẏ = −y + γ·W·y − κ(‖y‖² − θ²)·y + c
//! ```
//!
//! Modules:
//!
//! - [`dynamics`]: state, parameters, discrete update and vector fields
//! - [`integrate`]: RK4 / Dormand–Prince integration and trajectories
//! - [`spectral`]: Jacobians, dense eigenvalues, small-gain test, state maps
//! - [`lyapunov`]: energy, descent rate and input-to-state certificates
//! - [`sweep`]: critical surface and effective-gain stability maps
//! - [`oja`]: weight-space / activity-space equivalence of Oja's rule
//! - [`cli`]: file-based runner behind the `fhrn` binary

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod integrate;
pub mod io;
pub mod linalg;
pub mod lyapunov;
pub mod oja;
pub mod operators;
pub mod rng;
pub mod spectral;
pub mod sweep;

pub use dynamics::{
    default_fd_step, discrete_step, effective_operator, gain, homeostatic_field, reentry_input,
    taylor_remainder, vector_field, BlockMapping, DriveSignal, DriveSpec, DrivenFlow, FastWeightTrace,
    HebbRule, ModelParams, ReentryFlow, ReentryOperator, StateVector,
};
pub use error::{Error, Result};
pub use integrate::{rk4_step, simulate, simulate_outcome, IntegratorConfig, Method, Trajectory};
pub use spectral::{eigenvalues, jacobian, small_gain_check, stability_map, SpectralReport, StabilityGrid, StatePlane};

/// Radius of the ring attractor of the autonomous flow with antisymmetric
/// reentry: the positive root of `−r − κ(r² − θ²)·r = 0`, i.e.
/// `r★ = sqrt(θ² − 1/κ)`. `None` when the origin is the only equilibrium.
pub fn ring_radius(kappa: f64, theta: f64) -> Option<f64> {
    if kappa <= 0.0 {
        return None;
    }
    let r2 = theta * theta - 1.0 / kappa;
    (r2 > 0.0).then(|| r2.sqrt())
}
