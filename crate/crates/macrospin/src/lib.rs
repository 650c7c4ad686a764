//! Simulation toolkit for a single ferromagnetic macrospin driven by a
//! constant external field and a stochastic perturbation of deterministic,
//! typically decreasing, magnitude.
//!
//! The crate is organized around six pieces:
//!
//! * [`algebra`] — exact 3x3 kernels: the cross-product operator, the
//!   effective field operator combining precession and damping, the rotation
//!   exponential, and the closed-form Ito correction of the Stratonovich
//!   noise term.
//! * [`schedule`] — the noise-magnitude schedule `eps_t` with closed-form
//!   power integrals and its integrability classification.
//! * [`rng`] — a counter-based Gaussian stream so that ensembles are
//!   bit-reproducible regardless of thread count.
//! * [`dynamics`] — drift/diffusion of every model variant, three time
//!   steppers, and the exact rotating-frame integrator for the undamped case.
//! * [`montecarlo`] — seed-reproducible path ensembles and the estimator
//!   series used to verify limits, rates and moment bounds.
//! * [`oracles`] — independent numerical verifiers (finite differences,
//!   adaptive quadrature, refinement studies) used as ground truth in tests
//!   and by the `verify` command.

pub mod algebra;
pub mod dynamics;
pub mod montecarlo;
pub mod oracles;
pub mod rng;
pub mod schedule;

pub use algebra::{
    cross_matrix, effective_operator, rotation_exp, strato_drift_correction, Mat3, Vec3,
};
pub use dynamics::{
    diffusion, drift, exact_alpha0_path, h_of_t, qv_rate, simulate_path, step, Alpha0Path,
    ModelKind, ModelSpec, SchemeKind, SchemeSpec, Trajectory,
};
pub use montecarlo::{EnsembleConfig, EstimatorSeries, RecordTimes, VectorEstimatorSeries};
pub use rng::GaussianStream;
pub use schedule::{NoiseSchedule, ScheduleClass};
