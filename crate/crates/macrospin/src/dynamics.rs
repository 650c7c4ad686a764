//! Model variants of the perturbed spin dynamics and their time steppers.
//!
//! All variants share the drift `A(mu) b` of the deterministic flow; they
//! differ in how the noise enters and in the correction that keeps the state
//! on the unit sphere:
//!
//! * `Deterministic` — no noise.
//! * `RescaledIto` — the Ito perturbation of constant magnitude `eps`
//!   divided by its deterministic norm `h(t) = sqrt(2 eps^2 (alpha^2+1) t + 1)`.
//! * `PullbackIto` — Ito noise plus the minimum-norm pull
//!   `-eps_t^2 (alpha^2 + 1) mu` back onto the sphere.
//! * `StratonovichIto` — the Ito form of the Stratonovich interpretation;
//!   its drift coincides with `PullbackIto` at equal `eps`.
//! * `Alpha0Exact` — the undamped case integrated in the rotating frame:
//!   exact rotation and decay factors, left-point Euler sums for the
//!   martingale term.
//!
//! The Euler schemes evaluate `eps` at the left endpoint of each step; the
//! semi-implicit midpoint scheme evaluates it at `t + dt/2`.

use crate::algebra::{effective_operator, rotation_exp, Mat3, Vec3};
use crate::rng::GaussianStream;
use crate::schedule::NoiseSchedule;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Deterministic,
    RescaledIto,
    PullbackIto,
    StratonovichIto,
    Alpha0Exact,
}

/// A dynamical model: which variant, the external field, the damping
/// coefficient, and the noise schedule (ignored by `Deterministic`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub b: Vec3,
    pub alpha: f64,
    pub schedule: NoiseSchedule,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("alpha must be finite and non-negative, got {0}")]
    BadAlpha(f64),
    #[error("external field must have finite components")]
    BadField,
    #[error("the exact alpha=0 integrator requires alpha = 0, got {0}")]
    ExactNeedsZeroAlpha(f64),
    #[error("the rescaled Ito model requires a constant noise schedule")]
    RescaledNeedsConstant,
}

impl ModelSpec {
    pub fn deterministic(b: Vec3, alpha: f64) -> Self {
        ModelSpec {
            kind: ModelKind::Deterministic,
            b,
            alpha,
            // placeholder, never evaluated by the deterministic drift
            schedule: NoiseSchedule::Constant { eps0: 1.0 },
        }
    }

    pub fn rescaled_ito(b: Vec3, alpha: f64, eps: f64) -> Self {
        ModelSpec {
            kind: ModelKind::RescaledIto,
            b,
            alpha,
            schedule: NoiseSchedule::constant(eps),
        }
    }

    pub fn pullback_ito(b: Vec3, alpha: f64, schedule: NoiseSchedule) -> Self {
        ModelSpec { kind: ModelKind::PullbackIto, b, alpha, schedule }
    }

    pub fn stratonovich(b: Vec3, alpha: f64, schedule: NoiseSchedule) -> Self {
        ModelSpec { kind: ModelKind::StratonovichIto, b, alpha, schedule }
    }

    pub fn alpha0_exact(b: Vec3, schedule: NoiseSchedule) -> Self {
        ModelSpec { kind: ModelKind::Alpha0Exact, b, alpha: 0.0, schedule }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(ModelError::BadAlpha(self.alpha));
        }
        if !self.b.is_finite() {
            return Err(ModelError::BadField);
        }
        match self.kind {
            ModelKind::Alpha0Exact if self.alpha != 0.0 => {
                Err(ModelError::ExactNeedsZeroAlpha(self.alpha))
            }
            ModelKind::RescaledIto if !self.schedule.is_constant() => {
                Err(ModelError::RescaledNeedsConstant)
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    ExplicitEuler,
    ProjectedEuler,
    SemiImplicitMidpoint,
}

/// Time-stepping scheme. `fp_tol` and `fp_maxiter` only concern the
/// midpoint scheme's fixed-point solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub dt: f64,
    pub fp_tol: f64,
    pub fp_maxiter: u32,
}

pub const DEFAULT_FP_TOL: f64 = 1e-12;
pub const DEFAULT_FP_MAXITER: u32 = 50;

impl SchemeSpec {
    pub fn new(kind: SchemeKind, dt: f64) -> Self {
        assert!(dt > 0.0 && dt.is_finite(), "dt must be positive, got {dt}");
        SchemeSpec { kind, dt, fp_tol: DEFAULT_FP_TOL, fp_maxiter: DEFAULT_FP_MAXITER }
    }

    pub fn explicit_euler(dt: f64) -> Self {
        Self::new(SchemeKind::ExplicitEuler, dt)
    }

    pub fn projected_euler(dt: f64) -> Self {
        Self::new(SchemeKind::ProjectedEuler, dt)
    }

    pub fn semi_implicit_midpoint(dt: f64) -> Self {
        Self::new(SchemeKind::SemiImplicitMidpoint, dt)
    }
}

/// One simulated path: the uniform time grid, the states, and the Brownian
/// increments that produced them (kept so schemes and resolutions can be
/// compared on common random numbers).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec3>,
    pub brownian_increments: Vec<Vec3>,
    pub seed: u64,
    /// `max_n | |mu_n| - 1 |` over the whole path.
    pub norm_drift: f64,
}

/// Output of the exact alpha = 0 integrator: the path plus the sampled
/// martingale `N_t` driving the latitude shift.
#[derive(Debug, Clone, PartialEq)]
pub struct Alpha0Path {
    pub trajectory: Trajectory,
    pub martingale: Vec<Vec3>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepError {
    #[error("drift/diffusion are undefined for the exact alpha=0 model; use its integrator")]
    ExactModelCoefficients,
    #[error("the semi-implicit midpoint scheme applies to the Stratonovich model only")]
    MidpointRequiresStratonovich,
    #[error("fixed-point iteration exceeded {maxiter} iterations; dt too large for the noise magnitude")]
    NonConvergence { maxiter: u32 },
    #[error("cannot renormalize a degenerate update of length {length:.3e}")]
    DegenerateState { length: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimulationError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("initial state must lie on the unit sphere, got |x0| = {0}")]
    StartOffSphere(f64),
    #[error("step {index}: {source}")]
    AtStep { index: usize, source: StepError },
}

/// Deterministic norm of the unrescaled Ito process,
/// `h(t) = sqrt(2 eps^2 (alpha^2 + 1) t + 1)`.
pub fn h_of_t(eps: f64, alpha: f64, t: f64) -> f64 {
    (2.0 * eps * eps * (alpha * alpha + 1.0) * t + 1.0).sqrt()
}

/// Drift vector of the model at state `x`, time `t`.
pub fn drift(m: &ModelSpec, x: Vec3, t: f64) -> Result<Vec3, StepError> {
    let a_b = effective_operator(x, m.alpha).mul_vec(m.b);
    match m.kind {
        ModelKind::Deterministic => Ok(a_b),
        ModelKind::RescaledIto => {
            let eps = m.schedule.eps0();
            let h = h_of_t(eps, m.alpha, t);
            // h'/h = eps^2 (alpha^2+1) / h^2
            let hp_over_h = eps * eps * (m.alpha * m.alpha + 1.0) / (h * h);
            Ok(x * (-hp_over_h) + a_b * (1.0 / h))
        }
        ModelKind::PullbackIto | ModelKind::StratonovichIto => {
            let eps = m.schedule.eval(t);
            Ok(a_b + x * (-eps * eps * (m.alpha * m.alpha + 1.0)))
        }
        ModelKind::Alpha0Exact => Err(StepError::ExactModelCoefficients),
    }
}

/// Diffusion matrix multiplying `dW_t`.
pub fn diffusion(m: &ModelSpec, x: Vec3, t: f64) -> Result<Mat3, StepError> {
    match m.kind {
        ModelKind::Deterministic => Ok(Mat3::ZERO),
        ModelKind::RescaledIto => {
            let eps = m.schedule.eps0();
            let h = h_of_t(eps, m.alpha, t);
            Ok(effective_operator(x, m.alpha) * (eps / h))
        }
        ModelKind::PullbackIto | ModelKind::StratonovichIto => {
            Ok(effective_operator(x, m.alpha) * m.schedule.eval(t))
        }
        ModelKind::Alpha0Exact => Err(StepError::ExactModelCoefficients),
    }
}

/// Instantaneous quadratic-variation rate of the observable `x . b` under
/// the Stratonovich model: `eps_t^2 (alpha^2 + 1) (|b|^2 - (x.b)^2)`.
pub fn qv_rate(m: &ModelSpec, x: Vec3, t: f64) -> f64 {
    let eps = m.schedule.eval(t);
    let xb = x.dot(m.b);
    eps * eps * (m.alpha * m.alpha + 1.0) * (m.b.norm_squared() - xb * xb)
}

/// Advances the state by one step. `dw` must be drawn as `sqrt(dt)` times a
/// standard 3-d Gaussian by the caller.
pub fn step(m: &ModelSpec, s: &SchemeSpec, x: Vec3, t: f64, dw: Vec3) -> Result<Vec3, StepError> {
    match s.kind {
        SchemeKind::ExplicitEuler => {
            Ok(x + drift(m, x, t)? * s.dt + diffusion(m, x, t)?.mul_vec(dw))
        }
        SchemeKind::ProjectedEuler => {
            let y = x + drift(m, x, t)? * s.dt + diffusion(m, x, t)?.mul_vec(dw);
            let len = y.norm();
            if len < 1e-12 {
                return Err(StepError::DegenerateState { length: len });
            }
            Ok(y * (1.0 / len))
        }
        SchemeKind::SemiImplicitMidpoint => {
            if m.kind != ModelKind::StratonovichIto {
                return Err(StepError::MidpointRequiresStratonovich);
            }
            // solve y = x + A((x+y)/2) (b dt + eps_mid dW) by fixed point
            let eps_mid = m.schedule.eval(t + 0.5 * s.dt);
            let v = m.b * s.dt + dw * eps_mid;
            let iterate = |y: Vec3| {
                let mid = (x + y) * 0.5;
                x + effective_operator(mid, m.alpha).mul_vec(v)
            };
            let mut y = x;
            let mut converged = false;
            for _ in 0..s.fp_maxiter {
                let y_next = iterate(y);
                let delta = (y_next - y).norm();
                y = y_next;
                if delta <= s.fp_tol {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(StepError::NonConvergence { maxiter: s.fp_maxiter });
            }
            // polish to stagnation: the exact fixed point preserves the norm,
            // so a couple of extra contractions put the update on it to
            // round-off
            let mut prev = f64::INFINITY;
            for _ in 0..4 {
                let y_next = iterate(y);
                let delta = (y_next - y).norm();
                if delta >= prev {
                    break;
                }
                y = y_next;
                prev = delta;
                if delta == 0.0 {
                    break;
                }
            }
            Ok(y)
        }
    }
}

fn check_unit(x0: Vec3) -> Result<(), SimulationError> {
    let n = x0.norm();
    if (n - 1.0).abs() > 1e-12 {
        return Err(SimulationError::StartOffSphere(n));
    }
    Ok(())
}

fn grid_steps(t_final: f64, dt: f64) -> usize {
    assert!(t_final > 0.0 && dt > 0.0);
    (t_final / dt).ceil() as usize
}

/// Runs a path on the uniform grid `t_n = n dt` from prescribed Brownian
/// increments (used for common-random-number couplings across schemes and
/// resolutions). `seed` is recorded verbatim in the trajectory.
pub fn path_from_increments(
    m: &ModelSpec,
    s: &SchemeSpec,
    x0: Vec3,
    increments: &[Vec3],
    seed: u64,
) -> Result<Trajectory, SimulationError> {
    m.validate()?;
    check_unit(x0)?;
    let n = increments.len();
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(x0);
    let mut norm_drift = (x0.norm() - 1.0).abs();
    let mut x = x0;
    for (k, &dw) in increments.iter().enumerate() {
        let t = k as f64 * s.dt;
        x = step(m, s, x, t, dw)
            .map_err(|source| SimulationError::AtStep { index: k, source })?;
        times.push((k + 1) as f64 * s.dt);
        states.push(x);
        norm_drift = norm_drift.max((x.norm() - 1.0).abs());
    }
    Ok(Trajectory { times, states, brownian_increments: increments.to_vec(), seed, norm_drift })
}

/// Draws the Brownian increments of a path: `N = ceil(T/dt)` Gaussian
/// 3-vectors scaled by `sqrt(dt)`, from the counter-based stream keyed by
/// `seed`.
pub fn draw_increments(seed: u64, n_steps: usize, dt: f64) -> Vec<Vec3> {
    let mut stream = GaussianStream::new(seed, 0);
    let scale = dt.sqrt();
    (0..n_steps).map(|_| stream.next_gaussian_vec3() * scale).collect()
}

/// Simulates one path of the model on the uniform grid with
/// `N = ceil(T/dt)` steps. The same seed reproduces the identical path
/// bit-for-bit regardless of thread count.
///
/// For `Alpha0Exact` the scheme's `dt` is used and its kind is ignored; the
/// path comes from the exact rotating-frame integrator.
pub fn simulate_path(
    m: &ModelSpec,
    s: &SchemeSpec,
    x0: Vec3,
    t_final: f64,
    seed: u64,
) -> Result<Trajectory, SimulationError> {
    m.validate()?;
    if m.kind == ModelKind::Alpha0Exact {
        return exact_alpha0_path(&m.schedule, m.b, x0, t_final, s.dt, seed)
            .map(|p| p.trajectory);
    }
    let n = grid_steps(t_final, s.dt);
    let increments = draw_increments(seed, n, s.dt);
    path_from_increments(m, s, x0, &increments, seed)
}

/// Exact alpha = 0 integrator from prescribed increments.
///
/// The state is advanced in the rotating, decay-rescaled frame
/// `V_n = exp(-I_n) exp(-L(b) t_n) mu_n` with `I_t = int_0^t eps^2`, where
/// every multiplicative factor is `<= 1`, so the state recursion cannot
/// overflow even when `I_t` diverges; the recorded martingale
/// `N_n = x0 - exp(I_n) V_n` is the only place a large `exp(I_n)` appears.
/// Rotation factors use the exact Rodrigues exponential, and the martingale
/// increments are left-point Euler sums of
/// `exp(-L(b) s + I_s) eps_s L(mu_s) dW_s`.
pub fn exact_alpha0_path_from_increments(
    schedule: &NoiseSchedule,
    b: Vec3,
    x0: Vec3,
    dt: f64,
    increments: &[Vec3],
    seed: u64,
) -> Result<Alpha0Path, SimulationError> {
    check_unit(x0)?;
    let n = increments.len();
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut martingale = Vec::with_capacity(n + 1);
    times.push(0.0);
    states.push(x0);
    martingale.push(Vec3::ZERO);
    let mut norm_drift = (x0.norm() - 1.0).abs();

    let mut v = x0; // V_0
    let mut integral_prev = 0.0;
    for (k, &dw) in increments.iter().enumerate() {
        let t = k as f64 * dt;
        let t_next = (k + 1) as f64 * dt;
        let integral_next = schedule.integral_pow(2.0, 0.0, t_next);
        let eps = schedule.eval(t);
        let mu = states[k];
        // pulled-back martingale increment exp(-L(b) t) eps L(mu) dW
        let pulled = rotation_exp(b, -t).mul_vec(mu.cross(dw) * eps);
        let decay = (integral_prev - integral_next).exp();
        v = (v - pulled) * decay;

        let mu_next = rotation_exp(b, t_next).mul_vec(v);
        times.push(t_next);
        states.push(mu_next);
        martingale.push(x0 - v * integral_next.exp());
        norm_drift = norm_drift.max((mu_next.norm() - 1.0).abs());
        integral_prev = integral_next;
    }

    Ok(Alpha0Path {
        trajectory: Trajectory {
            times,
            states,
            brownian_increments: increments.to_vec(),
            seed,
            norm_drift,
        },
        martingale,
    })
}

/// Exact alpha = 0 path with increments drawn from `seed`, on the uniform
/// grid with `N = ceil(T/dt)` steps.
pub fn exact_alpha0_path(
    schedule: &NoiseSchedule,
    b: Vec3,
    x0: Vec3,
    t_final: f64,
    dt: f64,
    seed: u64,
) -> Result<Alpha0Path, SimulationError> {
    let n = grid_steps(t_final, dt);
    let increments = draw_increments(seed, n, dt);
    exact_alpha0_path_from_increments(schedule, b, x0, dt, &increments, seed)
}
