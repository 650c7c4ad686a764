//! The deterministic noise magnitude `eps_t` and its integrability classes.
//!
//! Only the power-law family (plus the constant schedule) is built in; every
//! experiment of interest uses it. Classification is done by exponent
//! arithmetic on closed forms, never by numerical integration, so threshold
//! cases are unambiguous: `beta = 1/2` is classified as not square
//! integrable because `int (t+1)^-1 dt` diverges.

/// Deterministic noise magnitude.
///
/// `PowerLaw { eps0, beta }` is `eps_t = eps0 / (t + 1)^beta`; `Constant` is
/// the degenerate `beta = 0` member kept as its own kind so configurations
/// state their intent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseSchedule {
    Constant { eps0: f64 },
    PowerLaw { eps0: f64, beta: f64 },
}

/// Integrability flags of a schedule.
///
/// `gamma_star` is the infimum of exponents `gamma` with
/// `int_0^inf eps_t^gamma dt < inf` (`None` when no power is integrable);
/// any `gamma > gamma_star` is integrable, `gamma_star` itself is not.
/// `rate_hypothesis_ok` records whether `eps` is C^1 with
/// `eps'_t / eps_t -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleClass {
    pub l2_finite: bool,
    pub l4_finite: bool,
    pub gamma_star: Option<f64>,
    pub rate_hypothesis_ok: bool,
}

impl NoiseSchedule {
    /// Constant magnitude `eps_t = eps0`. Panics unless `eps0 > 0` and finite.
    pub fn constant(eps0: f64) -> Self {
        assert!(eps0 > 0.0 && eps0.is_finite(), "eps0 must be positive, got {eps0}");
        NoiseSchedule::Constant { eps0 }
    }

    /// Power-law magnitude `eps_t = eps0 / (t+1)^beta`.
    /// Panics unless `eps0 > 0` and `beta >= 0`, both finite.
    pub fn power_law(eps0: f64, beta: f64) -> Self {
        assert!(eps0 > 0.0 && eps0.is_finite(), "eps0 must be positive, got {eps0}");
        assert!(beta >= 0.0 && beta.is_finite(), "beta must be non-negative, got {beta}");
        NoiseSchedule::PowerLaw { eps0, beta }
    }

    pub fn eps0(&self) -> f64 {
        match *self {
            NoiseSchedule::Constant { eps0 } | NoiseSchedule::PowerLaw { eps0, .. } => eps0,
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            NoiseSchedule::Constant { .. } => 0.0,
            NoiseSchedule::PowerLaw { beta, .. } => beta,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, NoiseSchedule::Constant { .. })
    }

    /// `eps_t` for `t >= 0`.
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match *self {
            NoiseSchedule::Constant { eps0 } => eps0,
            NoiseSchedule::PowerLaw { eps0, beta } => eps0 / (t + 1.0).powf(beta),
        }
    }

    /// Closed-form `int_{t0}^{t1} eps_u^gamma du`, with `t1 = f64::INFINITY`
    /// allowed; returns `f64::INFINITY` when the tail does not converge
    /// (for the power law: when `gamma * beta <= 1`).
    pub fn integral_pow(&self, gamma: f64, t0: f64, t1: f64) -> f64 {
        assert!(gamma > 0.0, "gamma must be positive");
        assert!(t0 >= 0.0 && t1 >= t0, "need 0 <= t0 <= t1");
        let scale = self.eps0().powf(gamma);
        match *self {
            NoiseSchedule::Constant { .. } => {
                if t1.is_infinite() {
                    f64::INFINITY
                } else {
                    scale * (t1 - t0)
                }
            }
            NoiseSchedule::PowerLaw { beta, .. } => {
                let q = gamma * beta;
                if t1.is_infinite() {
                    if q > 1.0 {
                        scale * (t0 + 1.0).powf(1.0 - q) / (q - 1.0)
                    } else {
                        f64::INFINITY
                    }
                } else if q == 1.0 {
                    scale * ((t1 + 1.0).ln() - (t0 + 1.0).ln())
                } else {
                    let anti = |u: f64| (u + 1.0).powf(1.0 - q) / (1.0 - q);
                    scale * (anti(t1) - anti(t0))
                }
            }
        }
    }

    /// Integrability classification from exponent arithmetic.
    pub fn classify(&self) -> ScheduleClass {
        match *self {
            NoiseSchedule::Constant { .. } => ScheduleClass {
                l2_finite: false,
                l4_finite: false,
                gamma_star: None,
                rate_hypothesis_ok: true, // eps'/eps = 0
            },
            NoiseSchedule::PowerLaw { beta, .. } => ScheduleClass {
                l2_finite: 2.0 * beta > 1.0,
                l4_finite: 4.0 * beta > 1.0,
                gamma_star: if beta > 0.0 { Some(1.0 / beta) } else { None },
                rate_hypothesis_ok: true, // eps'/eps = -beta/(t+1) -> 0
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::adaptive_simpson;
    use crate::rng::GaussianStream;

    #[test]
    fn eval_reference_values() {
        let s = NoiseSchedule::power_law(0.1, 1.0);
        assert_eq!(s.eval(0.0), 0.1);
        assert!((s.eval(9.0) - 0.01).abs() < 1e-18);
        assert_eq!(NoiseSchedule::constant(0.3).eval(1000.0), 0.3);
    }

    #[test]
    fn power_law_is_positive_and_strictly_decreasing() {
        let s = NoiseSchedule::power_law(0.7, 0.4);
        let mut prev = f64::INFINITY;
        for k in 0..300 {
            let v = s.eval(k as f64 * 0.37);
            assert!(v > 0.0 && v < prev);
            prev = v;
        }
    }

    #[test]
    fn integral_pow_reference_values() {
        let s = NoiseSchedule::power_law(0.3, 2.0);
        assert!((s.integral_pow(2.0, 0.0, f64::INFINITY) - 0.03).abs() < 1e-15);

        let s = NoiseSchedule::power_law(0.1, 1.0);
        assert!((s.integral_pow(2.0, 0.0, f64::INFINITY) - 0.01).abs() < 1e-15);

        let s = NoiseSchedule::constant(0.1);
        let t = 17.5;
        assert!((s.integral_pow(2.0, 0.0, t) - 0.01 * t).abs() < 1e-15);
    }

    #[test]
    fn integral_pow_divergent_tails() {
        assert!(NoiseSchedule::constant(0.1)
            .integral_pow(2.0, 0.0, f64::INFINITY)
            .is_infinite());
        // gamma * beta = 1 exactly diverges
        assert!(NoiseSchedule::power_law(0.1, 0.5)
            .integral_pow(2.0, 0.0, f64::INFINITY)
            .is_infinite());
        assert!(NoiseSchedule::power_law(0.1, 1.0 / 3.0)
            .integral_pow(2.0, 0.0, f64::INFINITY)
            .is_infinite());
    }

    #[test]
    fn integral_pow_matches_adaptive_quadrature() {
        // 20 random (eps0, beta, gamma) draws, compared on [0, 100]
        let mut rng = GaussianStream::new(2024, 0);
        for _ in 0..20 {
            let eps0 = 0.05 + 0.95 * rng.next_uniform();
            let beta = 2.5 * rng.next_uniform();
            let gamma = 0.5 + 3.5 * rng.next_uniform();
            let s = NoiseSchedule::power_law(eps0, beta);
            let exact = s.integral_pow(gamma, 0.0, 100.0);
            let quad = adaptive_simpson(|u| s.eval(u).powf(gamma), 0.0, 100.0, 1e-13 * exact);
            assert!(
                (exact - quad).abs() <= 1e-10 * exact,
                "eps0={eps0} beta={beta} gamma={gamma}: {exact} vs {quad}"
            );
        }
    }

    #[test]
    fn classify_reference_cases() {
        let c = NoiseSchedule::power_law(0.1, 1.0).classify();
        assert!(c.l2_finite && c.l4_finite && c.rate_hypothesis_ok);
        assert_eq!(c.gamma_star, Some(1.0));

        let c = NoiseSchedule::power_law(0.1, 1.0 / 3.0).classify();
        assert!(!c.l2_finite && c.l4_finite);
        assert_eq!(c.gamma_star, Some(3.0));

        let c = NoiseSchedule::constant(0.1).classify();
        assert!(!c.l2_finite && !c.l4_finite && c.rate_hypothesis_ok);
        assert_eq!(c.gamma_star, None);
    }

    #[test]
    fn classify_thresholds_are_exact() {
        // exactly at the L^2 threshold: divergent, so flag must be false
        let c = NoiseSchedule::power_law(1.0, 0.5).classify();
        assert!(!c.l2_finite);
        assert!(c.l4_finite);
        let c = NoiseSchedule::power_law(1.0, 0.25).classify();
        assert!(!c.l4_finite);
        // l2_finite implies l4_finite over the family
        for k in 0..40 {
            let beta = k as f64 * 0.05;
            let c = NoiseSchedule::power_law(0.2, beta).classify();
            assert!(!c.l2_finite || c.l4_finite);
        }
    }
}
