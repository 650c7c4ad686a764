//! Seed-reproducible path ensembles and estimator series.
//!
//! Paths are independent work items keyed by `path_seed(master_seed, i)`;
//! the reduction into a series is performed in fixed path-index order with
//! pairwise summation, so results are bitwise identical no matter how many
//! worker threads rayon uses.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::algebra::Vec3;
use crate::dynamics::{
    exact_alpha0_path, qv_rate, simulate_path, ModelKind, ModelSpec, SchemeSpec, SimulationError,
    Trajectory,
};
use crate::rng::path_seed;
use crate::schedule::NoiseSchedule;

/// Which grid indices of a path are recorded into a series.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordTimes {
    /// Every grid point including `t = 0`.
    All,
    /// About this many log-spaced grid points over `(0, T]`, always
    /// including the final one.
    LogSpaced(usize),
    /// Explicit times, snapped to the nearest grid point.
    Explicit(Vec<f64>),
}

impl RecordTimes {
    /// Resolves to strictly increasing grid indices in `0..=n_steps`.
    pub fn indices(&self, n_steps: usize, dt: f64) -> Vec<usize> {
        match self {
            RecordTimes::All => (0..=n_steps).collect(),
            RecordTimes::LogSpaced(count) => {
                let count = (*count).max(1);
                let mut idx: Vec<usize> = (0..count)
                    .map(|k| {
                        let f = (k + 1) as f64 / count as f64;
                        ((n_steps as f64).powf(f)).round() as usize
                    })
                    .map(|i| i.clamp(1, n_steps))
                    .collect();
                idx.dedup();
                idx
            }
            RecordTimes::Explicit(times) => {
                let mut idx: Vec<usize> = times
                    .iter()
                    .map(|t| ((t / dt).round() as usize).min(n_steps))
                    .collect();
                idx.sort_unstable();
                idx.dedup();
                idx
            }
        }
    }
}

/// An ensemble run: model, scheme, start, horizon, size, seeding and which
/// times to record.
#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub model: ModelSpec,
    pub scheme: SchemeSpec,
    pub x0: Vec3,
    pub t_final: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    pub record: RecordTimes,
}

/// Time-indexed scalar Monte Carlo estimates with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSeries {
    pub times: Vec<f64>,
    pub mean: Vec<f64>,
    pub std_error: Vec<f64>,
    pub n_paths: usize,
}

/// Componentwise vector estimates; `std_error` is pooled over components,
/// `sqrt((var_x + var_y + var_z) / n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorEstimatorSeries {
    pub times: Vec<f64>,
    pub mean: Vec<Vec3>,
    pub std_error: Vec<f64>,
    pub n_paths: usize,
}

/// Martingale moment estimate together with its theoretical curve: the
/// exact identity `exp(2 int eps^2) - 1` for `p = 1`, the
/// Burkholder-Davis-Gundy bound `c_p (exp(2 int eps^2) - 1)^p` for `p >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MartingaleMoment {
    pub series: EstimatorSeries,
    pub bound: Vec<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error("an ensemble needs at least two paths, got {0}")]
    TooFewPaths(usize),
    #[error("no record times fall on the simulation grid")]
    EmptyRecord,
    #[error("this estimator requires the Stratonovich model, got {0:?}")]
    NeedsStratonovich(ModelKind),
    #[error("this estimator requires a schedule with eps'/eps -> 0")]
    RateHypothesis,
    #[error("this estimator requires the exact alpha=0 model, got {0:?}")]
    NeedsAlpha0Exact(ModelKind),
    #[error(transparent)]
    Simulation(#[from] SimulationError),
}

/// Pairwise (cascade) summation all the way down; deterministic, accurate,
/// and exact for power-of-two counts of identical values (so an ensemble of
/// identical deterministic paths averages to the path itself, bit for bit).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

fn mean_and_stderr(column: &[f64]) -> (f64, f64) {
    let n = column.len() as f64;
    let mean = pairwise_sum(column) / n;
    let sq: Vec<f64> = column.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn record_setup(cfg: &EnsembleConfig) -> Result<(Vec<usize>, Vec<f64>), EnsembleError> {
    if cfg.n_paths < 2 {
        return Err(EnsembleError::TooFewPaths(cfg.n_paths));
    }
    let n_steps = (cfg.t_final / cfg.scheme.dt).ceil() as usize;
    let indices = cfg.record.indices(n_steps, cfg.scheme.dt);
    if indices.is_empty() {
        return Err(EnsembleError::EmptyRecord);
    }
    let times = indices.iter().map(|&i| i as f64 * cfg.scheme.dt).collect();
    Ok((indices, times))
}

/// Runs the ensemble and extracts one scalar per recorded index per path,
/// then reduces columns in path order.
fn scalar_ensemble<F>(cfg: &EnsembleConfig, extract: F) -> Result<EstimatorSeries, EnsembleError>
where
    F: Fn(&Trajectory, &[usize]) -> Vec<f64> + Sync,
{
    let (indices, times) = record_setup(cfg)?;
    let rows: Vec<Result<Vec<f64>, SimulationError>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let seed = path_seed(cfg.master_seed, i as u64);
            let traj = simulate_path(&cfg.model, &cfg.scheme, cfg.x0, cfg.t_final, seed)?;
            Ok(extract(&traj, &indices))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut mean = Vec::with_capacity(indices.len());
    let mut std_error = Vec::with_capacity(indices.len());
    let mut column = vec![0.0; cfg.n_paths];
    for j in 0..indices.len() {
        for (i, row) in rows.iter().enumerate() {
            column[i] = row[j];
        }
        let (m, se) = mean_and_stderr(&column);
        mean.push(m);
        std_error.push(se);
    }
    Ok(EstimatorSeries { times, mean, std_error, n_paths: cfg.n_paths })
}

/// Sample mean of `(|b| - mu_t . b)^p eps_t^(-2p)` with standard errors.
/// Under the decreasing-noise Stratonovich model this converges to
/// `((alpha^2 + 1) / (2 alpha))^p p!` as `t` grows.
pub fn estimate_gap_moment(cfg: &EnsembleConfig, p: u32) -> Result<EstimatorSeries, EnsembleError> {
    if cfg.model.kind != ModelKind::StratonovichIto {
        return Err(EnsembleError::NeedsStratonovich(cfg.model.kind));
    }
    if !cfg.model.schedule.classify().rate_hypothesis_ok {
        return Err(EnsembleError::RateHypothesis);
    }
    let b = cfg.model.b;
    let b_norm = b.norm();
    let schedule = cfg.model.schedule;
    scalar_ensemble(cfg, move |traj, indices| {
        indices
            .iter()
            .map(|&k| {
                let gap = b_norm - traj.states[k].dot(b);
                let eps = schedule.eval(traj.times[k]);
                gap.powi(p as i32) * eps.powi(-2 * p as i32)
            })
            .collect()
    })
}

/// Sample mean of `||b/|b| - mu_t||^(2p) eps_t^(-2p)`; the squared-norm
/// counterpart of [`estimate_gap_moment`], converging to
/// `((alpha^2 + 1) / (alpha |b|))^p p!`.
pub fn estimate_sqnorm_moment(
    cfg: &EnsembleConfig,
    p: u32,
) -> Result<EstimatorSeries, EnsembleError> {
    if cfg.model.kind != ModelKind::StratonovichIto {
        return Err(EnsembleError::NeedsStratonovich(cfg.model.kind));
    }
    let b_hat = cfg.model.b.normalized();
    let schedule = cfg.model.schedule;
    scalar_ensemble(cfg, move |traj, indices| {
        indices
            .iter()
            .map(|&k| {
                let d = (b_hat - traj.states[k]).norm_squared();
                let eps = schedule.eval(traj.times[k]);
                d.powi(p as i32) * eps.powi(-2 * p as i32)
            })
            .collect()
    })
}

/// Componentwise sample mean of the state with pooled standard errors.
pub fn estimate_mean_state(cfg: &EnsembleConfig) -> Result<VectorEstimatorSeries, EnsembleError> {
    let (indices, times) = record_setup(cfg)?;
    let rows: Vec<Result<Vec<Vec3>, SimulationError>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let seed = path_seed(cfg.master_seed, i as u64);
            let traj = simulate_path(&cfg.model, &cfg.scheme, cfg.x0, cfg.t_final, seed)?;
            Ok(indices.iter().map(|&k| traj.states[k]).collect())
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(reduce_vector_rows(&rows, times, cfg.n_paths, &indices))
}

fn reduce_vector_rows(
    rows: &[Vec<Vec3>],
    times: Vec<f64>,
    n_paths: usize,
    indices: &[usize],
) -> VectorEstimatorSeries {
    let mut mean = Vec::with_capacity(indices.len());
    let mut std_error = Vec::with_capacity(indices.len());
    let mut column = vec![0.0; n_paths];
    for j in 0..indices.len() {
        let mut m = Vec3::ZERO;
        let mut pooled_var = 0.0;
        for axis in 0..3 {
            for (i, row) in rows.iter().enumerate() {
                column[i] = row[j].component(axis);
            }
            let (cm, cse) = mean_and_stderr(&column);
            match axis {
                0 => m.x = cm,
                1 => m.y = cm,
                _ => m.z = cm,
            }
            pooled_var += cse * cse;
        }
        mean.push(m);
        std_error.push(pooled_var.sqrt());
    }
    VectorEstimatorSeries { times, mean, std_error, n_paths }
}

/// The pathwise almost-sure rate observable
/// `||b/|b| - mu_t||^2 eps_t^(-2 + eta)` along one trajectory.
pub fn pathwise_rate_series(
    traj: &Trajectory,
    schedule: &NoiseSchedule,
    b: Vec3,
    eta: f64,
) -> Vec<f64> {
    assert!(b.norm() > 0.0, "need a non-zero field");
    let b_hat = b.normalized();
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, mu)| (b_hat - *mu).norm_squared() * schedule.eval(t).powf(-2.0 + eta))
        .collect()
}

/// Cumulative realized quadratic variation of `mu . b` along one path:
/// partial sums of `(mu_{n+1}.b - mu_n.b)^2`, aligned with `traj.times`.
pub fn realized_qv(traj: &Trajectory, b: Vec3) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in traj.states.windows(2) {
        let inc = w[1].dot(b) - w[0].dot(b);
        acc += inc * inc;
        out.push(acc);
    }
    out
}

/// Cumulative left-point integral of the quadratic-variation rate along the
/// same path, for comparison with [`realized_qv`].
pub fn integrated_qv_rate(traj: &Trajectory, m: &ModelSpec) -> Vec<f64> {
    let mut out = Vec::with_capacity(traj.times.len());
    let mut acc = 0.0;
    out.push(0.0);
    for k in 0..traj.states.len() - 1 {
        let dt = traj.times[k + 1] - traj.times[k];
        acc += qv_rate(m, traj.states[k], traj.times[k]) * dt;
        out.push(acc);
    }
    out
}

/// BDG constant `c_p = (p(p-1)/2 (p/(p-1))^p)^(p/2)` for `p >= 2`.
fn bdg_constant(p: u32) -> f64 {
    let p = p as f64;
    (p * (p - 1.0) / 2.0 * (p / (p - 1.0)).powf(p)).powf(p / 2.0)
}

/// Sample mean of `||N_t||^(2p)` over exact alpha = 0 paths, with the
/// theoretical curve: exact for `p = 1`, one-sided BDG bound for `p >= 2`.
pub fn martingale_moment_alpha0(
    cfg: &EnsembleConfig,
    p: u32,
) -> Result<MartingaleMoment, EnsembleError> {
    if cfg.model.kind != ModelKind::Alpha0Exact {
        return Err(EnsembleError::NeedsAlpha0Exact(cfg.model.kind));
    }
    assert!(p >= 1, "moment order must be at least 1");
    let (indices, times) = record_setup(cfg)?;
    let schedule = cfg.model.schedule;
    let rows: Vec<Result<Vec<f64>, SimulationError>> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let seed = path_seed(cfg.master_seed, i as u64);
            let path = exact_alpha0_path(
                &schedule,
                cfg.model.b,
                cfg.x0,
                cfg.t_final,
                cfg.scheme.dt,
                seed,
            )?;
            Ok(indices
                .iter()
                .map(|&k| path.martingale[k].norm_squared().powi(p as i32))
                .collect())
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;

    let mut mean = Vec::with_capacity(indices.len());
    let mut std_error = Vec::with_capacity(indices.len());
    let mut column = vec![0.0; cfg.n_paths];
    for j in 0..indices.len() {
        for (i, row) in rows.iter().enumerate() {
            column[i] = row[j];
        }
        let (m, se) = mean_and_stderr(&column);
        mean.push(m);
        std_error.push(se);
    }

    let bound = times
        .iter()
        .map(|&t| {
            let grow = (2.0 * schedule.integral_pow(2.0, 0.0, t)).exp() - 1.0;
            if p == 1 {
                grow
            } else {
                bdg_constant(p) * grow.powi(p as i32)
            }
        })
        .collect();

    Ok(MartingaleMoment {
        series: EstimatorSeries { times, mean, std_error, n_paths: cfg.n_paths },
        bound,
    })
}

/// Writes `t,mean,stderr,n_paths` rows.
pub fn write_scalar_csv<W: Write>(w: &mut W, s: &EstimatorSeries) -> io::Result<()> {
    writeln!(w, "t,mean,stderr,n_paths")?;
    for j in 0..s.times.len() {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{}",
            s.times[j], s.mean[j], s.std_error[j], s.n_paths
        )?;
    }
    Ok(())
}

/// Writes `t,mean,mean_y,mean_z,stderr,n_paths` rows (the first mean column
/// is the x component).
pub fn write_vector_csv<W: Write>(w: &mut W, s: &VectorEstimatorSeries) -> io::Result<()> {
    writeln!(w, "t,mean,mean_y,mean_z,stderr,n_paths")?;
    for j in 0..s.times.len() {
        let m = s.mean[j];
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            s.times[j], m.x, m.y, m.z, s.std_error[j], s.n_paths
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::NoiseSchedule;

    fn fig2_config(n_paths: usize, t_final: f64) -> EnsembleConfig {
        EnsembleConfig {
            model: ModelSpec::stratonovich(
                Vec3::new(1.0, 0.0, 0.0),
                2.0,
                NoiseSchedule::power_law(0.1, 1.0),
            ),
            scheme: SchemeSpec::projected_euler(2e-2),
            x0: Vec3::new(-0.5, 0.75f64.sqrt(), 0.0),
            t_final,
            n_paths,
            master_seed: 42,
            record: RecordTimes::LogSpaced(40),
        }
    }

    #[test]
    fn record_times_resolve_to_grid_indices() {
        let all = RecordTimes::All.indices(10, 0.1);
        assert_eq!(all, (0..=10).collect::<Vec<_>>());
        let log = RecordTimes::LogSpaced(5).indices(1000, 0.01);
        assert!(log.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*log.last().unwrap(), 1000);
        let expl = RecordTimes::Explicit(vec![0.0, 0.55, 0.9, 2.0]).indices(10, 0.1);
        assert_eq!(expl, vec![0, 6, 9, 10]);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_inputs() {
        let v: Vec<f64> = (0..1000).map(|k| (k as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-9);
    }

    #[test]
    fn gap_moment_order_zero_is_identically_one() {
        let cfg = fig2_config(8, 1.0);
        let s = estimate_gap_moment(&cfg, 0).unwrap();
        assert!(s.mean.iter().all(|&m| m == 1.0));
        assert!(s.std_error.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn gap_moment_rejects_wrong_models() {
        let mut cfg = fig2_config(8, 1.0);
        cfg.model = ModelSpec::deterministic(Vec3::new(1.0, 0.0, 0.0), 2.0);
        assert!(matches!(
            estimate_gap_moment(&cfg, 1),
            Err(EnsembleError::NeedsStratonovich(_))
        ));
    }

    #[test]
    fn ensembles_reject_fewer_than_two_paths() {
        let cfg = fig2_config(1, 1.0);
        assert!(matches!(
            estimate_gap_moment(&cfg, 1),
            Err(EnsembleError::TooFewPaths(1))
        ));
    }

    #[test]
    fn mean_state_of_deterministic_model_has_zero_stderr() {
        let mut cfg = fig2_config(16, 2.0);
        cfg.model = ModelSpec::deterministic(Vec3::new(1.0, 0.0, 0.0), 2.0);
        let s = estimate_mean_state(&cfg).unwrap();
        let single =
            simulate_path(&cfg.model, &cfg.scheme, cfg.x0, cfg.t_final, path_seed(42, 0)).unwrap();
        let indices = cfg.record.indices(100, 2e-2);
        for (j, &k) in indices.iter().enumerate() {
            assert_eq!(s.mean[j], single.states[k]);
            assert_eq!(s.std_error[j], 0.0);
        }
    }

    #[test]
    fn mean_state_converges_to_the_pole_under_square_integrable_noise() {
        let cfg = fig2_config(50, 30.0);
        let s = estimate_mean_state(&cfg).unwrap();
        let last = *s.mean.last().unwrap();
        let pooled = *s.std_error.last().unwrap();
        let b_hat = Vec3::new(1.0, 0.0, 0.0);
        assert!(
            (last - b_hat).norm() <= 5.0 * pooled + 1e-3,
            "terminal mean {last:?}, pooled stderr {pooled}"
        );
    }

    #[test]
    fn ensembles_are_bitwise_deterministic_across_thread_counts() {
        let cfg = fig2_config(24, 2.0);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate_gap_moment(&cfg, 1).unwrap());
        let b = four.install(|| estimate_gap_moment(&cfg, 1).unwrap());
        assert_eq!(a, b);
        let va = one.install(|| estimate_mean_state(&cfg).unwrap());
        let vb = four.install(|| estimate_mean_state(&cfg).unwrap());
        assert_eq!(va, vb);
    }

    #[test]
    fn nested_seeds_keep_estimates_within_pooled_error_bars() {
        let small = fig2_config(100, 5.0);
        let mut large = fig2_config(400, 5.0);
        large.master_seed = small.master_seed;
        let a = estimate_gap_moment(&small, 1).unwrap();
        let b = estimate_gap_moment(&large, 1).unwrap();
        for j in 0..a.times.len() {
            let pooled = (a.std_error[j].powi(2) + b.std_error[j].powi(2)).sqrt();
            assert!(
                (a.mean[j] - b.mean[j]).abs() <= 6.0 * pooled,
                "t = {}: {} vs {}",
                a.times[j],
                a.mean[j],
                b.mean[j]
            );
        }
    }

    #[test]
    fn constant_noise_keeps_the_gap_bounded_away_from_zero() {
        // with eps fixed the field direction is not an equilibrium: the raw
        // terminal gap stays at least 5 standard errors above zero
        let mut cfg = fig2_config(100, 30.0);
        cfg.model =
            ModelSpec::stratonovich(Vec3::new(1.0, 0.0, 0.0), 2.0, NoiseSchedule::constant(0.1));
        let s = estimate_gap_moment(&cfg, 1).unwrap();
        let eps = 0.1f64;
        let raw_gap = s.mean.last().unwrap() * eps.powi(2);
        let raw_se = s.std_error.last().unwrap() * eps.powi(2);
        assert!(raw_gap > 0.0 && raw_gap >= 5.0 * raw_se, "gap {raw_gap}, se {raw_se}");
        // and the scaled moment stays finite and positive under condition (ii)
        let decr = estimate_gap_moment(&fig2_config(100, 10.0), 1).unwrap();
        let last = *decr.mean.last().unwrap();
        assert!(last.is_finite() && last > 0.0);
    }

    #[test]
    fn pathwise_rate_series_reference_cases() {
        let b = Vec3::new(2.0, 0.0, 0.0);
        let schedule = NoiseSchedule::power_law(0.1, 1.0);
        // synthetic path pinned at the pole
        let pinned = Trajectory {
            times: vec![0.0, 1.0, 2.0],
            states: vec![Vec3::new(1.0, 0.0, 0.0); 3],
            brownian_increments: vec![Vec3::ZERO; 2],
            seed: 0,
            norm_drift: 0.0,
        };
        assert!(pathwise_rate_series(&pinned, &schedule, b, 0.25).iter().all(|&v| v == 0.0));

        // eta = 2 removes the eps factor entirely; bounded by 4 on the sphere
        let m = ModelSpec::stratonovich(Vec3::new(1.0, 0.0, 0.0), 2.0, schedule);
        let traj = simulate_path(
            &m,
            &SchemeSpec::projected_euler(2e-2),
            Vec3::new(-0.5, 0.75f64.sqrt(), 0.0),
            5.0,
            3,
        )
        .unwrap();
        let series = pathwise_rate_series(&traj, &schedule, m.b, 2.0);
        for (k, v) in series.iter().enumerate() {
            let d = (m.b.normalized() - traj.states[k]).norm_squared();
            assert!((v - d).abs() <= 1e-12);
            assert!(*v <= 4.0 + 1e-9);
        }
    }

    #[test]
    fn realized_qv_vanishes_on_constant_paths() {
        let b = Vec3::new(1.0, 0.0, 0.0);
        let m = ModelSpec::deterministic(b, 2.0);
        let traj =
            simulate_path(&m, &SchemeSpec::explicit_euler(0.1), b, 3.0, 0).unwrap();
        assert!(realized_qv(&traj, b).iter().all(|&v| v == 0.0));
        assert!(integrated_qv_rate(&traj, &m).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn martingale_moment_is_zero_at_time_zero_and_bounded_for_p2() {
        let cfg = EnsembleConfig {
            model: ModelSpec::alpha0_exact(
                Vec3::new(1.0, 0.0, 0.0),
                NoiseSchedule::power_law(0.3, 2.0),
            ),
            scheme: SchemeSpec::explicit_euler(1e-2),
            x0: Vec3::new(0.0, 1.0, 0.0),
            t_final: 5.0,
            n_paths: 200,
            master_seed: 7,
            record: RecordTimes::Explicit(vec![0.0, 0.5, 1.0, 2.0, 5.0]),
        };
        let m1 = martingale_moment_alpha0(&cfg, 1).unwrap();
        assert_eq!(m1.series.times[0], 0.0);
        assert_eq!(m1.series.mean[0], 0.0);
        assert_eq!(m1.bound[0], 0.0);
        // p = 1: exact identity within 3 standard errors
        for j in 1..m1.series.times.len() {
            let gap = (m1.series.mean[j] - m1.bound[j]).abs();
            assert!(gap <= 3.0 * m1.series.std_error[j], "t = {}", m1.series.times[j]);
        }
        // p = 2: one-sided BDG bound
        let m2 = martingale_moment_alpha0(&cfg, 2).unwrap();
        for j in 0..m2.series.times.len() {
            assert!(m2.series.mean[j] <= m2.bound[j] + 1e-15);
        }
    }

    #[test]
    fn martingale_moment_rejects_other_models() {
        let mut cfg = fig2_config(8, 1.0);
        cfg.record = RecordTimes::Explicit(vec![1.0]);
        assert!(matches!(
            martingale_moment_alpha0(&cfg, 1),
            Err(EnsembleError::NeedsAlpha0Exact(_))
        ));
    }
}
