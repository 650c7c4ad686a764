//! The five commands. Each one builds its whole output in memory and only
//! then touches the filesystem, so a failed run leaves no partial file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use macrospin::algebra::Vec3;
use macrospin::dynamics::{
    draw_increments, path_from_increments, simulate_path, ModelKind, SchemeKind, SchemeSpec,
    SimulationError, Trajectory,
};
use macrospin::montecarlo::{
    estimate_gap_moment, estimate_mean_state, estimate_sqnorm_moment, martingale_moment_alpha0,
    write_scalar_csv, write_vector_csv, EnsembleConfig, EnsembleError, EstimatorSeries,
    VectorEstimatorSeries,
};
use macrospin::oracles::{all_gates, gates_for, GateGroup, GateResult};

use crate::config::{scheme_kind_name, RunConfig};

/// Command failures mapped to process exit codes in `main`.
#[derive(Debug)]
pub enum CliError {
    /// exit 2: unusable configuration
    Config(String),
    /// exit 3: the stepper failed mid-run
    Scheme(SimulationError),
    /// exit 4: the requested quantity is undefined for these parameters
    Domain(String),
    /// exit 1: filesystem trouble
    Io(std::io::Error),
    /// exit 1: a verification gate failed
    GateFailure(usize),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<EnsembleError> for CliError {
    fn from(e: EnsembleError) -> Self {
        match e {
            EnsembleError::Simulation(s) => CliError::from(s),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SimulationError> for CliError {
    fn from(e: SimulationError) -> Self {
        match e {
            SimulationError::AtStep { .. } => CliError::Scheme(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Scheme(_) => 3,
            CliError::Domain(_) => 4,
            CliError::Io(_) | CliError::GateFailure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Scheme(e) => write!(f, "scheme failure: {e}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::GateFailure(n) => write!(f, "{n} verification gate(s) failed"),
        }
    }
}

/// `out.csv` + `_martingale` -> `out_martingale.csv`.
fn sibling_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}{suffix}"),
    };
    path.with_file_name(name)
}

fn ensemble_config(cfg: &RunConfig) -> EnsembleConfig {
    EnsembleConfig {
        model: cfg.model_spec(),
        scheme: cfg.scheme_spec(),
        x0: cfg.resolved_x0(),
        t_final: cfg.t_final,
        n_paths: cfg.n_paths,
        master_seed: cfg.master_seed,
        record: cfg.record(),
    }
}

fn scalar_csv(series: &EstimatorSeries) -> String {
    let mut buf = Vec::new();
    write_scalar_csv(&mut buf, series).expect("write to memory");
    String::from_utf8(buf).expect("ascii csv")
}

fn vector_csv(series: &VectorEstimatorSeries) -> String {
    let mut buf = Vec::new();
    write_vector_csv(&mut buf, series).expect("write to memory");
    String::from_utf8(buf).expect("ascii csv")
}

/// Simulates one path and writes `t,mu_x,mu_y,mu_z,norm` at the record
/// times.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate(false).map_err(CliError::Config)?;
    let traj = simulate_path(
        &cfg.model_spec(),
        &cfg.scheme_spec(),
        cfg.resolved_x0(),
        cfg.t_final,
        cfg.master_seed,
    )?;
    let n_steps = traj.times.len() - 1;
    let indices = cfg.record().indices(n_steps, cfg.dt);
    let mut out = String::from("t,mu_x,mu_y,mu_z,norm\n");
    for &k in &indices {
        let mu = traj.states[k];
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            traj.times[k],
            mu.x,
            mu.y,
            mu.z,
            mu.norm()
        );
    }
    fs::write(&cfg.output, out)?;
    Ok(())
}

/// Factorial as f64; fine for the small orders used here.
fn factorial(p: u32) -> f64 {
    (1..=p).map(|k| k as f64).product()
}

/// Gap-moment ensemble: writes the `(|b| - mu.b)^p eps^(-2p)` series with a
/// final row carrying the long-time limit `((alpha^2+1)/(2 alpha))^p p!`,
/// plus a `_sqnorm` sibling file with the `||b/|b| - mu||^(2p) eps^(-2p)`
/// series and its limit `((alpha^2+1)/(alpha |b|))^p p!`.
pub fn cmd_moments(cfg: &RunConfig, p: u32) -> Result<(), CliError> {
    cfg.validate(true).map_err(CliError::Config)?;
    if cfg.alpha == 0.0 {
        return Err(CliError::Domain(
            "the gap-moment limit is undefined at alpha = 0; see the alpha0 command".to_string(),
        ));
    }
    if cfg.model != ModelKind::StratonovichIto {
        return Err(CliError::Config(format!(
            "moments requires the stratonovich model, got {}",
            crate::config::model_kind_name(cfg.model)
        )));
    }
    let ens = ensemble_config(cfg);
    let a = cfg.alpha;

    let gap = estimate_gap_moment(&ens, p)?;
    let gap_target = ((a * a + 1.0) / (2.0 * a)).powi(p as i32) * factorial(p);
    let mut out = scalar_csv(&gap);
    let _ = writeln!(out, "target,{gap_target:.16e},,{}", gap.n_paths);
    fs::write(&cfg.output, out)?;

    let sq = estimate_sqnorm_moment(&ens, p)?;
    let sq_target = ((a * a + 1.0) / (a * cfg.b.norm())).powi(p as i32) * factorial(p);
    let mut out = scalar_csv(&sq);
    let _ = writeln!(out, "target,{sq_target:.16e},,{}", sq.n_paths);
    fs::write(sibling_path(Path::new(&cfg.output), "_sqnorm"), out)?;
    Ok(())
}

/// Undamped-case ensembles: componentwise mean state to `output`, and the
/// martingale second moment with its exact curve to a `_martingale`
/// sibling file (`t,mean,stderr,n_paths,exact`).
pub fn cmd_alpha0(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate(true).map_err(CliError::Config)?;
    if cfg.model != ModelKind::Alpha0Exact {
        return Err(CliError::Config(
            "the alpha0 command requires model = alpha0-exact".to_string(),
        ));
    }
    let ens = ensemble_config(cfg);

    let mean = estimate_mean_state(&ens)?;
    fs::write(&cfg.output, vector_csv(&mean))?;

    let mm = martingale_moment_alpha0(&ens, 1)?;
    let mut out = String::from("t,mean,stderr,n_paths,exact\n");
    for j in 0..mm.series.times.len() {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{},{:.16e}",
            mm.series.times[j],
            mm.series.mean[j],
            mm.series.std_error[j],
            mm.series.n_paths,
            mm.bound[j]
        );
    }
    fs::write(sibling_path(Path::new(&cfg.output), "_martingale"), out)?;
    Ok(())
}

fn gate_csv(gates: &[GateResult]) -> String {
    let mut out = String::from("gate,detail,value,pass\n");
    for g in gates {
        let _ = writeln!(out, "{},{},{:.6e},{}", g.gate, g.detail, g.value, g.pass);
    }
    out
}

/// Runs the oracle gates (optionally one group) and writes or prints the
/// pass/fail table. Fails with a non-zero exit if any gate fails.
pub fn cmd_verify(only: Option<&str>, output: Option<&str>) -> Result<(), CliError> {
    let gates = match only {
        None => all_gates(),
        Some("drift") => gates_for(GateGroup::Drift),
        Some("lemmas") => gates_for(GateGroup::Lemmas),
        Some("refinement") => gates_for(GateGroup::Refinement),
        Some("norms") => gates_for(GateGroup::Norms),
        Some(other) => {
            return Err(CliError::Config(format!(
                "unknown gate group `{other}` (expected drift, lemmas, refinement or norms)"
            )))
        }
    };
    let table = gate_csv(&gates);
    match output {
        Some(path) => fs::write(path, table)?,
        None => print!("{table}"),
    }
    let failed = gates.iter().filter(|g| !g.pass).count();
    if failed > 0 {
        return Err(CliError::GateFailure(failed));
    }
    Ok(())
}

/// Runs the three schemes on common random numbers and reports per-scheme
/// norm drift and terminal error against a fine midpoint reference.
/// Writes `scheme,dt,norm_drift,terminal_error,mu_x,mu_y,mu_z`.
pub fn cmd_schemes_compare(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.validate(false).map_err(CliError::Config)?;
    if cfg.model != ModelKind::StratonovichIto {
        return Err(CliError::Config(
            "schemes-compare requires the stratonovich model".to_string(),
        ));
    }
    let model = cfg.model_spec();
    let x0 = cfg.resolved_x0();
    let n = (cfg.t_final / cfg.dt).ceil() as usize;

    // one Brownian path at dt/16 drives everything
    let refine = 16usize;
    let fine_dt = cfg.dt / refine as f64;
    let fine = draw_increments(cfg.master_seed, n * refine, fine_dt);
    let coarse: Vec<Vec3> = fine
        .chunks(refine)
        .map(|c| c.iter().fold(Vec3::ZERO, |acc, &v| acc + v))
        .collect();

    let reference = path_from_increments(
        &model,
        &SchemeSpec::semi_implicit_midpoint(fine_dt),
        x0,
        &fine,
        cfg.master_seed,
    )?;
    let x_ref = *reference.states.last().unwrap();

    let mut out = String::from("scheme,dt,norm_drift,terminal_error,mu_x,mu_y,mu_z\n");
    for kind in [
        SchemeKind::ExplicitEuler,
        SchemeKind::ProjectedEuler,
        SchemeKind::SemiImplicitMidpoint,
    ] {
        let traj: Trajectory = path_from_increments(
            &model,
            &SchemeSpec::new(kind, cfg.dt),
            x0,
            &coarse,
            cfg.master_seed,
        )?;
        let last = *traj.states.last().unwrap();
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            scheme_kind_name(kind),
            cfg.dt,
            traj.norm_drift,
            (last - x_ref).norm(),
            last.x,
            last.y,
            last.z
        );
    }
    fs::write(&cfg.output, out)?;
    Ok(())
}
