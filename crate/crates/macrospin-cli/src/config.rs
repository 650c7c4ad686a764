//! Run configuration: defaults, figure presets, the flat `key = value`
//! config-file format, and its canonical echo.
//!
//! Precedence is defaults < preset < config file < command-line flags.
//! The canonical echo (`Display`) round-trips: parsing it reproduces the
//! configuration exactly, floats included.

use std::fmt;

use macrospin::algebra::Vec3;
use macrospin::dynamics::{ModelKind, ModelSpec, SchemeKind, SchemeSpec};
use macrospin::montecarlo::RecordTimes;
use macrospin::schedule::NoiseSchedule;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum X0Spec {
    /// Start exactly opposite the field, `-b/|b|`.
    Antipodal,
    Point(Vec3),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub alpha: f64,
    pub b: Vec3,
    pub x0: X0Spec,
    pub eps0: f64,
    pub beta: f64,
    pub dt: f64,
    pub t_final: f64,
    pub n_paths: usize,
    pub master_seed: u64,
    pub scheme: SchemeKind,
    pub record_times: String,
    pub output: String,
}

impl Default for RunConfig {
    /// The slow-decay base case: alpha = 2, b along e1, start at latitude
    /// mu.b = -0.5 with azimuth 0, eps_t = 0.1/(t+1), dt = 2e-2, T = 10,
    /// 500 paths. The projected Euler scheme keeps paths on the sphere so
    /// ensemble statistics match the on-sphere process.
    fn default() -> Self {
        RunConfig {
            model: ModelKind::StratonovichIto,
            alpha: 2.0,
            b: Vec3::new(1.0, 0.0, 0.0),
            x0: X0Spec::Point(Vec3::new(-0.5, 0.75f64.sqrt(), 0.0)),
            eps0: 0.1,
            beta: 1.0,
            dt: 2e-2,
            t_final: 10.0,
            n_paths: 500,
            master_seed: 42,
            scheme: SchemeKind::ProjectedEuler,
            record_times: "log:200".to_string(),
            output: "macrospin_out.csv".to_string(),
        }
    }
}

/// Named parameter sets matching the reference experiments.
pub fn preset(name: &str) -> Option<RunConfig> {
    let mut c = RunConfig::default();
    match name {
        // alpha = 2, dt = 2e-2, eps_t = 0.1/(t+1)
        "fig2" => {}
        // alpha = 2, dt = 2e-2, eps_t = 0.1/(t+1)^(1/3)
        "fig3" => c.beta = 1.0 / 3.0,
        // alpha = 2, dt = 2e-3, x0 = -b/|b|, eps_t = 0.1/(t+1)^2
        "fig4" => {
            c.x0 = X0Spec::Antipodal;
            c.beta = 2.0;
            c.dt = 2e-3;
            c.t_final = 20.0;
        }
        // alpha = 0, dt = 2e-3, eps_t = 0.3/(t+1)^2
        "fig5" => {
            c.alpha = 0.0;
            c.eps0 = 0.3;
            c.beta = 2.0;
            c.dt = 2e-3;
            c.t_final = 50.0;
        }
        // alpha = 0, dt = 2e-3, eps_t = 0.3/(t+1)^0.1, exact integrator
        "fig6" => {
            c.model = ModelKind::Alpha0Exact;
            c.alpha = 0.0;
            c.eps0 = 0.3;
            c.beta = 0.1;
            c.dt = 2e-3;
            c.t_final = 50.0;
        }
        _ => return None,
    }
    Some(c)
}

pub fn model_kind_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::Deterministic => "deterministic",
        ModelKind::RescaledIto => "rescaled-ito",
        ModelKind::PullbackIto => "pullback-ito",
        ModelKind::StratonovichIto => "stratonovich",
        ModelKind::Alpha0Exact => "alpha0-exact",
    }
}

pub fn parse_model_kind(s: &str) -> Result<ModelKind, String> {
    match s {
        "deterministic" => Ok(ModelKind::Deterministic),
        "rescaled-ito" => Ok(ModelKind::RescaledIto),
        "pullback-ito" => Ok(ModelKind::PullbackIto),
        "stratonovich" => Ok(ModelKind::StratonovichIto),
        "alpha0-exact" => Ok(ModelKind::Alpha0Exact),
        _ => Err(format!("unknown model kind `{s}`")),
    }
}

pub fn scheme_kind_name(kind: SchemeKind) -> &'static str {
    match kind {
        SchemeKind::ExplicitEuler => "explicit-euler",
        SchemeKind::ProjectedEuler => "projected-euler",
        SchemeKind::SemiImplicitMidpoint => "semi-implicit-midpoint",
    }
}

pub fn parse_scheme_kind(s: &str) -> Result<SchemeKind, String> {
    match s {
        "explicit-euler" => Ok(SchemeKind::ExplicitEuler),
        "projected-euler" => Ok(SchemeKind::ProjectedEuler),
        "semi-implicit-midpoint" => Ok(SchemeKind::SemiImplicitMidpoint),
        _ => Err(format!("unknown scheme kind `{s}`")),
    }
}

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated components, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().map_err(|e| format!("bad component `{p}`: {e}"))?;
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

pub fn parse_x0(s: &str) -> Result<X0Spec, String> {
    if s.trim() == "antipodal" {
        Ok(X0Spec::Antipodal)
    } else {
        parse_vec3(s).map(X0Spec::Point)
    }
}

impl RunConfig {
    /// Applies one `key = value` pair.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "model" => self.model = parse_model_kind(value)?,
            "alpha" => self.alpha = parse_f64(key, value)?,
            "b" => self.b = parse_vec3(value)?,
            "x0" => self.x0 = parse_x0(value)?,
            "eps0" => self.eps0 = parse_f64(key, value)?,
            "beta" => self.beta = parse_f64(key, value)?,
            "dt" => self.dt = parse_f64(key, value)?,
            "T" => self.t_final = parse_f64(key, value)?,
            "n_paths" => {
                self.n_paths =
                    value.parse().map_err(|e| format!("bad value for n_paths: {e}"))?
            }
            "master_seed" => {
                self.master_seed =
                    value.parse().map_err(|e| format!("bad value for master_seed: {e}"))?
            }
            "scheme" => self.scheme = parse_scheme_kind(value)?,
            "record_times" => {
                parse_record_spec(value)?;
                self.record_times = value.to_string();
            }
            "output" => self.output = value.to_string(),
            _ => return Err(format!("unknown configuration key `{key}`")),
        }
        Ok(())
    }

    /// Parses a flat `key = value` file body on top of `self`.
    /// Blank lines and `#` comments are allowed.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), String> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
            self.apply_kv(key.trim(), value.trim())
                .map_err(|e| format!("line {}: {e}", lineno + 1))?;
        }
        Ok(())
    }

    /// Sanity checks shared by every command; `needs_ensemble` additionally
    /// requires at least two paths.
    pub fn validate(&self, needs_ensemble: bool) -> Result<(), String> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(format!("alpha must be finite and non-negative, got {}", self.alpha));
        }
        if !self.b.is_finite() {
            return Err("field b must be finite".to_string());
        }
        if !(self.eps0 > 0.0 && self.eps0.is_finite()) {
            return Err(format!("eps0 must be positive, got {}", self.eps0));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(format!("beta must be non-negative, got {}", self.beta));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(format!("T must be positive, got {}", self.t_final));
        }
        if needs_ensemble && self.n_paths < 2 {
            return Err(format!("need at least 2 paths, got {}", self.n_paths));
        }
        if self.model == ModelKind::Alpha0Exact && self.alpha != 0.0 {
            return Err(format!("the alpha0-exact model requires alpha = 0, got {}", self.alpha));
        }
        if self.model == ModelKind::RescaledIto && self.beta != 0.0 {
            return Err("the rescaled-ito model requires a constant schedule (beta = 0)".to_string());
        }
        if let X0Spec::Point(p) = self.x0 {
            if (p.norm() - 1.0).abs() > 1e-12 {
                return Err(format!("x0 must lie on the unit sphere, |x0| = {}", p.norm()));
            }
        }
        if self.x0 == X0Spec::Antipodal && self.b.norm() == 0.0 {
            return Err("antipodal start needs a non-zero field".to_string());
        }
        parse_record_spec(&self.record_times)?;
        Ok(())
    }

    pub fn schedule(&self) -> NoiseSchedule {
        if self.beta == 0.0 {
            NoiseSchedule::constant(self.eps0)
        } else {
            NoiseSchedule::power_law(self.eps0, self.beta)
        }
    }

    pub fn model_spec(&self) -> ModelSpec {
        ModelSpec { kind: self.model, b: self.b, alpha: self.alpha, schedule: self.schedule() }
    }

    pub fn scheme_spec(&self) -> SchemeSpec {
        SchemeSpec::new(self.scheme, self.dt)
    }

    pub fn resolved_x0(&self) -> Vec3 {
        match self.x0 {
            X0Spec::Antipodal => self.b.normalized() * -1.0,
            X0Spec::Point(p) => p,
        }
    }

    pub fn record(&self) -> RecordTimes {
        parse_record_spec(&self.record_times).expect("record spec validated earlier")
    }
}

/// `all`, `log:N`, or a comma-separated list of times.
pub fn parse_record_spec(s: &str) -> Result<RecordTimes, String> {
    let s = s.trim();
    if s == "all" {
        return Ok(RecordTimes::All);
    }
    if let Some(n) = s.strip_prefix("log:") {
        let count: usize =
            n.parse().map_err(|e| format!("bad record_times count `{n}`: {e}"))?;
        if count == 0 {
            return Err("record_times count must be positive".to_string());
        }
        return Ok(RecordTimes::LogSpaced(count));
    }
    let mut times = Vec::new();
    for part in s.split(',') {
        let t: f64 = part
            .trim()
            .parse()
            .map_err(|e| format!("bad record time `{part}`: {e}"))?;
        if !(t >= 0.0 && t.is_finite()) {
            return Err(format!("record times must be non-negative, got {t}"));
        }
        times.push(t);
    }
    if times.is_empty() {
        return Err("record_times must not be empty".to_string());
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err("record times must be strictly increasing".to_string());
    }
    Ok(RecordTimes::Explicit(times))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    value.parse().map_err(|e| format!("bad value for {key}: {e}"))
}

impl fmt::Display for RunConfig {
    /// Canonical `key = value` form, parseable by [`RunConfig::apply_file_text`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model = {}", model_kind_name(self.model))?;
        writeln!(f, "alpha = {}", self.alpha)?;
        writeln!(f, "b = {},{},{}", self.b.x, self.b.y, self.b.z)?;
        match self.x0 {
            X0Spec::Antipodal => writeln!(f, "x0 = antipodal")?,
            X0Spec::Point(p) => writeln!(f, "x0 = {},{},{}", p.x, p.y, p.z)?,
        }
        writeln!(f, "eps0 = {}", self.eps0)?;
        writeln!(f, "beta = {}", self.beta)?;
        writeln!(f, "dt = {}", self.dt)?;
        writeln!(f, "T = {}", self.t_final)?;
        writeln!(f, "n_paths = {}", self.n_paths)?;
        writeln!(f, "master_seed = {}", self.master_seed)?;
        writeln!(f, "scheme = {}", scheme_kind_name(self.scheme))?;
        writeln!(f, "record_times = {}", self.record_times)?;
        writeln!(f, "output = {}", self.output)
    }
}
