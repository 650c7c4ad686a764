//! `macrospin` — simulate a single spin under a stochastically perturbed
//! external field and verify its long-time convergence statistics.
//!
//! Exit codes: 0 success, 2 unusable configuration, 3 stepper failure,
//! 4 quantity undefined for the given parameters, 1 anything else.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;
use config::{parse_model_kind, parse_scheme_kind, parse_x0, preset, RunConfig};

#[derive(Parser)]
#[command(name = "macrospin", version, about = "single-spin stochastic dynamics toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Named parameter preset: fig2, fig3, fig4, fig5 or fig6
    #[arg(long)]
    preset: Option<String>,
    /// Flat `key = value` config file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// deterministic | rescaled-ito | pullback-ito | stratonovich | alpha0-exact
    #[arg(long)]
    model: Option<String>,
    /// Damping coefficient, >= 0
    #[arg(long)]
    alpha: Option<f64>,
    /// External field, three comma-separated components
    #[arg(long)]
    b: Option<String>,
    /// Start state: three components on the unit sphere, or `antipodal`
    #[arg(long)]
    x0: Option<String>,
    /// Noise magnitude at t = 0
    #[arg(long)]
    eps0: Option<f64>,
    /// Decay exponent of eps_t = eps0/(t+1)^beta; 0 means constant
    #[arg(long)]
    beta: Option<f64>,
    /// Time step
    #[arg(long)]
    dt: Option<f64>,
    /// Simulation horizon (config key `T`)
    #[arg(long = "t-final")]
    t_final: Option<f64>,
    /// Ensemble size
    #[arg(long)]
    n_paths: Option<usize>,
    /// Master seed (config key `master_seed`)
    #[arg(long, visible_alias = "master-seed")]
    seed: Option<u64>,
    /// explicit-euler | projected-euler | semi-implicit-midpoint
    #[arg(long)]
    scheme: Option<String>,
    /// `all`, `log:N`, or comma-separated times
    #[arg(long)]
    record_times: Option<String>,
    /// Output CSV path
    #[arg(long)]
    output: Option<String>,
    /// Worker threads (default: all cores); results do not depend on it
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path; writes t,mu_x,mu_y,mu_z,norm
    Simulate(CommonArgs),
    /// Gap-moment estimator ensemble (plus squared-norm sibling file)
    Moments {
        #[command(flatten)]
        args: CommonArgs,
        /// Moment order p
        #[arg(short, long, default_value_t = 1)]
        p: u32,
    },
    /// Undamped-case ensembles: mean state and martingale moment
    Alpha0(CommonArgs),
    /// Run the oracle gates and emit a pass/fail table
    Verify {
        /// Restrict to one group: drift, lemmas, refinement or norms
        #[arg(long)]
        only: Option<String>,
        /// Write the table here instead of stdout
        #[arg(long)]
        output: Option<String>,
        /// Worker threads; results do not depend on it
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Compare the three schemes on common random numbers
    SchemesCompare(CommonArgs),
    /// Parse preset/config/flags and echo the canonical configuration
    Config(CommonArgs),
}

fn build_config(args: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.preset {
        Some(name) => preset(name)
            .ok_or_else(|| CliError::Config(format!("unknown preset `{name}`")))?,
        None => RunConfig::default(),
    };
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        cfg.apply_file_text(&text).map_err(CliError::Config)?;
    }
    if let Some(v) = &args.model {
        cfg.model = parse_model_kind(v).map_err(CliError::Config)?;
    }
    if let Some(v) = args.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = &args.b {
        cfg.apply_kv("b", v).map_err(CliError::Config)?;
    }
    if let Some(v) = &args.x0 {
        cfg.x0 = parse_x0(v).map_err(CliError::Config)?;
    }
    if let Some(v) = args.eps0 {
        cfg.eps0 = v;
    }
    if let Some(v) = args.beta {
        cfg.beta = v;
    }
    if let Some(v) = args.dt {
        cfg.dt = v;
    }
    if let Some(v) = args.t_final {
        cfg.t_final = v;
    }
    if let Some(v) = args.n_paths {
        cfg.n_paths = v;
    }
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = &args.scheme {
        cfg.scheme = parse_scheme_kind(v).map_err(CliError::Config)?;
    }
    if let Some(v) = &args.record_times {
        cfg.apply_kv("record_times", v).map_err(CliError::Config)?;
    }
    if let Some(v) = &args.output {
        cfg.output = v.clone();
    }
    Ok(cfg)
}

fn apply_threads(threads: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("threads must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot configure thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => {
            apply_threads(args.threads)?;
            commands::cmd_simulate(&build_config(&args)?)
        }
        Command::Moments { args, p } => {
            apply_threads(args.threads)?;
            commands::cmd_moments(&build_config(&args)?, p)
        }
        Command::Alpha0(args) => {
            apply_threads(args.threads)?;
            commands::cmd_alpha0(&build_config(&args)?)
        }
        Command::Verify { only, output, threads } => {
            apply_threads(threads)?;
            commands::cmd_verify(only.as_deref(), output.as_deref())
        }
        Command::SchemesCompare(args) => {
            apply_threads(args.threads)?;
            commands::cmd_schemes_compare(&build_config(&args)?)
        }
        Command::Config(args) => {
            let cfg = build_config(&args)?;
            cfg.validate(false).map_err(CliError::Config)?;
            print!("{cfg}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("macrospin: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
