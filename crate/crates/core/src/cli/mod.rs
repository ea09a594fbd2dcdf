//! The `hh` command line: config ingestion, the six subcommands, and the
//! files each run leaves behind.
//!
//! Precedence is flags over config file over built-in defaults. Every run
//! that writes files also writes the fully resolved `config.toml` next to
//! them, so `hh <op> --config <dir>/config.toml` reproduces the run.

mod commands;
mod config;
mod output;

pub use commands::{cmd_catalog, cmd_integrate, cmd_lift, cmd_poincare, cmd_sweep, cmd_verify, execute, Outcome};
pub use config::{
    IntegrateSection, LiftSection, ModelSection, Operation, ParamValue, PoincareSection, RealizationSection, RunConfig,
    SweepSection,
};
pub use output::{num as format_number, trajectory_csv};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Environment variable naming the default output root.
pub const OUT_ROOT_ENV: &str = "HH_OUT_ROOT";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Math(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Math(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hh", version, about = "Integrable Hénon-Heiles systems: certificates, lifts and dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List model families, parameters and integrable cases.
    Catalog {
        #[arg(long)]
        family: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Certify that the model's integrals are in involution.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Integrate Hamilton's equations and record conserved-quantity drift.
    Integrate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Poincaré section of one orbit or of an orbit survey at fixed energy.
    Poincare {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        section: SectionArgs,
    },
    /// Run a parameter grid.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Grid axis `name=v1,v2,..` or `name=start:stop:step`; repeatable.
        #[arg(long = "grid")]
        grid: Vec<String>,
        /// Also compute the section statistic per row.
        #[arg(long)]
        section: bool,
        #[command(flatten)]
        section_args: SectionArgs,
    },
    /// Lift a canonical 2D pair to generator form.
    Lift {
        #[command(flatten)]
        common: CommonArgs,
        /// File holding the 2D Hamiltonian.
        #[arg(long = "h")]
        h_file: Option<PathBuf>,
        /// File holding the 2D integral.
        #[arg(long = "i")]
        i_file: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML run configuration; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model id such as `sk`, `generic:beta=2` or `kdv-mr:M=4,R=3`.
    #[arg(long)]
    model: Option<String>,
    /// Parameter bindings `name=value,...`.
    #[arg(long, allow_hyphen_values = true)]
    params: Option<String>,
    /// Degrees of freedom.
    #[arg(long)]
    n: Option<u32>,
    /// `symbolic` or `b1,b2,...`.
    #[arg(long, allow_hyphen_values = true)]
    centrifugal: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Initial state `q1,..,qN,p1,..,pN`.
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// Duration.
    #[arg(long = "T")]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// `verlet` or `dopri5`.
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    rtol: Option<f64>,
    #[arg(long)]
    atol: Option<f64>,
    #[arg(long)]
    record_every: Option<usize>,
    /// Exit with status 3 if a run ends singular or blown up.
    #[arg(long)]
    strict: bool,
}

#[derive(Debug, Args)]
struct SectionArgs {
    /// Section plane such as `q1=0+`.
    #[arg(long)]
    plane: Option<String>,
    /// Energy used to solve `p1 > 0` for the start points.
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<String>,
    /// Survey start values of `q2`.
    #[arg(long, allow_hyphen_values = true)]
    starts: Option<String>,
}

fn floats(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("{what}: '{v}' is not a number")))
        })
        .collect()
}

fn apply_common(cfg: &mut RunConfig, c: &CommonArgs) -> Result<(), CliError> {
    if let Some(m) = &c.model {
        cfg.model.id = m.clone();
    }
    if let Some(p) = &c.params {
        for item in p.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--params: expected name=value, got '{item}'")))?;
            cfg.model.params.insert(k.trim().to_string(), ParamValue::Text(v.trim().to_string()));
        }
    }
    if let Some(n) = c.n {
        cfg.realization.n = n;
    }
    if let Some(b) = &c.centrifugal {
        cfg.realization.centrifugal = Some(b.clone());
    }
    if let Some(o) = &c.out {
        cfg.out_dir = Some(o.clone());
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    Ok(())
}

fn apply_run(cfg: &mut RunConfig, r: &RunArgs, poincare: bool) -> Result<(), CliError> {
    if let Some(x) = &r.x0 {
        cfg.integrate.x0 = Some(floats(x, "--x0")?);
    }
    if let Some(t) = r.t_end {
        if poincare {
            cfg.poincare.t_end = t;
        } else {
            cfg.integrate.t_end = t;
        }
    }
    if let Some(i) = &r.integrator {
        if poincare {
            cfg.poincare.integrator = i.clone();
        } else {
            cfg.integrate.integrator = i.clone();
        }
    }
    if let Some(dt) = r.dt {
        cfg.integrate.dt = dt;
    }
    if let Some(v) = r.rtol {
        cfg.integrate.rtol = v;
    }
    if let Some(v) = r.atol {
        cfg.integrate.atol = v;
    }
    if let Some(v) = r.record_every {
        cfg.integrate.record_every = v;
    }
    if r.strict {
        cfg.integrate.strict = true;
    }
    Ok(())
}

fn apply_section(cfg: &mut RunConfig, s: &SectionArgs) -> Result<(), CliError> {
    if let Some(p) = &s.plane {
        cfg.poincare.plane = p.clone();
    }
    if let Some(e) = &s.energy {
        cfg.poincare.energy = Some(ParamValue::Text(e.clone()));
    }
    if let Some(v) = &s.starts {
        cfg.poincare.starts = floats(v, "--starts")?;
    }
    Ok(())
}

fn base_config(c: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &c.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    apply_common(&mut cfg, c)?;
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Catalog { family, json } => Ok(Outcome::text(cmd_catalog(family.as_deref(), json)?)),
        Command::Verify { common } => execute(Operation::Verify, base_config(&common)?),
        Command::Integrate { common, run } => {
            let mut cfg = base_config(&common)?;
            apply_run(&mut cfg, &run, false)?;
            execute(Operation::Integrate, cfg)
        }
        Command::Poincare { common, run, section } => {
            let mut cfg = base_config(&common)?;
            apply_run(&mut cfg, &run, true)?;
            apply_section(&mut cfg, &section)?;
            execute(Operation::Poincare, cfg)
        }
        Command::Sweep {
            common,
            run,
            grid,
            section,
            section_args,
        } => {
            let mut cfg = base_config(&common)?;
            apply_run(&mut cfg, &run, false)?;
            apply_section(&mut cfg, &section_args)?;
            if !grid.is_empty() {
                cfg.sweep.grid = grid;
            }
            if section {
                cfg.sweep.section = true;
            }
            execute(Operation::Sweep, cfg)
        }
        Command::Lift { common, h_file, i_file } => {
            let mut cfg = base_config(&common)?;
            if h_file.is_some() {
                cfg.lift.h_file = h_file;
            }
            if i_file.is_some() {
                cfg.lift.i_file = i_file;
            }
            execute(Operation::Lift, cfg)
        }
    }
}

/// Parses arguments, runs the command, prints its output and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            out.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
