use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::config::{Operation, RunConfig};
use super::output::{self, num};
use super::{CliError, OUT_ROOT_ENV};
use crate::catalog::{families, CatalogError, Family, ModelId};
use crate::dynamics::{
    compile_system, energy_initial_condition, integrate, poincare_run, section_survey, section_thickness, sweep,
    CompiledField, DynamicsError, GridAxis, IntegrateOptions, Integrator, PlaneSpec, SectionSurvey, Start,
    SweepSettings, THICKNESS_NEIGHBOURS,
};
use crate::poisson::{lift_to_abstract, BracketContext, Certificate, CertificateReport, PoissonError};
use crate::realize::{
    build_nd_model, build_quasi_model, casimir_identity_check, functional_rank, NdSystem, RealizationSpec, RealizeError,
};
use crate::symexpr::{parse, Expr};

/// What a command printed, its exit code and where its files went.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub out_dir: Option<PathBuf>,
}

impl Outcome {
    pub(crate) fn text(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            out_dir: None,
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<RealizeError> for CliError {
    fn from(e: RealizeError) -> Self {
        match e {
            RealizeError::NoIntegral(id) => CliError::Config(format!("model {id} has no integral")),
            RealizeError::BadDimension(_) | RealizeError::WrongLength { .. } => CliError::Config(e.to_string()),
            other => CliError::Math(other.to_string()),
        }
    }
}

impl From<PoissonError> for CliError {
    fn from(e: PoissonError) -> Self {
        CliError::Math(e.to_string())
    }
}

/// Lists model families. `family` restricts the listing to one id.
pub fn cmd_catalog(family: Option<&str>, json: bool) -> Result<String, CliError> {
    let mut list = families();
    if let Some(f) = family {
        let f: Family = f.parse()?;
        list.retain(|i| i.id == f.id());
    }
    if json {
        let mut s = serde_json::to_string_pretty(&list).map_err(|e| CliError::Io(e.to_string()))?;
        s.push('\n');
        return Ok(s);
    }
    let mut out = String::new();
    for info in &list {
        let _ = writeln!(out, "{:<8} {}", info.id, info.title);
        let _ = writeln!(out, "         id: {}", info.id_syntax);
        let params: Vec<String> = info.parameters.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
        if !params.is_empty() {
            let _ = writeln!(out, "         parameters (defaults): {}", params.join(" "));
        }
        let _ = writeln!(out, "         integral: {}", info.integral);
        if let Some(c) = info.constraint {
            let _ = writeln!(out, "         constraint: {c}");
        }
        for case in &info.integrable_cases {
            let _ = writeln!(out, "         integrable: {case}");
        }
    }
    Ok(out)
}

/// The model id of the config with `[model.params]` merged into its
/// bindings.
fn model_id(cfg: &RunConfig, exact: bool) -> Result<ModelId, CliError> {
    let mut id: ModelId = cfg.model.id.parse()?;
    for (k, v) in &cfg.model.params {
        id.bindings.insert(k.clone(), Expr::constant(v.to_rational(k, exact)?));
    }
    let schema = id.schema();
    if let Some(k) = id.bindings.keys().find(|k| !schema.iter().any(|p| &p.name == *k)) {
        return Err(CatalogError::UnknownParameter {
            model: id.family.id().to_string(),
            name: k.clone(),
        }
        .into());
    }
    Ok(id)
}

/// Model id with every parameter bound, defaults filling the gaps.
fn numeric_model_id(cfg: &RunConfig) -> Result<ModelId, CliError> {
    let mut id = model_id(cfg, false)?;
    let defaults = id.default_bindings();
    id.bindings.extend(defaults);
    Ok(id)
}

enum Centrifugal {
    Symbolic,
    Values(Vec<BigRational>),
}

fn centrifugal(cfg: &RunConfig, exact: bool) -> Result<Centrifugal, CliError> {
    let n = cfg.realization.n as usize;
    match cfg.realization.centrifugal.as_deref().map(str::trim) {
        None if exact => Ok(Centrifugal::Symbolic),
        None => Ok(Centrifugal::Values(vec![BigRational::zero(); n.saturating_sub(1)])),
        Some("symbolic") => Ok(Centrifugal::Symbolic),
        Some(list) => {
            let vals = list
                .split(',')
                .enumerate()
                .map(|(k, v)| super::ParamValue::Text(v.trim().to_string()).to_rational(&format!("b{}", k + 1), exact))
                .collect::<Result<Vec<_>, _>>()?;
            if vals.len() != n.saturating_sub(1) {
                return Err(CliError::Config(format!(
                    "--centrifugal needs {} values for N={n}, got {}",
                    n.saturating_sub(1),
                    vals.len()
                )));
            }
            Ok(Centrifugal::Values(vals))
        }
    }
}

fn spec_of(cfg: &RunConfig, exact: bool) -> Result<RealizationSpec, CliError> {
    Ok(match centrifugal(cfg, exact)? {
        Centrifugal::Symbolic => RealizationSpec::symbolic(cfg.realization.n)?,
        Centrifugal::Values(v) => RealizationSpec::new(cfg.realization.n, v.into_iter().map(Expr::constant).collect())?,
    })
}

fn numeric_b(cfg: &RunConfig) -> Result<Vec<BigRational>, CliError> {
    match centrifugal(cfg, false)? {
        Centrifugal::Symbolic => Err(CliError::Config("numeric runs need numeric centrifugal constants".into())),
        Centrifugal::Values(v) => Ok(v),
    }
}

fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

fn resolve_out_dir(cfg: &mut RunConfig, op: Operation, id: &str) -> PathBuf {
    cfg.operation = Some(op);
    if let Some(d) = &cfg.out_dir {
        return d.clone();
    }
    let root = std::env::var_os(OUT_ROOT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("hh-out"));
    let dir = root.join(format!("{}-{}-n{}", op.name(), slug(id), cfg.realization.n));
    cfg.out_dir = Some(dir.clone());
    dir
}

fn finish(cfg: &RunConfig, dir: &Path) -> Result<(), CliError> {
    output::write(dir, "config.toml", &cfg.to_toml())
}

/// Runs `op` with a resolved config, writing its files.
pub fn execute(op: Operation, cfg: RunConfig) -> Result<Outcome, CliError> {
    match op {
        Operation::Verify => cmd_verify(cfg),
        Operation::Integrate => cmd_integrate(cfg),
        Operation::Poincare => cmd_poincare(cfg),
        Operation::Sweep => cmd_sweep(cfg),
        Operation::Lift => cmd_lift(cfg),
    }
}

fn report(model: &str, mode: &str, pair: &str, certificate: Certificate, start: Instant) -> CertificateReport {
    CertificateReport {
        model: model.to_string(),
        mode: mode.to_string(),
        pair: pair.to_string(),
        certificate,
        wall_time: start.elapsed(),
    }
}

/// Full certificate suite for `(model, N, b)`. Exit code 2 if any
/// certificate leaves a residual.
pub fn cmd_verify(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let id = model_id(&cfg, true)?;
    let spec = spec_of(&cfg, true)?;
    let model = id.build()?;
    if !model.has_integral() {
        return Err(CliError::Config(format!("model {} has no integral", id.canonical())));
    }
    let name = id.canonical();
    let mut reports = Vec::new();
    let (h, i) = (&model.abstract_h, model.abstract_i.as_ref().expect("checked above"));
    let t = Instant::now();
    let c = BracketContext::abstract_leaf().certify_involution(h, i)?;
    reports.push(report(&name, "abstract(M=1)", "H,I", c, t));
    if spec.n() == 2 {
        let t = Instant::now();
        let c = BracketContext::canonical(2).certify_involution(&model.realized_h, model.realized_i.as_ref().expect("checked above"))?;
        reports.push(report(&name, "canonical(N=2)", "H,I", c, t));
    }
    let sys = build_nd_model(&model, &spec)?;
    let mode = format!("realized({})", spec.label());
    for pc in sys.certify_all()? {
        reports.push(CertificateReport {
            model: name.clone(),
            mode: mode.clone(),
            pair: format!("{},{}", pc.left, pc.right),
            certificate: pc.certificate,
            wall_time: pc.wall_time,
        });
    }
    let t = Instant::now();
    reports.push(report(&name, &mode, "casimir identity", casimir_identity_check(&spec)?, t));
    let rank = functional_rank(&sys, &HashMap::new(), cfg.seed, 5).map_err(|e| CliError::Math(e.to_string()))?;
    let all_zero = reports.iter().all(|r| r.certificate.is_zero());
    let pass = all_zero && rank.full();
    let b_mode = match centrifugal(&cfg, true)? {
        Centrifugal::Symbolic => "symbolic".to_string(),
        Centrifugal::Values(v) => format!("b=({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")),
    };
    let summary = format!(
        "{} {} {} {}\n",
        if pass { "PASS" } else { "FAIL" },
        name,
        spec.n(),
        b_mode
    );
    let rank_line = format!(
        "independence: gradient rank {:?} at 5 random points, expected {} (seed {}): {}\n",
        rank.ranks,
        rank.expected,
        cfg.seed,
        if rank.full() { "ok" } else { "deficient" }
    );
    let mut file = String::new();
    let mut stdout = String::new();
    for r in &reports {
        file.push_str(&r.render(false));
        file.push('\n');
        stdout.push_str(&r.render(true));
        stdout.push('\n');
    }
    for s in [&mut file, &mut stdout] {
        s.push_str(&rank_line);
        s.push_str(&summary);
    }
    let dir = resolve_out_dir(&mut cfg, Operation::Verify, &name);
    output::write(&dir, "report.txt", &file)?;
    finish(&cfg, &dir)?;
    Ok(Outcome {
        code: if pass { 0 } else { 2 },
        stdout,
        out_dir: Some(dir),
    })
}

fn read_expr(path: &Path) -> Result<Expr, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(text.trim()).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Lifts a canonical 2D pair (from files, or the catalog model when no
/// files are given) to generator form.
pub fn cmd_lift(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let (source, h, i) = match (&cfg.lift.h_file, &cfg.lift.i_file) {
        (Some(hf), Some(if_)) => (format!("{} {}", hf.display(), if_.display()), read_expr(hf)?, read_expr(if_)?),
        (None, None) => {
            let id = model_id(&cfg, true)?;
            let m = id.build()?;
            let i = m
                .realized_i
                .ok_or_else(|| CliError::Config(format!("model {} has no integral", id.canonical())))?;
            (id.canonical(), m.realized_h, i)
        }
        _ => return Err(CliError::Config("lift needs both --h and --i files".into())),
    };
    let outcome = lift_to_abstract(&h, &i).map_err(|e| CliError::Math(format!("lift of {source} failed: {e}")))?;
    let mut text = String::new();
    let _ = writeln!(text, "source: {source}");
    text.push_str(&outcome.report());
    let _ = writeln!(
        text,
        "{} lift {} H,I",
        if outcome.certificate.is_zero() { "PASS" } else { "FAIL" },
        BracketContext::abstract_leaf().mode_label()
    );
    let label = match &cfg.lift.h_file {
        Some(p) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        None => cfg.model.id.clone(),
    };
    let dir = resolve_out_dir(&mut cfg, Operation::Lift, &label);
    output::write(&dir, "report.txt", &text)?;
    finish(&cfg, &dir)?;
    Ok(Outcome {
        code: if outcome.certificate.is_zero() { 0 } else { 2 },
        stdout: text,
        out_dir: Some(dir),
    })
}

struct NumericRun {
    id: ModelId,
    sys: NdSystem,
    field: CompiledField,
}

fn numeric_run(cfg: &RunConfig) -> Result<NumericRun, CliError> {
    let id = numeric_model_id(cfg)?;
    let model = id.build()?;
    let spec = RealizationSpec::new(cfg.realization.n, numeric_b(cfg)?.into_iter().map(Expr::constant).collect())?;
    let sys = if model.has_integral() {
        build_nd_model(&model, &spec)?
    } else {
        build_quasi_model(&model, &spec)?
    };
    let field = compile_system(&sys, &HashMap::new())?;
    Ok(NumericRun { id, sys, field })
}

fn integrator(name: &str, cfg: &RunConfig) -> Result<Integrator, CliError> {
    match name {
        "verlet" => Ok(Integrator::verlet(cfg.integrate.dt)),
        "dopri5" => Ok(Integrator::Dopri5 {
            rtol: cfg.integrate.rtol,
            atol: cfg.integrate.atol,
        }),
        other => Err(CliError::Config(format!("unknown integrator '{other}' (verlet or dopri5)"))),
    }
}

fn start_state(cfg: &RunConfig, n: usize) -> Vec<f64> {
    cfg.integrate
        .x0
        .clone()
        .unwrap_or_else(|| (0..2 * n).map(|i| if i < n { 0.1 } else { 0.0 }).collect())
}

/// Integrates one trajectory and writes `trajectory.csv`, a plot script
/// and a summary.
pub fn cmd_integrate(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let run = numeric_run(&cfg)?;
    let n = cfg.realization.n as usize;
    let x0 = start_state(&cfg, n);
    let mut opts = IntegrateOptions::new(cfg.integrate.t_end, integrator(&cfg.integrate.integrator, &cfg)?);
    opts = opts.record_every(cfg.integrate.record_every);
    let traj = integrate(&run.field, &x0, &opts)?.with_meta(&run.id.canonical(), &run.sys.spec.label());
    let mut summary = String::new();
    let _ = writeln!(summary, "model: {}", traj.meta.model);
    let _ = writeln!(summary, "spec: {}", traj.meta.spec);
    let _ = writeln!(summary, "integrable: {}", !run.sys.quasi);
    let _ = writeln!(summary, "integrator: {}", traj.meta.integrator);
    let _ = writeln!(summary, "step policy: {}", traj.meta.step_policy);
    let _ = writeln!(summary, "x0: {}", x0.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","));
    let _ = writeln!(summary, "status: {}", traj.status);
    let _ = writeln!(summary, "final time: {}", num(traj.final_time()));
    for (name, d) in traj.monitor_names.iter().zip(&traj.max_drift) {
        let _ = writeln!(summary, "max drift {name}: {}", num(*d));
    }
    let dir = resolve_out_dir(&mut cfg, Operation::Integrate, &run.id.canonical());
    output::write(&dir, "trajectory.csv", &output::trajectory_csv(&traj, n))?;
    output::write(&dir, "trajectory.gp", &output::trajectory_plot("trajectory.csv", &traj))?;
    output::write(&dir, "summary.txt", &summary)?;
    finish(&cfg, &dir)?;
    let code = if cfg.integrate.strict && !traj.status.is_completed() { 3 } else { 0 };
    Ok(Outcome {
        code,
        stdout: summary,
        out_dir: Some(dir),
    })
}

/// Section of one orbit (`x0` given) or of an orbit survey at fixed energy.
pub fn cmd_poincare(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let run = numeric_run(&cfg)?;
    let n = cfg.realization.n as usize;
    let plane = cfg.poincare.plane.parse::<PlaneSpec>()?.resolve(n)?;
    let opts = IntegrateOptions::new(cfg.poincare.t_end, integrator(&cfg.poincare.integrator, &cfg)?);
    let energy = match &cfg.poincare.energy {
        Some(e) => Some(e.to_rational("energy", false)?.to_f64().unwrap_or(f64::NAN)),
        None => None,
    };
    let survey = match (energy, &cfg.integrate.x0) {
        (Some(e), None) => section_survey(&run.field, e, &cfg.poincare.starts, &opts, plane, THICKNESS_NEIGHBOURS)?,
        (e, x) => {
            let mut x0 = x.clone().unwrap_or_else(|| start_state(&cfg, n));
            if let Some(e) = e {
                x0 = energy_initial_condition(&run.field, &x0, e)?;
            }
            let sec = poincare_run(&run.field, &x0, &opts, plane)?;
            SectionSurvey {
                energy: e.unwrap_or_else(|| run.field.energy(&x0)),
                thickness: vec![section_thickness(&sec.project(1, n + 1), THICKNESS_NEIGHBOURS)],
                starts: vec![x0],
                sections: vec![sec],
            }
        }
    };
    let mut summary = String::new();
    let _ = writeln!(summary, "model: {}", run.id.canonical());
    let _ = writeln!(summary, "spec: {}", run.sys.spec.label());
    let _ = writeln!(summary, "plane: {}", plane.label(n));
    let _ = writeln!(summary, "energy: {}", num(survey.energy));
    let _ = writeln!(summary, "integrator: {} T={}", opts.integrator.label(), num(opts.t_end));
    for (k, (sec, th)) in survey.sections.iter().zip(&survey.thickness).enumerate() {
        let worst = sec.residuals.iter().fold(0.0f64, |a, b| a.max(*b));
        let _ = writeln!(
            summary,
            "orbit {k}: start {} points {} run {} max residual {} thickness {}",
            survey.starts[k].iter().map(|v| num(*v)).collect::<Vec<_>>().join(","),
            sec.len(),
            sec.run_status,
            num(worst),
            th.map(num).unwrap_or_else(|| "n/a".into())
        );
    }
    let _ = writeln!(
        summary,
        "section statistic (median local thickness, k={THICKNESS_NEIGHBOURS}): {}",
        survey.median().map(num).unwrap_or_else(|| "n/a (too few crossings)".into())
    );
    if survey.sections.iter().all(|s| s.is_empty()) {
        let _ = writeln!(summary, "warning: no crossings");
    }
    let dir = resolve_out_dir(&mut cfg, Operation::Poincare, &run.id.canonical());
    output::write(&dir, "section.csv", &output::section_csv(&survey, n))?;
    output::write(&dir, "section.gp", &output::section_plot("section.csv", n))?;
    output::write(&dir, "summary.txt", &summary)?;
    finish(&cfg, &dir)?;
    let failed = survey.sections.iter().any(|s| !s.run_status.is_completed());
    Ok(Outcome {
        code: if cfg.integrate.strict && failed { 3 } else { 0 },
        stdout: summary,
        out_dir: Some(dir),
    })
}

/// Runs the parameter grid and writes `sweep.csv`.
pub fn cmd_sweep(mut cfg: RunConfig) -> Result<Outcome, CliError> {
    let axes = cfg
        .sweep
        .grid
        .iter()
        .map(|g| GridAxis::parse(g))
        .collect::<Result<Vec<_>, _>>()?;
    let id = model_id(&cfg, false)?;
    let n = cfg.realization.n as usize;
    let x0 = start_state(&cfg, n);
    let start = match &cfg.poincare.energy {
        Some(e) => Start::Energy {
            x: x0,
            energy: e.to_rational("energy", false)?.to_f64().unwrap_or(f64::NAN),
        },
        None => Start::State(x0),
    };
    let plane = if cfg.sweep.section {
        Some(cfg.poincare.plane.parse::<PlaneSpec>()?)
    } else {
        None
    };
    let settings = SweepSettings {
        model: id.clone(),
        n: cfg.realization.n,
        b: numeric_b(&cfg)?,
        start,
        options: IntegrateOptions::new(cfg.integrate.t_end, integrator(&cfg.integrate.integrator, &cfg)?),
        plane,
    };
    let rows = sweep(&settings, &axes);
    let names: Vec<String> = axes.iter().map(|a| a.name.clone()).collect();
    let mut summary = String::new();
    let _ = writeln!(summary, "model: {}", id.canonical());
    let _ = writeln!(summary, "grid: {}", cfg.sweep.grid.join(" "));
    let _ = writeln!(summary, "rows: {}", rows.len());
    for r in &rows {
        let coords: Vec<String> = r.coords.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mut line = format!(
            "{}: {} driftH {} driftI {}",
            coords.join(" "),
            r.status,
            r.drift_h.map(num).unwrap_or_else(|| "-".into()),
            r.drift_i.map(num).unwrap_or_else(|| "-".into())
        );
        for (m, d) in r.drift_c.iter().enumerate() {
            let _ = write!(line, " driftC{} {}", m + 2, num(*d));
        }
        if let Some(stat) = r.section_statistic {
            let _ = write!(line, " section {stat:?}");
        }
        let _ = writeln!(summary, "{line}");
    }
    let dir = resolve_out_dir(&mut cfg, Operation::Sweep, &id.canonical());
    output::write(&dir, "sweep.csv", &output::sweep_csv(&names, &rows, n))?;
    output::write(&dir, "sweep.gp", &output::sweep_plot("sweep.csv", &names))?;
    output::write(&dir, "summary.txt", &summary)?;
    finish(&cfg, &dir)?;
    let failed = rows.iter().any(|r| r.status != "completed");
    Ok(Outcome {
        code: if cfg.integrate.strict && failed { 3 } else { 0 },
        stdout: summary,
        out_dir: Some(dir),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::ParamValue;

    fn cfg_in(dir: &std::path::Path, model: &str) -> RunConfig {
        let mut c = RunConfig::default();
        c.model.id = model.into();
        c.out_dir = Some(dir.to_path_buf());
        c
    }

    #[test]
    fn catalog_listing() {
        let text = cmd_catalog(None, false).unwrap();
        assert!(text.lines().any(|l| l.contains("constraint: M > R")));
        let generic = cmd_catalog(Some("generic"), false).unwrap();
        for b in ["beta=1/3", "beta=2", "beta=16/3"] {
            assert!(generic.contains(b), "{b}");
        }
        let json: serde_json::Value = serde_json::from_str(&cmd_catalog(None, true).unwrap()).unwrap();
        assert_eq!(json.as_array().unwrap().len(), 6);
        assert!(cmd_catalog(Some("nope"), false).is_err());
    }

    #[test]
    fn verify_passes_and_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = cmd_verify(cfg_in(dir.path(), "sk")).unwrap();
        assert_eq!(out.code, 0, "{}", out.stdout);
        assert!(out.stdout.ends_with("PASS sk 2 symbolic\n"));
        let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
        assert!(!report.contains("wall_time"));
        let cfg = RunConfig::load(&dir.path().join("config.toml")).unwrap();
        assert_eq!(cfg.operation, Some(Operation::Verify));
    }

    #[test]
    fn verify_rejects_models_without_integral_and_floats() {
        let dir = tempfile::tempdir().unwrap();
        let err = cmd_verify(cfg_in(dir.path(), "generic:beta=1")).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("has no integral"));
        let mut c = cfg_in(dir.path(), "sk");
        c.model.params.insert("alpha".into(), ParamValue::Float(0.5));
        assert_eq!(cmd_verify(c).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn lift_errors_exit_two() {
        let dir = tempfile::tempdir().unwrap();
        let h = dir.path().join("h.txt");
        let i = dir.path().join("i.txt");
        std::fs::write(&h, "1/2*(p1^2 + p2^2) + q1").unwrap();
        std::fs::write(&i, "p2").unwrap();
        let mut c = cfg_in(&dir.path().join("out"), "kdv");
        c.lift.h_file = Some(h);
        c.lift.i_file = Some(i);
        let err = cmd_lift(c).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("not liftable"), "{err}");
    }

    #[test]
    fn strict_runs_exit_three() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg_in(dir.path(), "kdv");
        c.integrate.x0 = Some(vec![0.1, 0.1, 0.0, 0.0]);
        c.integrate.t_end = 20.0;
        c.integrate.strict = true;
        let out = cmd_integrate(c.clone()).unwrap();
        assert_eq!(out.code, 3);
        let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
        assert!(csv.trim_end().ends_with("blowup"));
        c.integrate.strict = false;
        assert_eq!(cmd_integrate(c).unwrap().code, 0);
    }

    #[test]
    fn integrate_rejects_symbolic_b() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg_in(dir.path(), "kdv");
        c.realization.centrifugal = Some("symbolic".into());
        assert_eq!(cmd_integrate(c).unwrap_err().exit_code(), 1);
    }
}
