use std::fmt;

use serde::Serialize;

use super::{CompiledField, DynamicsError};

/// Guard values below this count as a singular approach.
pub const EPS_SINGULAR: f64 = 1e-8;
/// States with a component beyond this magnitude count as a blowup.
pub const BLOWUP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Integrator {
    /// Kick-drift-kick leapfrog with a fixed step; needs `H = T(p) + V(q)`.
    Verlet { dt: f64 },
    /// Dormand-Prince 5(4) with adaptive steps.
    Dopri5 { rtol: f64, atol: f64 },
}

impl Integrator {
    pub fn verlet(dt: f64) -> Self {
        Integrator::Verlet { dt }
    }

    pub fn dopri5() -> Self {
        Integrator::Dopri5 {
            rtol: 1e-10,
            atol: 1e-12,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Integrator::Verlet { dt } => format!("stormer-verlet dt={dt}"),
            Integrator::Dopri5 { rtol, atol } => format!("dopri5 rtol={rtol} atol={atol}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrateOptions {
    pub t_end: f64,
    pub integrator: Integrator,
    /// Store every `record_every`-th step; the final state is always stored.
    pub record_every: usize,
}

impl IntegrateOptions {
    pub fn new(t_end: f64, integrator: Integrator) -> Self {
        IntegrateOptions {
            t_end,
            integrator,
            record_every: 1,
        }
    }

    pub fn record_every(mut self, k: usize) -> Self {
        self.record_every = k.max(1);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    Singular { t: f64 },
    Blowup { t: f64 },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }

    pub fn label(&self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::Singular { .. } => "singular",
            RunStatus::Blowup { .. } => "blowup",
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Completed => write!(f, "completed"),
            RunStatus::Singular { t } => write!(f, "singular at t={t}"),
            RunStatus::Blowup { t } => write!(f, "blowup at t={t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct TrajectoryMeta {
    pub model: String,
    pub spec: String,
    pub integrator: String,
    pub step_policy: String,
}

/// A recorded run. `drift[k][j]` is the relative drift of monitor `k` at
/// sample `j`; `max_drift[k]` is its maximum over every step taken.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub monitor_names: Vec<String>,
    pub drift: Vec<Vec<f64>>,
    pub max_drift: Vec<f64>,
    pub status: RunStatus,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn final_state(&self) -> &[f64] {
        self.states.last().map(|s| s.as_slice()).unwrap_or(&[])
    }

    pub fn final_time(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Maximum drift of the named monitor over the whole run.
    pub fn max_drift_of(&self, name: &str) -> Option<f64> {
        let k = self.monitor_names.iter().position(|n| n == name)?;
        Some(self.max_drift[k])
    }

    pub fn with_meta(mut self, model: &str, spec: &str) -> Self {
        self.meta.model = model.to_string();
        self.meta.spec = spec.to_string();
        self
    }
}

/// One accepted step `(t0, x0) -> (t1, x1)`.
pub struct Step<'a> {
    pub t0: f64,
    pub x0: &'a [f64],
    pub t1: f64,
    pub x1: &'a [f64],
}

pub(crate) fn relative_drift(value: f64, initial: f64) -> f64 {
    (value - initial).abs() / initial.abs().max(1.0)
}

fn check_state(field: &CompiledField, prev: &[f64], x: &[f64], t: f64) -> Option<RunStatus> {
    if x.iter().any(|v| !v.is_finite() || v.abs() > BLOWUP) {
        return Some(RunStatus::Blowup { t });
    }
    if field.guard_margin(x) < EPS_SINGULAR || field.guard_crossed(prev, x) {
        return Some(RunStatus::Singular { t });
    }
    None
}

/// Fails if `x0` has the wrong length or violates a guard.
pub fn check_admissible(field: &CompiledField, x0: &[f64]) -> Result<(), DynamicsError> {
    let n = 2 * field.dimension();
    if x0.len() != n {
        return Err(DynamicsError::BadState {
            expected: n,
            got: x0.len(),
        });
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(DynamicsError::Inadmissible("non-finite component".into()));
    }
    let m = field.guard_margin(x0);
    if m < EPS_SINGULAR {
        return Err(DynamicsError::Inadmissible(format!("guard margin {m:e} below {EPS_SINGULAR:e}")));
    }
    Ok(())
}

/// Integrates from `x0`, calling `observe` after every accepted step, and
/// returns how the run ended.
pub fn drive<F>(field: &CompiledField, x0: &[f64], opts: &IntegrateOptions, observe: F) -> Result<RunStatus, DynamicsError>
where
    F: FnMut(&Step<'_>),
{
    check_admissible(field, x0)?;
    if !(opts.t_end >= 0.0 && opts.t_end.is_finite()) {
        return Err(DynamicsError::BadSettings(format!("duration {}", opts.t_end)));
    }
    match opts.integrator {
        Integrator::Verlet { dt } => verlet(field, x0, opts.t_end, dt, observe),
        Integrator::Dopri5 { rtol, atol } => dopri5(field, x0, opts.t_end, rtol, atol, observe),
    }
}

fn verlet<F>(field: &CompiledField, x0: &[f64], t_end: f64, dt: f64, mut observe: F) -> Result<RunStatus, DynamicsError>
where
    F: FnMut(&Step<'_>),
{
    if !field.is_separable() {
        return Err(DynamicsError::NotSeparable);
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DynamicsError::BadSettings(format!("step {dt}")));
    }
    let n = field.dimension();
    let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as u64;
    let mut x = x0.to_vec();
    let mut prev = x.clone();
    let mut force = vec![0.0; n];
    let mut vel = vec![0.0; n];
    field.force(&x, &mut force);
    let mut t = 0.0;
    for k in 0..steps {
        let h = if k + 1 == steps { t_end - dt * k as f64 } else { dt };
        prev.copy_from_slice(&x);
        for i in 0..n {
            x[n + i] += 0.5 * h * force[i];
        }
        field.velocity(&x, &mut vel);
        for i in 0..n {
            x[i] += h * vel[i];
        }
        let t1 = if k + 1 == steps { t_end } else { dt * (k + 1) as f64 };
        if let Some(s) = check_state(field, &prev, &x, t1) {
            return Ok(s);
        }
        field.force(&x, &mut force);
        for i in 0..n {
            x[n + i] += 0.5 * h * force[i];
        }
        if let Some(s) = check_state(field, &prev, &x, t1) {
            return Ok(s);
        }
        observe(&Step { t0: t, x0: &prev, t1, x1: &x });
        t = t1;
    }
    Ok(RunStatus::Completed)
}

const A: [&[f64]; 6] = [
    &[1.0 / 5.0],
    &[3.0 / 40.0, 9.0 / 40.0],
    &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
    &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
    &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
    &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn err_norm(v: &[f64], y0: &[f64], y1: &[f64], rtol: f64, atol: f64) -> f64 {
    let s: f64 = v
        .iter()
        .zip(y0.iter().zip(y1))
        .map(|(e, (a, b))| {
            let sc = atol + rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / v.len() as f64).sqrt()
}

fn initial_step(field: &CompiledField, x: &[f64], f0: &[f64], rtol: f64, atol: f64, t_end: f64) -> f64 {
    let d0 = err_norm(x, x, x, rtol, atol);
    let d1 = err_norm(f0, x, x, rtol, atol);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let x1: Vec<f64> = x.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; x.len()];
    field.rhs(&x1, &mut f1);
    let df: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = err_norm(&df, x, x, rtol, atol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(t_end.max(f64::MIN_POSITIVE))
}

fn dopri5<F>(
    field: &CompiledField,
    x0: &[f64],
    t_end: f64,
    rtol: f64,
    atol: f64,
    mut observe: F,
) -> Result<RunStatus, DynamicsError>
where
    F: FnMut(&Step<'_>),
{
    if !(rtol > 0.0 && atol > 0.0) {
        return Err(DynamicsError::BadSettings(format!("tolerances {rtol}, {atol}")));
    }
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    field.rhs(&x, &mut k[0]);
    let mut h = initial_step(field, &x, &k[0], rtol, atol, t_end);
    let mut t = 0.0;
    let mut stage = vec![0.0; dim];
    let mut y1 = vec![0.0; dim];
    let mut errv = vec![0.0; dim];
    let mut rejected = false;
    while t < t_end {
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Ok(RunStatus::Singular { t });
        }
        for s in 0..6 {
            for i in 0..dim {
                let mut acc = x[i];
                for (j, a) in A[s].iter().enumerate() {
                    acc += h * a * k[j][i];
                }
                stage[i] = acc;
            }
            if s == 5 {
                y1.copy_from_slice(&stage);
            }
            let (_, rest) = k.split_at_mut(s + 1);
            field.rhs(&stage, &mut rest[0]);
        }
        for i in 0..dim {
            errv[i] = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
        }
        let err = err_norm(&errv, &x, &y1, rtol, atol);
        if !err.is_finite() {
            h *= 0.2;
            rejected = true;
            continue;
        }
        if err <= 1.0 {
            let t1 = if last { t_end } else { t + h };
            if let Some(s) = check_state(field, &x, &y1, t1) {
                return Ok(s);
            }
            observe(&Step { t0: t, x0: &x, t1, x1: &y1 });
            x.copy_from_slice(&y1);
            t = t1;
            k.swap(0, 6);
            let mut fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
            if rejected {
                fac = fac.min(1.0);
            }
            rejected = false;
            h *= fac;
        } else {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            rejected = true;
        }
    }
    Ok(RunStatus::Completed)
}

/// Integrates and records the trajectory with drift of every monitor.
pub fn integrate(field: &CompiledField, x0: &[f64], opts: &IntegrateOptions) -> Result<Trajectory, DynamicsError> {
    let m0 = field.monitors(x0);
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        monitor_names: field.monitor_names(),
        drift: m0.iter().map(|_| vec![0.0]).collect(),
        max_drift: vec![0.0; m0.len()],
        status: RunStatus::Completed,
        meta: TrajectoryMeta {
            integrator: opts.integrator.label(),
            step_policy: match opts.integrator {
                Integrator::Verlet { .. } => format!("fixed, record every {}", opts.record_every),
                Integrator::Dopri5 { .. } => format!("adaptive, record every {}", opts.record_every),
            },
            ..TrajectoryMeta::default()
        },
    };
    let every = opts.record_every.max(1);
    let mut count = 0usize;
    let mut pending: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    let status = drive(field, x0, opts, |s| {
        count += 1;
        let mv = field.monitors(s.x1);
        let d: Vec<f64> = mv.iter().zip(&m0).map(|(v, v0)| relative_drift(*v, *v0)).collect();
        for (mx, v) in traj.max_drift.iter_mut().zip(&d) {
            *mx = mx.max(*v);
        }
        if count % every == 0 {
            traj.times.push(s.t1);
            traj.states.push(s.x1.to_vec());
            for (series, v) in traj.drift.iter_mut().zip(&d) {
                series.push(*v);
            }
            pending = None;
        } else {
            pending = Some((s.t1, s.x1.to_vec(), d));
        }
    })?;
    if let Some((t, x, d)) = pending {
        traj.times.push(t);
        traj.states.push(x);
        for (series, v) in traj.drift.iter_mut().zip(&d) {
            series.push(*v);
        }
    }
    traj.status = status;
    Ok(traj)
}

/// Integrates `T` forward, reverses momenta, integrates `T` again and
/// reverses back; returns the largest deviation from `x0`.
pub fn reversibility_error(field: &CompiledField, x0: &[f64], t: f64, dt: f64) -> Result<f64, DynamicsError> {
    let n = field.dimension();
    let opts = IntegrateOptions::new(t, Integrator::verlet(dt));
    let mut x = x0.to_vec();
    for _ in 0..2 {
        let mut last = x.clone();
        let status = drive(field, &x, &opts, |s| last.copy_from_slice(s.x1))?;
        if !status.is_completed() {
            return Err(DynamicsError::Incomplete(status));
        }
        for v in &mut last[n..] {
            *v = -*v;
        }
        x = last;
    }
    Ok(x.iter().zip(x0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    pub max_drift_h: f64,
    /// Drift at the previous (twice larger) step divided by this one.
    pub ratio: Option<f64>,
}

/// Verlet runs at `dt, dt/2, dt/4, ...` (`levels` of them) recording the
/// maximum drift of the first monitor.
pub fn convergence_study(
    field: &CompiledField,
    x0: &[f64],
    t_end: f64,
    dt: f64,
    levels: usize,
) -> Result<Vec<ConvergenceRow>, DynamicsError> {
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels);
    let h0 = field.energy(x0);
    for l in 0..levels {
        let h = dt / f64::powi(2.0, l as i32);
        let mut worst = 0.0f64;
        let status = drive(field, x0, &IntegrateOptions::new(t_end, Integrator::verlet(h)), |s| {
            worst = worst.max(relative_drift(field.energy(s.x1), h0));
        })?;
        if !status.is_completed() {
            return Err(DynamicsError::Incomplete(status));
        }
        let ratio = rows.last().map(|r| r.max_drift_h / worst);
        rows.push(ConvergenceRow {
            dt: h,
            max_drift_h: worst,
            ratio,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;
    use std::f64::consts::PI;

    use super::*;
    use crate::catalog;
    use crate::dynamics::{compile, compile_system};
    use crate::symexpr::{parse, Symbol};

    fn oscillator() -> CompiledField {
        let m = catalog::build("kdv:delta=1/2,Omega=0,alpha=0,lambda=0").unwrap();
        compile(&m.realized_h, 2, &[], &HashMap::new())
            .unwrap()
            .with_monitor("H", &m.realized_h)
            .unwrap()
    }

    #[test]
    fn harmonic_period() {
        let f = oscillator();
        let x0 = [1.0, 0.0, 0.0, 0.0];
        for integ in [Integrator::verlet(1e-4), Integrator::dopri5()] {
            let tr = integrate(&f, &x0, &IntegrateOptions::new(2.0 * PI, integ)).unwrap();
            assert!(tr.status.is_completed());
            assert!((tr.final_time() - 2.0 * PI).abs() < 1e-12);
            let dev = tr.final_state().iter().zip(&x0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(dev < 1e-6, "{integ:?}: {dev}");
            assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn recording_stride_keeps_final_state() {
        let f = oscillator();
        let tr = integrate(
            &f,
            &[1.0, 0.0, 0.0, 0.0],
            &IntegrateOptions::new(1.0, Integrator::verlet(0.03)).record_every(10),
        )
        .unwrap();
        assert_eq!(tr.times.len(), 5);
        assert_eq!(tr.final_time(), 1.0);
    }

    #[test]
    fn verlet_is_reversible() {
        let m = catalog::build("generic:delta=1/2,Omega=0,alpha=1,beta=-1/3").unwrap();
        let f = compile(&m.realized_h, 2, &[], &HashMap::new()).unwrap();
        let e = reversibility_error(&f, &[0.1, 0.2, 0.3, -0.1], 20.0, 1e-3).unwrap();
        assert!(e < 1e-9, "{e}");
    }

    #[test]
    fn second_order_convergence() {
        let m = catalog::build("generic:delta=1/2,Omega=0,alpha=1,beta=-1/3").unwrap();
        let f = compile(&m.realized_h, 2, &[], &HashMap::new()).unwrap();
        let rows = convergence_study(&f, &[0.1, 0.2, 0.3, -0.1], 10.0, 0.02, 3).unwrap();
        for r in &rows[1..] {
            let ratio = r.ratio.unwrap();
            assert!((3.5..4.5).contains(&ratio), "{rows:?}");
        }
    }

    #[test]
    fn singular_approach_is_reported() {
        let h = parse("1/2*p1^2 + 1/2*p2^2 - q1^(-2)").unwrap();
        let f = compile(&h, 2, &[], &HashMap::new()).unwrap();
        let tr = integrate(&f, &[0.5, 1.0, -5.0, 0.0], &IntegrateOptions::new(5.0, Integrator::verlet(1e-3))).unwrap();
        assert!(!tr.status.is_completed(), "{:?}", tr.status);
        assert!(tr.states.iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn blowup_is_reported() {
        let h = parse("1/2*p1^2 + 1/2*p2^2 - q1^4").unwrap();
        let f = compile(&h, 2, &[], &HashMap::new()).unwrap();
        let tr = integrate(&f, &[1.0, 0.0, 1.0, 0.0], &IntegrateOptions::new(50.0, Integrator::dopri5())).unwrap();
        assert!(matches!(tr.status, RunStatus::Blowup { .. } | RunStatus::Singular { .. }), "{:?}", tr.status);
    }

    #[test]
    fn inadmissible_start() {
        let h = parse("1/2*p1^2 + q1^(-2)").unwrap();
        let f = compile(&h, 1, &[], &HashMap::new()).unwrap();
        let err = integrate(&f, &[0.0, 1.0], &IntegrateOptions::new(1.0, Integrator::verlet(1e-3))).unwrap_err();
        assert!(matches!(err, DynamicsError::Inadmissible(_)));
        let err = integrate(&f, &[1.0], &IntegrateOptions::new(1.0, Integrator::verlet(1e-3))).unwrap_err();
        assert!(matches!(err, DynamicsError::BadState { .. }));
    }

    #[test]
    fn nd_monitors_are_attached() {
        use crate::realize::{build_nd_model, RealizationSpec};
        let m = catalog::build("kdv:delta=1/2,Omega=0,alpha=1/10,lambda=0").unwrap();
        let spec = RealizationSpec::new(3, vec![parse("1").unwrap(), parse("1/4").unwrap()]).unwrap();
        let sys = build_nd_model(&m, &spec).unwrap();
        let f = compile_system(&sys, &HashMap::<Symbol, f64>::new()).unwrap();
        assert_eq!(f.monitor_names(), ["H", "I", "C2"]);
        let tr = integrate(&f, &[0.5, 0.4, 0.2, 0.1, 0.0, 0.1], &IntegrateOptions::new(5.0, Integrator::verlet(1e-3))).unwrap();
        assert!(tr.status.is_completed());
        for name in ["H", "I", "C2"] {
            assert!(tr.max_drift_of(name).unwrap() < 1e-5, "{name}: {:?}", tr.max_drift);
        }
    }
}
