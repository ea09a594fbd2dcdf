use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::integrate::{drive, IntegrateOptions, RunStatus, Trajectory};
use super::{CompiledField, DynamicsError};

/// Residual below which a refined crossing is accepted.
pub const SECTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Increasing,
    Decreasing,
}

/// Hyperplane `x[var] = value`, recorded when crossed in `direction`.
/// `var` indexes the state `(q1..qN, p1..pN)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plane {
    pub var: usize,
    pub value: f64,
    pub direction: Direction,
}

impl Default for Plane {
    fn default() -> Self {
        Plane {
            var: 0,
            value: 0.0,
            direction: Direction::Increasing,
        }
    }
}

impl Plane {
    pub fn label(&self, n: usize) -> String {
        let name = var_name(self.var, n);
        let dir = match self.direction {
            Direction::Increasing => "+",
            Direction::Decreasing => "-",
        };
        format!("{name}={}{dir}", self.value)
    }

    fn crossed(&self, g0: f64, g1: f64) -> bool {
        match self.direction {
            Direction::Increasing => g0 <= 0.0 && g1 > 0.0,
            Direction::Decreasing => g0 >= 0.0 && g1 < 0.0,
        }
    }
}

pub(crate) fn var_name(var: usize, n: usize) -> String {
    if var < n {
        format!("q{}", var + 1)
    } else {
        format!("p{}", var - n + 1)
    }
}

/// Text form `q1=0+`, `p2=0.5-`; the value and sign are optional
/// (`q1` means `q1=0+`).
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSpec {
    pub momentum: bool,
    pub index: usize,
    pub value: f64,
    pub direction: Direction,
}

impl PlaneSpec {
    pub fn resolve(&self, n: usize) -> Result<Plane, DynamicsError> {
        if self.index == 0 || self.index > n {
            return Err(DynamicsError::BadPlane(format!("index {} outside 1..={n}", self.index)));
        }
        let var = if self.momentum { n + self.index - 1 } else { self.index - 1 };
        Ok(Plane {
            var,
            value: self.value,
            direction: self.direction,
        })
    }
}

impl FromStr for PlaneSpec {
    type Err = DynamicsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DynamicsError::BadPlane(s.to_string());
        let s = s.trim();
        let (body, direction) = if let Some(b) = s.strip_suffix('+') {
            (b, Direction::Increasing)
        } else if let Some(b) = s.strip_suffix('-') {
            (b, Direction::Decreasing)
        } else {
            (s, Direction::Increasing)
        };
        let (var, value) = match body.split_once('=') {
            Some((v, x)) => (v.trim(), x.trim().parse::<f64>().map_err(|_| bad())?),
            None => (body.trim(), 0.0),
        };
        let momentum = match var.chars().next() {
            Some('q') => false,
            Some('p') => true,
            _ => return Err(bad()),
        };
        let index = var[1..].parse::<usize>().map_err(|_| bad())?;
        Ok(PlaneSpec {
            momentum,
            index,
            value,
            direction,
        })
    }
}

impl fmt::Display for PlaneSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = if self.momentum { 'p' } else { 'q' };
        let d = match self.direction {
            Direction::Increasing => '+',
            Direction::Decreasing => '-',
        };
        write!(f, "{v}{}={}{d}", self.index, self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionStatus {
    Ok,
    NoCrossings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionPoints {
    pub plane: Plane,
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub status: SectionStatus,
    pub run_status: RunStatus,
}

impl SectionPoints {
    fn new(plane: Plane) -> Self {
        SectionPoints {
            plane,
            times: Vec::new(),
            points: Vec::new(),
            residuals: Vec::new(),
            status: SectionStatus::NoCrossings,
            run_status: RunStatus::Completed,
        }
    }

    fn finish(mut self, run_status: RunStatus) -> Self {
        self.status = if self.points.is_empty() {
            SectionStatus::NoCrossings
        } else {
            SectionStatus::Ok
        };
        self.run_status = run_status;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Projection onto two state coordinates.
    pub fn project(&self, a: usize, b: usize) -> Vec<[f64; 2]> {
        self.points.iter().map(|x| [x[a], x[b]]).collect()
    }

    pub fn append(&mut self, other: SectionPoints) {
        self.times.extend(other.times);
        self.points.extend(other.points);
        self.residuals.extend(other.residuals);
        if !self.points.is_empty() {
            self.status = SectionStatus::Ok;
        }
    }
}

/// Cubic Hermite interpolant on one step.
struct Hermite<'a> {
    t0: f64,
    h: f64,
    x0: &'a [f64],
    x1: &'a [f64],
    f0: &'a [f64],
    f1: &'a [f64],
}

impl Hermite<'_> {
    fn at(&self, s: f64, i: usize) -> f64 {
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.x0[i] + h10 * self.h * self.f0[i] + h01 * self.x1[i] + h11 * self.h * self.f1[i]
    }

    fn state(&self, s: f64) -> Vec<f64> {
        (0..self.x0.len()).map(|i| self.at(s, i)).collect()
    }

    /// Root of `x[var] - value` in `[0, 1]` by the Illinois variant of
    /// regula falsi.
    fn root(&self, plane: &Plane) -> (f64, f64) {
        let g = |s: f64| self.at(s, plane.var) - plane.value;
        let (mut a, mut b) = (0.0, 1.0);
        let (mut ga, mut gb) = (g(a), g(b));
        if ga == 0.0 {
            return (a, 0.0);
        }
        let mut side = 0i8;
        let mut s = 0.5;
        let mut gs = g(s);
        for _ in 0..200 {
            s = (a * gb - b * ga) / (gb - ga);
            gs = g(s);
            if gs.abs() < 0.01 * SECTION_TOL || (b - a) < 1e-16 {
                break;
            }
            if (gs > 0.0) == (gb > 0.0) {
                b = s;
                gb = gs;
                if side == 1 {
                    ga *= 0.5;
                }
                side = 1;
            } else {
                a = s;
                ga = gs;
                if side == -1 {
                    gb *= 0.5;
                }
                side = -1;
            }
        }
        (s, gs.abs())
    }
}

struct Detector<'a> {
    field: &'a CompiledField,
    plane: Plane,
    f0: Vec<f64>,
    f1: Vec<f64>,
    out: SectionPoints,
}

impl<'a> Detector<'a> {
    fn new(field: &'a CompiledField, plane: Plane) -> Self {
        let d = 2 * field.dimension();
        Detector {
            field,
            plane,
            f0: vec![0.0; d],
            f1: vec![0.0; d],
            out: SectionPoints::new(plane),
        }
    }

    fn step(&mut self, t0: f64, x0: &[f64], t1: f64, x1: &[f64]) {
        let v = self.plane.var;
        if !self.plane.crossed(x0[v] - self.plane.value, x1[v] - self.plane.value) {
            return;
        }
        self.field.rhs(x0, &mut self.f0);
        self.field.rhs(x1, &mut self.f1);
        let hm = Hermite {
            t0,
            h: t1 - t0,
            x0,
            x1,
            f0: &self.f0,
            f1: &self.f1,
        };
        let (s, res) = hm.root(&self.plane);
        self.out.times.push(hm.t0 + s * hm.h);
        self.out.points.push(hm.state(s));
        self.out.residuals.push(res);
    }
}

/// Section of a stored trajectory, using exact derivatives at the samples.
pub fn poincare(field: &CompiledField, traj: &Trajectory, plane: Plane) -> Result<SectionPoints, DynamicsError> {
    check_plane(field, &plane)?;
    let mut det = Detector::new(field, plane);
    for k in 1..traj.times.len() {
        det.step(traj.times[k - 1], &traj.states[k - 1], traj.times[k], &traj.states[k]);
    }
    Ok(det.out.finish(traj.status))
}

/// Integrates from `x0` and collects crossings on the fly.
pub fn poincare_run(
    field: &CompiledField,
    x0: &[f64],
    opts: &IntegrateOptions,
    plane: Plane,
) -> Result<SectionPoints, DynamicsError> {
    check_plane(field, &plane)?;
    let mut det = Detector::new(field, plane);
    let status = drive(field, x0, opts, |s| det.step(s.t0, s.x0, s.t1, s.x1))?;
    Ok(det.out.finish(status))
}

fn check_plane(field: &CompiledField, plane: &Plane) -> Result<(), DynamicsError> {
    if plane.var >= 2 * field.dimension() || !plane.value.is_finite() {
        return Err(DynamicsError::BadPlane(format!("{plane:?}")));
    }
    Ok(())
}

/// Completes `x` by solving `H = energy` for `p1 > 0`, keeping every other
/// component.
pub fn energy_initial_condition(field: &CompiledField, x: &[f64], energy: f64) -> Result<Vec<f64>, DynamicsError> {
    let n = field.dimension();
    let mut y = x.to_vec();
    if y.len() != 2 * n {
        return Err(DynamicsError::BadState {
            expected: 2 * n,
            got: y.len(),
        });
    }
    let h_at = |p: f64, y: &mut Vec<f64>| {
        y[n] = p;
        field.energy(y)
    };
    let base = h_at(0.0, &mut y);
    if !base.is_finite() {
        return Err(DynamicsError::Inadmissible("energy undefined at the start point".into()));
    }
    if base > energy {
        return Err(DynamicsError::EnergyTooLow { energy, minimum: base });
    }
    let mut hi = 1.0;
    while h_at(hi, &mut y) < energy {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(DynamicsError::Inadmissible("energy not reached by p1".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if h_at(mid, &mut y) < energy {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    y[n] = 0.5 * (lo + hi);
    Ok(y)
}

/// Local thickness of a planar point set: for each point, the square root
/// of the eigenvalue ratio `lambda_min / lambda_max` of the covariance of
/// its `k` nearest neighbours; the median over points. Points on a smooth
/// curve give values near 0, an area-filling cloud gives values of order 1.
pub fn section_thickness(points: &[[f64; 2]], k: usize) -> Option<f64> {
    if k < 2 || points.len() <= k {
        return None;
    }
    let mut vals = Vec::with_capacity(points.len());
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(points.len());
    for (i, a) in points.iter().enumerate() {
        dist.clear();
        for (j, b) in points.iter().enumerate() {
            if i != j {
                dist.push(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2), j));
            }
        }
        dist.select_nth_unstable_by(k - 1, |x, y| x.0.total_cmp(&y.0));
        let mut nb: Vec<[f64; 2]> = dist[..k].iter().map(|&(_, j)| points[j]).collect();
        nb.push(*a);
        let m = nb.len() as f64;
        let mx = nb.iter().map(|p| p[0]).sum::<f64>() / m;
        let my = nb.iter().map(|p| p[1]).sum::<f64>() / m;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for p in &nb {
            let (dx, dy) = (p[0] - mx, p[1] - my);
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
        let tr = 0.5 * (sxx + syy);
        let disc = (0.25 * (sxx - syy).powi(2) + sxy * sxy).sqrt();
        let (l1, l2) = (tr + disc, (tr - disc).max(0.0));
        if l1 > 0.0 {
            vals.push((l2 / l1).sqrt());
        }
    }
    if vals.is_empty() {
        return None;
    }
    vals.sort_by(f64::total_cmp);
    Some(vals[vals.len() / 2])
}

/// Sections of several orbits at one energy, each started at `q1 = 0`
/// with `p1 > 0` solved from the energy, with per-orbit thickness in the
/// `(q2, p2)` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionSurvey {
    pub energy: f64,
    pub starts: Vec<Vec<f64>>,
    pub sections: Vec<SectionPoints>,
    pub thickness: Vec<Option<f64>>,
}

impl SectionSurvey {
    /// Median of the per-orbit thickness values.
    pub fn median(&self) -> Option<f64> {
        let mut v: Vec<f64> = self.thickness.iter().flatten().copied().collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some(v[v.len() / 2])
    }
}

/// Runs one orbit per value in `q2_values` (other coordinates zero).
pub fn section_survey(
    field: &CompiledField,
    energy: f64,
    q2_values: &[f64],
    opts: &IntegrateOptions,
    plane: Plane,
    k: usize,
) -> Result<SectionSurvey, DynamicsError> {
    let n = field.dimension();
    if n < 2 {
        return Err(DynamicsError::BadSettings("a survey needs N >= 2".into()));
    }
    let results: Vec<Result<(Vec<f64>, SectionPoints), DynamicsError>> = q2_values
        .par_iter()
        .map(|&q2| {
            let mut x = vec![0.0; 2 * n];
            x[1] = q2;
            let x0 = energy_initial_condition(field, &x, energy)?;
            let sec = poincare_run(field, &x0, opts, plane)?;
            Ok((x0, sec))
        })
        .collect();
    let mut survey = SectionSurvey {
        energy,
        starts: Vec::new(),
        sections: Vec::new(),
        thickness: Vec::new(),
    };
    for r in results {
        let (x0, sec) = r?;
        survey.thickness.push(section_thickness(&sec.project(1, n + 1), k));
        survey.starts.push(x0);
        survey.sections.push(sec);
    }
    Ok(survey)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;
    use std::f64::consts::PI;

    use super::*;
    use crate::dynamics::integrate::{Integrator, TrajectoryMeta};
    use crate::dynamics::compile;
    use crate::symexpr::parse;

    fn oscillator() -> CompiledField {
        compile(&parse("1/2*(p1^2 + q1^2)").unwrap(), 1, &[], &HashMap::new()).unwrap()
    }

    fn sinusoid(t_end: f64, dt: f64) -> Trajectory {
        let n = (t_end / dt).round() as usize;
        let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt - 0.5 * dt).collect();
        Trajectory {
            states: times.iter().map(|t| vec![t.sin(), t.cos()]).collect(),
            times,
            monitor_names: Vec::new(),
            drift: Vec::new(),
            max_drift: Vec::new(),
            status: RunStatus::Completed,
            meta: TrajectoryMeta::default(),
        }
    }

    #[test]
    fn sinusoid_crossings() {
        let f = oscillator();
        let sec = poincare(&f, &sinusoid(20.0, 0.01), Plane::default()).unwrap();
        assert_eq!(sec.status, SectionStatus::Ok);
        assert_eq!(sec.len(), 4);
        for (k, t) in sec.times.iter().enumerate() {
            assert!((t - 2.0 * PI * k as f64).abs() < 1e-8, "{t}");
        }
        assert!(sec.residuals.iter().all(|r| *r < SECTION_TOL));
        assert!(sec.points.iter().all(|x| x[0].abs() < SECTION_TOL && x[1] > 0.0));
        let down = Plane {
            direction: Direction::Decreasing,
            ..Plane::default()
        };
        let sec = poincare(&f, &sinusoid(20.0, 0.01), down).unwrap();
        assert!(sec.points.iter().all(|x| x[1] < 0.0));
        assert!((sec.times[0] - PI).abs() < 1e-8);
    }

    #[test]
    fn no_crossings() {
        let f = oscillator();
        let plane = Plane {
            value: 2.0,
            ..Plane::default()
        };
        let opts = IntegrateOptions::new(10.0, Integrator::verlet(1e-2));
        let sec = poincare_run(&f, &[1.0, 0.0], &opts, plane).unwrap();
        assert_eq!(sec.status, SectionStatus::NoCrossings);
        assert!(sec.is_empty());
    }

    #[test]
    fn on_the_fly_matches_period() {
        let f = oscillator();
        let opts = IntegrateOptions::new(13.0, Integrator::dopri5());
        let sec = poincare_run(&f, &[-1.0, 0.0], &opts, Plane::default()).unwrap();
        assert_eq!(sec.len(), 2);
        assert!((sec.times[1] - sec.times[0] - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn plane_text() {
        let p: PlaneSpec = "p2=0.5-".parse().unwrap();
        assert!(p.momentum && p.index == 2 && p.value == 0.5 && p.direction == Direction::Decreasing);
        assert_eq!(p.resolve(2).unwrap().var, 3);
        let q: PlaneSpec = "q1".parse().unwrap();
        assert_eq!(q.resolve(2).unwrap(), Plane::default());
        assert!("x1".parse::<PlaneSpec>().is_err());
        assert!(q.resolve(0).is_err());
        assert_eq!(q.to_string(), "q1=0+");
    }

    #[test]
    fn energy_solve() {
        let f = compile(&parse("1/2*(p1^2 + p2^2 + q1^2 + q2^2)").unwrap(), 2, &[], &HashMap::new()).unwrap();
        let x = energy_initial_condition(&f, &[0.0, 0.3, 0.0, 0.2], 0.5).unwrap();
        assert!((f.energy(&x) - 0.5).abs() < 1e-14);
        assert!((x[2] - (1.0f64 - 0.09 - 0.04).sqrt()).abs() < 1e-12);
        let err = energy_initial_condition(&f, &[0.0, 2.0, 0.0, 0.0], 0.5).unwrap_err();
        assert!(matches!(err, DynamicsError::EnergyTooLow { .. }));
    }

    #[test]
    fn thickness_separates_curve_from_cloud() {
        let circle: Vec<[f64; 2]> = (0..400)
            .map(|k| {
                let t = k as f64 * 0.7;
                [t.cos(), t.sin()]
            })
            .collect();
        let curve = section_thickness(&circle, 10).unwrap();
        let mut s = 12345u64;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let cloud: Vec<[f64; 2]> = (0..400).map(|_| [next(), next()]).collect();
        let area = section_thickness(&cloud, 10).unwrap();
        assert!(curve < 0.05, "{curve}");
        assert!(area > 0.3, "{area}");
        assert!(section_thickness(&circle[..5], 10).is_none());
    }
}
