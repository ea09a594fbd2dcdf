use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::integrate::{integrate, IntegrateOptions};
use super::poincare::{poincare, section_thickness, energy_initial_condition, PlaneSpec};
use super::{compile_system, DynamicsError};
use crate::catalog::ModelId;
use crate::realize::{build_nd_model, build_quasi_model, RealizationSpec};
use crate::symexpr::{parse_rational, Expr};

/// Neighbourhood size of the section thickness statistic.
pub const THICKNESS_NEIGHBOURS: usize = 10;

/// Parses `3`, `-1/8` or a decimal such as `0.25` / `1e-3` into an exact
/// rational.
pub fn parse_exact(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some(r) = parse_rational(s) {
        return Some(r);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(d) => (true, d),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return None;
    }
    let num: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// One grid coordinate with its exact values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<BigRational>,
}

impl GridAxis {
    /// `name=v1,v2,...` or `name=start:stop:step` (inclusive).
    pub fn parse(src: &str) -> Result<GridAxis, DynamicsError> {
        let bad = |why: &str| DynamicsError::BadGrid(format!("{src}: {why}"));
        let (name, body) = src.split_once('=').ok_or_else(|| bad("expected name=values"))?;
        let name = name.trim().to_string();
        if name.is_empty() {
            return Err(bad("empty name"));
        }
        let values: Vec<BigRational> = if body.contains(':') {
            let parts: Vec<&str> = body.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("range is start:stop:step"));
            }
            let v = parts
                .iter()
                .map(|p| parse_exact(p).ok_or_else(|| bad("not a number")))
                .collect::<Result<Vec<BigRational>, _>>()?;
            let (start, stop, step) = (&v[0], &v[1], &v[2]);
            if step.is_zero() || (stop - start) / step < BigRational::zero() {
                return Err(bad("step does not reach stop"));
            }
            let count = ((stop - start) / step).floor().to_integer().to_usize().ok_or_else(|| bad("range too large"))?;
            if count > 1_000_000 {
                return Err(bad("range too large"));
            }
            (0..=count)
                .map(|k| start + step * BigRational::from_integer(BigInt::from(k)))
                .collect()
        } else {
            body.split(',')
                .map(|p| parse_exact(p).ok_or_else(|| bad("not a number")))
                .collect::<Result<_, _>>()?
        };
        if values.is_empty() {
            return Err(bad("no values"));
        }
        Ok(GridAxis { name, values })
    }
}

/// How each sweep row starts: a fixed state, or `(q, p)` with `p1` solved
/// from an energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Start {
    State(Vec<f64>),
    Energy { x: Vec<f64>, energy: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub model: ModelId,
    pub n: u32,
    /// Centrifugal constants `b1..b_{N-1}` unless overridden by the grid.
    pub b: Vec<BigRational>,
    pub start: Start,
    pub options: IntegrateOptions,
    pub plane: Option<PlaneSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub coords: Vec<(String, String)>,
    pub model: String,
    pub integrable: bool,
    pub status: String,
    pub drift_h: Option<f64>,
    pub drift_i: Option<f64>,
    pub drift_c: Vec<f64>,
    pub section_points: usize,
    pub section_statistic: Option<f64>,
}

/// Every combination of axis values, last axis fastest.
pub fn grid_points(axes: &[GridAxis]) -> Vec<Vec<(String, BigRational)>> {
    let mut rows: Vec<Vec<(String, BigRational)>> = vec![Vec::new()];
    for axis in axes {
        rows = rows
            .into_iter()
            .flat_map(|r| {
                axis.values.iter().map(move |v| {
                    let mut r = r.clone();
                    r.push((axis.name.clone(), v.clone()));
                    r
                })
            })
            .collect()
    }
    rows
}

fn centrifugal_index(name: &str) -> Option<usize> {
    name.strip_prefix('b')?.parse::<usize>().ok()
}

fn run_row(settings: &SweepSettings, coords: &[(String, BigRational)]) -> Result<SweepRow, DynamicsError> {
    let n = settings.n as usize;
    let mut b: Vec<BigRational> = settings.b.clone();
    b.resize(n.saturating_sub(1), BigRational::zero());
    let mut bindings = settings.model.default_bindings();
    for (k, v) in coords {
        match centrifugal_index(k) {
            Some(i) if i >= 1 && i < n && settings.model.schema().iter().all(|p| &p.name != k) => {
                b[i - 1] = v.clone()
            }
            Some(_) if settings.model.schema().iter().all(|p| &p.name != k) => {
                return Err(DynamicsError::BadGrid(format!("{k} outside b1..b{}", n - 1)));
            }
            _ => {
                bindings.insert(k.clone(), Expr::constant(v.clone()));
            }
        }
    }
    let mut id = settings.model.clone();
    id.bindings.extend(bindings);
    let model = id.build()?;
    let spec = RealizationSpec::new(settings.n, b.into_iter().map(Expr::constant).collect())?;
    let sys = if model.has_integral() {
        build_nd_model(&model, &spec)?
    } else {
        build_quasi_model(&model, &spec)?
    };
    let field = compile_system(&sys, &HashMap::new())?;
    let x0 = match &settings.start {
        Start::State(x) => x.clone(),
        Start::Energy { x, energy } => energy_initial_condition(&field, x, *energy)?,
    };
    let traj = integrate(&field, &x0, &settings.options)?;
    let mut row = SweepRow {
        coords: Vec::new(),
        model: model.id.clone(),
        integrable: !sys.quasi,
        status: traj.status.label().to_string(),
        drift_h: traj.max_drift_of("H"),
        drift_i: traj.max_drift_of("I"),
        drift_c: (2..n).filter_map(|m| traj.max_drift_of(&format!("C{m}"))).collect(),
        section_points: 0,
        section_statistic: None,
    };
    if let Some(ps) = &settings.plane {
        let sec = poincare(&field, &traj, ps.resolve(n)?)?;
        row.section_points = sec.len();
        row.section_statistic = section_thickness(&sec.project(1, n + 1), THICKNESS_NEIGHBOURS);
    }
    Ok(row)
}

/// Runs every grid point in parallel; rows come back in grid order and a
/// failing row records its error instead of aborting the sweep.
pub fn sweep(settings: &SweepSettings, axes: &[GridAxis]) -> Vec<SweepRow> {
    grid_points(axes)
        .into_par_iter()
        .map(|coords| {
            let labels: Vec<(String, String)> = coords.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
            match run_row(settings, &coords) {
                Ok(mut row) => {
                    row.coords = labels;
                    row
                }
                Err(e) => SweepRow {
                    coords: labels,
                    model: settings.model.canonical(),
                    integrable: false,
                    status: format!("error: {e}"),
                    drift_h: None,
                    drift_i: None,
                    drift_c: Vec::new(),
                    section_points: 0,
                    section_statistic: None,
                },
            }
        })
        .collect()
}

/// Grid coordinates in a row as numbers, for plotting.
pub fn coords_as_f64(row: &SweepRow) -> BTreeMap<String, f64> {
    row.coords
        .iter()
        .filter_map(|(k, v)| Some((k.clone(), parse_exact(v)?.to_f64()?)))
        .collect()
}
