use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::dynamics::parse_exact;
use crate::symexpr::parse_rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Verify,
    Integrate,
    Poincare,
    Sweep,
    Lift,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Verify => "verify",
            Operation::Integrate => "integrate",
            Operation::Poincare => "poincare",
            Operation::Sweep => "sweep",
            Operation::Lift => "lift",
        }
    }

    /// Whether model parameters must be exact rationals.
    pub fn exact(self) -> bool {
        matches!(self, Operation::Verify | Operation::Lift)
    }
}

/// A parameter value as written in a config file: an integer, a float or
/// a string such as `"1/3"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(x) => write!(f, "{x}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

impl ParamValue {
    /// Exact value. With `exact` set, floats and decimal strings are
    /// rejected; otherwise decimals convert to the rational they denote.
    pub fn to_rational(&self, name: &str, exact: bool) -> Result<BigRational, CliError> {
        let reject = || {
            CliError::Config(format!(
                "parameter {name} = {self}: floats are rejected here, use an exact rational such as 1/3"
            ))
        };
        match self {
            ParamValue::Int(i) => Ok(BigRational::from_integer((*i).into())),
            ParamValue::Float(_) if exact => Err(reject()),
            ParamValue::Float(x) => parse_exact(&x.to_string()).ok_or_else(reject),
            ParamValue::Text(s) => match parse_rational(s) {
                Some(r) => Ok(r),
                None if exact => Err(reject()),
                None => parse_exact(s).ok_or_else(|| CliError::Config(format!("parameter {name} = {s} is not a number"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub id: String,
    pub params: BTreeMap<String, ParamValue>,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            id: "kdv".into(),
            params: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RealizationSection {
    pub n: u32,
    /// `symbolic` or a comma list `b1,b2,...`; unset means symbolic for
    /// verify and zeros for numeric runs.
    pub centrifugal: Option<String>,
}

impl Default for RealizationSection {
    fn default() -> Self {
        RealizationSection { n: 2, centrifugal: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrateSection {
    pub x0: Option<Vec<f64>>,
    pub t_end: f64,
    pub integrator: String,
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
    pub record_every: usize,
    pub strict: bool,
}

impl Default for IntegrateSection {
    fn default() -> Self {
        IntegrateSection {
            x0: None,
            t_end: 100.0,
            integrator: "verlet".into(),
            dt: 1e-3,
            rtol: 1e-10,
            atol: 1e-12,
            record_every: 1,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PoincareSection {
    pub plane: String,
    pub energy: Option<ParamValue>,
    /// Starting `q2` values of the orbit survey run when an energy is given
    /// without `x0`.
    pub starts: Vec<f64>,
    pub t_end: f64,
    pub integrator: String,
}

impl Default for PoincareSection {
    fn default() -> Self {
        PoincareSection {
            plane: "q1=0+".into(),
            energy: None,
            starts: vec![-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4],
            t_end: 2000.0,
            integrator: "dopri5".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub grid: Vec<String>,
    /// Also compute the section statistic per row.
    pub section: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiftSection {
    pub h_file: Option<PathBuf>,
    pub i_file: Option<PathBuf>,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub operation: Option<Operation>,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
    pub model: ModelSection,
    pub realization: RealizationSection,
    pub integrate: IntegrateSection,
    pub poincare: PoincareSection,
    pub sweep: SweepSection,
    pub lift: LiftSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            operation: None,
            seed: 7,
            out_dir: None,
            model: ModelSection::default(),
            realization: RealizationSection::default(),
            integrate: IntegrateSection::default(),
            poincare: PoincareSection::default(),
            sweep: SweepSection::default(),
            lift: LiftSection::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configs always serialize")
    }
}
