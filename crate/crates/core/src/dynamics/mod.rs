//! Numeric evaluation and integration of Hamilton's equations.
//!
//! [`compile`] turns exact expressions into monomial tapes; [`integrate`]
//! runs Störmer-Verlet or Dormand-Prince with drift monitoring;
//! [`poincare`] and [`poincare_run`] extract refined section crossings;
//! [`sweep`] runs a parameter grid in parallel.

mod compile;
mod integrate;
mod poincare;
mod sweep;

pub use compile::{compile, compile_system, CompiledField, Guard, Tape};
pub use integrate::{
    check_admissible, convergence_study, drive, integrate, reversibility_error, ConvergenceRow, IntegrateOptions,
    Integrator, RunStatus, Step, Trajectory, TrajectoryMeta, BLOWUP, EPS_SINGULAR,
};
pub use poincare::{
    energy_initial_condition, poincare, poincare_run, section_survey, section_thickness, Direction, Plane, PlaneSpec, SectionPoints,
    SectionStatus, SectionSurvey, SECTION_TOL,
};
pub use sweep::{coords_as_f64, grid_points, parse_exact, sweep, GridAxis, Start, SweepRow, SweepSettings, THICKNESS_NEIGHBOURS};

pub(crate) use poincare::var_name;

use crate::catalog::CatalogError;
use crate::realize::RealizeError;
use crate::symexpr::Symbol;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicsError {
    #[error("symbol {0} has no numeric value")]
    UnboundParameter(Symbol),
    #[error("unsupported expression: {0}")]
    Unsupported(String),
    #[error("Störmer-Verlet needs a Hamiltonian of the form T(p) + V(q)")]
    NotSeparable,
    #[error("state has {got} components, expected {expected}")]
    BadState { expected: usize, got: usize },
    #[error("initial state is not admissible: {0}")]
    Inadmissible(String),
    #[error("bad integration settings: {0}")]
    BadSettings(String),
    #[error("run ended early: {0}")]
    Incomplete(RunStatus),
    #[error("bad section plane '{0}'")]
    BadPlane(String),
    #[error("energy {energy} is below H = {minimum} at p1 = 0")]
    EnergyTooLow { energy: f64, minimum: f64 },
    #[error("bad grid: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
}
