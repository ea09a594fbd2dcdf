//! Every example runs to completion.

#[allow(dead_code)]
#[path = "../examples/catalog_tour.rs"]
mod catalog_tour;

#[allow(dead_code)]
#[path = "../examples/certify_involution.rs"]
mod certify_involution;

#[allow(dead_code)]
#[path = "../examples/conserve_energy.rs"]
mod conserve_energy;

#[allow(dead_code)]
#[path = "../examples/lift_pair.rs"]
mod lift_pair;

#[allow(dead_code)]
#[path = "../examples/nd_realization.rs"]
mod nd_realization;

#[allow(dead_code)]
#[path = "../examples/parameter_sweep.rs"]
mod parameter_sweep;

#[allow(dead_code)]
#[path = "../examples/poincare_contrast.rs"]
mod poincare_contrast;

#[allow(dead_code)]
#[path = "../examples/run_config.rs"]
mod run_config;

#[allow(dead_code)]
#[path = "../examples/symbolic_expressions.rs"]
mod symbolic_expressions;

#[test]
fn catalog_tour_runs() {
    catalog_tour::run().unwrap();
}

#[test]
fn certify_involution_runs() {
    certify_involution::run().unwrap();
}

#[test]
fn conserve_energy_runs() {
    conserve_energy::run().unwrap();
}

#[test]
fn lift_pair_runs() {
    lift_pair::run().unwrap();
}

#[test]
fn nd_realization_runs() {
    nd_realization::run().unwrap();
}

#[test]
fn parameter_sweep_runs() {
    parameter_sweep::run().unwrap();
}

#[test]
fn poincare_contrast_runs() {
    poincare_contrast::run().unwrap();
}

#[test]
fn run_config_runs() {
    run_config::run().unwrap();
}

#[test]
fn symbolic_expressions_runs() {
    symbolic_expressions::run().unwrap();
}
