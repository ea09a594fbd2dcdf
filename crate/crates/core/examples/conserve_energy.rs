//! Numerical integration with Stormer-Verlet and DOPRI5: conserved-quantity
//! drift, the dt-halving convergence study, time reversibility and the
//! singular guard.
//!
//! ```bash
//! cargo run --release --example conserve_energy
//! ```

use std::collections::HashMap;
use std::error::Error;

use hh_integrable::catalog::build;
use hh_integrable::dynamics::{
    compile, compile_system, convergence_study, integrate, reversibility_error, IntegrateOptions, Integrator,
};
use hh_integrable::realize::{build_nd_model, RealizationSpec};
use hh_integrable::symexpr::{parse, Expr};

pub fn run() -> Result<(), Box<dyn Error>> {
    let model = build("kdv:delta=1/2,Omega=0,alpha=1/10,lambda=0")?;
    let spec = RealizationSpec::new(3, vec![Expr::integer(1), Expr::rational(1, 4)])?;
    let field = compile_system(&build_nd_model(&model, &spec)?, &HashMap::new())?;
    let x0 = [1.0, 0.7, 0.05, 0.0, 0.0, 0.02];

    for integrator in [Integrator::verlet(1e-3), Integrator::dopri5()] {
        let traj = integrate(&field, &x0, &IntegrateOptions::new(50.0, integrator).record_every(100))?;
        let drifts: Vec<String> = traj
            .monitor_names
            .iter()
            .map(|m| format!("{m} {:.2e}", traj.max_drift_of(m).unwrap_or(f64::NAN)))
            .collect();
        println!("{:28} {} steps recorded, status {}, drift {}", integrator.label(), traj.times.len(), traj.status.label(), drifts.join(", "));
    }

    for row in convergence_study(&field, &x0, 10.0, 2e-3, 4)? {
        let ratio = row.ratio.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into());
        println!("dt {:.1e}  max drift H {:.3e}  ratio {ratio}", row.dt, row.max_drift_h);
    }
    println!("forward/backward error over T=20: {:.2e}", reversibility_error(&field, &x0, 20.0, 1e-3)?);

    // An attractive inverse-square well stops the run instead of producing
    // non-finite values.
    let well = compile(&parse("1/2*(p1^2 + p2^2) - q1^(-2)")?, 2, &[], &HashMap::new())?;
    let traj = integrate(&well, &[0.5, 0.0, 0.0, 0.0], &IntegrateOptions::new(5.0, Integrator::verlet(1e-3)))?;
    println!("inverse-square well: status {} at t = {:.4}", traj.status.label(), traj.final_time());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
