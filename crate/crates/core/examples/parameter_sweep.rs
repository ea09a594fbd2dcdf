//! Parameter grids: exact grid values, deterministic row order, and rows
//! that record their own failures.
//!
//! ```bash
//! cargo run --release --example parameter_sweep
//! ```

use std::error::Error;

use hh_integrable::dynamics::{sweep, GridAxis, IntegrateOptions, Integrator, Start, SweepSettings};

pub fn run() -> Result<(), Box<dyn Error>> {
    // The integral column is defined only in the integrable cases.
    let settings = SweepSettings {
        model: "generic:delta=0,Omega=0,alpha=1/10".parse()?,
        n: 2,
        b: Vec::new(),
        start: Start::State(vec![0.2, 0.1, 0.0, 0.1]),
        options: IntegrateOptions::new(5.0, Integrator::verlet(1e-3)),
        plane: None,
    };
    for row in sweep(&settings, &[GridAxis::parse("beta=1/3,2,16/3,1")?]) {
        println!("beta={:5} integrable {:5} status {} driftH {:.2e} driftI {}", row.coords[0].1, row.integrable, row.status,
            row.drift_h.unwrap_or(f64::NAN), row.drift_i.map(|d| format!("{d:.2e}")).unwrap_or("-".into()));
    }

    // Centrifugal constants as grid axes of a three-dimensional system.
    let settings = SweepSettings {
        model: "kdv:delta=1/2,Omega=0,alpha=1/10".parse()?,
        n: 3,
        b: Vec::new(),
        start: Start::State(vec![1.0, 0.7, 0.05, 0.0, 0.0, 0.02]),
        options: IntegrateOptions::new(50.0, Integrator::verlet(1e-3)),
        plane: Some("q3=0+".parse()?),
    };
    let axes = [GridAxis::parse("b1=0:1:1/2")?, GridAxis::parse("b2=1/4,-1/8")?];
    for row in sweep(&settings, &axes) {
        let coords: Vec<String> = row.coords.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{:14} {:10} driftC2 {:.2e} section points {}", coords.join(" "), row.status, row.drift_c[0], row.section_points);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
