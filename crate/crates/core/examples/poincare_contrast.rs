//! Poincare sections of the classic Henon-Heiles system and of the
//! integrable KdV case at the same energy, compared through the median
//! local thickness of the section points.
//!
//! ```bash
//! cargo run --release --example poincare_contrast
//! ```

use std::collections::HashMap;
use std::error::Error;

use hh_integrable::catalog::build;
use hh_integrable::dynamics::{compile_system, section_survey, IntegrateOptions, Integrator, PlaneSpec, THICKNESS_NEIGHBOURS};
use hh_integrable::realize::{build_nd_model, build_quasi_model, RealizationSpec};

pub fn run() -> Result<(), Box<dyn Error>> {
    let plane = "q1=0+".parse::<PlaneSpec>()?.resolve(2)?;
    let starts = [-0.3, -0.2, -0.1, 0.0, 0.1, 0.2, 0.3, 0.4];
    let opts = IntegrateOptions::new(1000.0, Integrator::dopri5());
    let mut medians = Vec::new();
    for id in ["generic:delta=1/2,Omega=0,alpha=1,beta=-1/3", "generic:delta=1/2,Omega=0,alpha=1/10,beta=2"] {
        let model = build(id)?;
        let spec = RealizationSpec::plain(2)?;
        let sys = if model.has_integral() { build_nd_model(&model, &spec)? } else { build_quasi_model(&model, &spec)? };
        let field = compile_system(&sys, &HashMap::new())?;
        let survey = section_survey(&field, 1.0 / 6.0, &starts, &opts, plane, THICKNESS_NEIGHBOURS)?;
        println!("{id}");
        for (sec, t) in survey.sections.iter().zip(&survey.thickness) {
            let worst = sec.residuals.iter().copied().fold(0.0, f64::max);
            println!("  {:4} points, max residual {worst:.1e}, thickness {}", sec.len(), t.map(|v| format!("{v:.4}")).unwrap_or("-".into()));
        }
        let m = survey.median().expect("orbits with crossings");
        println!("  median thickness {m:.4}");
        medians.push(m);
    }
    println!("contrast ratio {:.1}", medians[0] / medians[1]);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
