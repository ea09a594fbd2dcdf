//! The model catalog: families, parameter schemas, model ids, the generic
//! family's integrable cases and the Ramani potentials.
//!
//! ```bash
//! cargo run --example catalog_tour
//! ```

use std::error::Error;

use hh_integrable::catalog::{build, families, ramani, ModelId};

pub fn run() -> Result<(), Box<dyn Error>> {
    for f in families() {
        let params: Vec<String> = f.parameters.iter().map(|p| format!("{}={}", p.name, p.default)).collect();
        println!("{:8} {} [{}]", f.id, f.title, params.join(" "));
        if let Some(c) = f.constraint {
            println!("         constraint {c}");
        }
        for case in &f.integrable_cases {
            println!("         integrable when {case}");
        }
    }

    let id: ModelId = "kdv-mr:M=4,R=3,a4=1/16".parse()?;
    let model = id.build()?;
    println!("\n{} has H = {}", id.canonical(), model.realized_h);
    println!("free parameters: {:?}", model.free_parameters().iter().map(|s| s.to_string()).collect::<Vec<_>>());

    for beta in ["1/3", "2", "16/3", "1"] {
        let m = build(&format!("generic:beta={beta},Omega=0,delta=0"))?;
        println!("generic beta={beta:5} integral: {}", m.integrable_case.map(|f| f.id()).unwrap_or("none"));
    }

    println!();
    for i in 0..=5 {
        let t = ramani(i);
        println!("V_{i} = {:40} = {}", t.realized.to_string(), t.abstract_form);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
