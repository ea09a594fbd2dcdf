//! Lifting a canonical 2D pair `(H, I)` to generator form: every
//! `q1^a p1^b` block becomes a combination of `J+`, `J-`, `J3` words whose
//! coefficients are solved exactly from the involution condition.
//!
//! ```bash
//! cargo run --example lift_pair
//! ```

use std::error::Error;

use hh_integrable::catalog::build;
use hh_integrable::poisson::lift_to_abstract;
use hh_integrable::symexpr::parse;

pub fn run() -> Result<(), Box<dyn Error>> {
    let h = parse("1/2*(p1^2 + p2^2) + q2^(-2/3)*(q1^2 + 9/2*q2^2)")?;
    let i = parse("p1^4 + 2*p1^2*p2^2 + 24*q2^(1/3)*p2*q1*p1 + 4*q2^(-2/3)*q1^2*p1^2 + 72*q2^(2/3)*q1^2")?;
    let holt = lift_to_abstract(&h, &i)?;
    print!("{}", holt.report());
    assert!(holt.certificate.is_zero());

    // Kaup-Kupershmidt: the solution is a line, because adding a multiple
    // of the sl(2) Casimir to I keeps it in involution with H.
    let kk = build("kk")?;
    let out = lift_to_abstract(&kk.realized_h, kk.realized_i.as_ref().expect("integrable"))?;
    println!("\nkk: solution manifold dimension {}", out.manifold_dimension);
    let printed = kk.abstract_i.as_ref().expect("integrable");
    println!("printed abstract integral reachable: {}", out.point_reaching(printed)?.is_some());

    // An odd power of q1 cannot come from J- = q1^2.
    let bad = lift_to_abstract(&parse("1/2*(p1^2 + p2^2) + q1*q2")?, &parse("p2")?);
    println!("\nH with a q1 term: {}", bad.expect_err("not liftable"));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
