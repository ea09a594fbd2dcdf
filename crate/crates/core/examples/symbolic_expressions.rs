//! Exact Laurent polynomials: parsing, printing, arithmetic, derivatives,
//! evaluation and formal inverses of multi-term denominators.
//!
//! ```bash
//! cargo run --example symbolic_expressions
//! ```

use std::collections::{BTreeMap, HashMap};
use std::error::Error;

use hh_integrable::symexpr::{gen, parse, q, Expr, Generator, InverseRegistry, Symbol};

pub fn run() -> Result<(), Box<dyn Error>> {
    // Terms are kept in a canonical order, so printing is stable.
    let h = parse("1/2*(p1^2 + p2^2) + delta*(q1^2 + q2^2) + alpha*(q1^2*q2 + q2^3/3) + lambda/q1^2")?;
    println!("H        = {h}");
    assert_eq!(parse(&h.to_string())?, h);

    let dq1 = h.diff(&Symbol::q(1));
    println!("dH/dq1   = {dq1}");

    let square = (q(1) + q(2)).pow(2)?;
    println!("(q1+q2)^2 = {square}");
    assert!((&square - parse("q1^2 + 2*q1*q2 + q2^2")?).is_zero());

    let holt = parse("q2^(-2/3)*(q1^2 + 9/2*q2^2)")?;
    println!("Holt V   = {holt}, dV/dq2 = {}", holt.diff(&Symbol::q(2)));

    let mut point = HashMap::new();
    for (name, v) in [("q1", 1.0), ("q2", 2.0), ("p1", 0.0), ("p2", 0.0), ("delta", 1.0), ("alpha", 1.0), ("lambda", 0.0)] {
        point.insert(hh_integrable::symexpr::symbol_from_name(name).expect("known name"), v);
    }
    let value = h.eval(&point)?;
    println!("H(q=(1,2), p=0, delta=alpha=1, lambda=0) = {value}");

    // 1/(q1^2 + q2^2) has no Laurent form; the substitution introduces an
    // auxiliary symbol u with the side relation u * (q1^2 + q2^2) = 1.
    let jm = Symbol::generator(Generator::JMinus);
    let mut images = BTreeMap::new();
    images.insert(jm, parse("q1^2 + q2^2")?);
    let mut registry = InverseRegistry::new();
    let realized = (parse("lambda")? * gen(Generator::JMinus).pow(-1)?).substitute_with_inverses(&images, &mut registry)?;
    let rel = &registry.relations()[0];
    println!("lambda/Jm with Jm -> {} gives {realized} where {} = 1/({})", images.values().next().unwrap(), rel.aux, rel.denominator);
    let check = &realized * parse("q1^2 + q2^2")? - parse("lambda")?;
    assert!(check.is_zero_modulo(registry.relations())?);
    assert!(!Expr::is_zero(&check));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
