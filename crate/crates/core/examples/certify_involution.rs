//! Poisson brackets in canonical and abstract form, and exact involution
//! certificates for the catalog pairs.
//!
//! ```bash
//! cargo run --example certify_involution
//! ```

use std::error::Error;

use hh_integrable::catalog::build;
use hh_integrable::poisson::{sl2_casimir, BracketContext};
use hh_integrable::symexpr::{gen, parse, Generator};

pub fn run() -> Result<(), Box<dyn Error>> {
    let canonical = BracketContext::canonical(2);
    let abstract_algebra = BracketContext::abstract_algebra();

    println!("{{q1, p1}} = {}", canonical.bracket(&parse("q1")?, &parse("p1")?)?);
    println!("{{q1^2, p1^2}} = {}", canonical.bracket(&parse("q1^2")?, &parse("p1^2")?)?);
    for (x, y) in [(Generator::J3, Generator::JPlus), (Generator::JMinus, Generator::JPlus), (Generator::AMinus, Generator::APlus)] {
        println!("{{{}, {}}} = {}", x.name(), y.name(), abstract_algebra.bracket(&gen(x), &gen(y))?);
    }
    println!("Casimirs: {}", abstract_algebra.casimirs()?.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "));
    assert!(abstract_algebra.bracket(&sl2_casimir(), &gen(Generator::JPlus))?.is_zero());

    // Every catalog pair, with all its parameters symbolic, in both forms.
    let leaf = BracketContext::abstract_leaf();
    for id in ["sk", "kk", "kdv", "holt", "kdv-mr:M=4,R=3"] {
        let model = build(id)?;
        let (h, i) = (&model.abstract_h, model.abstract_i.as_ref().expect("integrable"));
        let (h2, i2) = (&model.realized_h, model.realized_i.as_ref().expect("integrable"));
        let a = leaf.certify_involution(h, i)?;
        let c = canonical.certify_involution(h2, i2)?;
        println!("{id:16} abstract(M=1): {:5}  canonical(N=2): {}", a.is_zero(), c.is_zero());
        assert!(a.is_zero() && c.is_zero());
    }

    // A pair that does not commute keeps its residual.
    let residual = canonical.certify_involution(&parse("1/2*(p1^2+p2^2) + q1^2*q2")?, &parse("p2")?)?;
    println!("{{H, p2}} for a non-symmetric H leaves residual {}", residual.residual().expect("nonzero"));
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run()
}
