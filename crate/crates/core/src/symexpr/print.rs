use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed};

use super::{Expr, Monomial, Symbol, SymbolKind};

fn write_factor(f: &mut fmt::Formatter<'_>, s: &Symbol, e: Rational64) -> fmt::Result {
    if e.is_one() {
        write!(f, "{s}")
    } else if e.is_integer() && e.is_positive() {
        write!(f, "{s}^{}", e.numer())
    } else {
        write!(f, "{s}^({e})")
    }
}

fn write_unsigned(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    let c = m.coefficient().abs();
    if m.powers().is_empty() {
        return write!(f, "{c}");
    }
    let mut first = true;
    if !c.is_one() {
        write!(f, "{c}")?;
        first = false;
    }
    // parameters read better in front: `lambda*q1^(-2)`
    let params = m.powers().iter().filter(|(s, _)| s.kind() == SymbolKind::Parameter);
    let rest = m.powers().iter().filter(|(s, _)| s.kind() != SymbolKind::Parameter);
    for (s, e) in params.chain(rest) {
        if !first {
            f.write_str("*")?;
        }
        write_factor(f, s, *e)?;
        first = false;
    }
    Ok(())
}

/// Prints in the same grammar accepted by [`parse`](super::parse), e.g.
/// `1/2*p1^2 - lambda*q1^(-2) + q2^(2/3)`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, t) in self.terms().iter().enumerate() {
            let neg = t.coefficient().is_negative();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write_unsigned(f, t)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::symexpr::*;

    #[test]
    fn prints_grammar() {
        let e = rat(1, 2) * p(1).pow(2).unwrap() - param("lambda") * q(1).pow(-2).unwrap()
            + Expr::power_of(Symbol::q(2), Rational64::new(2, 3));
        assert_eq!(e.to_string(), "1/2*p1^2 + q2^(2/3) - lambda*q1^(-2)");
        assert_eq!(Expr::zero().to_string(), "0");
        assert_eq!((-q(1)).to_string(), "-q1");
    }
}
