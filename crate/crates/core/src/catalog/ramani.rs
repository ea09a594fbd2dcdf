use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;

use crate::symexpr::{gen, q, Expr, Generator};

/// The degree-`i` Ramani potential in abstract and realized form.
#[derive(Debug, Clone, PartialEq)]
pub struct RamaniTable {
    pub degree: u32,
    /// `V_i(J-, A-)`.
    pub abstract_form: Expr,
    /// `V_i(q1^2, q2)`.
    pub realized: Expr,
}

/// `V_i = sum_k 2^(i-2k) C(i-k, k) x^k y^(i-2k)`.
fn closed_form(i: u32, x: &Expr, y: &Expr) -> Expr {
    let mut out = Expr::zero();
    for k in 0..=i / 2 {
        let c = BigInt::from(2).pow(i - 2 * k) * binomial(BigInt::from(i - k), BigInt::from(k));
        let term = x.pow(k as i64).expect("non-negative power")
            * y.pow((i - 2 * k) as i64).expect("non-negative power");
        out = out + term.scale(&BigRational::from_integer(c));
    }
    out
}

pub fn ramani(i: u32) -> RamaniTable {
    RamaniTable {
        degree: i,
        abstract_form: closed_form(i, &gen(Generator::JMinus), &gen(Generator::AMinus)),
        realized: closed_form(i, &q(1).pow(2).expect("square"), &q(2)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::parse;

    #[test]
    fn printed_potentials() {
        let printed = [
            "1",
            "2*q2",
            "4*q2^2 + q1^2",
            "8*q2^3 + 4*q1^2*q2",
            "16*q2^4 + 12*q1^2*q2^2 + q1^4",
            "32*q2^5 + 32*q1^2*q2^3 + 6*q1^4*q2",
        ];
        for (i, s) in printed.iter().enumerate() {
            assert_eq!(ramani(i as u32).realized, parse(s).unwrap(), "V_{i}");
        }
    }

    #[test]
    fn recurrence() {
        let x = q(1).pow(2).unwrap();
        for i in 2..=10 {
            let lhs = ramani(i).realized;
            let rhs = Expr::integer(2) * q(2) * ramani(i - 1).realized + &x * ramani(i - 2).realized;
            assert_eq!(lhs, rhs, "V_{i}");
        }
    }

    #[test]
    fn abstract_form_realizes() {
        for i in 0..=6 {
            let t = ramani(i);
            assert_eq!(crate::poisson::realize_2d(&t.abstract_form).unwrap(), t.realized);
        }
        assert_eq!(ramani(4).abstract_form, parse("16*Am^4 + 12*Jm*Am^2 + Jm^2").unwrap());
    }
}
