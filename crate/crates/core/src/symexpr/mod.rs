//! Exact symbolic expression kernel.
//!
//! [`Expr`] is a sparse sum of monomials with arbitrary-precision rational
//! coefficients and rational exponents. Every constructor and operation
//! returns the canonical normal form (like terms merged, zero terms dropped,
//! terms sorted graded-lexicographically), so structural equality is
//! mathematical equality in the Laurent ring.
//!
//! Negative powers of multi-term expressions are represented by auxiliary
//! symbols `u_k` carrying a [`SideRelation`] `u_k * S_k = 1`; see
//! [`Expr::substitute_with_inverses`], [`Expr::diff_total`] and
//! [`Expr::clear_denominators`].

mod expr;
mod parse;
mod print;
mod symbol;

pub use expr::{max_abs_coefficient, Expr, InverseRegistry, Monomial, Powers, SideRelation};
pub use parse::{parse, parse_rational, symbol_from_name};
pub use symbol::{Generator, Symbol, SymbolKind};

pub(crate) use expr::TermAccumulator;
#[cfg(test)]
pub(crate) use expr::rational64_to_big;

use num_rational::Rational64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("negative power of a sum of {terms} terms")]
    NegativePowerOfSum { terms: usize },
    #[error("power {exponent} of {symbol} maps to a multi-term expression")]
    NonMonomialNegativePower { symbol: Symbol, exponent: Rational64 },
    #[error("fractional power {exponent} of coefficient {coefficient}")]
    FractionalPowerOfCoefficient {
        coefficient: String,
        exponent: Rational64,
    },
    #[error("auxiliary symbol {symbol} appears with exponent {exponent}")]
    BadAuxiliaryPower { symbol: Symbol, exponent: Rational64 },
    #[error("symbol {0} is not bound")]
    Unbound(Symbol),
    #[error("fractional power of a non-positive value of {0}")]
    Domain(Symbol),
    #[error("negative power of {0} at zero")]
    DivisionByZero(Symbol),
    #[error("division by the zero expression")]
    DivisionByZeroExpr,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

/// Shorthand used throughout the crate and its tests.
pub fn sym(s: Symbol) -> Expr {
    Expr::symbol(s)
}

pub fn q(i: u32) -> Expr {
    Expr::symbol(Symbol::q(i))
}

pub fn p(i: u32) -> Expr {
    Expr::symbol(Symbol::p(i))
}

pub fn gen(g: Generator) -> Expr {
    Expr::symbol(Symbol::generator(g))
}

pub fn param(name: &str) -> Expr {
    Expr::symbol(Symbol::param(name))
}

pub fn rat(n: i64, d: i64) -> Expr {
    Expr::rational(n, d)
}
