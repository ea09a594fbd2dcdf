use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;

use super::{Expr, ExprError, Generator, Symbol};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(BigInt),
    Ident(String),
    Op(char),
}

fn lex(src: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                return Err(ExprError::Parse {
                    position: i,
                    message: "decimal literals are not exact; write p/q".into(),
                });
            }
            let n: BigInt = src[start..i].parse().expect("digits");
            out.push((start, Token::Int(n)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push((start, Token::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Op(c)));
            i += 1;
        } else {
            return Err(ExprError::Parse {
                position: i,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

const PLAIN_PARAMS: [&str; 7] = ["delta", "Omega", "alpha", "beta", "lambda", "nu", "c"];
const INDEXED_PARAMS: [&str; 5] = ["a", "g", "b", "xi", "w"];

/// Maps an identifier of the expression grammar to its symbol.
pub fn symbol_from_name(name: &str) -> Option<Symbol> {
    if let Some(g) = Generator::from_name(name) {
        return Some(Symbol::generator(g));
    }
    if PLAIN_PARAMS.contains(&name) {
        return Some(Symbol::param(name));
    }
    let split = name.find(|c: char| c.is_ascii_digit())?;
    let (base, digits) = name.split_at(split);
    if !digits.chars().all(|c| c.is_ascii_digit()) || digits.starts_with('0') && digits != "0" {
        return None;
    }
    let index: u32 = digits.parse().ok()?;
    match base {
        "q" if index > 0 => Some(Symbol::q(index)),
        "p" if index > 0 => Some(Symbol::p(index)),
        "u" if index > 0 => Some(Symbol::aux(index)),
        b if INDEXED_PARAMS.contains(&b) => Some(Symbol::indexed_param(b, index)),
        _ => None,
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Parse {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let at = self.offset();
                let den = self.unary()?;
                let inv = den.pow(-1).map_err(|e| ExprError::Parse {
                    position: at,
                    message: format!("cannot divide: {e}"),
                })?;
                acc = acc * inv;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let at = self.offset();
        let e = self.exponent()?;
        base.pow_rational(e).map_err(|err| ExprError::Parse {
            position: at,
            message: err.to_string(),
        })
    }

    fn exponent(&mut self) -> Result<Rational64, ExprError> {
        let at = self.offset();
        let value = if self.eat('-') {
            return Ok(-self.exponent()?);
        } else if self.eat('(') {
            let e = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            e.as_constant()
                .ok_or_else(|| self.error("exponent must be a rational constant"))?
        } else {
            match self.peek().cloned() {
                Some(Token::Int(n)) => {
                    self.pos += 1;
                    BigRational::from_integer(n)
                }
                _ => return Err(self.error("expected exponent")),
            }
        };
        match (value.numer().to_i64(), value.denom().to_i64()) {
            (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
            _ => Err(ExprError::Parse {
                position: at,
                message: "exponent out of range".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek().cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(Expr::constant(BigRational::from_integer(n)))
            }
            Some(Token::Ident(name)) => {
                let s = symbol_from_name(&name)
                    .ok_or_else(|| self.error(format!("unknown symbol {name:?}")))?;
                self.pos += 1;
                Ok(Expr::symbol(s))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(t) => Err(self.error(format!("unexpected token {t:?}"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses the plain-text expression grammar: `+ - * / ^`, integer and `p/q`
/// literals, parentheses, and the symbols `q1.. p1.. Jp Jm J3 Ap Am M delta
/// Omega alpha beta lambda nu c a1.. g1.. b1.. xi0.. w1.. u1..`.
///
/// Fractional and negative exponents need parentheses or a leading minus:
/// `q2^(-2/3)`, `q1^-2`.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: src.len(),
    };
    if p.peek().is_none() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

/// Parses an exact rational literal such as `3`, `-1/3`.
pub fn parse_rational(src: &str) -> Option<BigRational> {
    if src.chars().any(|c| c.is_ascii_alphabetic()) {
        return None;
    }
    parse(src).ok()?.as_constant()
}
