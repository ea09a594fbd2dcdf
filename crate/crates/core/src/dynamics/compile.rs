use std::collections::HashMap;

use num_traits::ToPrimitive;
use smallvec::SmallVec;

use super::DynamicsError;
use crate::realize::NdSystem;
use crate::symexpr::{Expr, SideRelation, Symbol, SymbolKind};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pow {
    Int(i32),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq)]
struct TapeTerm {
    coeff: f64,
    factors: SmallVec<[(u16, Pow); 4]>,
}

/// A sum of monomials over numbered slots, with parameters folded into the
/// coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Tape {
    terms: Vec<TapeTerm>,
}

impl Tape {
    pub fn eval(&self, slots: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.terms {
            let mut v = t.coeff;
            for &(s, e) in &t.factors {
                let x = slots[s as usize];
                v *= match e {
                    Pow::Int(1) => x,
                    Pow::Int(2) => x * x,
                    Pow::Int(n) => x.powi(n),
                    Pow::Real(r) => x.powf(r),
                };
            }
            acc += v;
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// What a guard protects: a slot raised to a negative power must stay away
/// from 0, one raised to a fractional power must stay positive, and an
/// auxiliary inverse needs its denominator away from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Guard {
    NonZero(usize),
    Positive(usize),
    Denominator(usize),
}

/// Slot layout: `q1..qN`, `p1..pN`, then one slot per auxiliary inverse.
struct Layout<'a> {
    n: usize,
    aux: Vec<Symbol>,
    params: &'a HashMap<Symbol, f64>,
}

impl Layout<'_> {
    fn slot(&self, s: &Symbol) -> Result<Option<usize>, DynamicsError> {
        let idx = s.index().map(|i| i as usize);
        match (s.kind(), idx) {
            (SymbolKind::Position, Some(i)) if i >= 1 && i <= self.n => Ok(Some(i - 1)),
            (SymbolKind::Momentum, Some(i)) if i >= 1 && i <= self.n => Ok(Some(self.n + i - 1)),
            (SymbolKind::Auxiliary, _) => match self.aux.iter().position(|a| a == s) {
                Some(k) => Ok(Some(2 * self.n + k)),
                None => Err(DynamicsError::UnboundParameter(s.clone())),
            },
            (SymbolKind::Parameter, _) if self.params.contains_key(s) => Ok(None),
            _ => Err(DynamicsError::UnboundParameter(s.clone())),
        }
    }

    fn tape(&self, e: &Expr, guards: &mut Vec<Guard>) -> Result<Tape, DynamicsError> {
        let mut terms = Vec::with_capacity(e.len());
        for m in e.terms() {
            let mut coeff = m.coefficient().to_f64().unwrap_or(f64::NAN);
            let mut factors = SmallVec::new();
            for (s, x) in m.powers() {
                let pow = if x.is_integer() {
                    Pow::Int(*x.numer() as i32)
                } else {
                    Pow::Real(*x.numer() as f64 / *x.denom() as f64)
                };
                match self.slot(s)? {
                    Some(slot) => {
                        match pow {
                            Pow::Int(k) if k < 0 && slot < 2 * self.n => guards.push(Guard::NonZero(slot)),
                            Pow::Real(_) => guards.push(Guard::Positive(slot)),
                            _ => {}
                        }
                        factors.push((slot as u16, pow));
                    }
                    None => {
                        let v = self.params[s];
                        coeff *= match pow {
                            Pow::Int(k) => v.powi(k),
                            Pow::Real(r) => v.powf(r),
                        };
                    }
                }
            }
            if coeff != 0.0 {
                terms.push(TapeTerm { coeff, factors });
            }
        }
        Ok(Tape { terms })
    }
}

/// Hamilton's equations for one Hamiltonian, compiled from exact
/// derivatives, plus named monitored quantities.
#[derive(Debug, Clone)]
pub struct CompiledField {
    n: usize,
    h: Tape,
    dq: Vec<Tape>,
    dp: Vec<Tape>,
    aux: Vec<Tape>,
    guards: Vec<Guard>,
    separable: bool,
    monitors: Vec<(String, Tape)>,
    relations: Vec<SideRelation>,
    params: HashMap<Symbol, f64>,
}

/// Compiles `h` over `(q1..qN, p1..pN)` with the given side relations.
/// Every parameter symbol must be bound in `params`.
pub fn compile(
    h: &Expr,
    n: u32,
    relations: &[SideRelation],
    params: &HashMap<Symbol, f64>,
) -> Result<CompiledField, DynamicsError> {
    let n = n as usize;
    let layout = Layout {
        n,
        aux: relations.iter().map(|r| r.aux.clone()).collect(),
        params,
    };
    let mut guards = Vec::new();
    let mut aux = Vec::new();
    for (k, r) in relations.iter().enumerate() {
        if r.denominator.symbols().iter().any(|s| s.kind() == SymbolKind::Auxiliary) {
            return Err(DynamicsError::Unsupported("nested auxiliary denominators".into()));
        }
        aux.push(layout.tape(&r.denominator, &mut guards)?);
        guards.push(Guard::Denominator(k));
    }
    let h_tape = layout.tape(h, &mut guards)?;
    let mut dq = Vec::with_capacity(n);
    let mut dp = Vec::with_capacity(n);
    let mut separable = true;
    for i in 1..=n as u32 {
        let gq = h.diff_total(&Symbol::q(i), relations);
        let gp = h.diff_total(&Symbol::p(i), relations);
        separable &= !gq.symbols().iter().any(|s| s.kind() == SymbolKind::Momentum);
        separable &= gp
            .symbols()
            .iter()
            .all(|s| matches!(s.kind(), SymbolKind::Momentum | SymbolKind::Parameter));
        dq.push(layout.tape(&gq, &mut guards)?);
        dp.push(layout.tape(&gp, &mut guards)?);
    }
    guards.sort();
    guards.dedup();
    Ok(CompiledField {
        n,
        h: h_tape,
        dq,
        dp,
        aux,
        guards,
        separable,
        monitors: Vec::new(),
        relations: relations.to_vec(),
        params: params.clone(),
    })
}

/// Compiles an ND system's Hamiltonian with monitors `H`, `I` and `C2..`.
pub fn compile_system(sys: &NdSystem, params: &HashMap<Symbol, f64>) -> Result<CompiledField, DynamicsError> {
    let mut f = compile(&sys.hamiltonian, sys.spec.n(), &sys.relations, params)?;
    for (name, e) in sys.members() {
        f = f.with_monitor(&name, e)?;
    }
    Ok(f)
}

pub(crate) type Slots = SmallVec<[f64; 24]>;

impl CompiledField {
    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn is_separable(&self) -> bool {
        self.separable
    }

    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    /// Adds a quantity whose drift is tracked during integration.
    pub fn with_monitor(mut self, name: &str, e: &Expr) -> Result<Self, DynamicsError> {
        let layout = Layout {
            n: self.n,
            aux: self.relations.iter().map(|r| r.aux.clone()).collect(),
            params: &self.params,
        };
        let tape = layout.tape(e, &mut self.guards)?;
        self.guards.sort();
        self.guards.dedup();
        self.monitors.push((name.to_string(), tape));
        Ok(self)
    }

    pub fn monitor_names(&self) -> Vec<String> {
        self.monitors.iter().map(|(n, _)| n.clone()).collect()
    }

    pub(crate) fn slots(&self, x: &[f64]) -> Slots {
        let mut s: Slots = x.iter().copied().collect();
        for a in &self.aux {
            let d = a.eval(&s[..2 * self.n]);
            s.push(1.0 / d);
        }
        s
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        self.h.eval(&self.slots(x))
    }

    pub fn monitors(&self, x: &[f64]) -> Vec<f64> {
        let s = self.slots(x);
        self.monitors.iter().map(|(_, t)| t.eval(&s)).collect()
    }

    /// `(dH/dq, dH/dp)` into `out` (length `2N`).
    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let s = self.slots(x);
        for i in 0..self.n {
            out[i] = self.dq[i].eval(&s);
            out[self.n + i] = self.dp[i].eval(&s);
        }
    }

    /// Hamilton's equations `(dq/dt, dp/dt) = (dH/dp, -dH/dq)`.
    pub fn rhs(&self, x: &[f64], out: &mut [f64]) {
        let s = self.slots(x);
        for i in 0..self.n {
            out[i] = self.dp[i].eval(&s);
            out[self.n + i] = -self.dq[i].eval(&s);
        }
    }

    pub(crate) fn force(&self, x: &[f64], out: &mut [f64]) {
        let s = self.slots(x);
        for i in 0..self.n {
            out[i] = -self.dq[i].eval(&s);
        }
    }

    pub(crate) fn velocity(&self, x: &[f64], out: &mut [f64]) {
        let s = self.slots(x);
        for i in 0..self.n {
            out[i] = self.dp[i].eval(&s);
        }
    }

    /// Whether a guarded quantity changes sign between two states.
    pub fn guard_crossed(&self, a: &[f64], b: &[f64]) -> bool {
        self.guards.iter().any(|g| match *g {
            Guard::NonZero(s) => s < a.len() && a[s].signum() != b[s].signum(),
            Guard::Positive(_) => false,
            Guard::Denominator(k) => {
                let n = 2 * self.n;
                self.aux[k].eval(&a[..n]).signum() != self.aux[k].eval(&b[..n]).signum()
            }
        })
    }

    /// Smallest guard value; below `eps` the state counts as singular.
    pub fn guard_margin(&self, x: &[f64]) -> f64 {
        let mut m = f64::INFINITY;
        for g in &self.guards {
            let v = match *g {
                Guard::NonZero(s) => x.get(s).map_or(f64::INFINITY, |v| v.abs()),
                Guard::Positive(s) => x.get(s).copied().unwrap_or(f64::INFINITY),
                Guard::Denominator(k) => self.aux[k].eval(&x[..2 * self.n]).abs(),
            };
            m = m.min(v);
        }
        m
    }
}
