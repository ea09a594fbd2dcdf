//! Symplectic realizations of `sl(2,R) + h3` in `N` degrees of freedom.
//!
//! Under a [`RealizationSpec`] the generators become
//!
//! ```text
//! J+ = sum_{i<N} (p_i^2 + b_i / q_i^2)   J- = sum_{i<N} q_i^2   J3 = sum_{i<N} q_i p_i
//! A+ = p_N                               A- = q_N               M  = 1
//! ```
//!
//! so any abstract pair in involution yields an `N`-dimensional pair, which
//! the chain of universal integrals `C^(m)` completes to a Liouville set.

mod rank;

pub use rank::{functional_rank, gradient_matrix, numeric_rank, RankReport};

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use crate::catalog::ModelInstance;
use crate::poisson::{sl2_casimir, BracketContext, Certificate, PoissonError};
use crate::symexpr::{p, q, Expr, ExprError, Generator, InverseRegistry, SideRelation, Symbol};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RealizeError {
    #[error("realizations need N >= 2, got N={0}")]
    BadDimension(u32),
    #[error("expected {expected} centrifugal constants, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("model {0} has no integral")]
    NoIntegral(String),
    #[error(transparent)]
    Poisson(#[from] PoissonError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Dimension `N` and centrifugal constants `b_1..b_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealizationSpec {
    n: u32,
    b: Vec<Expr>,
}

impl RealizationSpec {
    pub fn new(n: u32, b: Vec<Expr>) -> Result<Self, RealizeError> {
        if n < 2 {
            return Err(RealizeError::BadDimension(n));
        }
        if b.len() != n as usize - 1 {
            return Err(RealizeError::WrongLength {
                expected: n as usize - 1,
                got: b.len(),
            });
        }
        Ok(RealizationSpec { n, b })
    }

    /// All `b_i = 0`.
    pub fn plain(n: u32) -> Result<Self, RealizeError> {
        RealizationSpec::new(n, vec![Expr::zero(); n.saturating_sub(1) as usize])
    }

    /// `b_i` kept as the symbols `b1..b_{N-1}`.
    pub fn symbolic(n: u32) -> Result<Self, RealizeError> {
        RealizationSpec::new(n, (1..n).map(|i| Expr::symbol(Symbol::indexed_param("b", i))).collect())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn b(&self) -> &[Expr] {
        &self.b
    }

    pub fn label(&self) -> String {
        let b: Vec<String> = self.b.iter().map(|e| e.to_string()).collect();
        format!("N={} b=({})", self.n, b.join(","))
    }

    /// Generator images.
    pub fn images(&self) -> BTreeMap<Symbol, Expr> {
        use Generator::*;
        let k = self.n - 1;
        let sq = |e: Expr| e.pow(2).expect("square");
        let mut jp = Expr::zero();
        let mut jm = Expr::zero();
        let mut j3 = Expr::zero();
        for i in 1..=k {
            jp = jp + sq(p(i)) + &self.b[i as usize - 1] * q(i).pow(-2).expect("monomial");
            jm = jm + sq(q(i));
            j3 = j3 + q(i) * p(i);
        }
        let mut map = BTreeMap::new();
        map.insert(Symbol::generator(JPlus), jp);
        map.insert(Symbol::generator(JMinus), jm);
        map.insert(Symbol::generator(J3), j3);
        map.insert(Symbol::generator(APlus), p(self.n));
        map.insert(Symbol::generator(AMinus), q(self.n));
        map.insert(Symbol::generator(M), Expr::one());
        map
    }
}

/// Realizes several expressions against one shared set of auxiliary
/// inverse symbols, so that their brackets can be taken together.
#[derive(Debug, Clone)]
pub struct Realizer {
    spec: RealizationSpec,
    images: BTreeMap<Symbol, Expr>,
    registry: InverseRegistry,
}

impl Realizer {
    pub fn new(spec: RealizationSpec) -> Self {
        let images = spec.images();
        Realizer {
            spec,
            images,
            registry: InverseRegistry::new(),
        }
    }

    pub fn realize(&mut self, e: &Expr) -> Result<Expr, RealizeError> {
        Ok(e.substitute_with_inverses(&self.images, &mut self.registry)?)
    }

    pub fn relations(&self) -> &[SideRelation] {
        self.registry.relations()
    }

    pub fn spec(&self) -> &RealizationSpec {
        &self.spec
    }

    pub fn context(&self) -> BracketContext {
        BracketContext::canonical(self.spec.n).with_relations(self.relations())
    }
}

/// Realizes one expression; negative powers of a multi-term image are
/// returned as auxiliary symbols with their side relations.
pub fn realize(e: &Expr, spec: &RealizationSpec) -> Result<(Expr, Vec<SideRelation>), RealizeError> {
    let mut r = Realizer::new(spec.clone());
    let out = r.realize(e)?;
    Ok((out, r.relations().to_vec()))
}

/// `C^(m)` for `m = 2..N-1`:
/// `sum_{i<j<=m} (q_i p_j - q_j p_i)^2 + b_i q_j^2/q_i^2 + b_j q_i^2/q_j^2`.
pub fn universal_integrals(spec: &RealizationSpec) -> Vec<Expr> {
    (2..spec.n).map(|m| universal_integral(spec, m)).collect()
}

fn universal_integral(spec: &RealizationSpec, m: u32) -> Expr {
    let mut c = Expr::zero();
    for i in 1..=m {
        for j in i + 1..=m {
            let l = q(i) * p(j) - q(j) * p(i);
            let (bi, bj) = (&spec.b[i as usize - 1], &spec.b[j as usize - 1]);
            c = c + l.pow(2).expect("square")
                + bi * q(j).pow(2).expect("square") * q(i).pow(-2).expect("monomial")
                + bj * q(i).pow(2).expect("square") * q(j).pow(-2).expect("monomial");
        }
    }
    c
}

/// Certifies `realize(J+ J- - J3^2) = C^(N-1) + sum b_i`, with `C^(1) = 0`.
pub fn casimir_identity_check(spec: &RealizationSpec) -> Result<Certificate, RealizeError> {
    let (lhs, rels) = realize(&sl2_casimir(), spec)?;
    let top = if spec.n >= 3 {
        universal_integral(spec, spec.n - 1)
    } else {
        Expr::zero()
    };
    let rhs = top + Expr::sum(spec.b.iter());
    let residual = (lhs - rhs).clear_denominators(&rels)?;
    Ok(if residual.is_zero() {
        Certificate::Zero
    } else {
        Certificate::Residual(residual)
    })
}

/// An `N`-dimensional system: realized Hamiltonian, integral and universal
/// integrals, sharing one set of side relations.
#[derive(Debug, Clone)]
pub struct NdSystem {
    pub model_id: String,
    pub spec: RealizationSpec,
    pub hamiltonian: Expr,
    pub integral: Option<Expr>,
    pub universal: Vec<Expr>,
    pub relations: Vec<SideRelation>,
    /// Set when the model has no known integral: `H` and `C^(m)` only.
    pub quasi: bool,
}

#[derive(Debug, Clone)]
pub struct PairCertificate {
    pub left: String,
    pub right: String,
    pub certificate: Certificate,
    pub wall_time: Duration,
}

impl NdSystem {
    pub fn context(&self) -> BracketContext {
        BracketContext::canonical(self.spec.n).with_relations(&self.relations)
    }

    /// Named members: `H`, `I` (when present), `C2..C{N-1}`.
    pub fn members(&self) -> Vec<(String, &Expr)> {
        let mut out = vec![("H".to_string(), &self.hamiltonian)];
        if let Some(i) = &self.integral {
            out.push(("I".to_string(), i));
        }
        for (k, c) in self.universal.iter().enumerate() {
            out.push((format!("C{}", k + 2), c));
        }
        out
    }

    /// Every pairwise bracket among the members.
    pub fn certify_all(&self) -> Result<Vec<PairCertificate>, RealizeError> {
        let ctx = self.context();
        let members = self.members();
        let mut out = Vec::new();
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let start = Instant::now();
                let certificate = ctx.certify_involution(members[a].1, members[b].1)?;
                out.push(PairCertificate {
                    left: members[a].0.clone(),
                    right: members[b].0.clone(),
                    certificate,
                    wall_time: start.elapsed(),
                });
            }
        }
        Ok(out)
    }

    /// Evaluates a member at a phase-space point, computing auxiliary
    /// inverses from their denominators first.
    pub fn eval(&self, e: &Expr, point: &HashMap<Symbol, f64>) -> Result<f64, ExprError> {
        let mut full = point.clone();
        bind_auxiliaries(&mut full, &self.relations)?;
        e.eval(&full)
    }
}

/// Adds `u_k = 1 / S_k` to a numeric point.
pub fn bind_auxiliaries(point: &mut HashMap<Symbol, f64>, relations: &[SideRelation]) -> Result<(), ExprError> {
    for r in relations {
        let s = r.denominator.eval(point)?;
        if s == 0.0 {
            return Err(ExprError::DivisionByZero(r.aux.clone()));
        }
        point.insert(r.aux.clone(), 1.0 / s);
    }
    Ok(())
}

fn build(model: &ModelInstance, spec: &RealizationSpec, with_integral: bool) -> Result<NdSystem, RealizeError> {
    let mut r = Realizer::new(spec.clone());
    let hamiltonian = r.realize(&model.abstract_h)?;
    let integral = match (&model.abstract_i, with_integral) {
        (Some(i), true) => Some(r.realize(i)?),
        _ => None,
    };
    Ok(NdSystem {
        model_id: model.id.clone(),
        spec: spec.clone(),
        hamiltonian,
        quasi: integral.is_none(),
        integral,
        universal: universal_integrals(spec),
        relations: r.relations().to_vec(),
    })
}

/// Realizes `(H, I)` and attaches `C^(2)..C^(N-1)`: `N` functions in
/// involution.
pub fn build_nd_model(model: &ModelInstance, spec: &RealizationSpec) -> Result<NdSystem, RealizeError> {
    if !model.has_integral() {
        return Err(RealizeError::NoIntegral(model.id.clone()));
    }
    build(model, spec, true)
}

/// Realizes `H` with only the universal integrals, for models without a
/// known integral. The result is flagged `quasi`.
pub fn build_quasi_model(model: &ModelInstance, spec: &RealizationSpec) -> Result<NdSystem, RealizeError> {
    build(model, spec, false)
}
