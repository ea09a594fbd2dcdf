//! Poisson brackets over canonical variables and over the abstract
//! `sl(2,R) + h3` algebra, involution certificates, and the lift of 2D
//! canonical pairs to abstract generator form.

mod certificate;
mod lift;
mod linear;

pub use certificate::{Certificate, CertificateReport};
#[cfg(test)]
pub(crate) use lift::realize_2d;
pub use lift::{lift_to_abstract, words_for_block, LiftBlock, LiftOutcome};
pub use linear::{solve_linear, LinearSystem, SolutionManifold};

use std::collections::{BTreeMap, HashMap};

use num_rational::BigRational;
use num_traits::One;

use crate::symexpr::{gen, Expr, ExprError, Generator, SideRelation, Symbol, SymbolKind, TermAccumulator};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoissonError {
    #[error("symbol {0} is not part of the bracket context")]
    UnknownSymbol(Symbol),
    #[error("operation needs the abstract algebra context")]
    WrongMode,
    #[error("not liftable: {0}")]
    NotLiftable(String),
    #[error("equation is not linear in the unknowns: {0}")]
    NonLinear(String),
    #[error("linear system is inconsistent ({equations} equations, {unknowns} unknowns)")]
    Inconsistent { equations: usize, unknowns: usize },
    #[error("linear system is underdetermined: {} free directions", .0.null_space.len())]
    Underdetermined(SolutionManifold),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketMode {
    /// Canonical bracket in `(q_1..q_n, p_1..p_n)`.
    Canonical { n: u32 },
    /// Lie-Poisson bracket of `sl(2,R) + h3`.
    Abstract,
}

/// Brackets between pairs of basis symbols; every other pair brackets to 0.
#[derive(Debug, Clone)]
pub struct StructureTable {
    entries: Vec<(Symbol, Symbol, Expr)>,
}

impl StructureTable {
    pub fn canonical(n: u32) -> Self {
        StructureTable {
            entries: (1..=n).map(|i| (Symbol::q(i), Symbol::p(i), Expr::one())).collect(),
        }
    }

    /// `{J3,J+} = 2J+`, `{J3,J-} = -2J-`, `{J-,J+} = 4J3`, `{A-,A+} = M`.
    pub fn sl2_h3() -> Self {
        use Generator::*;
        let s = Symbol::generator;
        StructureTable {
            entries: vec![
                (s(J3), s(JPlus), Expr::integer(2) * gen(JPlus)),
                (s(J3), s(JMinus), Expr::integer(-2) * gen(JMinus)),
                (s(JMinus), s(JPlus), Expr::integer(4) * gen(J3)),
                (s(AMinus), s(APlus), gen(M)),
            ],
        }
    }

    /// `{x, y}` read off the table, antisymmetric by construction.
    pub fn get(&self, x: &Symbol, y: &Symbol) -> Expr {
        for (a, b, c) in &self.entries {
            if a == x && b == y {
                return c.clone();
            }
            if a == y && b == x {
                return -c;
            }
        }
        Expr::zero()
    }

    pub fn entries(&self) -> &[(Symbol, Symbol, Expr)] {
        &self.entries
    }
}

#[derive(Debug, Clone)]
pub struct BracketContext {
    mode: BracketMode,
    table: StructureTable,
    relations: Vec<SideRelation>,
    leaf: BTreeMap<Symbol, Expr>,
}

impl BracketContext {
    pub fn canonical(n: u32) -> Self {
        BracketContext {
            mode: BracketMode::Canonical { n },
            table: StructureTable::canonical(n),
            relations: Vec::new(),
            leaf: BTreeMap::new(),
        }
    }

    /// The bare algebra: `M` stays a free central symbol.
    pub fn abstract_algebra() -> Self {
        BracketContext {
            mode: BracketMode::Abstract,
            table: StructureTable::sl2_h3(),
            relations: Vec::new(),
            leaf: BTreeMap::new(),
        }
    }

    /// The algebra restricted to the symplectic leaf `M = 1`, which is where
    /// every catalog Hamiltonian lives.
    pub fn abstract_leaf() -> Self {
        let mut ctx = BracketContext::abstract_algebra();
        ctx.leaf.insert(Symbol::generator(Generator::M), Expr::one());
        ctx
    }

    pub fn with_relations(mut self, relations: &[SideRelation]) -> Self {
        self.relations.extend_from_slice(relations);
        self
    }

    pub fn mode(&self) -> BracketMode {
        self.mode
    }

    pub fn relations(&self) -> &[SideRelation] {
        &self.relations
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn mode_label(&self) -> String {
        match self.mode {
            BracketMode::Canonical { n } => format!("canonical(N={n})"),
            BracketMode::Abstract if self.leaf.is_empty() => "abstract".to_string(),
            BracketMode::Abstract => "abstract(M=1)".to_string(),
        }
    }

    fn admits(&self, s: &Symbol) -> bool {
        match (self.mode, s.kind()) {
            (_, SymbolKind::Parameter) => true,
            (BracketMode::Canonical { n }, SymbolKind::Position | SymbolKind::Momentum) => {
                s.index().is_some_and(|i| i >= 1 && i <= n)
            }
            (BracketMode::Canonical { .. }, SymbolKind::Auxiliary) => {
                self.relations.iter().any(|r| &r.aux == s)
            }
            (BracketMode::Abstract, SymbolKind::Generator) => true,
            _ => false,
        }
    }

    pub fn check_symbols(&self, e: &Expr) -> Result<(), PoissonError> {
        match e.symbols().into_iter().find(|s| !self.admits(s)) {
            Some(s) => Err(PoissonError::UnknownSymbol(s)),
            None => Ok(()),
        }
    }

    /// Exact bracket `{f, g}`, expanded by the Leibniz rule down to the
    /// structure table. In canonical mode auxiliary inverse symbols are
    /// differentiated through their side relations.
    pub fn bracket(&self, f: &Expr, g: &Expr) -> Result<Expr, PoissonError> {
        self.check_symbols(f)?;
        self.check_symbols(g)?;
        let mut df: HashMap<&Symbol, Expr> = HashMap::new();
        let mut dg: HashMap<&Symbol, Expr> = HashMap::new();
        let mut acc = TermAccumulator::default();
        let minus_one = -BigRational::one();
        for (x, y, c) in &self.table.entries {
            for s in [x, y] {
                df.entry(s).or_insert_with(|| f.diff_total(s, &self.relations));
                dg.entry(s).or_insert_with(|| g.diff_total(s, &self.relations));
            }
            let (fx, fy, gx, gy) = (&df[x], &df[y], &dg[x], &dg[y]);
            if (fx.is_zero() || gy.is_zero()) && (fy.is_zero() || gx.is_zero()) {
                continue;
            }
            if c.as_constant().is_some_and(|k| k.is_one()) {
                acc.add_product(fx, gy);
                acc.add_product(&fy.scale(&minus_one), gx);
            } else {
                acc.add_product(&(fx * c), gy);
                acc.add_product(&(fy * c).scale(&minus_one), gx);
            }
        }
        Ok(acc.finish())
    }

    /// Fixes Casimir values of the leaf and eliminates auxiliary inverses,
    /// producing the expression whose emptiness decides zero.
    pub fn reduce(&self, e: &Expr) -> Result<Expr, PoissonError> {
        let on_leaf = if self.leaf.is_empty() {
            e.clone()
        } else {
            e.substitute(&self.leaf)?
        };
        Ok(on_leaf.clear_denominators(&self.relations)?)
    }

    pub fn is_zero(&self, e: &Expr) -> Result<bool, PoissonError> {
        Ok(self.reduce(e)?.is_zero())
    }

    /// `[M, J+ J- - J3^2]`.
    pub fn casimirs(&self) -> Result<Vec<Expr>, PoissonError> {
        if self.mode != BracketMode::Abstract {
            return Err(PoissonError::WrongMode);
        }
        Ok(vec![gen(Generator::M), sl2_casimir()])
    }

    /// Certifies `{h, i} = 0` exactly; a non-vanishing bracket is returned
    /// as the residual.
    pub fn certify_involution(&self, h: &Expr, i: &Expr) -> Result<Certificate, PoissonError> {
        let b = self.bracket(h, i)?;
        let residual = self.reduce(&b)?;
        Ok(if residual.is_zero() {
            Certificate::Zero
        } else {
            Certificate::Residual(residual)
        })
    }
}

/// `C = J+ J- - J3^2`.
pub fn sl2_casimir() -> Expr {
    use Generator::*;
    gen(JPlus) * gen(JMinus) - gen(J3) * gen(J3)
}

/// Free functions mirroring the context methods.
pub fn bracket(f: &Expr, g: &Expr, ctx: &BracketContext) -> Result<Expr, PoissonError> {
    ctx.bracket(f, g)
}

pub fn casimirs(ctx: &BracketContext) -> Result<Vec<Expr>, PoissonError> {
    ctx.casimirs()
}

pub fn certify_involution(h: &Expr, i: &Expr, ctx: &BracketContext) -> Result<Certificate, PoissonError> {
    ctx.certify_involution(h, i)
}
