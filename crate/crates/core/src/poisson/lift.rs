use std::collections::{BTreeMap, BTreeSet};

use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use super::linear::solve_manifold;
use super::{BracketContext, Certificate, LinearSystem, PoissonError};
use crate::symexpr::{sym, Expr, Generator, Monomial, Symbol, SymbolKind};

const UNKNOWN: &str = "w";

/// One canonical monomial block and the generator words it was replaced by.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftBlock {
    /// The canonical monomial, with its coefficient. Zero-sum blocks carry
    /// coefficient 1 and `phantom = true`.
    pub canonical: Expr,
    pub words: Vec<Expr>,
    pub unknowns: Vec<Symbol>,
    pub phantom: bool,
}

#[derive(Debug, Clone)]
pub struct LiftOutcome {
    pub hamiltonian: Expr,
    pub integral: Expr,
    /// The integral before the unknowns were fixed.
    pub template: Expr,
    pub system: LinearSystem,
    pub solution: BTreeMap<Symbol, BigRational>,
    pub manifold_dimension: usize,
    pub blocks: Vec<LiftBlock>,
    pub certificate: Certificate,
}

impl LiftOutcome {
    /// The point of the solution manifold whose integral equals `target`,
    /// if there is one.
    pub fn point_reaching(&self, target: &Expr) -> Result<Option<BTreeMap<Symbol, BigRational>>, PoissonError> {
        let mut system = self.system.clone();
        for eq in group_by_unknowns(&(&self.template - target)) {
            system.push(eq);
        }
        match solve_manifold(&system) {
            Ok(m) => Ok(Some(m.sparsest())),
            Err(PoissonError::Inconsistent { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Human-readable account of the lift: ambiguous blocks, the solved
    /// unknowns and the resulting abstract pair.
    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("H = {}\n", self.hamiltonian));
        for b in self.blocks.iter().filter(|b| !b.unknowns.is_empty()) {
            let combo: Vec<String> = b
                .unknowns
                .iter()
                .zip(&b.words)
                .map(|(u, w)| format!("{u}*{w}"))
                .collect();
            let tag = if b.phantom { " (zero-sum)" } else { "" };
            out.push_str(&format!("block {}{tag} -> {}\n", b.canonical, combo.join(" + ")));
        }
        out.push_str(&format!(
            "system: {} equations, {} unknowns, solution manifold dimension {}\n",
            self.system.equations.len(),
            self.system.unknowns.len(),
            self.manifold_dimension
        ));
        for u in &self.system.unknowns {
            out.push_str(&format!("{u} = {}\n", self.solution[u]));
        }
        out.push_str(&format!("I = {}\n", self.integral));
        out.push_str(&format!(
            "involution: {}\n",
            if self.certificate.is_zero() { "zero" } else { "residual" }
        ));
        out
    }
}

/// All words `J+^x J-^y J3^z` realizing `q1^a p1^b` under
/// `J+ = p1^2, J- = q1^2, J3 = q1 p1`, ordered by increasing `z`.
pub fn words_for_block(a: i64, b: i64) -> Vec<Expr> {
    if b < 0 || (a - b).rem_euclid(2) != 0 {
        return Vec::new();
    }
    let top = if a >= 0 { a.min(b) } else { b };
    (0..=top)
        .filter(|z| (b - z) % 2 == 0)
        .map(|z| {
            let x = (b - z) / 2;
            let y = (a - z) / 2;
            Expr::monomial(
                BigRational::one(),
                [
                    (Symbol::generator(Generator::JPlus), Rational64::from_integer(x)),
                    (Symbol::generator(Generator::JMinus), Rational64::from_integer(y)),
                    (Symbol::generator(Generator::J3), Rational64::from_integer(z)),
                ],
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    params: Vec<(Symbol, Rational64)>,
    a: i64,
    b: i64,
    n: Rational64,
    m: Rational64,
}

impl Shape {
    fn of(t: &Monomial) -> Result<Shape, PoissonError> {
        let mut shape = Shape {
            params: Vec::new(),
            a: 0,
            b: 0,
            n: Rational64::zero(),
            m: Rational64::zero(),
        };
        let whole = |s: &Symbol, e: &Rational64| {
            if e.is_integer() {
                Ok(*e.numer())
            } else {
                Err(PoissonError::NotLiftable(format!("fractional power {e} of {s}")))
            }
        };
        for (s, e) in t.powers() {
            match (s.kind(), s.index()) {
                (SymbolKind::Position, Some(1)) => shape.a = whole(s, e)?,
                (SymbolKind::Momentum, Some(1)) => shape.b = whole(s, e)?,
                (SymbolKind::Position, Some(2)) => shape.n = *e,
                (SymbolKind::Momentum, Some(2)) => shape.m = *e,
                (SymbolKind::Parameter, _) if s.base_name() == UNKNOWN => {
                    return Err(PoissonError::NotLiftable(format!("parameter name {s} is reserved")))
                }
                (SymbolKind::Parameter, _) => shape.params.push((s.clone(), *e)),
                _ => return Err(PoissonError::NotLiftable(format!("symbol {s} outside (q1,p1,q2,p2)"))),
            }
        }
        Ok(shape)
    }

    fn degrees(&self) -> (Rational64, Rational64) {
        (
            Rational64::from_integer(self.a) + self.n,
            Rational64::from_integer(self.b) + self.m,
        )
    }

    /// `coeff * params * word * A-^n * A+^m`.
    fn abstract_term(&self, coeff: &BigRational, word: &Expr) -> Expr {
        let rest = Expr::monomial(
            coeff.clone(),
            self.params.iter().cloned().chain([
                (Symbol::generator(Generator::AMinus), self.n),
                (Symbol::generator(Generator::APlus), self.m),
            ]),
        );
        &rest * word
    }

    fn canonical(&self, coeff: &BigRational) -> Expr {
        Expr::monomial(
            coeff.clone(),
            self.params.iter().cloned().chain([
                (Symbol::q(1), Rational64::from_integer(self.a)),
                (Symbol::p(1), Rational64::from_integer(self.b)),
                (Symbol::q(2), self.n),
                (Symbol::p(2), self.m),
            ]),
        )
    }
}

fn lift_unambiguous(h2: &Expr) -> Result<Expr, PoissonError> {
    let mut out = Expr::zero();
    for t in h2.terms() {
        let shape = Shape::of(t)?;
        let words = words_for_block(shape.a, shape.b);
        match words.as_slice() {
            [w] => out = out + shape.abstract_term(t.coefficient(), w),
            [] => return Err(not_liftable(t)),
            _ => {
                return Err(PoissonError::NotLiftable(format!(
                    "Hamiltonian term {} admits {} generator words",
                    t.to_expr(),
                    words.len()
                )))
            }
        }
    }
    Ok(out)
}

fn not_liftable(t: &Monomial) -> PoissonError {
    PoissonError::NotLiftable(format!(
        "term {} is not a function of q1^2, p1^2, q1*p1",
        t.to_expr()
    ))
}

/// Zero-sum blocks: `(q1,p1)`-bidegrees `(a,b)` with `a,b >= 2` that are
/// absent from the integral but share a total `(q,p)`-degree and parameter
/// monomial with terms that are present. A combination such as
/// `A- (J+ J- - J3^2)` realizes to zero in two dimensions, so it can only be
/// recovered through blocks like these.
fn phantom_shapes(shapes: &[Shape]) -> Vec<Shape> {
    let present: BTreeSet<&Shape> = shapes.iter().collect();
    let mut groups: BTreeMap<(&Vec<(Symbol, Rational64)>, Rational64, Rational64), Vec<&Shape>> = BTreeMap::new();
    for s in shapes {
        let (dq, dp) = s.degrees();
        groups.entry((&s.params, dq, dp)).or_default().push(s);
    }
    let mut out = Vec::new();
    for ((params, dq, dp), members) in groups {
        if !dp.is_integer() {
            continue;
        }
        let a_max = members.iter().map(|s| s.a).max().unwrap_or(0);
        let n_min = members.iter().map(|s| s.n).min().unwrap_or_else(Rational64::zero);
        for a in 2..=a_max {
            let mut b = if a % 2 == 0 { 2 } else { 3 };
            while b <= *dp.numer() {
                let cand = Shape {
                    params: params.clone(),
                    a,
                    b,
                    n: dq - Rational64::from_integer(a),
                    m: dp - Rational64::from_integer(b),
                };
                if cand.n >= n_min && !present.contains(&cand) {
                    out.push(cand);
                }
                b += 2;
            }
        }
    }
    out
}

/// Lifts a canonical 2D pair to abstract generator form.
///
/// `h2` must lift term by term without ambiguity. Each monomial of `i2` is
/// replaced by every generator word with the same `(q1,p1)` bidegree, with
/// unknown weights `w_k` summing to one; the weights are then fixed by
/// requiring `{H, I} = 0` on the leaf `M = 1`. Underdetermined systems are
/// resolved by taking the sparsest point of the solution manifold.
pub fn lift_to_abstract(h2: &Expr, i2: &Expr) -> Result<LiftOutcome, PoissonError> {
    let hamiltonian = lift_unambiguous(h2)?;

    let mut shapes = Vec::with_capacity(i2.len());
    for t in i2.terms() {
        let shape = Shape::of(t)?;
        if words_for_block(shape.a, shape.b).is_empty() {
            return Err(not_liftable(t));
        }
        shapes.push(shape);
    }
    let phantoms = phantom_shapes(&shapes);

    let mut template = Expr::zero();
    let mut blocks = Vec::new();
    let mut unknowns = Vec::new();
    let mut constraints = Vec::new();
    let entries = i2
        .terms()
        .iter()
        .zip(&shapes)
        .map(|(t, s)| (s, t.coefficient().clone(), false))
        .chain(phantoms.iter().map(|s| (s, BigRational::one(), true)));
    for (shape, coeff, phantom) in entries {
        let words = words_for_block(shape.a, shape.b);
        let mut block_unknowns = Vec::new();
        if words.len() == 1 && !phantom {
            template = template + shape.abstract_term(&coeff, &words[0]);
        } else {
            let mut sum = Expr::zero();
            for w in &words {
                let u = Symbol::indexed_param(UNKNOWN, unknowns.len() as u32 + 1);
                template = template + sym(u.clone()) * shape.abstract_term(&coeff, w);
                sum = sum + sym(u.clone());
                unknowns.push(u.clone());
                block_unknowns.push(u);
            }
            constraints.push(if phantom { sum } else { sum - Expr::one() });
        }
        blocks.push(LiftBlock {
            canonical: shape.canonical(&coeff),
            words,
            unknowns: block_unknowns,
            phantom,
        });
    }

    let ctx = BracketContext::abstract_leaf();
    let residual = ctx.reduce(&ctx.bracket(&hamiltonian, &template)?)?;
    let mut system = LinearSystem::new(unknowns.clone());
    for c in constraints {
        system.push(c);
    }
    for eq in group_by_unknowns(&residual) {
        system.push(eq);
    }

    let manifold = solve_manifold(&system)?;
    let manifold_dimension = manifold.dimension();
    let solution = manifold.sparsest();
    let values: BTreeMap<Symbol, Expr> = solution
        .iter()
        .map(|(s, v)| (s.clone(), Expr::constant(v.clone())))
        .collect();
    let integral = template.substitute(&values)?;
    let certificate = ctx.certify_involution(&hamiltonian, &integral)?;
    if !certificate.is_zero() {
        return Err(PoissonError::Inconsistent {
            equations: system.equations.len(),
            unknowns: unknowns.len(),
        });
    }
    Ok(LiftOutcome {
        hamiltonian,
        integral,
        template,
        system,
        solution,
        manifold_dimension,
        blocks,
        certificate,
    })
}

/// Splits a polynomial linear in the unknowns into one equation per
/// monomial in the remaining symbols.
fn group_by_unknowns(e: &Expr) -> Vec<Expr> {
    let mut groups: BTreeMap<Vec<(Symbol, Rational64)>, Expr> = BTreeMap::new();
    for t in e.terms() {
        let (unk, rest): (Vec<_>, Vec<_>) = t
            .powers()
            .iter()
            .cloned()
            .partition(|(s, _)| s.kind() == SymbolKind::Parameter && s.base_name() == UNKNOWN);
        let part = Expr::monomial(t.coefficient().clone(), unk);
        let slot = groups.entry(rest).or_insert_with(Expr::zero);
        *slot = &*slot + &part;
    }
    groups.into_values().filter(|e| !e.is_zero()).collect()
}

#[cfg(test)]
/// The 2D image of an abstract expression: `J+ = p1^2`, `J- = q1^2`,
/// `J3 = q1 p1`, `A+ = p2`, `A- = q2`, `M = 1`.
pub(crate) fn realize_2d(e: &Expr) -> Result<Expr, PoissonError> {
    use crate::symexpr::{p, q};
    use Generator::*;
    let mut map = BTreeMap::new();
    let s = Symbol::generator;
    map.insert(s(JPlus), p(1).pow(2)?);
    map.insert(s(JMinus), q(1).pow(2)?);
    map.insert(s(J3), q(1) * p(1));
    map.insert(s(APlus), p(2));
    map.insert(s(AMinus), q(2));
    map.insert(s(M), Expr::one());
    Ok(e.substitute(&map)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{gen, p, parse, q, Generator::*};

    #[test]
    fn block_words() {
        let w = words_for_block(2, 2);
        assert_eq!(w, vec![gen(JPlus) * gen(JMinus), gen(J3).pow(2).unwrap()]);
        assert_eq!(words_for_block(0, 2), vec![gen(JPlus)]);
        assert_eq!(words_for_block(1, 1), vec![gen(J3)]);
        assert!(words_for_block(1, 0).is_empty());
        assert_eq!(words_for_block(-2, 0), vec![gen(JMinus).pow(-1).unwrap()]);
        assert_eq!(words_for_block(-4, 2).len(), 2);
        for (a, b) in [(2, 2), (4, 2), (-4, 2), (3, 1), (0, 4)] {
            let target = q(1).pow(a).unwrap() * p(1).pow(b).unwrap();
            for w in words_for_block(a, b) {
                assert_eq!(realize_2d(&w).unwrap(), target);
            }
        }
    }

    #[test]
    fn trivial_lift() {
        let h = parse("1/2*p1^2 + 1/2*p2^2").unwrap();
        let out = lift_to_abstract(&h, &p(1).pow(2).unwrap()).unwrap();
        assert_eq!(out.integral, gen(JPlus));
        assert!(out.system.unknowns.is_empty());
        assert!(out.system.equations.is_empty());
        assert_eq!(out.hamiltonian, Expr::rational(1, 2) * (gen(JPlus) + gen(APlus).pow(2).unwrap()));
    }

    #[test]
    fn odd_power_is_not_liftable() {
        let h = parse("1/2*p1^2 + 1/2*p2^2 + q1").unwrap();
        assert!(matches!(
            lift_to_abstract(&h, &p(1).pow(2).unwrap()),
            Err(PoissonError::NotLiftable(_))
        ));
        let h = parse("1/2*p1^2 + 1/2*p2^2").unwrap();
        assert!(matches!(
            lift_to_abstract(&h, &parse("q1*p1^2").unwrap()),
            Err(PoissonError::NotLiftable(_))
        ));
        assert!(matches!(
            lift_to_abstract(&parse("q3^2").unwrap(), &p(1)),
            Err(PoissonError::NotLiftable(_))
        ));
    }

    #[test]
    fn non_conserved_block_is_inconsistent() {
        // q1^2 p1^2 is not conserved under free motion for any choice of words
        let h = parse("1/2*p1^2 + 1/2*p2^2").unwrap();
        let i = parse("q1^2*p1^2").unwrap();
        assert!(matches!(
            lift_to_abstract(&h, &i),
            Err(PoissonError::Inconsistent { .. })
        ));
    }

    #[test]
    fn ambiguous_hamiltonian_is_rejected() {
        let h = parse("1/2*p1^2 + 1/2*p2^2 + q1^2*p1^2").unwrap();
        assert!(matches!(
            lift_to_abstract(&h, &p(2)),
            Err(PoissonError::NotLiftable(_))
        ));
    }

    #[test]
    fn holt_quartic_integral() {
        let h = parse("1/2*p1^2 + 1/2*p2^2 + q1^2*q2^(-2/3) + 9/2*q2^(4/3)").unwrap();
        let i = parse(
            "p1^4 + 2*p1^2*p2^2 + 24*q2^(1/3)*p2*q1*p1 + 4*q2^(-2/3)*q1^2*p1^2 + 72*q2^(2/3)*q1^2",
        )
        .unwrap();
        let out = lift_to_abstract(&h, &i).unwrap();
        let expected = parse(
            "Jp^2 + 2*Jp*Ap^2 + 24*Am^(1/3)*Ap*J3 + 4*Am^(-2/3)*Jp*Jm + 72*Am^(2/3)*Jm",
        )
        .unwrap();
        assert_eq!(out.integral, expected);
        assert_eq!(realize_2d(&out.integral).unwrap(), i);
        assert!(out.report().contains("involution: zero"));
    }
}
