use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::{ExprError, Symbol};

/// Sorted, zero-free exponent list of a monomial.
pub type Powers = SmallVec<[(Symbol, Rational64); 4]>;

/// One term `c * prod(s^e)`. The coefficient is never zero and no exponent is
/// zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    coeff: BigRational,
    powers: Powers,
}

impl Monomial {
    pub fn coefficient(&self) -> &BigRational {
        &self.coeff
    }

    pub fn powers(&self) -> &[(Symbol, Rational64)] {
        &self.powers
    }

    pub fn exponent(&self, s: &Symbol) -> Rational64 {
        self.powers
            .binary_search_by(|(t, _)| t.cmp(s))
            .map(|i| self.powers[i].1)
            .unwrap_or_else(|_| Rational64::zero())
    }

    pub fn degree(&self) -> Rational64 {
        total_degree(&self.powers)
    }

    /// The unit-coefficient monomial with the same powers.
    pub fn monic(&self) -> Expr {
        Expr::from_powers(BigRational::one(), self.powers.clone())
    }

    pub fn to_expr(&self) -> Expr {
        Expr {
            terms: vec![self.clone()],
        }
    }
}

fn total_degree(p: &[(Symbol, Rational64)]) -> Rational64 {
    p.iter().fold(Rational64::zero(), |acc, (_, e)| acc + e)
}

/// Graded lexicographic order: total degree first, then the exponent of the
/// smallest symbol where the two maps differ.
pub(crate) fn term_order(a: &[(Symbol, Rational64)], b: &[(Symbol, Rational64)]) -> Ordering {
    match total_degree(a).cmp(&total_degree(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    let (mut i, mut j) = (0, 0);
    let zero = Rational64::zero();
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some((_, ea)), None) => return ea.cmp(&zero),
            (None, Some((_, eb))) => return zero.cmp(eb),
            (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                Ordering::Equal => {
                    match ea.cmp(eb) {
                        Ordering::Equal => {}
                        o => return o,
                    }
                    i += 1;
                    j += 1;
                }
                Ordering::Less => return ea.cmp(&zero),
                Ordering::Greater => return zero.cmp(eb),
            },
        }
    }
}

fn merge_powers(a: &[(Symbol, Rational64)], b: &[(Symbol, Rational64)]) -> Powers {
    let mut out = Powers::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if !e.is_zero() {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().cloned());
    out
}

/// Hash-map accumulator used to build expressions with like terms merged.
#[derive(Default)]
pub(crate) struct TermAccumulator {
    map: HashMap<Powers, BigRational>,
}

impl TermAccumulator {
    pub(crate) fn add(&mut self, powers: Powers, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.map.entry(powers) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
        }
    }

    pub(crate) fn add_expr(&mut self, e: &Expr, scale: &BigRational) {
        for t in &e.terms {
            self.add(t.powers.clone(), &t.coeff * scale);
        }
    }

    pub(crate) fn add_product(&mut self, a: &Expr, b: &Expr) {
        for x in &a.terms {
            for y in &b.terms {
                self.add(merge_powers(&x.powers, &y.powers), &x.coeff * &y.coeff);
            }
        }
    }

    pub(crate) fn finish(self) -> Expr {
        let mut terms: Vec<Monomial> = self
            .map
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(powers, coeff)| Monomial { coeff, powers })
            .collect();
        terms.sort_by(|a, b| term_order(&b.powers, &a.powers));
        Expr { terms }
    }
}

/// Exact sparse multivariate expression: a sum of monomials with big-rational
/// coefficients and rational exponents, kept in canonical normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: Vec<Monomial>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Expr::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Expr::from_powers(c, Powers::new())
    }

    pub fn integer(n: i64) -> Self {
        Expr::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Expr::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn symbol(s: Symbol) -> Self {
        Expr::from_powers(BigRational::one(), smallvec::smallvec![(s, Rational64::one())])
    }

    /// `s^e` as a single monomial.
    pub fn power_of(s: Symbol, e: Rational64) -> Self {
        if e.is_zero() {
            return Expr::one();
        }
        Expr::from_powers(BigRational::one(), smallvec::smallvec![(s, e)])
    }

    /// Builds a monomial from unsorted `(symbol, exponent)` pairs.
    pub fn monomial<I>(coeff: BigRational, factors: I) -> Self
    where
        I: IntoIterator<Item = (Symbol, Rational64)>,
    {
        let mut map: BTreeMap<Symbol, Rational64> = BTreeMap::new();
        for (s, e) in factors {
            *map.entry(s).or_insert_with(Rational64::zero) += e;
        }
        let powers: Powers = map.into_iter().filter(|(_, e)| !e.is_zero()).collect();
        Expr::from_powers(coeff, powers)
    }

    pub(crate) fn from_powers(coeff: BigRational, powers: Powers) -> Self {
        if coeff.is_zero() {
            Expr::zero()
        } else {
            Expr {
                terms: vec![Monomial { coeff, powers }],
            }
        }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exact zero test on the normal form.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn equal(&self, other: &Expr) -> bool {
        (self - other).is_zero()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [t] if t.powers.is_empty() => Some(t.coeff.clone()),
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<&Monomial> {
        match self.terms.as_slice() {
            [t] => Some(t),
            _ => None,
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms
            .iter()
            .flat_map(|t| t.powers.iter().map(|(s, _)| s.clone()))
            .collect()
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        self.terms.iter().any(|t| !t.exponent(s).is_zero())
    }

    /// Largest total exponent of the given symbols over all terms.
    pub fn max_degree_in(&self, syms: &[Symbol]) -> Rational64 {
        self.terms
            .iter()
            .map(|t| {
                syms.iter()
                    .fold(Rational64::zero(), |acc, s| acc + t.exponent(s))
            })
            .max()
            .unwrap_or_else(Rational64::zero)
    }

    pub fn scale(&self, r: &BigRational) -> Expr {
        if r.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    coeff: &t.coeff * r,
                    powers: t.powers.clone(),
                })
                .collect(),
        }
    }

    fn add_impl(&self, other: &Expr) -> Expr {
        let mut acc = TermAccumulator::default();
        acc.add_expr(self, &BigRational::one());
        acc.add_expr(other, &BigRational::one());
        acc.finish()
    }

    fn sub_impl(&self, other: &Expr) -> Expr {
        let mut acc = TermAccumulator::default();
        acc.add_expr(self, &BigRational::one());
        acc.add_expr(other, &-BigRational::one());
        acc.finish()
    }

    fn mul_impl(&self, other: &Expr) -> Expr {
        let mut acc = TermAccumulator::default();
        acc.add_product(self, other);
        acc.finish()
    }

    /// Sum of many expressions with a single normalization pass.
    pub fn sum<'a, I: IntoIterator<Item = &'a Expr>>(items: I) -> Expr {
        let mut acc = TermAccumulator::default();
        for e in items {
            acc.add_expr(e, &BigRational::one());
        }
        acc.finish()
    }

    /// Integer power. Negative powers are only defined for single monomials.
    pub fn pow(&self, n: i64) -> Result<Expr, ExprError> {
        if n < 0 {
            return match self.as_monomial() {
                Some(m) => monomial_pow(m, Rational64::from_integer(n)),
                None if self.is_zero() => Err(ExprError::DivisionByZeroExpr),
                None => Err(ExprError::NegativePowerOfSum {
                    terms: self.terms.len(),
                }),
            };
        }
        if let Some(m) = self.as_monomial() {
            return monomial_pow(m, Rational64::from_integer(n));
        }
        let mut result = Expr::one();
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        Ok(result)
    }

    /// Rational power; non-integer exponents require a single monomial whose
    /// coefficient is 1 (or is raised to an integer power).
    pub fn pow_rational(&self, e: Rational64) -> Result<Expr, ExprError> {
        if e.is_integer() {
            return self.pow(*e.numer());
        }
        match self.as_monomial() {
            Some(m) => monomial_pow(m, e),
            None => Err(ExprError::NegativePowerOfSum {
                terms: self.terms.len(),
            }),
        }
    }

    /// Term-by-term power rule.
    pub fn diff(&self, s: &Symbol) -> Expr {
        let mut acc = TermAccumulator::default();
        for t in &self.terms {
            let Ok(i) = t.powers.binary_search_by(|(x, _)| x.cmp(s)) else {
                continue;
            };
            let e = t.powers[i].1;
            let mut powers = t.powers.clone();
            let ne = e - Rational64::one();
            if ne.is_zero() {
                powers.remove(i);
            } else {
                powers[i].1 = ne;
            }
            acc.add(powers, &t.coeff * rational64_to_big(e));
        }
        acc.finish()
    }

    /// Simultaneous substitution. Negative or fractional powers of a symbol
    /// whose image has several terms are rejected.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Expr>) -> Result<Expr, ExprError> {
        self.substitute_impl(map, None)
    }

    /// Like [`Expr::substitute`], but negative integer powers of multi-term
    /// images become powers of an auxiliary inverse symbol registered in
    /// `inverses`.
    pub fn substitute_with_inverses(
        &self,
        map: &BTreeMap<Symbol, Expr>,
        inverses: &mut InverseRegistry,
    ) -> Result<Expr, ExprError> {
        self.substitute_impl(map, Some(inverses))
    }

    fn substitute_impl(
        &self,
        map: &BTreeMap<Symbol, Expr>,
        mut inverses: Option<&mut InverseRegistry>,
    ) -> Result<Expr, ExprError> {
        let mut cache: HashMap<(Symbol, Rational64), Expr> = HashMap::new();
        let mut acc = TermAccumulator::default();
        for t in &self.terms {
            let mut kept = Powers::new();
            let mut factors: Vec<Expr> = Vec::new();
            for (s, e) in &t.powers {
                let Some(image) = map.get(s) else {
                    kept.push((s.clone(), *e));
                    continue;
                };
                let key = (s.clone(), *e);
                if let Some(v) = cache.get(&key) {
                    factors.push(v.clone());
                    continue;
                }
                let value = if image.as_monomial().is_some() || (e.is_integer() && *e.numer() > 0) {
                    image.pow_rational(*e)?
                } else if e.is_integer() && image.is_zero() {
                    return Err(ExprError::DivisionByZero(s.clone()));
                } else if e.is_integer() {
                    match inverses.as_deref_mut() {
                        Some(reg) => {
                            let u = reg.inverse_of(image);
                            Expr::power_of(u, -*e)
                        }
                        None => {
                            return Err(ExprError::NonMonomialNegativePower {
                                symbol: s.clone(),
                                exponent: *e,
                            })
                        }
                    }
                } else {
                    return Err(ExprError::NonMonomialNegativePower {
                        symbol: s.clone(),
                        exponent: *e,
                    });
                };
                cache.insert(key, value.clone());
                factors.push(value);
            }
            let mut prod = Expr::from_powers(t.coeff.clone(), kept);
            for f in &factors {
                prod = &prod * f;
            }
            acc.add_expr(&prod, &BigRational::one());
        }
        Ok(acc.finish())
    }

    /// Numeric value at `point`; every symbol must be bound. Fractional powers
    /// use the positive real branch.
    pub fn eval(&self, point: &HashMap<Symbol, f64>) -> Result<f64, ExprError> {
        let mut total = 0.0;
        for t in &self.terms {
            let mut v = t.coeff.to_f64().unwrap_or(f64::NAN);
            for (s, e) in &t.powers {
                let x = *point.get(s).ok_or_else(|| ExprError::Unbound(s.clone()))?;
                v *= eval_power(s, x, *e)?;
            }
            total += v;
        }
        Ok(total)
    }

    /// Coefficients as a polynomial in `s`: exponent of `s` -> remaining terms.
    pub fn collect_by(&self, s: &Symbol) -> BTreeMap<Rational64, Expr> {
        let mut groups: BTreeMap<Rational64, TermAccumulator> = BTreeMap::new();
        for t in &self.terms {
            let e = t.exponent(s);
            let powers: Powers = t.powers.iter().filter(|(x, _)| x != s).cloned().collect();
            groups.entry(e).or_default().add(powers, t.coeff.clone());
        }
        groups.into_iter().map(|(e, a)| (e, a.finish())).collect()
    }

    /// Replaces each coefficient `c` by `f(c)`, dropping resulting zeros.
    pub fn map_coefficients<F: Fn(&BigRational) -> BigRational>(&self, f: F) -> Expr {
        let mut acc = TermAccumulator::default();
        for t in &self.terms {
            acc.add(t.powers.clone(), f(&t.coeff));
        }
        acc.finish()
    }
}

pub(crate) fn rational64_to_big(e: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*e.numer()), BigInt::from(*e.denom()))
}

pub(crate) fn eval_power(s: &Symbol, x: f64, e: Rational64) -> Result<f64, ExprError> {
    if e.is_integer() {
        let n = *e.numer();
        if n < 0 && x == 0.0 {
            return Err(ExprError::DivisionByZero(s.clone()));
        }
        Ok(x.powi(n as i32))
    } else {
        if x <= 0.0 {
            return Err(ExprError::Domain(s.clone()));
        }
        Ok(x.powf(*e.numer() as f64 / *e.denom() as f64))
    }
}

fn monomial_pow(m: &Monomial, e: Rational64) -> Result<Expr, ExprError> {
    let coeff = if e.is_integer() {
        let n = *e.numer();
        if n < 0 {
            m.coeff.recip().pow(-(n as i32))
        } else {
            m.coeff.pow(n as i32)
        }
    } else if m.coeff.is_one() {
        BigRational::one()
    } else {
        return Err(ExprError::FractionalPowerOfCoefficient {
            coefficient: m.coeff.to_string(),
            exponent: e,
        });
    };
    let powers: Powers = m
        .powers
        .iter()
        .map(|(s, x)| (s.clone(), *x * e))
        .filter(|(_, x)| !x.is_zero())
        .collect();
    Ok(Expr::from_powers(coeff, powers))
}

/// Records `aux * denominator = 1` for an auxiliary inverse symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SideRelation {
    pub aux: Symbol,
    pub denominator: Expr,
}

impl SideRelation {
    /// `d aux / d s = -aux^2 * d denominator / d s`.
    pub fn aux_derivative(&self, s: &Symbol) -> Expr {
        let u2 = Expr::power_of(self.aux.clone(), Rational64::from_integer(2));
        (&u2 * &self.denominator.diff(s)).scale(&-BigRational::one())
    }
}

/// Allocates auxiliary inverse symbols for multi-term denominators.
#[derive(Clone, Debug, Default)]
pub struct InverseRegistry {
    relations: Vec<SideRelation>,
}

impl InverseRegistry {
    pub fn new() -> Self {
        InverseRegistry::default()
    }

    pub fn inverse_of(&mut self, denominator: &Expr) -> Symbol {
        if let Some(r) = self.relations.iter().find(|r| &r.denominator == denominator) {
            return r.aux.clone();
        }
        let aux = Symbol::aux(self.relations.len() as u32 + 1);
        self.relations.push(SideRelation {
            aux: aux.clone(),
            denominator: denominator.clone(),
        });
        aux
    }

    pub fn relations(&self) -> &[SideRelation] {
        &self.relations
    }
}

impl Expr {
    /// Partial derivative that also differentiates auxiliary inverse symbols
    /// through their side relations (chain rule).
    pub fn diff_total(&self, s: &Symbol, relations: &[SideRelation]) -> Expr {
        let mut d = self.diff(s);
        for r in relations {
            if !self.depends_on(&r.aux) {
                continue;
            }
            let du = r.aux_derivative(s);
            if du.is_zero() {
                continue;
            }
            d = &d + &(&self.diff(&r.aux) * &du);
        }
        d
    }

    /// Multiplies through by `denominator^d` for each side relation, where
    /// `d` is the largest power of its auxiliary symbol, and eliminates the
    /// auxiliary. The result vanishes iff `self` vanishes as a function.
    pub fn clear_denominators(&self, relations: &[SideRelation]) -> Result<Expr, ExprError> {
        let mut current = self.clone();
        for r in relations {
            let groups = current.collect_by(&r.aux);
            if groups.len() == 1 && groups.contains_key(&Rational64::zero()) {
                continue;
            }
            let mut by_power: BTreeMap<i64, Expr> = BTreeMap::new();
            for (e, c) in groups {
                if !e.is_integer() || *e.numer() < 0 {
                    return Err(ExprError::BadAuxiliaryPower {
                        symbol: r.aux.clone(),
                        exponent: e,
                    });
                }
                by_power.insert(*e.numer(), c);
            }
            let top = *by_power.keys().next_back().unwrap_or(&0);
            // Horner in the denominator: sum_k c_k S^(top-k).
            let mut acc = Expr::zero();
            for k in 0..=top {
                acc = &acc * &r.denominator;
                if let Some(c) = by_power.get(&k) {
                    acc = &acc + c;
                }
            }
            current = acc;
        }
        Ok(current)
    }

    pub fn is_zero_modulo(&self, relations: &[SideRelation]) -> Result<bool, ExprError> {
        Ok(self.clear_denominators(relations)?.is_zero())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::integer(n)
    }
}

impl From<Symbol> for Expr {
    fn from(s: Symbol) -> Self {
        Expr::symbol(s)
    }
}

impl From<BigRational> for Expr {
    fn from(c: BigRational) -> Self {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inner(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$inner(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$inner(self, &rhs)
            }
        }
    };
}

binop!(Add, add, add_impl);
binop!(Sub, sub, sub_impl);
binop!(Mul, mul, mul_impl);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        self.scale(&-BigRational::one())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

/// Absolute value of the largest coefficient, handy for diagnostics.
pub fn max_abs_coefficient(e: &Expr) -> BigRational {
    e.terms
        .iter()
        .map(|t| t.coeff.abs())
        .max()
        .unwrap_or_else(BigRational::zero)
}
