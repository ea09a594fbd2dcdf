//! Property suites for the expression ring, the two bracket modes, the
//! realization morphism and the compiled numeric tape.

use std::collections::HashMap;

use hh_integrable::dynamics::compile;
use hh_integrable::poisson::{sl2_casimir, BracketContext};
use hh_integrable::realize::{casimir_identity_check, universal_integrals, RealizationSpec, Realizer};
use hh_integrable::symexpr::{gen, parse, Expr, Generator, Symbol};
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;
use proptest::prelude::*;

/// One monomial: small rational coefficient and an exponent per variable.
fn term(vars: usize, lo: i64, hi: i64) -> impl Strategy<Value = (i64, i64, Vec<i64>)> {
    (-6i64..=6, 1i64..=4, prop::collection::vec(lo..=hi, vars))
}

fn build(symbols: &[Symbol], terms: &[(i64, i64, Vec<i64>)]) -> Expr {
    let mut e = Expr::zero();
    for (n, d, exps) in terms {
        let factors = symbols.iter().cloned().zip(exps.iter().map(|&k| Rational64::from_integer(k)));
        e = e + Expr::monomial(BigRational::new((*n).into(), (*d).into()), factors);
    }
    e
}

fn phase_symbols(n: u32) -> Vec<Symbol> {
    (1..=n).map(Symbol::q).chain((1..=n).map(Symbol::p)).collect()
}

fn generator_symbols() -> Vec<Symbol> {
    Generator::ALL.iter().map(|g| Symbol::generator(*g)).collect()
}

/// Polynomial in `q1, q2, p1, p2`.
fn canonical_poly(max_terms: usize, max_deg: i64) -> impl Strategy<Value = Expr> {
    prop::collection::vec(term(4, 0, max_deg), 1..=max_terms).prop_map(|t| build(&phase_symbols(2), &t))
}

/// Laurent polynomial with negative powers of `q1, q2` allowed.
fn laurent_poly() -> impl Strategy<Value = Expr> {
    prop::collection::vec((term(2, -2, 2), prop::collection::vec(0i64..=2, 2)), 1..=4).prop_map(|ts| {
        let flat: Vec<(i64, i64, Vec<i64>)> = ts
            .into_iter()
            .map(|((n, d, mut e), ep)| {
                e.extend(ep);
                (n, d, e)
            })
            .collect();
        build(&phase_symbols(2), &flat)
    })
}

/// Polynomial in the six generators, `M` included.
fn abstract_poly(max_terms: usize, max_deg: i64) -> impl Strategy<Value = Expr> {
    prop::collection::vec(term(6, 0, max_deg), 1..=max_terms).prop_map(|t| build(&generator_symbols(), &t))
}

/// Word of total degree at most 3 in the generators.
fn short_word() -> impl Strategy<Value = Expr> {
    prop::collection::vec(0usize..6, 0..=3).prop_map(|idx| {
        idx.into_iter().fold(Expr::one(), |acc, k| acc * gen(Generator::ALL[k]))
    })
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

/// Evaluates a Laurent polynomial with integer exponents at a complex point.
fn eval_complex(e: &Expr, point: &HashMap<Symbol, Complex64>) -> Complex64 {
    e.terms()
        .iter()
        .map(|t| {
            t.powers().iter().fold(Complex64::new(to_f64(t.coefficient()), 0.0), |acc, (s, k)| {
                acc * point[s].powi(k.to_integer() as i32)
            })
        })
        .sum()
}

/// Canonical bracket from complex-step first derivatives.
fn numeric_bracket(f: &Expr, g: &Expr, x: &[f64; 4]) -> f64 {
    let syms = phase_symbols(2);
    let h = 1e-30;
    let partial = |e: &Expr, k: usize| -> f64 {
        let point: HashMap<Symbol, Complex64> = syms
            .iter()
            .enumerate()
            .map(|(j, s)| (s.clone(), Complex64::new(x[j], if j == k { h } else { 0.0 })))
            .collect();
        eval_complex(e, &point).im / h
    };
    (0..2)
        .map(|i| partial(f, i) * partial(g, 2 + i) - partial(f, 2 + i) * partial(g, i))
        .sum()
}

fn point_map(x: &[f64]) -> HashMap<Symbol, f64> {
    phase_symbols((x.len() / 2) as u32).into_iter().zip(x.iter().copied()).collect()
}

fn away_from_zero() -> impl Strategy<Value = f64> {
    prop_oneof![0.4f64..1.6, -1.6f64..-0.4]
}

fn jacobi(ctx: &BracketContext, f: &Expr, g: &Expr, h: &Expr) -> Expr {
    let b = |x: &Expr, y: &Expr| ctx.bracket(x, y).unwrap();
    b(f, &b(g, h)) + b(g, &b(h, f)) + b(h, &b(f, g))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms(a in laurent_poly(), b in laurent_poly(), c in laurent_poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
        prop_assert_eq!((&a * &b) * &c, &a * (&b * &c));
        prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * Expr::one(), a.clone());
        prop_assert!((&a * Expr::zero()).is_zero());
    }

    #[test]
    fn derivative_product_rule(a in laurent_poly(), b in laurent_poly(), k in 0usize..4) {
        let s = &phase_symbols(2)[k];
        prop_assert_eq!((&a * &b).diff(s), a.diff(s) * &b + &a * b.diff(s));
    }

    #[test]
    fn printing_round_trips(a in laurent_poly(), w in abstract_poly(3, 2)) {
        prop_assert_eq!(parse(&a.to_string()).unwrap(), a.clone());
        prop_assert_eq!(parse(&w.to_string()).unwrap(), w.clone());
    }

    #[test]
    fn canonical_bracket_axioms(f in canonical_poly(3, 2), g in canonical_poly(3, 2), h in canonical_poly(3, 2)) {
        let ctx = BracketContext::canonical(2);
        let fg = ctx.bracket(&f, &g).unwrap();
        prop_assert!((&fg + ctx.bracket(&g, &f).unwrap()).is_zero(), "antisymmetry");
        let leibniz = ctx.bracket(&f, &(&g * &h)).unwrap() - (&fg * &h + &g * ctx.bracket(&f, &h).unwrap());
        prop_assert!(leibniz.is_zero(), "Leibniz");
        prop_assert!(jacobi(&ctx, &f, &g, &h).is_zero(), "Jacobi");
    }

    #[test]
    fn abstract_bracket_axioms(f in abstract_poly(3, 2), g in abstract_poly(3, 2), h in abstract_poly(3, 2)) {
        let ctx = BracketContext::abstract_algebra();
        let fg = ctx.bracket(&f, &g).unwrap();
        prop_assert!((&fg + ctx.bracket(&g, &f).unwrap()).is_zero(), "antisymmetry");
        let leibniz = ctx.bracket(&f, &(&g * &h)).unwrap() - (&fg * &h + &g * ctx.bracket(&f, &h).unwrap());
        prop_assert!(leibniz.is_zero(), "Leibniz");
        prop_assert!(jacobi(&ctx, &f, &g, &h).is_zero(), "Jacobi");
    }

    #[test]
    fn casimirs_commute_with_short_words(w in short_word()) {
        let ctx = BracketContext::abstract_algebra();
        prop_assert!(ctx.bracket(&sl2_casimir(), &w).unwrap().is_zero());
        prop_assert!(ctx.bracket(&gen(Generator::M), &w).unwrap().is_zero());
    }

    #[test]
    fn sparse_bracket_matches_complex_step(
        f in laurent_poly(),
        g in laurent_poly(),
        x in prop::array::uniform4(away_from_zero()),
    ) {
        let exact = BracketContext::canonical(2).bracket(&f, &g).unwrap().eval(&point_map(&x)).unwrap();
        let numeric = numeric_bracket(&f, &g, &x);
        prop_assert!((exact - numeric).abs() <= 1e-9 * (1.0 + exact.abs()), "{exact} vs {numeric}");
    }

    #[test]
    fn tape_matches_symbolic_eval(h in laurent_poly(), x in prop::array::uniform4(away_from_zero())) {
        let field = compile(&h, 2, &[], &HashMap::new()).unwrap();
        let exact = h.eval(&point_map(&x)).unwrap();
        let tape = field.energy(&x);
        prop_assert!((exact - tape).abs() <= 1e-12 * (1.0 + exact.abs()), "{exact} vs {tape}");
    }

    #[test]
    fn realization_is_a_morphism_on_words(a in short_word(), b in short_word(), n in 2u32..=4) {
        let mut r = Realizer::new(RealizationSpec::symbolic(n).unwrap());
        let lhs = r.realize(&BracketContext::abstract_algebra().bracket(&a, &b).unwrap()).unwrap();
        let (ra, rb) = (r.realize(&a).unwrap(), r.realize(&b).unwrap());
        let ctx = r.context();
        let rhs = ctx.bracket(&ra, &rb).unwrap();
        prop_assert!(ctx.is_zero(&(lhs - rhs)).unwrap());
    }
}

#[test]
fn gradient_matches_central_differences() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let h = parse("1/2*(p1^2 + p2^2) + 1/2*q1^2 + 3/4*q2^2 + q1^2*q2 + 2*q2^3 + 1/5*q1^-2 - 1/3*q2^-1").unwrap();
    let field = compile(&h, 2, &[], &HashMap::new()).unwrap();
    for _ in 0..20 {
        let x: Vec<f64> = (0..4)
            .map(|_| {
                let v: f64 = rng.gen_range(0.4..1.6);
                if rng.gen_bool(0.5) { v } else { -v }
            })
            .collect();
        let mut grad = vec![0.0; 4];
        field.gradient(&x, &mut grad);
        let step = 1e-6;
        for k in 0..4 {
            let (mut up, mut down) = (x.clone(), x.clone());
            up[k] += step;
            down[k] -= step;
            let fd = (field.energy(&up) - field.energy(&down)) / (2.0 * step);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(1.0);
            assert!(rel < 1e-6, "component {k} at {x:?}: {} vs {fd}", grad[k]);
        }
    }
}

#[test]
fn generator_pairs_realize_to_canonical_brackets() {
    let abs = BracketContext::abstract_algebra();
    for n in 2..=4 {
        let mut r = Realizer::new(RealizationSpec::symbolic(n).unwrap());
        for x in Generator::ALL {
            for y in Generator::ALL {
                let lhs = r.realize(&abs.bracket(&gen(x), &gen(y)).unwrap()).unwrap();
                let images = (r.realize(&gen(x)).unwrap(), r.realize(&gen(y)).unwrap());
                let rhs = r.context().bracket(&images.0, &images.1).unwrap();
                assert!((lhs - rhs).is_zero(), "N={n} {{{x:?},{y:?}}}");
            }
        }
    }
}

#[test]
fn casimir_realizes_to_top_universal_integral() {
    for n in 2..=4 {
        let spec = RealizationSpec::symbolic(n).unwrap();
        assert!(casimir_identity_check(&spec).unwrap().is_zero(), "N={n}");
        let mut r = Realizer::new(spec.clone());
        let lhs = r.realize(&sl2_casimir()).unwrap();
        let top = universal_integrals(&spec).last().cloned().unwrap_or_else(Expr::zero);
        let shift = Expr::sum(spec.b().iter());
        let ctx = r.context();
        assert!(ctx.is_zero(&(lhs - top - shift)).unwrap(), "N={n}");
    }
}
