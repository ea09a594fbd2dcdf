use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{ramani, CatalogError, Family, ModelInstance};
use crate::symexpr::{gen, p, param, parse, q, Expr, Generator, Symbol};

const SK_H2: &str = "1/2*(p1^2 + p2^2) + delta*(q1^2 + q2^2) + alpha*(q1^2*q2 + 1/3*q2^3) + lambda*q1^(-2)";
const SK_I2: &str = "1/2*p1^2*p2^2 + 2*delta*(delta*q1^2*q2^2 + p1*q1*p2*q2) \
    + 2/3*alpha*delta*q1^2*(q1^2*q2 + 3*q2^3) \
    + alpha*(alpha*q1^2*q2^2*(1/2*q2^2 + 1/3*q1^2) + 1/18*alpha*q1^6 \
      + p1*q1*q2*(p2*q2 - 2/3*p1*q1) + 1/3*q1^2*(2*p1^2*q2 + p1*q1*p2)) \
    + lambda*(p2^2*q1^(-2) + 4/3*alpha*q2)";
const SK_H: &str = "1/2*(Jp + Ap^2) + delta*(Jm + Am^2) + alpha*(Jm*Am + 1/3*Am^3) + lambda*Jm^(-1)";
const SK_I: &str = "1/2*Jp*Ap^2 + 2*delta*Am*(delta*Am*Jm + Ap*J3) \
    + 2*alpha*delta*Am*Jm*(1/3*Jm + Am^2) \
    + alpha*(alpha*Am^2*Jm*(1/2*Am^2 + 1/3*Jm) + 1/18*alpha*Jm^3 \
      + Am*J3*(Ap*Am - 2/3*J3) + 1/3*Jm*(2*Am*Jp + Ap*J3)) \
    + lambda*(Ap^2*Jm^(-1) + 4/3*alpha*Am)";

const KK_H2: &str = "1/2*(p1^2 + p2^2) + delta*(q1^2 + 16*q2^2) + alpha*(q1^2*q2 + 16/3*q2^3) \
    + lambda*q1^(-2) + nu*q1^(-6)";
const KK_I2: &str = "3/4*p1^4 + delta*(q1^2*(3*delta*q1^2 + p1^2) + 2*p1^2*q1^2) \
    + alpha*(q1^2*(q2*p1^2 - p2*p1*q1) - alpha*q1^4*(1/6*q1^2 + q2^2) + 2*q2*(p1^2*q1^2 - delta*q1^4)) \
    + lambda*(3*q1^(-2)*(p1^2 + lambda*q1^(-2)) + 2*alpha*q2) \
    + 3*nu*q1^(-4)*(2*alpha*q2 + 2*delta + q1^(-2)*(p1^2 + 2*lambda*q1^(-2) + nu*q1^(-6)))";
const KK_H: &str = "1/2*(Jp + Ap^2) + delta*(Jm + 16*Am^2) + alpha*(Jm*Am + 16/3*Am^3) \
    + lambda*Jm^(-1) + nu*Jm^(-3)";
const KK_I: &str = "3/4*Jp^2 + delta*(Jm*(3*delta*Jm + Jp) + 2*J3^2) \
    + alpha*(Jm*(Am*Jp - Ap*J3) - alpha*Jm^2*(1/6*Jm + Am^2) + 2*Am*(J3^2 - delta*Jm^2)) \
    + lambda*(3*Jm^(-1)*(Jp + lambda*Jm^(-1)) + 2*alpha*Am) \
    + 3*nu*Jm^(-2)*(2*alpha*Am + 2*delta + Jm^(-1)*(Jp + 2*lambda*Jm^(-1) + nu*Jm^(-3)))";

const KDV_H2: &str = "1/2*(p1^2 + p2^2) + delta*q1^2 + (delta + Omega)*q2^2 + alpha*(q1^2*q2 + 2*q2^3) \
    + lambda*q1^(-2)";
const KDV_I2: &str = "delta*(3/2*p1^2 + (3*delta - Omega)*q1^2) - 1/2*Omega*p1^2 \
    + alpha*(-q2*p1^2 + alpha*q1^2*(1/4*q1^2 + q2^2) + p2*p1*q1) + 2*alpha*delta*q2*q1^2 \
    + lambda*q1^(-2)*(3*delta - Omega - 2*alpha*q2)";
const KDV_H: &str = "1/2*(Jp + Ap^2) + delta*(Jm + Am^2) + Omega*Am^2 + alpha*(Jm*Am + 2*Am^3) + lambda*Jm^(-1)";
const KDV_I: &str = "delta*(3/2*Jp + (3*delta - Omega)*Jm) - 1/2*Omega*Jp \
    + alpha*(-Am*Jp + alpha*Jm*(1/4*Jm + Am^2) + Ap*J3) + 2*alpha*delta*Am*Jm \
    + lambda*Jm^(-1)*(3*delta - Omega - 2*alpha*Am)";

const HOLT_H2: &str = "1/2*(p1^2 + p2^2) + q2^(-2/3)*(q1^2 + 9/2*q2^2)";
const HOLT_I2: &str = "p1^4 + 2*p1^2*p2^2 + 24*q2^(1/3)*p2*q1*p1 + 4*q2^(-2/3)*q1^2*p1^2 + 72*q2^(2/3)*q1^2";
const HOLT_H: &str = "1/2*(Jp + Ap^2) + Am^(-2/3)*(Jm + 9/2*Am^2)";
const HOLT_I: &str = "Jp^2 + 2*Jp*Ap^2 + 24*Am^(1/3)*Ap*J3 + 4*Am^(-2/3)*Jp*Jm + 72*Am^(2/3)*Jm";

const GENERIC_H2: &str = "1/2*(p1^2 + p2^2) + delta*q1^2 + (delta + Omega)*q2^2 + alpha*(q1^2*q2 + beta*q2^3)";
const GENERIC_H: &str = "1/2*(Jp + Ap^2) + delta*Jm + (delta + Omega)*Am^2 + alpha*(Jm*Am + beta*Am^3)";

fn template(src: &str, bindings: &BTreeMap<Symbol, Expr>) -> Expr {
    let e = parse(src).expect("catalog template parses");
    e.substitute(bindings).expect("parameters appear with non-negative integer powers")
}

fn bindings(pairs: &[(&str, &Expr)]) -> BTreeMap<Symbol, Expr> {
    pairs.iter().map(|(n, e)| (Symbol::param(n), (*e).clone())).collect()
}

fn named(pairs: &[(&str, &Expr)]) -> BTreeMap<String, Expr> {
    pairs.iter().map(|(n, e)| (n.to_string(), (*e).clone())).collect()
}

fn instance(
    family: Family,
    id: String,
    pairs: &[(&str, &Expr)],
    forms: [&str; 4],
) -> ModelInstance {
    let b = bindings(pairs);
    ModelInstance {
        family,
        id,
        parameters: named(pairs),
        abstract_h: template(forms[0], &b),
        abstract_i: Some(template(forms[1], &b)),
        realized_h: template(forms[2], &b),
        realized_i: Some(template(forms[3], &b)),
        integrable_case: Some(family),
    }
}

/// Sawada-Kotera case with centrifugal term.
pub fn make_sk(delta: &Expr, alpha: &Expr, lambda: &Expr) -> ModelInstance {
    instance(
        Family::Sk,
        "sk".into(),
        &[("delta", delta), ("alpha", alpha), ("lambda", lambda)],
        [SK_H, SK_I, SK_H2, SK_I2],
    )
}

/// Kaup-Kupershmidt case with its two rational perturbations.
pub fn make_kk(delta: &Expr, alpha: &Expr, lambda: &Expr, nu: &Expr) -> ModelInstance {
    instance(
        Family::Kk,
        "kk".into(),
        &[("delta", delta), ("alpha", alpha), ("lambda", lambda), ("nu", nu)],
        [KK_H, KK_I, KK_H2, KK_I2],
    )
}

/// KdV case with centrifugal term; the integral is quadratic in momenta.
pub fn make_kdv(delta: &Expr, omega: &Expr, alpha: &Expr, lambda: &Expr) -> ModelInstance {
    instance(
        Family::Kdv,
        "kdv".into(),
        &[("delta", delta), ("Omega", omega), ("alpha", alpha), ("lambda", lambda)],
        [KDV_H, KDV_I, KDV_H2, KDV_I2],
    )
}

pub fn make_holt() -> ModelInstance {
    instance(Family::Holt, "holt".into(), &[], [HOLT_H, HOLT_I, HOLT_H2, HOLT_I2])
}

/// KdV case superposed with the first `M` Ramani potentials (weights
/// `alphas`) and `R` rational perturbations (weights `gammas`), `M > R`.
pub fn make_kdv_mr(
    m: usize,
    r: usize,
    lambda: &Expr,
    alphas: &[Expr],
    gammas: &[Expr],
) -> Result<ModelInstance, CatalogError> {
    if m <= r {
        return Err(CatalogError::BadDegrees { m, r });
    }
    if alphas.len() != m || gammas.len() != r {
        return Err(CatalogError::WrongLength {
            expected: (m, r),
            got: (alphas.len(), gammas.len()),
        });
    }
    let jm = gen(Generator::JMinus);
    let am = gen(Generator::AMinus);
    let x = q(1).pow(2).expect("square");
    let inv = |e: &Expr, k: u32| e.pow(-(k as i64)).expect("monomial inverse");
    let half = Expr::rational(1, 2);

    let mut h = &half * (gen(Generator::JPlus) + gen(Generator::APlus).pow(2).expect("square"))
        + lambda * inv(&jm, 1);
    let mut i = -(&am * gen(Generator::JPlus)) + gen(Generator::J3) * gen(Generator::APlus)
        - Expr::integer(2) * lambda * &am * inv(&jm, 1);
    let mut h2 = &half * (p(1).pow(2).expect("square") + p(2).pow(2).expect("square")) + lambda * inv(&x, 1);
    let mut i2 = -(q(2) * p(1).pow(2).expect("square")) + q(1) * p(1) * p(2)
        - Expr::integer(2) * lambda * q(2) * inv(&x, 1);

    for (k, a) in alphas.iter().enumerate() {
        let deg = k as u32 + 1;
        let (v, vm) = (ramani(deg), ramani(deg - 1));
        h = h + a * &v.abstract_form;
        i = i + a * &jm * &vm.abstract_form;
        h2 = h2 + a * &v.realized;
        i2 = i2 + a * &x * &vm.realized;
    }
    for (k, g) in gammas.iter().enumerate() {
        let deg = k as u32 + 1;
        let (v, vp) = (ramani(deg), ramani(deg + 1));
        h = h + g * &v.abstract_form * inv(&jm, deg + 1);
        i = i - g * &vp.abstract_form * inv(&jm, deg + 1);
        h2 = h2 + g * &v.realized * inv(&x, deg + 1);
        i2 = i2 - g * &vp.realized * inv(&x, deg + 1);
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("lambda".to_string(), lambda.clone());
    for (k, a) in alphas.iter().enumerate() {
        parameters.insert(format!("a{}", k + 1), a.clone());
    }
    for (k, g) in gammas.iter().enumerate() {
        parameters.insert(format!("g{}", k + 1), g.clone());
    }
    Ok(ModelInstance {
        family: Family::KdvMr,
        id: format!("kdv-mr:M={m},R={r}"),
        parameters,
        abstract_h: h,
        abstract_i: Some(i),
        realized_h: h2,
        realized_i: Some(i2),
        integrable_case: Some(Family::KdvMr),
    })
}

/// `kdv-mr` with the symbolic parameters `lambda`, `a1..aM`, `g1..gR`.
pub fn make_kdv_mr_symbolic(m: usize, r: usize) -> Result<ModelInstance, CatalogError> {
    let alphas: Vec<Expr> = (1..=m as u32).map(|k| Expr::symbol(Symbol::indexed_param("a", k))).collect();
    let gammas: Vec<Expr> = (1..=r as u32).map(|k| Expr::symbol(Symbol::indexed_param("g", k))).collect();
    make_kdv_mr(m, r, &param("lambda"), &alphas, &gammas)
}

/// Parameters of the rational KdV perturbation written with `c` and
/// `xi_0..xi_R`, in the `kdv-mr` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct HoneTranslation {
    pub lambda: Expr,
    pub alphas: Vec<Expr>,
    pub gammas: Vec<Expr>,
}

/// `c -> alpha_1`, `alpha_3 = 1/8`, `2 xi_0 -> lambda`,
/// `2^(2j+1) xi_j -> gamma_j`. The polynomial part is padded with zero
/// weights so that `M > R` always holds.
pub fn hone_to_mr(c: &Expr, xi: &[Expr]) -> HoneTranslation {
    let r = xi.len().saturating_sub(1);
    let m = (r + 1).max(3);
    let mut alphas = vec![Expr::zero(); m];
    alphas[0] = c.clone();
    alphas[2] = Expr::rational(1, 8);
    let lambda = xi.first().map(|x0| Expr::integer(2) * x0).unwrap_or_else(Expr::zero);
    let gammas = (1..=r)
        .map(|j| {
            let f = BigRational::from_integer(BigInt::from(2).pow(2 * j as u32 + 1));
            xi[j].scale(&f)
        })
        .collect();
    HoneTranslation { lambda, alphas, gammas }
}

pub fn make_hone(c: &Expr, xi: &[Expr]) -> Result<ModelInstance, CatalogError> {
    let t = hone_to_mr(c, xi);
    make_kdv_mr(t.alphas.len(), t.gammas.len(), &t.lambda, &t.alphas, &t.gammas)
}

/// The three integrable `(beta, Omega)` cases of the generic family.
pub fn integrable_case(delta: &Expr, omega: &Expr, beta: &Expr) -> Option<Family> {
    let b = beta.as_constant()?;
    let is = |n: i64, d: i64| b == BigRational::new(n.into(), d.into());
    if is(1, 3) && omega.is_zero() {
        Some(Family::Sk)
    } else if is(2, 1) {
        Some(Family::Kdv)
    } else if is(16, 3) && (omega - Expr::integer(15) * delta).is_zero() {
        Some(Family::Kk)
    } else {
        None
    }
}

/// `1/2 (p1^2+p2^2) + delta q1^2 + (delta+Omega) q2^2 + alpha (q1^2 q2 + beta q2^3)`;
/// the integral is attached only in the three integrable cases.
pub fn make_generic_hh(delta: &Expr, omega: &Expr, alpha: &Expr, beta: &Expr) -> ModelInstance {
    let pairs: [(&str, &Expr); 4] = [("delta", delta), ("Omega", omega), ("alpha", alpha), ("beta", beta)];
    let b = bindings(&pairs);
    let case = integrable_case(delta, omega, beta);
    let zero = Expr::zero();
    let integrable = case.map(|f| match f {
        Family::Sk => make_sk(delta, alpha, &zero),
        Family::Kdv => make_kdv(delta, omega, alpha, &zero),
        _ => make_kk(delta, alpha, &zero, &zero),
    });
    ModelInstance {
        family: Family::GenericHh,
        id: "generic".into(),
        parameters: named(&pairs),
        abstract_h: template(GENERIC_H, &b),
        abstract_i: integrable.as_ref().and_then(|m| m.abstract_i.clone()),
        realized_h: template(GENERIC_H2, &b),
        realized_i: integrable.as_ref().and_then(|m| m.realized_i.clone()),
        integrable_case: case,
    }
}

/// The original chaotic system `1/2 (p^2 + q^2) + lambda (q1^2 q2 - q2^3/3)`,
/// i.e. the generic family at `delta = 1/2, Omega = 0, alpha = lambda, beta = -1/3`.
pub fn make_classic_hh(lambda: &Expr) -> ModelInstance {
    make_generic_hh(&Expr::rational(1, 2), &Expr::zero(), lambda, &Expr::rational(-1, 3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::rat;
    use std::collections::HashMap;

    fn at(e: &Expr, qs: [f64; 2], ps: [f64; 2]) -> f64 {
        let mut pt = HashMap::new();
        for i in 0..2 {
            pt.insert(Symbol::q(i as u32 + 1), qs[i]);
            pt.insert(Symbol::p(i as u32 + 1), ps[i]);
        }
        e.eval(&pt).unwrap()
    }

    #[test]
    fn hand_evaluations() {
        let sk = make_sk(&Expr::integer(1), &Expr::integer(3), &Expr::zero());
        assert_eq!(at(&sk.realized_h, [1.0, 1.0], [0.0, 0.0]), 6.0);
        let kk = make_kk(&Expr::zero(), &Expr::integer(3), &Expr::zero(), &Expr::zero());
        assert_eq!(at(&kk.realized_h, [1.0, 1.0], [0.0, 0.0]), 19.0);
        assert_eq!(at(&make_holt().realized_h, [0.0, 1.0], [0.0, 0.0]), 4.5);
        let kdv = make_kdv(&Expr::integer(1), &Expr::zero(), &Expr::integer(1), &Expr::zero());
        assert_eq!(at(&kdv.realized_h, [1.0, 2.0], [0.0, 0.0]), 23.0);
    }

    #[test]
    fn kk_anisotropy() {
        let kk = make_kk(&param("delta"), &Expr::zero(), &Expr::zero(), &Expr::zero());
        let c = kk.realized_h.collect_by(&Symbol::q(2));
        let q2sq = &c[&num_rational::Rational64::from_integer(2)];
        assert_eq!(q2sq, &(Expr::integer(16) * param("delta")));
    }

    #[test]
    fn kdv_limit_with_vanishing_parameters() {
        let a = param("alpha");
        let m = make_kdv(&Expr::zero(), &Expr::zero(), &a, &Expr::zero());
        let expected = parse("-q2*p1^2 + q1*p1*p2 + alpha*q1^2*(1/4*q1^2 + q2^2)").unwrap();
        assert_eq!(m.realized_i.unwrap(), &a * &expected);
    }

    #[test]
    fn sk_unperturbed_limit() {
        let m = make_sk(&Expr::zero(), &param("alpha"), &Expr::zero());
        let full = parse(SK_I2).unwrap();
        let mut b = BTreeMap::new();
        b.insert(Symbol::param("delta"), Expr::zero());
        b.insert(Symbol::param("lambda"), Expr::zero());
        assert_eq!(m.realized_i.unwrap(), full.substitute(&b).unwrap());
    }

    #[test]
    fn holt_integral_term() {
        let i = make_holt().realized_i.unwrap();
        let t = parse("24*q2^(1/3)*p2*q1*p1").unwrap();
        assert!(i.terms().contains(&t.terms()[0]));
    }

    #[test]
    fn mr_rejects_bad_degrees() {
        assert_eq!(
            make_kdv_mr_symbolic(3, 3).unwrap_err(),
            CatalogError::BadDegrees { m: 3, r: 3 }
        );
        assert!(make_kdv_mr(2, 1, &Expr::zero(), &[Expr::zero()], &[Expr::zero()]).is_err());
    }

    #[test]
    fn mr_specialises_to_kdv() {
        let (d, a, l) = (param("delta"), param("alpha"), param("lambda"));
        let alphas = [Expr::zero(), d.clone(), &a * rat(1, 4)];
        let mr = make_kdv_mr(3, 2, &l, &alphas, &[Expr::zero(), Expr::zero()]).unwrap();
        let kdv = make_kdv(&d, &(Expr::integer(3) * &d), &a, &l);
        assert_eq!(mr.realized_h, kdv.realized_h);
        assert_eq!(mr.abstract_h, kdv.abstract_h);
        assert_eq!(kdv.realized_i.unwrap(), &a * mr.realized_i.unwrap());
        assert_eq!(kdv.abstract_i.unwrap(), &a * mr.abstract_i.unwrap());
    }

    #[test]
    fn hone_translation() {
        let xi: Vec<Expr> = (0..3).map(|j| Expr::symbol(Symbol::indexed_param("xi", j))).collect();
        let t = hone_to_mr(&param("c"), &xi);
        assert_eq!(t.lambda, Expr::integer(2) * &xi[0]);
        assert_eq!(t.gammas, vec![Expr::integer(8) * &xi[1], Expr::integer(32) * &xi[2]]);
        assert_eq!(t.alphas, vec![param("c"), Expr::zero(), rat(1, 8)]);
        let m = make_hone(&param("c"), &xi).unwrap();
        let printed = parse(
            "1/2*(p1^2 + p2^2) + 1/2*q1^2*q2 + q2^3 + 2*c*q2 + 2*xi0*q1^(-2) \
             + 8*xi1*2*q2*q1^(-4) + 32*xi2*(4*q2^2 + q1^2)*q1^(-6)",
        )
        .unwrap();
        assert_eq!(m.realized_h, printed);
        let integral = parse(
            "q1*p1*p2 - q2*p1^2 + 1/2*q1^2*q2^2 + 1/8*q1^4 + c*q1^2 \
             - q1^2*(2*xi0*2*q2*q1^(-4) + 8*xi1*(4*q2^2 + q1^2)*q1^(-6) + 32*xi2*(8*q2^3 + 4*q1^2*q2)*q1^(-8))",
        )
        .unwrap();
        assert_eq!(m.realized_i.unwrap(), integral);
    }

    #[test]
    fn generic_detection() {
        let d = param("delta");
        let a = param("alpha");
        let g = |omega: &Expr, beta: Expr| make_generic_hh(&d, omega, &a, &beta);
        assert_eq!(g(&Expr::zero(), rat(1, 3)).integrable_case, Some(Family::Sk));
        assert_eq!(g(&param("Omega"), rat(1, 3)).integrable_case, None);
        assert_eq!(g(&param("Omega"), Expr::integer(2)).integrable_case, Some(Family::Kdv));
        assert_eq!(g(&(Expr::integer(15) * &d), rat(16, 3)).integrable_case, Some(Family::Kk));
        assert_eq!(g(&Expr::zero(), rat(16, 3)).integrable_case, None);
        let plain = g(&Expr::zero(), Expr::integer(1));
        assert!(plain.abstract_i.is_none() && plain.realized_i.is_none());
        let kdv = g(&param("Omega"), Expr::integer(2));
        let reference = make_kdv(&d, &param("Omega"), &a, &Expr::zero());
        assert_eq!(kdv.realized_h, reference.realized_h);
        assert_eq!(kdv.abstract_h, reference.abstract_h);
        assert!(kdv.realized_i.is_some());
    }

    #[test]
    fn classic_hh_normalisation() {
        let m = make_classic_hh(&Expr::integer(1));
        let printed = parse("1/2*(p1^2 + p2^2) + 1/2*(q1^2 + q2^2) + q1^2*q2 - 1/3*q2^3").unwrap();
        assert_eq!(m.realized_h, printed);
        assert!(m.realized_i.is_none());
    }
}
