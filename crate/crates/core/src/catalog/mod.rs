//! Integrable Hénon-Heiles Hamiltonians and their integrals, in canonical
//! 2D form and in `sl(2,R) + h3` generator form.
//!
//! Models are addressed by string ids such as `sk`, `kdv-mr:M=4,R=3` or
//! `generic:beta=2`; see [`ModelId`] and [`build`].

mod families;
mod ramani;

pub use families::{
    hone_to_mr, integrable_case, make_classic_hh, make_generic_hh, make_holt, make_hone, make_kdv,
    make_kdv_mr, make_kdv_mr_symbolic, make_kk, make_sk, HoneTranslation,
};
pub use ramani::{ramani, RamaniTable};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::symexpr::{param, parse_rational, Expr, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("kdv-mr needs M > R, got M={m}, R={r}")]
    BadDegrees { m: usize, r: usize },
    #[error("expected {expected:?} (alpha, gamma) coefficients, got {got:?}")]
    WrongLength {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("unknown model family '{0}'")]
    UnknownFamily(String),
    #[error("malformed model id '{id}': {reason}")]
    BadId { id: String, reason: String },
    #[error("model {model} has no parameter '{name}'")]
    UnknownParameter { model: String, name: String },
    #[error("value '{0}' for a model parameter is not an exact rational")]
    NotExact(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    Sk,
    Kk,
    Kdv,
    KdvMr,
    Holt,
    GenericHh,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Sk,
        Family::Kk,
        Family::Kdv,
        Family::KdvMr,
        Family::Holt,
        Family::GenericHh,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Family::Sk => "sk",
            Family::Kk => "kk",
            Family::Kdv => "kdv",
            Family::KdvMr => "kdv-mr",
            Family::Holt => "holt",
            Family::GenericHh => "generic",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Family::Sk => "Sawada-Kotera HH with centrifugal term",
            Family::Kk => "Kaup-Kupershmidt HH with two rational terms",
            Family::Kdv => "KdV HH with centrifugal term",
            Family::KdvMr => "KdV HH with Ramani series and rational perturbations",
            Family::Holt => "Holt potential",
            Family::GenericHh => "generic two-parameter HH family",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| CatalogError::UnknownFamily(s.to_string()))
    }
}

/// A Hamiltonian with its integral (when one is known), in both forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelInstance {
    pub family: Family,
    pub id: String,
    /// Parameter name to value; a value equal to its own symbol is free.
    pub parameters: BTreeMap<String, Expr>,
    pub abstract_h: Expr,
    pub abstract_i: Option<Expr>,
    pub realized_h: Expr,
    pub realized_i: Option<Expr>,
    /// Which integrable family supplies the integral; `None` for generic
    /// members outside the three integrable cases.
    pub integrable_case: Option<Family>,
}

impl ModelInstance {
    pub fn has_integral(&self) -> bool {
        self.abstract_i.is_some()
    }

    /// Parameter symbols still free in any of the expressions.
    pub fn free_parameters(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        let exprs = [Some(&self.abstract_h), self.abstract_i.as_ref(), Some(&self.realized_h), self.realized_i.as_ref()];
        for e in exprs.into_iter().flatten() {
            out.extend(e.symbols().into_iter().filter(|s| s.kind() == SymbolKind::Parameter));
        }
        out
    }
}

/// One entry of a family's parameter schema.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: String,
    /// Exact value used when a numeric run leaves the parameter unbound.
    pub default: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyInfo {
    pub id: &'static str,
    pub title: &'static str,
    pub id_syntax: &'static str,
    pub parameters: Vec<ParamSpec>,
    pub integral: &'static str,
    pub constraint: Option<&'static str>,
    pub integrable_cases: Vec<&'static str>,
}

fn spec(name: &str, default: &str) -> ParamSpec {
    ParamSpec {
        name: name.to_string(),
        default: default.to_string(),
    }
}

/// Parameter schema of a family; `kdv-mr` depends on `(M, R)`.
pub fn parameter_schema(family: Family, m: usize, r: usize) -> Vec<ParamSpec> {
    match family {
        Family::Sk => vec![spec("delta", "1/2"), spec("alpha", "1"), spec("lambda", "0")],
        Family::Kk => vec![
            spec("delta", "1/2"),
            spec("alpha", "1"),
            spec("lambda", "0"),
            spec("nu", "0"),
        ],
        Family::Kdv => vec![
            spec("delta", "0"),
            spec("Omega", "0"),
            spec("alpha", "1/2"),
            spec("lambda", "0"),
        ],
        Family::KdvMr => {
            let mut v = vec![spec("lambda", "0")];
            for i in 1..=m {
                let d = match i {
                    2 => "1/2",
                    3 => "1/8",
                    _ => "0",
                };
                v.push(spec(&format!("a{i}"), d));
            }
            for i in 1..=r {
                v.push(spec(&format!("g{i}"), "0"));
            }
            v
        }
        Family::Holt => Vec::new(),
        Family::GenericHh => vec![
            spec("delta", "1/2"),
            spec("Omega", "0"),
            spec("alpha", "1"),
            spec("beta", "-1/3"),
        ],
    }
}

pub fn families() -> Vec<FamilyInfo> {
    Family::ALL
        .into_iter()
        .map(|f| FamilyInfo {
            id: f.id(),
            title: f.title(),
            id_syntax: match f {
                Family::KdvMr => "kdv-mr:M=<int>,R=<int>[,name=value...]",
                Family::Holt => "holt",
                _ => "<family>[:name=value,...]",
            },
            parameters: parameter_schema(f, 4, 3),
            integral: match f {
                Family::GenericHh => "only in the integrable cases",
                Family::Kdv | Family::KdvMr => "quadratic in momenta",
                _ => "quartic in momenta",
            },
            constraint: (f == Family::KdvMr).then_some("M > R"),
            integrable_cases: if f == Family::GenericHh {
                vec!["beta=1/3, Omega=0 (sk)", "beta=2, any Omega (kdv)", "beta=16/3, Omega=15*delta (kk)"]
            } else {
                Vec::new()
            },
        })
        .collect()
}

/// A parsed model id: family, structural integers and exact bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelId {
    pub family: Family,
    pub m: usize,
    pub r: usize,
    pub bindings: BTreeMap<String, Expr>,
}

impl FromStr for ModelId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |reason: &str| CatalogError::BadId {
            id: s.to_string(),
            reason: reason.to_string(),
        };
        let (head, tail) = match s.split_once(':') {
            Some((h, t)) => (h.trim(), Some(t)),
            None => (s.trim(), None),
        };
        let family: Family = head.parse()?;
        let mut id = ModelId {
            family,
            m: 0,
            r: 0,
            bindings: BTreeMap::new(),
        };
        let mut saw = (false, false);
        for item in tail.into_iter().flat_map(|t| t.split(',')) {
            let (k, v) = item.split_once('=').ok_or_else(|| bad("expected name=value"))?;
            let (k, v) = (k.trim(), v.trim());
            match (family, k) {
                (Family::KdvMr, "M") => {
                    id.m = v.parse().map_err(|_| bad("M must be an integer"))?;
                    saw.0 = true;
                }
                (Family::KdvMr, "R") => {
                    id.r = v.parse().map_err(|_| bad("R must be an integer"))?;
                    saw.1 = true;
                }
                _ => {
                    let value = parse_rational(v).ok_or_else(|| CatalogError::NotExact(v.to_string()))?;
                    id.bindings.insert(k.to_string(), Expr::constant(value));
                }
            }
        }
        if family == Family::KdvMr && !(saw.0 && saw.1) {
            return Err(bad("kdv-mr needs M and R"));
        }
        Ok(id)
    }
}

impl ModelId {
    pub fn schema(&self) -> Vec<ParamSpec> {
        parameter_schema(self.family, self.m, self.r)
    }

    /// Canonical string form: family, structure, then bindings sorted by name.
    pub fn canonical(&self) -> String {
        let mut parts = Vec::new();
        if self.family == Family::KdvMr {
            parts.push(format!("M={}", self.m));
            parts.push(format!("R={}", self.r));
        }
        for (k, v) in &self.bindings {
            parts.push(format!("{k}={v}"));
        }
        if parts.is_empty() {
            self.family.id().to_string()
        } else {
            format!("{}:{}", self.family.id(), parts.join(","))
        }
    }

    /// Builds the model with the id's own bindings merged with `extra`
    /// (which wins); unbound parameters stay symbolic.
    pub fn build_with(&self, extra: &BTreeMap<String, Expr>) -> Result<ModelInstance, CatalogError> {
        let schema = self.schema();
        let mut values: BTreeMap<String, Expr> = BTreeMap::new();
        for (k, v) in self.bindings.iter().chain(extra) {
            if !schema.iter().any(|p| &p.name == k) {
                return Err(CatalogError::UnknownParameter {
                    model: self.family.id().to_string(),
                    name: k.clone(),
                });
            }
            values.insert(k.clone(), v.clone());
        }
        let get = |name: &str| -> Expr {
            values.get(name).cloned().unwrap_or_else(|| {
                crate::symexpr::symbol_from_name(name).map(Expr::symbol).unwrap_or_else(|| param(name))
            })
        };
        let mut model = match self.family {
            Family::Sk => make_sk(&get("delta"), &get("alpha"), &get("lambda")),
            Family::Kk => make_kk(&get("delta"), &get("alpha"), &get("lambda"), &get("nu")),
            Family::Kdv => make_kdv(&get("delta"), &get("Omega"), &get("alpha"), &get("lambda")),
            Family::KdvMr => {
                let alphas: Vec<Expr> = (1..=self.m).map(|i| get(&format!("a{i}"))).collect();
                let gammas: Vec<Expr> = (1..=self.r).map(|i| get(&format!("g{i}"))).collect();
                make_kdv_mr(self.m, self.r, &get("lambda"), &alphas, &gammas)?
            }
            Family::Holt => make_holt(),
            Family::GenericHh => make_generic_hh(&get("delta"), &get("Omega"), &get("alpha"), &get("beta")),
        };
        model.id = self.canonical();
        Ok(model)
    }

    pub fn build(&self) -> Result<ModelInstance, CatalogError> {
        self.build_with(&BTreeMap::new())
    }

    /// Exact defaults for every parameter not bound by the id.
    pub fn default_bindings(&self) -> BTreeMap<String, Expr> {
        self.schema()
            .into_iter()
            .filter(|p| !self.bindings.contains_key(&p.name))
            .map(|p| {
                let v = parse_rational(&p.default).expect("schema defaults are exact");
                (p.name, Expr::constant(v))
            })
            .collect()
    }
}

/// Parses an id and builds the model with symbolic free parameters.
pub fn build(id: &str) -> Result<ModelInstance, CatalogError> {
    id.parse::<ModelId>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::realize_2d;
    use crate::symexpr::rat;

    #[test]
    fn id_parsing() {
        let id: ModelId = "kdv-mr:M=4,R=3".parse().unwrap();
        assert_eq!((id.family, id.m, id.r), (Family::KdvMr, 4, 3));
        assert_eq!(id.canonical(), "kdv-mr:M=4,R=3");
        let g: ModelId = "generic:beta=16/3,Omega=15/2,delta=1/2".parse().unwrap();
        assert_eq!(g.bindings["beta"], rat(16, 3));
        assert_eq!(g.build().unwrap().integrable_case, Some(Family::Kk));
        assert!(matches!("generic:beta=0.5".parse::<ModelId>(), Err(CatalogError::NotExact(_))));
        assert!(matches!("foo".parse::<ModelId>(), Err(CatalogError::UnknownFamily(_))));
        assert!(matches!("kdv-mr:M=4".parse::<ModelId>(), Err(CatalogError::BadId { .. })));
        assert!(matches!(build("kdv-mr:M=3,R=3"), Err(CatalogError::BadDegrees { .. })));
        assert!(matches!(build("sk:Omega=1"), Err(CatalogError::UnknownParameter { .. })));
    }

    #[test]
    fn symbolic_build_keeps_parameters_free() {
        let m = build("kdv").unwrap();
        let names: Vec<String> = m.free_parameters().iter().map(|s| s.to_string()).collect();
        assert_eq!(names, vec!["Omega", "alpha", "delta", "lambda"]);
        assert!(build("holt").unwrap().free_parameters().is_empty());
        let mr = build("kdv-mr:M=2,R=1").unwrap();
        assert_eq!(mr.free_parameters().len(), 4);
    }

    #[test]
    fn realized_forms_match_abstract_forms() {
        for id in ["sk", "kk", "kdv", "holt", "kdv-mr:M=4,R=3", "kdv-mr:M=6,R=4", "generic", "generic:beta=2"] {
            let m = build(id).unwrap();
            assert_eq!(realize_2d(&m.abstract_h).unwrap(), m.realized_h, "{id} H");
            if let (Some(a), Some(r)) = (&m.abstract_i, &m.realized_i) {
                assert_eq!(&realize_2d(a).unwrap(), r, "{id} I");
            }
        }
    }

    #[test]
    fn every_pair_is_in_involution() {
        use crate::poisson::BracketContext;
        let ids = ["sk", "kk", "kdv", "holt", "kdv-mr:M=2,R=1", "kdv-mr:M=3,R=2", "kdv-mr:M=4,R=3", "kdv-mr:M=6,R=4"];
        for id in ids {
            let m = build(id).unwrap();
            let abs = BracketContext::abstract_leaf();
            let can = BracketContext::canonical(2);
            let i = m.abstract_i.as_ref().unwrap();
            assert!(abs.certify_involution(&m.abstract_h, i).unwrap().is_zero(), "{id} abstract");
            let i2 = m.realized_i.as_ref().unwrap();
            assert!(can.certify_involution(&m.realized_h, i2).unwrap().is_zero(), "{id} canonical");
        }
    }

    #[test]
    fn lift_recovers_abstract_pairs() {
        use crate::poisson::lift_to_abstract;
        for id in ["kdv", "sk", "kk", "holt", "kdv-mr:M=4,R=3"] {
            let m = build(id).unwrap();
            let out = lift_to_abstract(&m.realized_h, m.realized_i.as_ref().unwrap()).unwrap();
            assert_eq!(out.hamiltonian, m.abstract_h, "{id} H");
            let printed = m.abstract_i.as_ref().unwrap();
            if id == "kk" {
                // the delta*q1^2*p1^2 block is fixed only up to delta*(J+J- - J3^2)
                assert_eq!(out.manifold_dimension, 1);
                assert!(out.point_reaching(printed).unwrap().is_some());
                let casimir = crate::poisson::sl2_casimir() * param("delta");
                assert_eq!(&out.integral + Expr::integer(-2) * casimir, *printed);
            } else {
                assert_eq!(&out.integral, printed, "{id} I\n{}", out.report());
            }
        }
    }

    #[test]
    fn registry_lists_every_family() {
        let f = families();
        assert_eq!(f.len(), 6);
        let mr = f.iter().find(|i| i.id == "kdv-mr").unwrap();
        assert_eq!(mr.constraint, Some("M > R"));
        let g = f.iter().find(|i| i.id == "generic").unwrap();
        assert_eq!(g.integrable_cases.len(), 3);
    }

    #[test]
    fn defaults_are_exact() {
        let id: ModelId = "kdv".parse().unwrap();
        let d = id.default_bindings();
        assert_eq!(d["alpha"], rat(1, 2));
        let m = id.build_with(&d).unwrap();
        assert!(m.free_parameters().is_empty());
    }
}
