use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::PoissonError;
use crate::symexpr::{Expr, Symbol};

/// Linear equations `e = 0` in a list of unknown symbols. Each equation may
/// only contain constants and unknowns to the first power.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub unknowns: Vec<Symbol>,
    pub equations: Vec<Expr>,
}

/// Affine solution set `particular + span(null_space)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionManifold {
    pub particular: BTreeMap<Symbol, BigRational>,
    pub null_space: Vec<BTreeMap<Symbol, BigRational>>,
}

type Matrix = Vec<Vec<BigRational>>;

impl LinearSystem {
    pub fn new(unknowns: Vec<Symbol>) -> Self {
        LinearSystem { unknowns, equations: Vec::new() }
    }

    pub fn push(&mut self, e: Expr) {
        if !e.is_zero() {
            self.equations.push(e);
        }
    }

    /// Augmented matrix `[A | -b]` for `A x + b = 0`.
    fn matrix(&self) -> Result<Matrix, PoissonError> {
        let n = self.unknowns.len();
        let mut rows = Vec::with_capacity(self.equations.len());
        for eq in &self.equations {
            let mut row = vec![BigRational::zero(); n + 1];
            for t in eq.terms() {
                match t.powers() {
                    [] => row[n] -= t.coefficient(),
                    [(s, e)] if e.is_one() => match self.unknowns.iter().position(|u| u == s) {
                        Some(j) => row[j] += t.coefficient(),
                        None => return Err(PoissonError::NonLinear(eq.to_string())),
                    },
                    _ => return Err(PoissonError::NonLinear(eq.to_string())),
                }
            }
            rows.push(row);
        }
        Ok(rows)
    }

    pub fn satisfied_by(&self, values: &BTreeMap<Symbol, BigRational>) -> bool {
        let map: BTreeMap<Symbol, Expr> = values
            .iter()
            .map(|(s, v)| (s.clone(), Expr::constant(v.clone())))
            .collect();
        self.equations
            .iter()
            .all(|e| e.substitute(&map).map(|r| r.is_zero()).unwrap_or(false))
    }
}

/// Reduced row echelon form in place; returns pivot columns among the first
/// `ncols` columns.
fn rref(m: &mut Matrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..m[r].len() {
                    let d = &f * &m[row][c];
                    m[r][c] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Solves the system exactly by Gaussian elimination.
///
/// A unique solution is returned directly; a consistent system with free
/// directions yields [`PoissonError::Underdetermined`] carrying the whole
/// solution manifold.
pub fn solve_linear(system: &LinearSystem) -> Result<BTreeMap<Symbol, BigRational>, PoissonError> {
    let manifold = solve_manifold(system)?;
    if manifold.null_space.is_empty() {
        Ok(manifold.particular)
    } else {
        Err(PoissonError::Underdetermined(manifold))
    }
}

pub(crate) fn solve_manifold(system: &LinearSystem) -> Result<SolutionManifold, PoissonError> {
    let n = system.unknowns.len();
    let mut m = system.matrix()?;
    let pivots = rref(&mut m, n);
    let inconsistent = m.iter().skip(pivots.len()).any(|r| !r[n].is_zero());
    if inconsistent {
        return Err(PoissonError::Inconsistent {
            equations: system.equations.len(),
            unknowns: n,
        });
    }
    let mut particular = BTreeMap::new();
    for u in &system.unknowns {
        particular.insert(u.clone(), BigRational::zero());
    }
    for (r, &c) in pivots.iter().enumerate() {
        particular.insert(system.unknowns[c].clone(), m[r][n].clone());
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let null_space = free
        .iter()
        .map(|&f| {
            let mut v: BTreeMap<Symbol, BigRational> =
                system.unknowns.iter().map(|u| (u.clone(), BigRational::zero())).collect();
            v.insert(system.unknowns[f].clone(), BigRational::one());
            for (r, &c) in pivots.iter().enumerate() {
                v.insert(system.unknowns[c].clone(), -m[r][f].clone());
            }
            v
        })
        .collect();
    Ok(SolutionManifold { particular, null_space })
}

const MAX_SUPPORT_CANDIDATES: usize = 200_000;

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

impl SolutionManifold {
    pub fn dimension(&self) -> usize {
        self.null_space.len()
    }

    /// The point with the fewest nonzero unknowns, ties broken by the
    /// lexicographically smallest support (in unknown order).
    ///
    /// Every minimal-support point is a basic solution, so it is enough to
    /// try each way of forcing `dimension()` coordinates to zero. When that
    /// enumeration would be too large the particular solution is returned.
    pub fn sparsest(&self) -> BTreeMap<Symbol, BigRational> {
        let d = self.dimension();
        if d == 0 {
            return self.particular.clone();
        }
        let keys: Vec<Symbol> = self.particular.keys().cloned().collect();
        let n = keys.len();
        if binomial(n, d) > MAX_SUPPORT_CANDIDATES {
            return self.particular.clone();
        }
        let mut best: Option<(Vec<usize>, BTreeMap<Symbol, BigRational>)> = None;
        let mut zeros: Vec<usize> = (0..d).collect();
        loop {
            if let Some(point) = self.point_vanishing_on(&keys, &zeros) {
                let support: Vec<usize> = (0..n).filter(|&i| !point[&keys[i]].is_zero()).collect();
                let better = match &best {
                    None => true,
                    Some((s, _)) => (support.len(), &support) < (s.len(), s),
                };
                if better {
                    best = Some((support, point));
                }
            }
            if !next_combination(&mut zeros, n) {
                break;
            }
        }
        best.map(|(_, p)| p).unwrap_or_else(|| self.particular.clone())
    }

    /// Solves for the null-space coefficients that zero the chosen
    /// coordinates; `None` when that square system is singular.
    fn point_vanishing_on(&self, keys: &[Symbol], zeros: &[usize]) -> Option<BTreeMap<Symbol, BigRational>> {
        let d = self.dimension();
        let mut m: Matrix = zeros
            .iter()
            .map(|&i| {
                let k = &keys[i];
                let mut row: Vec<BigRational> = self.null_space.iter().map(|v| v[k].clone()).collect();
                row.push(-self.particular[k].clone());
                row
            })
            .collect();
        let pivots = rref(&mut m, d);
        if pivots.len() < d {
            return None;
        }
        let t: Vec<BigRational> = (0..d).map(|r| m[r][d].clone()).collect();
        let mut point = self.particular.clone();
        for (tk, v) in t.iter().zip(&self.null_space) {
            for (s, x) in v {
                *point.get_mut(s).unwrap() += tk * x;
            }
        }
        Some(point)
    }
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{sym, Expr};

    fn w(i: u32) -> Symbol {
        Symbol::indexed_param("w", i)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn unique_solution() {
        let mut sys = LinearSystem::new(vec![w(1), w(2)]);
        sys.push(sym(w(1)) + sym(w(2)) - Expr::one());
        sys.push(sym(w(1)) - sym(w(2)) - Expr::integer(3));
        let sol = solve_linear(&sys).unwrap();
        assert_eq!(sol[&w(1)], r(2, 1));
        assert_eq!(sol[&w(2)], r(-1, 1));
        assert!(sys.satisfied_by(&sol));
    }

    #[test]
    fn inconsistent_system() {
        let mut sys = LinearSystem::new(vec![w(1)]);
        sys.push(sym(w(1)) - Expr::one());
        sys.push(sym(w(1)) - Expr::integer(2));
        assert!(matches!(solve_linear(&sys), Err(PoissonError::Inconsistent { .. })));
    }

    #[test]
    fn nonlinear_rejected() {
        let mut sys = LinearSystem::new(vec![w(1)]);
        sys.push(sym(w(1)).pow(2).unwrap());
        assert!(matches!(solve_linear(&sys), Err(PoissonError::NonLinear(_))));
    }

    #[test]
    fn underdetermined_and_sparsest() {
        // w1 + w2 + w3 = 1, w2 + w3 = 1/2
        let mut sys = LinearSystem::new(vec![w(1), w(2), w(3)]);
        sys.push(sym(w(1)) + sym(w(2)) + sym(w(3)) - Expr::one());
        sys.push(sym(w(2)) + sym(w(3)) - Expr::rational(1, 2));
        let Err(PoissonError::Underdetermined(man)) = solve_linear(&sys) else {
            panic!("expected manifold");
        };
        assert_eq!(man.dimension(), 1);
        for v in &man.null_space {
            let mut shifted = man.particular.clone();
            for (s, x) in v {
                *shifted.get_mut(s).unwrap() += x;
            }
            assert!(sys.satisfied_by(&shifted));
        }
        let best = man.sparsest();
        assert!(sys.satisfied_by(&best));
        assert_eq!(best[&w(1)], r(1, 2));
        assert_eq!(best[&w(2)], r(1, 2));
        assert_eq!(best[&w(3)], r(0, 1));
    }

    #[test]
    fn combinations_enumerate_all() {
        let mut c = vec![0, 1];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, binomial(5, 2));
    }
}
