use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bind_auxiliaries, NdSystem};
use crate::symexpr::{ExprError, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub expected: usize,
    pub ranks: Vec<usize>,
}

impl RankReport {
    pub fn full(&self) -> bool {
        self.ranks.iter().all(|&r| r == self.expected)
    }
}

/// Rows: gradients of each member in `(q1..qN, p1..pN)`.
pub fn gradient_matrix(sys: &NdSystem, point: &HashMap<Symbol, f64>) -> Result<Vec<Vec<f64>>, ExprError> {
    let mut full = point.clone();
    bind_auxiliaries(&mut full, &sys.relations)?;
    let n = sys.spec.n();
    let vars: Vec<Symbol> = (1..=n).map(Symbol::q).chain((1..=n).map(Symbol::p)).collect();
    sys.members()
        .into_iter()
        .map(|(_, e)| {
            vars.iter()
                .map(|v| e.diff_total(v, &sys.relations).eval(&full))
                .collect()
        })
        .collect()
}

/// Rank by Gaussian elimination with full pivoting; pivots below
/// `rel_tol` times the largest entry count as zero.
pub fn numeric_rank(matrix: &[Vec<f64>], rel_tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0;
    }
    let mut rank = 0;
    for k in 0..rows.min(cols) {
        let (mut pr, mut pc, mut best) = (k, k, 0.0);
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if x.abs() > best {
                    (pr, pc, best) = (i, j, x.abs());
                }
            }
        }
        if best <= rel_tol * scale {
            break;
        }
        a.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        for i in k + 1..rows {
            let f = a[i][k] / a[k][k];
            for j in k..cols {
                a[i][j] -= f * a[k][j];
            }
        }
        rank += 1;
    }
    rank
}

/// Gradient rank of the involutive set at `points` random phase-space
/// points. Parameters missing from `params` are drawn from `[1/2, 3/2]`.
pub fn functional_rank(
    sys: &NdSystem,
    params: &HashMap<Symbol, f64>,
    seed: u64,
    points: usize,
) -> Result<RankReport, ExprError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut free: Vec<Symbol> = sys
        .members()
        .iter()
        .flat_map(|(_, e)| e.symbols())
        .filter(|s| s.kind() == SymbolKind::Parameter && !params.contains_key(s))
        .collect();
    free.sort();
    free.dedup();
    let n = sys.spec.n();
    let mut ranks = Vec::with_capacity(points);
    for _ in 0..points {
        let mut pt = params.clone();
        for s in &free {
            pt.insert(s.clone(), rng.gen_range(0.5..1.5));
        }
        for i in 1..=n {
            pt.insert(Symbol::q(i), rng.gen_range(0.5..1.5));
            pt.insert(Symbol::p(i), rng.gen_range(-1.0..1.0));
        }
        ranks.push(numeric_rank(&gradient_matrix(sys, &pt)?, 1e-9));
    }
    Ok(RankReport {
        expected: sys.members().len(),
        ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::realize::{build_nd_model, RealizationSpec};

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(numeric_rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-12), 1);
        assert_eq!(numeric_rank(&[vec![1.0, 0.0], vec![0.0, 1e-3]], 1e-12), 2);
        assert_eq!(numeric_rank(&[vec![0.0, 0.0]], 1e-12), 0);
    }

    #[test]
    fn liouville_count() {
        for n in [3, 4] {
            let m = catalog::build("kdv").unwrap();
            let sys = build_nd_model(&m, &RealizationSpec::symbolic(n).unwrap()).unwrap();
            let report = functional_rank(&sys, &HashMap::new(), 7, 5).unwrap();
            assert_eq!(report.expected, n as usize);
            assert!(report.full(), "{report:?}");
        }
    }
}
