//! Walk weights and the entries of matrix powers.
//!
//! `[A^k]_ij` is the sum, over all walks of exactly `k` edges from `x_j` to
//! `x_i`, of the product of the edge weights along the walk. Vertices may
//! repeat, so these are walks rather than simple paths.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::PatternMatrix;

/// Default ceiling on the number of monomials [`entry_paths`] will produce.
pub const MAX_MONOMIALS: usize = 1_000_000;

/// The weight of one walk, as a product of symbolic entries `a_rc`.
///
/// Factors are kept in matrix-product order: the first factor is the last
/// edge of the walk, so the column of each factor equals the row of the next.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PathMonomial {
    factors: Vec<(usize, usize)>,
}

impl PathMonomial {
    /// Builds a monomial from 1-based `(row, col)` factors in product order.
    /// Returns `None` if consecutive factors do not chain.
    pub fn from_one_based(factors: &[(usize, usize)]) -> Option<Self> {
        if factors.iter().any(|&(r, c)| r == 0 || c == 0) {
            return None;
        }
        let factors: Vec<(usize, usize)> = factors.iter().map(|&(r, c)| (r - 1, c - 1)).collect();
        if factors.windows(2).any(|w| w[0].1 != w[1].0) {
            return None;
        }
        Some(Self { factors })
    }

    /// 0-based `(row, col)` factors, product order.
    pub fn factors(&self) -> &[(usize, usize)] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The vertices visited, from the start of the walk to its end.
    pub fn walk(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.factors.iter().rev().map(|&(_, c)| c).collect();
        if let Some(&(r, _)) = self.factors.first() {
            out.push(r);
        }
        out
    }

    /// Numeric value of the product under `weight(row, col)`.
    pub fn evaluate<F>(&self, weight: F) -> f64
    where
        F: Fn(usize, usize) -> f64,
    {
        self.factors.iter().map(|&(r, c)| weight(r, c)).product()
    }
}

impl fmt::Display for PathMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(r, c)| {
                if r < 9 && c < 9 {
                    format!("a{}{}", r + 1, c + 1)
                } else {
                    format!("a[{},{}]", r + 1, c + 1)
                }
            })
            .collect();
        f.write_str(&parts.join("·"))
    }
}

/// Every walk of exactly `k` edges from `x_j` to `x_i` (0-based `i`, `j`).
pub fn entry_paths(
    pattern_a: &PatternMatrix,
    i: usize,
    j: usize,
    k: usize,
) -> Result<BTreeSet<PathMonomial>> {
    entry_paths_capped(pattern_a, i, j, k, MAX_MONOMIALS)
}

pub fn entry_paths_capped(
    pattern_a: &PatternMatrix,
    i: usize,
    j: usize,
    k: usize,
    cap: usize,
) -> Result<BTreeSet<PathMonomial>> {
    let n = pattern_a.n_rows();
    if !pattern_a.is_square() {
        return Err(Error::InvalidArgument(
            "walk enumeration needs a square pattern".into(),
        ));
    }
    if k == 0 {
        return Err(Error::InvalidArgument(
            "walk length must be at least 1".into(),
        ));
    }
    if i >= n || j >= n {
        return Err(Error::InvalidArgument(format!(
            "entry ({}, {}) outside a {n}x{n} pattern",
            i + 1,
            j + 1
        )));
    }

    let mut succ = vec![Vec::new(); n];
    for (r, c) in pattern_a.iter() {
        succ[c].push(r);
    }

    // hits[t][v]: v reaches x_i in exactly t steps.
    let mut hits = vec![vec![false; n]; k + 1];
    hits[0][i] = true;
    for t in 1..=k {
        for v in 0..n {
            hits[t][v] = succ[v].iter().any(|&w| hits[t - 1][w]);
        }
    }

    let mut out = BTreeSet::new();
    if !hits[k][j] {
        return Ok(out);
    }
    let mut walk = vec![j];
    extend_walks(&succ, &hits, k, &mut walk, &mut out, cap)?;
    Ok(out)
}

fn extend_walks(
    succ: &[Vec<usize>],
    hits: &[Vec<bool>],
    k: usize,
    walk: &mut Vec<usize>,
    out: &mut BTreeSet<PathMonomial>,
    cap: usize,
) -> Result<()> {
    let steps_left = k + 1 - walk.len();
    if steps_left == 0 {
        if out.len() >= cap {
            return Err(Error::PathOverflow { limit: cap });
        }
        let factors = walk.windows(2).rev().map(|e| (e[1], e[0])).collect();
        out.insert(PathMonomial { factors });
        return Ok(());
    }
    let v = *walk.last().expect("walk starts non-empty");
    for &w in &succ[v] {
        if hits[steps_left - 1][w] {
            walk.push(w);
            extend_walks(succ, hits, k, walk, out, cap)?;
            walk.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example1;

    #[test]
    fn example1_entry_1_5_of_cube() {
        let (a, _) = example1();
        let got = entry_paths(&a, 0, 4, 3).unwrap();
        let expected: BTreeSet<PathMonomial> = [
            PathMonomial::from_one_based(&[(1, 1), (1, 3), (3, 5)]).unwrap(),
            PathMonomial::from_one_based(&[(1, 3), (3, 5), (5, 5)]).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, expected);
        let names: Vec<String> = got.iter().map(|m| m.to_string()).collect();
        assert_eq!(names, vec!["a11·a13·a35", "a13·a35·a55"]);
    }

    #[test]
    fn length_one_is_the_entry_itself() {
        let (a, _) = example1();
        for i in 0..5 {
            for j in 0..5 {
                let got = entry_paths(&a, i, j, 1).unwrap();
                if a.contains(i, j) {
                    assert_eq!(got.len(), 1);
                    assert_eq!(got.iter().next().unwrap().factors(), &[(i, j)]);
                } else {
                    assert!(got.is_empty());
                }
            }
        }
    }

    #[test]
    fn walk_recovers_vertex_sequence() {
        let m = PathMonomial::from_one_based(&[(1, 1), (1, 3), (3, 5)]).unwrap();
        assert_eq!(m.walk(), vec![4, 2, 0, 0]);
        assert!(PathMonomial::from_one_based(&[(1, 2), (3, 4)]).is_none());
    }

    #[test]
    fn rejects_bad_arguments() {
        let (a, _) = example1();
        assert!(entry_paths(&a, 0, 0, 0).is_err());
        assert!(entry_paths(&a, 5, 0, 1).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        // complete digraph on 4 vertices: 4^(k-1) walks between any pair
        let a = PatternMatrix::new(4, 4, (0..4).flat_map(|i| (0..4).map(move |j| (i, j)))).unwrap();
        assert!(matches!(
            entry_paths_capped(&a, 0, 0, 8, 1000),
            Err(Error::PathOverflow { limit: 1000 })
        ));
        assert_eq!(entry_paths_capped(&a, 0, 0, 3, 1000).unwrap().len(), 16);
    }
}
