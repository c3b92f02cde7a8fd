//! Bipartite matching on sparsity patterns.

use crate::pattern::PatternMatrix;

/// Maximum number of nonzeros of `pattern` with no two sharing a row or a
/// column (the term rank). Augmenting paths, rows on the left.
pub fn term_rank(pattern: &PatternMatrix) -> usize {
    maximum_matching(pattern)
        .iter()
        .filter(|m| m.is_some())
        .count()
}

/// Row-to-column assignment of a maximum matching.
pub fn maximum_matching(pattern: &PatternMatrix) -> Vec<Option<usize>> {
    let rows = pattern.n_rows();
    let adj: Vec<Vec<usize>> = (0..rows).map(|r| pattern.row(r).collect()).collect();
    let mut col_match: Vec<Option<usize>> = vec![None; pattern.n_cols()];
    let mut row_match: Vec<Option<usize>> = vec![None; rows];

    for r in 0..rows {
        let mut visited = vec![false; pattern.n_cols()];
        augment(r, &adj, &mut visited, &mut col_match, &mut row_match);
    }
    row_match
}

fn augment(
    r: usize,
    adj: &[Vec<usize>],
    visited: &mut [bool],
    col_match: &mut [Option<usize>],
    row_match: &mut [Option<usize>],
) -> bool {
    for &c in &adj[r] {
        if visited[c] {
            continue;
        }
        visited[c] = true;
        let free = match col_match[c] {
            None => true,
            Some(other) => augment(other, adj, visited, col_match, row_match),
        };
        if free {
            col_match[c] = Some(r);
            row_match[r] = Some(c);
            return true;
        }
    }
    false
}

/// Maximum-weight perfect assignment of an `n x n` weight table, where
/// `None` marks a forbidden slot. Returns `(total weight, row -> column)`, or
/// `None` if no perfect assignment avoids the forbidden slots.
///
/// Hungarian method with potentials, O(n^3).
pub fn max_weight_assignment(weights: &[Vec<Option<i64>>]) -> Option<(i64, Vec<usize>)> {
    let n = weights.len();
    if n == 0 {
        return Some((0, Vec::new()));
    }
    let max_w = weights
        .iter()
        .flatten()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0);
    let min_w = weights
        .iter()
        .flatten()
        .flatten()
        .copied()
        .min()
        .unwrap_or(0);
    // Forbidden slots get a cost no optimal feasible assignment would pay.
    let forbidden = (max_w - min_w + 1) * (n as i64 + 1);
    let cost = |i: usize, j: usize| -> i64 {
        match weights[i][j] {
            Some(w) => max_w - w,
            None => forbidden,
        }
    };

    // 1-based arrays; p[j] = row assigned to column j, 0 = none.
    let inf = i64::MAX / 4;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    let mut total = 0;
    for (i, &j) in assignment.iter().enumerate() {
        total += weights[i][j]?;
    }
    Some((total, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_rank_basics() {
        assert_eq!(term_rank(&PatternMatrix::zeros(3, 4)), 0);
        assert_eq!(term_rank(&PatternMatrix::identity(6)), 6);
        // all nonzeros in one column
        let p = PatternMatrix::new(4, 4, (0..4).map(|r| (r, 2))).unwrap();
        assert_eq!(term_rank(&p), 1);
        // needs an augmenting path: row 0 takes col 0 first, row 1 only has col 0
        let p = PatternMatrix::new(2, 2, [(0, 0), (0, 1), (1, 0)]).unwrap();
        assert_eq!(term_rank(&p), 2);
    }

    fn brute_force_assignment(weights: &[Vec<Option<i64>>]) -> Option<i64> {
        fn go(row: usize, used: &mut Vec<bool>, w: &[Vec<Option<i64>>]) -> Option<i64> {
            if row == w.len() {
                return Some(0);
            }
            let mut best = None;
            for c in 0..w.len() {
                if used[c] {
                    continue;
                }
                if let Some(x) = w[row][c] {
                    used[c] = true;
                    if let Some(rest) = go(row + 1, used, w) {
                        best = Some(best.map_or(x + rest, |b: i64| b.max(x + rest)));
                    }
                    used[c] = false;
                }
            }
            best
        }
        go(0, &mut vec![false; weights.len()], weights)
    }

    #[test]
    fn hungarian_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=6);
            let weights: Vec<Vec<Option<i64>>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| rng.gen_bool(0.6).then(|| rng.gen_range(-3..=5)))
                        .collect()
                })
                .collect();
            let expected = brute_force_assignment(&weights);
            let got = max_weight_assignment(&weights).map(|(w, _)| w);
            assert_eq!(got, expected, "{weights:?}");
        }
    }
}
