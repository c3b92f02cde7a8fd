//! Brute-force oracles shared by the property and acceptance suites. They
//! work on dense boolean matrices and share no code with the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zeroctl::PatternMatrix;

/// `adj[i][j]` is true when `a_ij ≠ 0`, the edge `x_j -> x_i`.
pub fn dense(a: &PatternMatrix) -> Vec<Vec<bool>> {
    let n = a.n_rows();
    (0..n)
        .map(|i| (0..n).map(|j| a.contains(i, j)).collect())
        .collect()
}

/// `reach[s][t]`: a walk of length at least one leads from `s` to `t`.
pub fn transitive_closure(a: &PatternMatrix) -> Vec<Vec<bool>> {
    let adj = dense(a);
    let n = adj.len();
    let mut reach: Vec<Vec<bool>> = (0..n)
        .map(|s| (0..n).map(|t| adj[t][s]).collect())
        .collect();
    for k in 0..n {
        for s in 0..n {
            if reach[s][k] {
                for t in 0..n {
                    if reach[k][t] {
                        reach[s][t] = true;
                    }
                }
            }
        }
    }
    reach
}

/// States reachable from `sources`, sources included.
pub fn reach_set(a: &PatternMatrix, sources: &[usize]) -> Vec<bool> {
    let closure = transitive_closure(a);
    let n = a.n_rows();
    (0..n)
        .map(|t| sources.iter().any(|&s| s == t || closure[s][t]))
        .collect()
}

/// Every state on a cycle is reached from `drivers`.
pub fn drivers_valid(a: &PatternMatrix, drivers: &[usize]) -> bool {
    let closure = transitive_closure(a);
    let reached = reach_set(a, drivers);
    (0..a.n_rows()).all(|v| !closure[v][v] || reached[v])
}

/// Smallest valid driver set size by trying every subset.
pub fn min_drivers_exhaustive(a: &PatternMatrix) -> usize {
    let n = a.n_rows();
    let mut best = n;
    for mask in 0u32..(1 << n) {
        let size = mask.count_ones() as usize;
        if size >= best {
            continue;
        }
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if drivers_valid(a, &set) {
            best = size;
        }
    }
    best
}

fn has_cycle_cover(adj: &[Vec<bool>], set: &[usize], used: &mut Vec<bool>, k: usize) -> bool {
    if k == set.len() {
        return true;
    }
    let col = set[k];
    for (slot, &row) in set.iter().enumerate() {
        if !used[slot] && adj[row][col] {
            used[slot] = true;
            if has_cycle_cover(adj, set, used, k + 1) {
                return true;
            }
            used[slot] = false;
        }
    }
    false
}

/// Largest number of states covered by vertex-disjoint cycles, by trying
/// every subset for a cycle cover.
pub fn nu_exhaustive(a: &PatternMatrix) -> usize {
    let adj = dense(a);
    let n = adj.len();
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let set: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if set.len() > best && has_cycle_cover(&adj, &set, &mut vec![false; set.len()], 0) {
            best = set.len();
        }
    }
    best
}

/// A random `rows × cols` pattern with the given density.
pub fn random_pattern(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    density: f64,
) -> PatternMatrix {
    let entries: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .filter(|_| rng.gen_bool(density))
        .collect();
    PatternMatrix::new(rows, cols, entries).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
