//! Structural (generic) tests on pattern pairs: nilpotency, the index
//! `ν(A)`, generic rank, irreducibility, generic controllability and
//! generic zero controllability.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::graph::{Edge, SystemGraph};
use crate::matching::{max_weight_assignment, term_rank};
use crate::pattern::PatternMatrix;
use crate::scc::SccDecomposition;

fn require_square(pattern_a: &PatternMatrix) -> Result<()> {
    if pattern_a.is_square() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what: "A must be square",
            a_rows: pattern_a.n_rows(),
            a_cols: pattern_a.n_cols(),
            b_rows: 0,
            b_cols: 0,
        })
    }
}

/// Every admissible realization of `A` is nilpotent, i.e. the state graph
/// has no cycle. Decided by peeling vertices without incoming edges.
pub fn is_structurally_nilpotent(pattern_a: &PatternMatrix) -> Result<bool> {
    require_square(pattern_a)?;
    let n = pattern_a.n_rows();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for (i, j) in pattern_a.iter() {
        indeg[i] += 1;
        succ[j].push(i);
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut peeled = 0;
    while let Some(v) = queue.pop_front() {
        peeled += 1;
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    Ok(peeled == n)
}

/// `ν(A)`: the largest order of a principal minor that is not identically
/// zero, which is the largest number of vertices coverable by vertex-disjoint
/// cycles.
///
/// Solved as a maximum-weight perfect matching between rows and columns:
/// a real arc `a_ij` weighs 1, and every row may fall back on its own
/// diagonal slot at weight 0. A perfect matching is a permutation; its
/// cycles through real arcs are disjoint graph cycles.
pub fn compute_nu(pattern_a: &PatternMatrix) -> Result<usize> {
    require_square(pattern_a)?;
    let n = pattern_a.n_rows();
    let weights: Vec<Vec<Option<i64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if pattern_a.contains(i, j) {
                        Some(1)
                    } else if i == j {
                        Some(0)
                    } else {
                        None
                    }
                })
                .collect()
        })
        .collect();
    let (total, _) = max_weight_assignment(&weights).expect("identity is always feasible");
    Ok(total as usize)
}

/// Generic rank (term rank) of a pattern.
pub fn generic_rank(pattern: &PatternMatrix) -> usize {
    term_rank(pattern)
}

/// `(A, B)` is irreducible iff every state is reachable from the inputs.
pub fn is_irreducible(pattern_a: &PatternMatrix, pattern_b: &PatternMatrix) -> Result<bool> {
    let g = SystemGraph::build(pattern_a, Some(pattern_b))?;
    Ok(g.reachable_from_inputs().len() == g.n_states())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllabilityCondition {
    /// Some state is unreachable from the inputs.
    Irreducibility,
    /// `g-rank [A, B] < n`.
    FullGenericRank,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericControllability {
    pub controllable: bool,
    pub irreducible: bool,
    pub unreachable: BTreeSet<usize>,
    pub generic_rank: usize,
    pub n: usize,
}

impl GenericControllability {
    /// The first violated condition, if any.
    pub fn failed_condition(&self) -> Option<ControllabilityCondition> {
        if !self.irreducible {
            Some(ControllabilityCondition::Irreducibility)
        } else if self.generic_rank < self.n {
            Some(ControllabilityCondition::FullGenericRank)
        } else {
            None
        }
    }
}

/// Generic controllability: irreducible and `g-rank [A, B] = n`.
pub fn is_generically_controllable(
    pattern_a: &PatternMatrix,
    pattern_b: &PatternMatrix,
) -> Result<GenericControllability> {
    let g = SystemGraph::build(pattern_a, Some(pattern_b))?;
    let n = g.n_states();
    let reached = g.reachable_from_inputs();
    let unreachable: BTreeSet<usize> = (0..n).filter(|v| !reached.contains(v)).collect();
    let generic_rank = term_rank(&pattern_a.hcat(pattern_b)?);
    let irreducible = unreachable.is_empty();
    Ok(GenericControllability {
        controllable: irreducible && generic_rank == n,
        irreducible,
        unreachable,
        generic_rank,
        n,
    })
}

/// Outcome of the generic zero-controllability test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZcReport {
    pub verdict: bool,
    pub reachable_states: BTreeSet<usize>,
    pub unreachable_states: BTreeSet<usize>,
    /// One cycle of the unreachable subgraph `G_u`, present iff the verdict
    /// is negative.
    pub cycle_witness: Option<Vec<Edge>>,
    /// Cyclic components lying entirely in `X_u`, each sorted.
    pub nontrivial_unreachable_components: Vec<Vec<usize>>,
}

/// Splits the states by `reached` and inspects the unreached subgraph.
pub(crate) fn unreached_analysis(graph: &SystemGraph, reached: BTreeSet<usize>) -> ZcReport {
    let n = graph.n_states();
    let unreached: BTreeSet<usize> = (0..n).filter(|v| !reached.contains(v)).collect();
    // reached sets are closed under successors, so every component lies on
    // one side of the split
    let components: Vec<Vec<usize>> = crate::scc::sorted_components(graph)
        .into_iter()
        .filter(|c| {
            crate::scc::is_cyclic_component(graph, c) && c.iter().all(|v| unreached.contains(v))
        })
        .collect();
    let cycle_witness = components.first().and_then(|c| graph.cycle_in_component(c));
    ZcReport {
        verdict: components.is_empty(),
        reachable_states: reached,
        unreachable_states: unreached,
        cycle_witness,
        nontrivial_unreachable_components: components,
    }
}

/// Generic zero controllability: the part of the graph not reachable from
/// the inputs has no cycle. A missing `B` means there are no inputs.
pub fn is_generically_zero_controllable(
    pattern_a: &PatternMatrix,
    pattern_b: Option<&PatternMatrix>,
) -> Result<ZcReport> {
    let g = SystemGraph::build(pattern_a, pattern_b)?;
    let reached = g.reachable_from_inputs();
    Ok(unreached_analysis(&g, reached))
}

/// Block form of a pair with the input-reachable states first:
///
/// ```text
/// P A P^-1 = [A11 A12]    P B = [B1]
///            [ 0  A22]          [ 0]
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// `permutation[k]` is the original state placed at position `k`.
    pub permutation: Vec<usize>,
    pub n1: usize,
    pub n2: usize,
    pub a11: PatternMatrix,
    pub a12: PatternMatrix,
    pub a22: PatternMatrix,
    pub b1: PatternMatrix,
}

impl Decomposition {
    /// `(P A P^-1, P B)` for the stored permutation.
    pub fn permuted(
        &self,
        pattern_a: &PatternMatrix,
        pattern_b: &PatternMatrix,
    ) -> (PatternMatrix, PatternMatrix) {
        let all_inputs: Vec<usize> = (0..pattern_b.n_cols()).collect();
        (
            pattern_a.select(&self.permutation, &self.permutation),
            pattern_b.select(&self.permutation, &all_inputs),
        )
    }

    /// Whether the permuted pair has zero lower-left and lower input blocks.
    pub fn has_block_structure(
        &self,
        pattern_a: &PatternMatrix,
        pattern_b: &PatternMatrix,
    ) -> bool {
        let (pa, pb) = self.permuted(pattern_a, pattern_b);
        let lower_left_zero = pa.iter().all(|(r, c)| !(r >= self.n1 && c < self.n1));
        let lower_input_zero = pb.iter().all(|(r, _)| r < self.n1);
        lower_left_zero && lower_input_zero
    }
}

pub fn reducible_decomposition(
    pattern_a: &PatternMatrix,
    pattern_b: &PatternMatrix,
) -> Result<Decomposition> {
    let g = SystemGraph::build(pattern_a, Some(pattern_b))?;
    let reached = g.reachable_from_inputs();
    let n = g.n_states();
    let top: Vec<usize> = reached.iter().copied().collect();
    let bottom: Vec<usize> = (0..n).filter(|v| !reached.contains(v)).collect();
    let inputs: Vec<usize> = (0..pattern_b.n_cols()).collect();

    let mut permutation = top.clone();
    permutation.extend(bottom.iter().copied());
    Ok(Decomposition {
        n1: top.len(),
        n2: bottom.len(),
        a11: pattern_a.select(&top, &top),
        a12: pattern_a.select(&top, &bottom),
        a22: pattern_a.select(&bottom, &bottom),
        b1: pattern_b.select(&top, &inputs),
        permutation,
    })
}

/// Whether the state graph of `A` has a cycle (via the SCC decomposition).
pub fn has_cycle(pattern_a: &PatternMatrix) -> Result<bool> {
    let g = SystemGraph::build(pattern_a, None)?;
    Ok(SccDecomposition::of(&g).has_nontrivial())
}
