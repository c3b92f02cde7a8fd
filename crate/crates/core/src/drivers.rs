//! Driver node selection.
//!
//! A driver set `D ⊆ X` makes `x(k+1) = A x(k)` generically zero
//! controllable iff every cyclic component of the state graph is reachable
//! from `D`. Finding the smallest such `D` is a covering problem on the
//! condensation: the targets are the cyclic components, and picking any
//! vertex of a component covers every target below it. All vertices of a
//! component reach the same set, so the search runs over components and
//! reports vertices only at the end.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, SystemGraph};
use crate::pattern::{state_name, PatternMatrix};
use crate::scc::SccDecomposition;
use crate::structural::unreached_analysis;

/// Largest number of candidate components the exact search accepts by default.
pub const DEFAULT_EXACT_CAP: usize = 25;

/// Hard ceiling imposed by the bitmask representation.
const MAX_SUPPORTED_CAP: usize = 128;

type Mask = u128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriverSet {
    pub drivers: BTreeSet<usize>,
    pub valid: bool,
    /// A cycle not reachable from the drivers, present iff `valid` is false.
    pub uncovered_witness: Option<Vec<Edge>>,
    /// Set only by the exact solver.
    pub minimal: bool,
}

impl DriverSet {
    pub fn size(&self) -> usize {
        self.drivers.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.drivers.iter().map(|&d| state_name(d)).collect()
    }
}

/// Checks whether `drivers` reach every cycle of the state graph of `A`.
pub fn validate_driver_set(
    pattern_a: &PatternMatrix,
    drivers: &BTreeSet<usize>,
) -> Result<DriverSet> {
    let g = SystemGraph::build(pattern_a, None)?;
    let reached = g.reachable_from_states(drivers)?;
    let report = unreached_analysis(&g, reached);
    Ok(DriverSet {
        drivers: drivers.clone(),
        valid: report.verdict,
        uncovered_witness: report.cycle_witness,
        minimal: false,
    })
}

/// The covering problem behind driver selection.
struct CoverInstance {
    scc: SccDecomposition,
    /// Candidate components: those with a cyclic component in their closure.
    candidates: Vec<usize>,
    /// Per candidate, the targets (bit positions) it reaches.
    cover: Vec<Mask>,
    /// Per target, the candidates (bit positions) reaching it.
    coverers: Vec<Mask>,
    all_targets: Mask,
}

impl CoverInstance {
    fn new(pattern_a: &PatternMatrix) -> Result<Self> {
        let g = SystemGraph::build(pattern_a, None)?;
        let scc = SccDecomposition::of(&g);
        let targets: Vec<usize> = scc.nontrivial_components().collect();

        let mut candidates = Vec::new();
        let mut target_sets = Vec::new();
        for c in 0..scc.len() {
            let closure = scc.closure(c);
            let hit: Vec<usize> = targets
                .iter()
                .enumerate()
                .filter(|(_, t)| closure.contains(t))
                .map(|(bit, _)| bit)
                .collect();
            if !hit.is_empty() {
                candidates.push(c);
                target_sets.push(hit);
            }
        }
        Ok(Self {
            scc,
            candidates,
            cover: Vec::new(),
            coverers: vec![0; targets.len()],
            all_targets: 0,
        }
        .with_masks(target_sets))
    }

    fn with_masks(mut self, target_sets: Vec<Vec<usize>>) -> Self {
        if self.candidates.len() > MAX_SUPPORTED_CAP {
            // masks are only built for instances the exact search will accept
            return self;
        }
        for (ci, hit) in target_sets.iter().enumerate() {
            let mut m: Mask = 0;
            for &t in hit {
                m |= 1 << t;
                self.coverers[t] |= 1 << ci;
            }
            self.cover.push(m);
        }
        self.all_targets = (0..self.coverers.len()).fold(0, |acc, t| acc | 1 << t);
        self
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.candidates.len() > cap.min(MAX_SUPPORTED_CAP) {
            Err(Error::InstanceTooLarge {
                candidates: self.candidates.len(),
                cap,
            })
        } else {
            Ok(())
        }
    }

    /// Pairwise "ancestor-disjoint" uncovered targets: no candidate reaches
    /// two of them, so each needs its own driver.
    fn lower_bound(&self, uncovered: Mask) -> usize {
        let mut order: Vec<usize> = bits(uncovered).collect();
        order.sort_by_key(|&t| (self.coverers[t].count_ones(), t));
        let mut used: Mask = 0;
        let mut count = 0;
        for t in order {
            if self.coverers[t] & used == 0 {
                used |= self.coverers[t];
                count += 1;
            }
        }
        count
    }

    /// Greedy cover over candidate indices.
    fn greedy(&self) -> Vec<usize> {
        let mut uncovered = self.all_targets;
        let mut picked = Vec::new();
        while uncovered != 0 {
            let gains: Vec<u32> = self
                .cover
                .iter()
                .map(|&m| (m & uncovered).count_ones())
                .collect();
            let best_gain = gains.iter().copied().max().unwrap_or(0);
            let first = gains
                .iter()
                .position(|&g| g == best_gain)
                .expect("an uncovered target always has a coverer");
            picked.push(first);
            uncovered &= !self.cover[first];
        }
        picked
    }

    /// Minimum number of candidates covering all targets.
    fn minimum_size(&self) -> usize {
        let upper = self.greedy().len();
        let mut best = upper;
        self.branch(self.all_targets, 0, &mut best);
        best
    }

    fn branch(&self, uncovered: Mask, chosen: usize, best: &mut usize) {
        if uncovered == 0 {
            *best = (*best).min(chosen);
            return;
        }
        if chosen + self.lower_bound(uncovered) >= *best {
            return;
        }
        // branch on the hardest-to-cover target
        let t = bits(uncovered)
            .min_by_key(|&t| (self.coverers[t].count_ones(), t))
            .expect("uncovered is non-empty");
        let mut options: Vec<usize> = bits(self.coverers[t]).collect();
        options.sort_by_key(|&c| std::cmp::Reverse((self.cover[c] & uncovered).count_ones()));
        for c in options {
            self.branch(uncovered & !self.cover[c], chosen + 1, best);
        }
    }

    /// All vertex sets of size `k` covering every target, in lexicographic
    /// order of their sorted vertex tuples, up to `limit`.
    fn enumerate(&self, k: usize, limit: usize) -> Vec<BTreeSet<usize>> {
        // (vertex, candidate index) for every vertex of a candidate component
        let mut pool: Vec<(usize, usize)> = self
            .candidates
            .iter()
            .enumerate()
            .flat_map(|(ci, &c)| self.scc.component(c).iter().map(move |&v| (v, ci)))
            .collect();
        pool.sort_unstable();
        let mut suffix: Vec<Mask> = vec![0; pool.len() + 1];
        for i in (0..pool.len()).rev() {
            suffix[i] = suffix[i + 1] | self.cover[pool[i].1];
        }

        let mut out = Vec::new();
        let mut current = Vec::new();
        self.enumerate_from(
            &pool,
            &suffix,
            0,
            k,
            self.all_targets,
            0,
            &mut current,
            &mut out,
            limit,
        );
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_from(
        &self,
        pool: &[(usize, usize)],
        suffix: &[Mask],
        start: usize,
        k: usize,
        uncovered: Mask,
        used_candidates: Mask,
        current: &mut Vec<usize>,
        out: &mut Vec<BTreeSet<usize>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        if current.len() == k {
            if uncovered == 0 {
                out.push(current.iter().copied().collect());
            }
            return;
        }
        let left = k - current.len();
        if suffix[start] & uncovered != uncovered || self.lower_bound(uncovered) > left {
            return;
        }
        for i in start..pool.len() {
            let (v, ci) = pool[i];
            if used_candidates >> ci & 1 == 1 {
                continue;
            }
            if suffix[i] & uncovered != uncovered {
                break;
            }
            current.push(v);
            self.enumerate_from(
                pool,
                suffix,
                i + 1,
                k,
                uncovered & !self.cover[ci],
                used_candidates | 1 << ci,
                current,
                out,
                limit,
            );
            current.pop();
            if out.len() >= limit {
                return;
            }
        }
    }
}

fn bits(mask: Mask) -> impl Iterator<Item = usize> {
    (0..Mask::BITS as usize).filter(move |&b| mask >> b & 1 == 1)
}

/// A minimum-cardinality valid driver set; among those, the
/// lexicographically smallest. Instances with more than
/// [`DEFAULT_EXACT_CAP`] candidate components fall back to
/// [`greedy_driver_set`] with the `minimal` flag unset.
pub fn minimal_driver_set(pattern_a: &PatternMatrix) -> Result<DriverSet> {
    minimal_driver_set_with_cap(pattern_a, DEFAULT_EXACT_CAP)
}

pub fn minimal_driver_set_with_cap(pattern_a: &PatternMatrix, cap: usize) -> Result<DriverSet> {
    let inst = CoverInstance::new(pattern_a)?;
    if inst.check_cap(cap).is_err() {
        return greedy_driver_set(pattern_a);
    }
    let k = inst.minimum_size();
    let drivers = inst
        .enumerate(k, 1)
        .into_iter()
        .next()
        .expect("a cover of the minimum size exists");
    Ok(DriverSet {
        drivers,
        valid: true,
        uncovered_witness: None,
        minimal: true,
    })
}

/// Every minimum-cardinality valid driver set, sorted lexicographically,
/// truncated to `limit`. Vertices of the same component are interchangeable,
/// so each choice of components expands into all its vertex combinations.
pub fn enumerate_minimal_driver_sets(
    pattern_a: &PatternMatrix,
    limit: usize,
) -> Result<Vec<DriverSet>> {
    enumerate_minimal_driver_sets_with_cap(pattern_a, limit, DEFAULT_EXACT_CAP)
}

pub fn enumerate_minimal_driver_sets_with_cap(
    pattern_a: &PatternMatrix,
    limit: usize,
    cap: usize,
) -> Result<Vec<DriverSet>> {
    if limit == 0 {
        return Err(Error::InvalidArgument(
            "enumeration limit must be at least 1".into(),
        ));
    }
    let inst = CoverInstance::new(pattern_a)?;
    inst.check_cap(cap)?;
    let k = inst.minimum_size();
    Ok(inst
        .enumerate(k, limit)
        .into_iter()
        .map(|drivers| DriverSet {
            drivers,
            valid: true,
            uncovered_witness: None,
            minimal: true,
        })
        .collect())
}

/// Greedy cover: repeatedly take the component reaching the most
/// still-uncovered cyclic components (ties to the smallest vertex).
/// Always valid, not necessarily minimum.
pub fn greedy_driver_set(pattern_a: &PatternMatrix) -> Result<DriverSet> {
    let g = SystemGraph::build(pattern_a, None)?;
    let scc = SccDecomposition::of(&g);
    let targets: BTreeSet<usize> = scc.nontrivial_components().collect();
    let closures: Vec<BTreeSet<usize>> = (0..scc.len())
        .map(|c| scc.closure(c).intersection(&targets).copied().collect())
        .collect();

    let mut uncovered = targets;
    let mut drivers = BTreeSet::new();
    while !uncovered.is_empty() {
        let gain = |c: usize| closures[c].intersection(&uncovered).count();
        let best_gain = (0..scc.len()).map(gain).max().unwrap_or(0);
        let best = (0..scc.len())
            .find(|&c| gain(c) == best_gain)
            .expect("some component covers an uncovered target");
        drivers.insert(scc.component(best)[0]);
        for t in &closures[best] {
            uncovered.remove(t);
        }
    }
    Ok(DriverSet {
        drivers,
        valid: true,
        uncovered_witness: None,
        minimal: false,
    })
}

/// How driver nodes are wired to controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BMode {
    /// One control drives every driver node.
    Shared,
    /// Each driver node gets its own control.
    PerDriver,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BPattern {
    pub mode: BMode,
    pub pattern: PatternMatrix,
}

/// The input pattern induced by a driver set.
pub fn build_b_pattern(n: usize, drivers: &BTreeSet<usize>, mode: BMode) -> Result<BPattern> {
    if let Some(&bad) = drivers.iter().find(|&&d| d >= n) {
        return Err(Error::UnknownVertex(state_name(bad)));
    }
    let pattern = if drivers.is_empty() {
        PatternMatrix::zeros(n, 0)
    } else {
        match mode {
            BMode::Shared => PatternMatrix::new(n, 1, drivers.iter().map(|&d| (d, 0)))?,
            BMode::PerDriver => PatternMatrix::new(
                n,
                drivers.len(),
                drivers.iter().enumerate().map(|(col, &d)| (d, col)),
            )?,
        }
    };
    Ok(BPattern { mode, pattern })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, example2};

    fn set(one_based: &[usize]) -> BTreeSet<usize> {
        one_based.iter().map(|v| v - 1).collect()
    }

    #[test]
    fn validation_examples() {
        let a = example2();
        let r = validate_driver_set(&a, &set(&[1, 5])).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.uncovered_witness,
            Some(vec![Edge::State { from: 3, to: 3 }])
        );

        let r = validate_driver_set(&a, &set(&[1, 5, 7])).unwrap();
        assert!(!r.valid);
        assert_eq!(
            r.uncovered_witness,
            Some(vec![Edge::State { from: 3, to: 3 }])
        );

        let r = validate_driver_set(&a, &set(&[4, 5, 6])).unwrap();
        assert!(r.valid);
        assert!(r.uncovered_witness.is_none());

        assert!(matches!(
            validate_driver_set(&a, &set(&[12])),
            Err(Error::UnknownVertex(name)) if name == "x12"
        ));
    }

    #[test]
    fn minimal_sets_on_examples() {
        let acyclic = PatternMatrix::new(3, 3, [(1, 0), (2, 1)]).unwrap();
        let r = minimal_driver_set(&acyclic).unwrap();
        assert!(r.drivers.is_empty() && r.valid && r.minimal);

        let r = minimal_driver_set(&example2()).unwrap();
        assert_eq!(r.drivers, set(&[4, 8]));
        assert!(r.minimal);

        // x5 reaches x3 and through it the cycle {x1, x2}
        let (a, _) = example1();
        let r = minimal_driver_set(&a).unwrap();
        assert_eq!(r.drivers, set(&[5]));
    }

    #[test]
    fn enumeration_examples() {
        let all = enumerate_minimal_driver_sets(&example2(), 100).unwrap();
        let got: Vec<BTreeSet<usize>> = all.into_iter().map(|d| d.drivers).collect();
        assert_eq!(
            got,
            vec![set(&[4, 8]), set(&[4, 9]), set(&[4, 10]), set(&[4, 11])]
        );

        let acyclic = PatternMatrix::zeros(3, 3);
        let got = enumerate_minimal_driver_sets(&acyclic, 10).unwrap();
        assert_eq!(got.len(), 1);
        assert!(got[0].drivers.is_empty());

        let one = PatternMatrix::identity(1);
        let got = enumerate_minimal_driver_sets(&one, 10).unwrap();
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].drivers, set(&[1]));

        assert!(enumerate_minimal_driver_sets(&one, 0).is_err());
    }

    #[test]
    fn enumeration_expands_component_members_and_respects_limit() {
        // a 3-cycle: any single vertex works
        let a = PatternMatrix::new(3, 3, [(1, 0), (2, 1), (0, 2)]).unwrap();
        let got = enumerate_minimal_driver_sets(&a, 10).unwrap();
        assert_eq!(got.len(), 3);
        let got = enumerate_minimal_driver_sets(&a, 2).unwrap();
        assert_eq!(got.len(), 2);
        assert_eq!(got[0].drivers, set(&[1]));
    }

    #[test]
    fn greedy_examples() {
        let r = greedy_driver_set(&example2()).unwrap();
        assert_eq!(r.size(), 2);
        assert!(!r.minimal);
        assert!(validate_driver_set(&example2(), &r.drivers).unwrap().valid);

        assert!(greedy_driver_set(&PatternMatrix::zeros(4, 4))
            .unwrap()
            .drivers
            .is_empty());

        let loops = PatternMatrix::new(2, 2, [(0, 0), (1, 1)]).unwrap();
        assert_eq!(greedy_driver_set(&loops).unwrap().size(), 2);
    }

    #[test]
    fn cap_falls_back_to_greedy() {
        let (a, _) = example1();
        let r = minimal_driver_set_with_cap(&a, 1).unwrap();
        assert!(!r.minimal);
        assert!(r.valid);
        assert!(matches!(
            enumerate_minimal_driver_sets_with_cap(&a, 10, 1),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn b_patterns() {
        let d = set(&[4, 8]);
        let per = build_b_pattern(11, &d, BMode::PerDriver).unwrap();
        assert_eq!(
            per.pattern,
            PatternMatrix::from_one_based(11, 2, [(4, 1), (8, 2)]).unwrap()
        );
        let shared = build_b_pattern(11, &d, BMode::Shared).unwrap();
        assert_eq!(
            shared.pattern,
            PatternMatrix::from_one_based(11, 1, [(4, 1), (8, 1)]).unwrap()
        );
        let single = build_b_pattern(3, &set(&[2]), BMode::Shared).unwrap();
        assert_eq!(
            single.pattern,
            PatternMatrix::from_one_based(3, 1, [(2, 1)]).unwrap()
        );
        let empty = build_b_pattern(3, &BTreeSet::new(), BMode::PerDriver).unwrap();
        assert_eq!(empty.pattern.n_cols(), 0);
        assert!(build_b_pattern(3, &set(&[4]), BMode::Shared).is_err());
    }
}
