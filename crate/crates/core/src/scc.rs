//! Maximal strongly connected components of the state subgraph and the
//! condensation order `≺` between them.
//!
//! Components are numbered by their smallest vertex, so the numbering is
//! stable across runs and matches the usual hand labelling `C_1, C_2, ...`.

use std::collections::BTreeSet;

use crate::graph::SystemGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccDecomposition {
    components: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    nontrivial: Vec<bool>,
    /// `(a, b)` with `C_a ≺ C_b`, transitively closed.
    order: BTreeSet<(usize, usize)>,
    /// Transitive reduction of `order`.
    reduced_order: BTreeSet<(usize, usize)>,
    /// Components in a topological order of the condensation (sources first).
    topo: Vec<usize>,
}

impl SccDecomposition {
    /// Decomposes the state subgraph of `graph`; input vertices are ignored.
    pub fn of(graph: &SystemGraph) -> Self {
        let components = sorted_components(graph);
        let n = graph.n_states();
        let mut component_of = vec![0; n];
        for (c, comp) in components.iter().enumerate() {
            for &v in comp {
                component_of[v] = c;
            }
        }
        let nontrivial = components
            .iter()
            .map(|comp| is_cyclic_component(graph, comp))
            .collect();

        let p = components.len();
        let mut direct: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); p];
        for v in 0..n {
            for &w in graph.successors(v) {
                let (cv, cw) = (component_of[v], component_of[w]);
                if cv != cw {
                    direct[cv].insert(cw);
                }
            }
        }

        let topo = topological_order(&direct);

        // Descendant sets, filled in reverse topological order.
        let mut below: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); p];
        for &c in topo.iter().rev() {
            let mut acc = BTreeSet::new();
            for &d in &direct[c] {
                acc.insert(d);
                acc.extend(below[d].iter().copied());
            }
            below[c] = acc;
        }

        let mut order = BTreeSet::new();
        for (c, set) in below.iter().enumerate() {
            for &d in set {
                order.insert((c, d));
            }
        }
        // An arc c -> d survives reduction unless d is below another child of c.
        let mut reduced_order = BTreeSet::new();
        for (c, children) in direct.iter().enumerate() {
            for &d in children {
                let implied = children.iter().any(|&e| e != d && below[e].contains(&d));
                if !implied {
                    reduced_order.insert((c, d));
                }
            }
        }

        Self {
            components,
            component_of,
            nontrivial,
            order,
            reduced_order,
            topo,
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component(&self, c: usize) -> &[usize] {
        &self.components[c]
    }

    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    pub fn is_nontrivial(&self, c: usize) -> bool {
        self.nontrivial[c]
    }

    pub fn has_nontrivial(&self) -> bool {
        self.nontrivial.iter().any(|&t| t)
    }

    pub fn nontrivial_components(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&c| self.nontrivial[c])
    }

    /// `C_a ≺ C_b`: some vertex of `C_a` reaches some vertex of `C_b`.
    pub fn precedes(&self, a: usize, b: usize) -> bool {
        self.order.contains(&(a, b))
    }

    pub fn order(&self) -> &BTreeSet<(usize, usize)> {
        &self.order
    }

    pub fn reduced_order(&self) -> &BTreeSet<(usize, usize)> {
        &self.reduced_order
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    /// Components reachable from `c`, `c` included.
    pub fn closure(&self, c: usize) -> BTreeSet<usize> {
        let mut out: BTreeSet<usize> = self
            .order
            .range((c, 0)..(c + 1, 0))
            .map(|&(_, d)| d)
            .collect();
        out.insert(c);
        out
    }
}

/// Components of the state subgraph, each sorted, ordered by smallest vertex.
pub(crate) fn sorted_components(graph: &SystemGraph) -> Vec<Vec<usize>> {
    let mut components: Vec<Vec<usize>> = tarjan(graph)
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    components.sort_by_key(|c| c[0]);
    components
}

pub(crate) fn is_cyclic_component(graph: &SystemGraph, comp: &[usize]) -> bool {
    comp.len() > 1 || graph.has_self_loop(comp[0])
}

/// Kahn's algorithm; ties broken by the smallest component index.
fn topological_order(direct: &[BTreeSet<usize>]) -> Vec<usize> {
    let p = direct.len();
    let mut indeg = vec![0usize; p];
    for set in direct {
        for &d in set {
            indeg[d] += 1;
        }
    }
    let mut ready: BTreeSet<usize> = (0..p).filter(|&c| indeg[c] == 0).collect();
    let mut out = Vec::with_capacity(p);
    while let Some(c) = ready.pop_first() {
        out.push(c);
        for &d in &direct[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                ready.insert(d);
            }
        }
    }
    debug_assert_eq!(out.len(), p, "condensation must be acyclic");
    out
}

/// Iterative Tarjan over the state subgraph.
fn tarjan(graph: &SystemGraph) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = graph.n_states();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    // (vertex, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&(v, pos)) = call.last() {
            let succ = graph.successors(v);
            if pos < succ.len() {
                let w = succ[pos];
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(comp);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{example1, example2};
    use crate::pattern::PatternMatrix;

    #[test]
    fn example1_components_and_order() {
        let (a, b) = example1();
        let g = SystemGraph::build(&a, Some(&b)).unwrap();
        let scc = SccDecomposition::of(&g);
        assert_eq!(scc.components(), &[vec![0, 1], vec![2], vec![3], vec![4]]);
        let flags: Vec<bool> = (0..4).map(|c| scc.is_nontrivial(c)).collect();
        assert_eq!(flags, vec![true, false, false, true]);
        // C4 ≺ C2, C3 ≺ C2, C2 ≺ C1, C4 ≺ C1, C3 ≺ C1 (1-based labels)
        let expected: BTreeSet<(usize, usize)> = [(3, 1), (2, 1), (1, 0), (3, 0), (2, 0)]
            .into_iter()
            .collect();
        assert_eq!(scc.order(), &expected);
        let reduced: BTreeSet<(usize, usize)> = [(3, 1), (2, 1), (1, 0)].into_iter().collect();
        assert_eq!(scc.reduced_order(), &reduced);
    }

    #[test]
    fn single_vertex_is_trivial() {
        let g = SystemGraph::build(&PatternMatrix::zeros(1, 1), None).unwrap();
        let scc = SccDecomposition::of(&g);
        assert_eq!(scc.len(), 1);
        assert!(!scc.is_nontrivial(0));
        assert!(scc.order().is_empty());

        let g = SystemGraph::build(&PatternMatrix::identity(1), None).unwrap();
        assert!(SccDecomposition::of(&g).is_nontrivial(0));
    }

    #[test]
    fn example2_components() {
        let g = SystemGraph::build(&example2(), None).unwrap();
        let scc = SccDecomposition::of(&g);
        let nontrivial: Vec<Vec<usize>> = scc
            .nontrivial_components()
            .map(|c| scc.component(c).to_vec())
            .collect();
        assert_eq!(
            nontrivial,
            vec![vec![0, 1, 2], vec![3], vec![4], vec![5, 6]]
        );
        let trivial: Vec<Vec<usize>> = (0..scc.len())
            .filter(|&c| !scc.is_nontrivial(c))
            .map(|c| scc.component(c).to_vec())
            .collect();
        assert_eq!(trivial, vec![vec![7], vec![8], vec![9], vec![10]]);
    }

    #[test]
    fn topological_order_respects_precedence() {
        let g = SystemGraph::build(&example2(), None).unwrap();
        let scc = SccDecomposition::of(&g);
        let pos: Vec<usize> = {
            let mut pos = vec![0; scc.len()];
            for (k, &c) in scc.topological_order().iter().enumerate() {
                pos[c] = k;
            }
            pos
        };
        for &(a, b) in scc.order() {
            assert!(pos[a] < pos[b]);
        }
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 50_000;
        let a = PatternMatrix::new(n, n, (1..n).map(|i| (i, i - 1)).chain([(0, n - 1)])).unwrap();
        let g = SystemGraph::build(&a, None).unwrap();
        let scc = SccDecomposition::of(&g);
        assert_eq!(scc.len(), 1);
        assert!(scc.is_nontrivial(0));
    }
}
