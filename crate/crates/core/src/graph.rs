//! The system digraph `G = (X ∪ U, E)` of a structured pair `(A, B)`.
//!
//! A nonzero `a_ij` is the edge `x_j -> x_i`, a nonzero `b_ij` the edge
//! `u_j -> x_i`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{input_name, state_name, PatternMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Vertex {
    State(usize),
    Input(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Vertex::State(i) => f.write_str(&state_name(i)),
            Vertex::Input(j) => f.write_str(&input_name(j)),
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    /// Parses `x3` or `u1` (1-based).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::UnknownVertex(s.to_string());
        let (kind, digits) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let idx: usize = digits.parse().map_err(|_| bad())?;
        if idx == 0 {
            return Err(bad());
        }
        match kind {
            "x" | "X" => Ok(Vertex::State(idx - 1)),
            "u" | "U" => Ok(Vertex::Input(idx - 1)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Edge {
    /// `x_from -> x_to`, from `a_{to,from}`.
    State { from: usize, to: usize },
    /// `u_from -> x_to`, from `b_{to,from}`.
    Input { from: usize, to: usize },
}

impl Edge {
    pub fn source(&self) -> Vertex {
        match *self {
            Edge::State { from, .. } => Vertex::State(from),
            Edge::Input { from, .. } => Vertex::Input(from),
        }
    }

    pub fn target(&self) -> Vertex {
        match *self {
            Edge::State { to, .. } | Edge::Input { to, .. } => Vertex::State(to),
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.source(), self.target())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemGraph {
    a: PatternMatrix,
    b: PatternMatrix,
    state_succ: Vec<Vec<usize>>,
    state_pred: Vec<Vec<usize>>,
    input_succ: Vec<Vec<usize>>,
}

impl SystemGraph {
    /// Builds the graph of `(A, B)`. A missing `B` means `m = 0`.
    pub fn build(pattern_a: &PatternMatrix, pattern_b: Option<&PatternMatrix>) -> Result<Self> {
        let n = pattern_a.n_rows();
        let b = pattern_b
            .cloned()
            .unwrap_or_else(|| PatternMatrix::zeros(n, 0));
        if !pattern_a.is_square() || b.n_rows() != n {
            return Err(Error::DimensionMismatch {
                what: "A must be n x n and B must be n x m",
                a_rows: pattern_a.n_rows(),
                a_cols: pattern_a.n_cols(),
                b_rows: b.n_rows(),
                b_cols: b.n_cols(),
            });
        }

        let mut state_succ = vec![Vec::new(); n];
        let mut state_pred = vec![Vec::new(); n];
        for (i, j) in pattern_a.iter() {
            state_succ[j].push(i);
            state_pred[i].push(j);
        }
        let mut input_succ = vec![Vec::new(); b.n_cols()];
        for (i, j) in b.iter() {
            input_succ[j].push(i);
        }
        for list in state_succ.iter_mut().chain(input_succ.iter_mut()) {
            list.sort_unstable();
        }

        Ok(Self {
            a: pattern_a.clone(),
            b,
            state_succ,
            state_pred,
            input_succ,
        })
    }

    pub fn n_states(&self) -> usize {
        self.a.n_rows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.n_cols()
    }

    pub fn pattern_a(&self) -> &PatternMatrix {
        &self.a
    }

    pub fn pattern_b(&self) -> &PatternMatrix {
        &self.b
    }

    pub fn successors(&self, state: usize) -> &[usize] {
        &self.state_succ[state]
    }

    pub fn predecessors(&self, state: usize) -> &[usize] {
        &self.state_pred[state]
    }

    pub fn input_successors(&self, input: usize) -> &[usize] {
        &self.input_succ[input]
    }

    pub fn has_self_loop(&self, state: usize) -> bool {
        self.a.contains(state, state)
    }

    /// All edges, state edges first, each group in ascending order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .a
            .iter()
            .map(|(i, j)| Edge::State { from: j, to: i })
            .collect();
        out.sort();
        let mut inputs: Vec<Edge> = self
            .b
            .iter()
            .map(|(i, j)| Edge::Input { from: j, to: i })
            .collect();
        inputs.sort();
        out.extend(inputs);
        out
    }

    pub fn state_edge_count(&self) -> usize {
        self.a.nnz()
    }

    pub fn input_edge_count(&self) -> usize {
        self.b.nnz()
    }

    pub fn input_vertices(&self) -> Vec<Vertex> {
        (0..self.n_inputs()).map(Vertex::Input).collect()
    }

    fn check_vertex(&self, v: Vertex) -> Result<()> {
        let ok = match v {
            Vertex::State(i) => i < self.n_states(),
            Vertex::Input(j) => j < self.n_inputs(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v.to_string()))
        }
    }

    /// States reachable from `sources`. A state source reaches itself; an
    /// input source only reaches what its out-edges lead to.
    pub fn reachable_from<'a, I>(&self, sources: I) -> Result<BTreeSet<usize>>
    where
        I: IntoIterator<Item = &'a Vertex>,
    {
        let mut seen = vec![false; self.n_states()];
        let mut queue = VecDeque::new();
        for &v in sources {
            self.check_vertex(v)?;
            let single;
            let starts: &[usize] = match v {
                Vertex::State(i) => {
                    single = [i];
                    &single
                }
                Vertex::Input(j) => &self.input_succ[j],
            };
            for &s in starts {
                if !seen[s] {
                    seen[s] = true;
                    queue.push_back(s);
                }
            }
        }
        while let Some(v) = queue.pop_front() {
            for &w in &self.state_succ[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(seen
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
            .collect())
    }

    /// States reachable from the state set `drivers` (0-based).
    pub fn reachable_from_states(&self, drivers: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        let sources: Vec<Vertex> = drivers.iter().map(|&i| Vertex::State(i)).collect();
        self.reachable_from(&sources)
    }

    /// States reachable from the input vertices `U`.
    pub fn reachable_from_inputs(&self) -> BTreeSet<usize> {
        self.reachable_from(&self.input_vertices())
            .expect("input vertices are in range")
    }

    /// Whether the state subgraph contains a cycle.
    pub fn has_cycle(&self) -> bool {
        crate::scc::sorted_components(self)
            .iter()
            .any(|c| crate::scc::is_cyclic_component(self, c))
    }

    /// One cycle inside the subgraph induced by `within`, if any, as a list
    /// of state edges. Self-loops are preferred; otherwise the shortest cycle
    /// through the smallest vertex of the first cyclic component.
    pub fn find_cycle_within(&self, within: &BTreeSet<usize>) -> Option<Vec<Edge>> {
        crate::scc::sorted_components(self)
            .iter()
            .filter(|comp| {
                crate::scc::is_cyclic_component(self, comp)
                    && comp.iter().all(|v| within.contains(v))
            })
            .find_map(|comp| self.cycle_in_component(comp))
    }

    /// A cycle inside one strongly connected component.
    pub(crate) fn cycle_in_component(&self, comp: &[usize]) -> Option<Vec<Edge>> {
        if let Some(&v) = comp.iter().find(|&&v| self.has_self_loop(v)) {
            return Some(vec![Edge::State { from: v, to: v }]);
        }
        let members: BTreeSet<usize> = comp.iter().copied().collect();
        let start = *comp.iter().min()?;
        // BFS from start inside the component back to start.
        let mut parent: Vec<Option<usize>> = vec![None; self.n_states()];
        let mut queue = VecDeque::from([start]);
        let mut visited = vec![false; self.n_states()];
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.state_succ[v] {
                if !members.contains(&w) {
                    continue;
                }
                if w == start {
                    let mut path = vec![v];
                    let mut cur = v;
                    while let Some(p) = parent[cur] {
                        path.push(p);
                        cur = p;
                    }
                    path.reverse();
                    let mut edges: Vec<Edge> = path
                        .windows(2)
                        .map(|w| Edge::State {
                            from: w[0],
                            to: w[1],
                        })
                        .collect();
                    edges.push(Edge::State { from: v, to: start });
                    return Some(edges);
                }
                if !visited[w] {
                    visited[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        None
    }
}
