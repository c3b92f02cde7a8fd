//! Graphviz export of the system digraph.
//!
//! Each strongly connected component becomes a `cluster_<k>` subgraph,
//! numbered like [`SccDecomposition`]. Nontrivial components get
//! `peripheries=2`. With an overlay, reachable states are filled green,
//! unreachable ones red and dashed, and drivers drawn as `doublecircle`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::drivers::DriverSet;
use crate::error::Result;
use crate::graph::{Edge, SystemGraph};
use crate::pattern::{input_name, state_name};
use crate::scc::SccDecomposition;
use crate::structural::ZcReport;

const REACHABLE_STYLE: &str = "style=filled, fillcolor=\"#c7e9c0\"";
const UNREACHABLE_STYLE: &str = "style=\"filled,dashed\", fillcolor=\"#fcbba1\"";

/// Extra information painted onto the graph.
#[derive(Debug, Clone, Copy)]
pub enum Overlay<'a> {
    None,
    Analysis(&'a ZcReport),
    /// Reachability is taken from the drivers instead of the inputs.
    Drivers(&'a DriverSet),
}

pub fn export_dot(
    graph: &SystemGraph,
    scc: &SccDecomposition,
    overlay: Overlay<'_>,
) -> Result<String> {
    let (reachable, drivers): (Option<BTreeSet<usize>>, BTreeSet<usize>) = match overlay {
        Overlay::None => (None, BTreeSet::new()),
        Overlay::Analysis(r) => (Some(r.reachable_states.clone()), BTreeSet::new()),
        Overlay::Drivers(d) => (
            Some(graph.reachable_from_states(&d.drivers)?),
            d.drivers.clone(),
        ),
    };

    let mut out = String::new();
    out.push_str("digraph system {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=circle];\n");

    for c in 0..scc.len() {
        let kind = if scc.is_nontrivial(c) {
            "nontrivial"
        } else {
            "trivial"
        };
        let _ = writeln!(out, "  subgraph cluster_{} {{", c + 1);
        let _ = writeln!(out, "    label=\"C{} ({kind})\";", c + 1);
        if scc.is_nontrivial(c) {
            out.push_str("    peripheries=2;\n");
        }
        for &v in scc.component(c) {
            let mut attrs = Vec::new();
            if drivers.contains(&v) {
                attrs.push("shape=doublecircle");
            }
            match &reachable {
                Some(r) if r.contains(&v) => attrs.push(REACHABLE_STYLE),
                Some(_) => attrs.push(UNREACHABLE_STYLE),
                None => {}
            }
            if attrs.is_empty() {
                let _ = writeln!(out, "    {};", state_name(v));
            } else {
                let _ = writeln!(out, "    {} [{}];", state_name(v), attrs.join(", "));
            }
        }
        out.push_str("  }\n");
    }

    for j in 0..graph.n_inputs() {
        let _ = writeln!(out, "  {} [shape=box];", input_name(j));
    }
    for e in graph.edges() {
        let (from, to) = match e {
            Edge::State { from, to } => (state_name(from), state_name(to)),
            Edge::Input { from, to } => (input_name(from), state_name(to)),
        };
        let _ = writeln!(out, "  {from} -> {to};");
    }
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::validate_driver_set;
    use crate::fixtures::{example1, example2};
    use crate::pattern::PatternMatrix;
    use crate::structural::is_generically_zero_controllable;

    #[test]
    fn example1_marks_x5_unreachable() {
        let (a, b) = example1();
        let g = SystemGraph::build(&a, Some(&b)).unwrap();
        let scc = SccDecomposition::of(&g);
        let r = is_generically_zero_controllable(&a, Some(&b)).unwrap();
        let dot = export_dot(&g, &scc, Overlay::Analysis(&r)).unwrap();
        assert!(
            dot.contains(&format!("    x5 [{UNREACHABLE_STYLE}];")),
            "{dot}"
        );
        assert!(dot.contains(&format!("    x4 [{REACHABLE_STYLE}];")));
        assert!(dot.contains("  x5 -> x5;"));
        assert!(dot.contains("  u1 -> x4;"));
        assert!(dot.contains("label=\"C4 (nontrivial)\";\n    peripheries=2;"));
        assert!(dot.contains("label=\"C3 (trivial)\";\n    x4"));
        assert_eq!(dot, export_dot(&g, &scc, Overlay::Analysis(&r)).unwrap());
    }

    #[test]
    fn empty_graph() {
        let g = SystemGraph::build(&PatternMatrix::zeros(0, 0), None).unwrap();
        let dot = export_dot(&g, &SccDecomposition::of(&g), Overlay::None).unwrap();
        assert_eq!(
            dot,
            "digraph system {\n  rankdir=LR;\n  node [shape=circle];\n}\n"
        );
    }

    #[test]
    fn drivers_are_marked() {
        let a = example2();
        let g = SystemGraph::build(&a, None).unwrap();
        let d = validate_driver_set(&a, &[3, 7].into()).unwrap();
        let dot = export_dot(&g, &SccDecomposition::of(&g), Overlay::Drivers(&d)).unwrap();
        assert!(dot.contains(&format!("x4 [shape=doublecircle, {REACHABLE_STYLE}]")));
        assert!(dot.contains(&format!("x8 [shape=doublecircle, {REACHABLE_STYLE}]")));
        assert!(dot.contains(&format!("x9 [{UNREACHABLE_STYLE}]")));
        assert_eq!(dot.matches("shape=doublecircle").count(), 2);
    }
}
