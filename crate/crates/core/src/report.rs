//! Report documents for the command line, in text and JSON.
//!
//! Every vertex and edge is rendered with 1-based names (`x3`, `u1`,
//! `(x5,x5)`), so JSON output can be read against the system digraph
//! directly and parsed back without loss.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::drivers::{BMode, DriverSet};
use crate::graph::{Edge, SystemGraph};
use crate::numeric::{MonteCarloStats, SteeringResult};
use crate::pattern::state_name;
use crate::scc::SccDecomposition;
use crate::structural::ZcReport;

fn names(states: impl IntoIterator<Item = usize>) -> Vec<String> {
    states.into_iter().map(state_name).collect()
}

fn edge_names(edges: &[Edge]) -> Vec<String> {
    edges.iter().map(Edge::to_string).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZcSection {
    pub verdict: bool,
    pub reachable: Vec<String>,
    /// `X_u`, the states no input reaches.
    pub unreachable: Vec<String>,
    /// Edges of `G_u`, the subgraph induced on `X_u`.
    pub unreachable_edges: Vec<String>,
    /// Every nontrivial component of the state graph.
    pub nontrivial_components: Vec<Vec<String>>,
    pub nontrivial_unreachable_components: Vec<Vec<String>>,
    pub cycle_witness: Option<Vec<String>>,
}

impl ZcSection {
    pub fn new(graph: &SystemGraph, report: &ZcReport) -> Self {
        let scc = SccDecomposition::of(graph);
        let unreachable_edges = graph
            .edges()
            .into_iter()
            .filter(|e| match *e {
                Edge::State { from, to } => {
                    report.unreachable_states.contains(&from)
                        && report.unreachable_states.contains(&to)
                }
                Edge::Input { .. } => false,
            })
            .map(|e| e.to_string())
            .collect();
        Self {
            verdict: report.verdict,
            reachable: names(report.reachable_states.iter().copied()),
            unreachable: names(report.unreachable_states.iter().copied()),
            unreachable_edges,
            nontrivial_components: scc
                .nontrivial_components()
                .map(|c| names(scc.component(c).iter().copied()))
                .collect(),
            nontrivial_unreachable_components: report
                .nontrivial_unreachable_components
                .iter()
                .map(|c| names(c.iter().copied()))
                .collect(),
            cycle_witness: report.cycle_witness.as_deref().map(edge_names),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverEntry {
    pub drivers: Vec<String>,
    pub valid: bool,
    pub minimal: bool,
    pub uncovered_witness: Option<Vec<String>>,
}

impl From<&DriverSet> for DriverEntry {
    fn from(d: &DriverSet) -> Self {
        Self {
            drivers: d.names(),
            valid: d.valid,
            minimal: d.minimal,
            uncovered_witness: d.uncovered_witness.as_deref().map(edge_names),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverSection {
    /// Size of the smallest set found; exact when `minimal` holds.
    pub minimum_size: usize,
    pub minimal: bool,
    pub selected: DriverEntry,
    pub greedy: DriverEntry,
    /// All minimal sets, when enumeration was requested.
    pub enumerated: Option<Vec<DriverEntry>>,
    /// Enumeration stopped at the limit.
    pub truncated: bool,
    pub b_mode: BMode,
    /// Entries of the induced input pattern, as 1-based `(row, column)`.
    pub b_entries: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifySection {
    pub tol: f64,
    pub stats: MonteCarloStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringSection {
    pub seed: u64,
    pub horizon: usize,
    pub x0: Vec<f64>,
    pub controls: Vec<Vec<f64>>,
    pub final_norm: f64,
    /// Largest relative residual of the closed-form trajectory identity.
    pub formula_residual: f64,
}

impl SteeringSection {
    pub fn new(seed: u64, result: &SteeringResult, formula_residual: f64) -> Self {
        Self {
            seed,
            horizon: result.horizon,
            x0: result.trajectory[0].iter().copied().collect(),
            controls: result
                .controls
                .iter()
                .map(|u| u.iter().copied().collect())
                .collect(),
            final_norm: result.final_norm,
            formula_residual,
        }
    }
}

/// Machine-readable result of one command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReportDocument {
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<ZcSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drivers: Option<DriverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steering: Option<SteeringSection>,
}

impl AnalysisReportDocument {
    pub fn new(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            analysis: None,
            drivers: None,
            verify: None,
            steering: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report types serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "system: n = {}, m = {}", self.n, self.m);
        if let Some(a) = &self.analysis {
            write_analysis(&mut out, a);
        }
        if let Some(d) = &self.drivers {
            write_drivers(&mut out, d);
        }
        if let Some(v) = &self.verify {
            write_verify(&mut out, v);
        }
        if let Some(s) = &self.steering {
            write_steering(&mut out, s);
        }
        out
    }
}

fn set(items: &[String]) -> String {
    format!("{{{}}}", items.join(", "))
}

fn write_analysis(out: &mut String, a: &ZcSection) {
    let verdict = if a.verdict {
        "generically zero controllable"
    } else {
        "not generically zero controllable"
    };
    let _ = writeln!(out, "verdict: {verdict}");
    let _ = writeln!(out, "reachable set: {}", set(&a.reachable));
    let _ = writeln!(
        out,
        "G_u: ({}, {})",
        set(&a.unreachable),
        set(&a.unreachable_edges)
    );
    let comps: Vec<String> = a.nontrivial_components.iter().map(|c| set(c)).collect();
    let _ = writeln!(
        out,
        "nontrivial components: {}",
        if comps.is_empty() {
            "none".into()
        } else {
            comps.join(" ")
        }
    );
    if !a.nontrivial_unreachable_components.is_empty() {
        let comps: Vec<String> = a
            .nontrivial_unreachable_components
            .iter()
            .map(|c| set(c))
            .collect();
        let _ = writeln!(
            out,
            "unreachable nontrivial components: {}",
            comps.join(" ")
        );
    }
    if let Some(w) = &a.cycle_witness {
        let _ = writeln!(out, "cycle witness: {}", w.join(" "));
    }
}

fn write_entry(out: &mut String, label: &str, e: &DriverEntry) {
    let _ = write!(out, "{label}: {}", set(&e.drivers));
    if !e.valid {
        let _ = write!(out, " (invalid");
        if let Some(w) = &e.uncovered_witness {
            let _ = write!(out, ", uncovered cycle {}", w.join(" "));
        }
        let _ = write!(out, ")");
    }
    out.push('\n');
}

fn write_drivers(out: &mut String, d: &DriverSection) {
    let qualifier = if d.minimal {
        "exact"
    } else {
        "greedy upper bound"
    };
    let _ = writeln!(
        out,
        "minimum driver set size: {} ({qualifier})",
        d.minimum_size
    );
    write_entry(out, "selected", &d.selected);
    write_entry(out, "greedy", &d.greedy);
    if let Some(sets) = &d.enumerated {
        let more = if d.truncated { ", truncated" } else { "" };
        let _ = writeln!(out, "minimal driver sets ({}{more}):", sets.len());
        for e in sets {
            let _ = writeln!(out, "  {}", set(&e.drivers));
        }
    }
    let mode = match d.b_mode {
        BMode::Shared => "shared",
        BMode::PerDriver => "per-driver",
    };
    let entries: Vec<String> = d
        .b_entries
        .iter()
        .map(|(i, j)| format!("b {i} {j}"))
        .collect();
    let _ = writeln!(out, "input pattern ({mode}): {}", entries.join(", "));
}

fn write_verify(out: &mut String, v: &VerifySection) {
    let s = &v.stats;
    let _ = writeln!(
        out,
        "monte carlo: {} trials, seeds {}..{}, tol {:e}",
        s.trials,
        s.base_seed,
        s.base_seed.wrapping_add(s.trials as u64 - 1),
        v.tol
    );
    let _ = writeln!(
        out,
        "zero controllability: structural {}, agree {}/{}, flagged {}",
        s.structural_zero_controllable,
        s.zero_controllable_agree,
        s.trials,
        s.zero_controllable_flagged
    );
    if let (Some(c), Some(agree), Some(flagged)) = (
        s.structural_controllable,
        s.controllable_agree,
        s.controllable_flagged,
    ) {
        let _ = writeln!(
            out,
            "controllability: structural {c}, agree {agree}/{}, flagged {flagged}",
            s.trials
        );
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn write_steering(out: &mut String, s: &SteeringSection) {
    let _ = writeln!(
        out,
        "deadbeat steering: horizon {}, seed {}",
        s.horizon, s.seed
    );
    let _ = writeln!(out, "x(0) = {}", fmt_vec(&s.x0));
    for (k, u) in s.controls.iter().enumerate() {
        let _ = writeln!(out, "u({k}) = {}", fmt_vec(u));
    }
    let _ = writeln!(out, "final norm: {:e}", s.final_norm);
    let _ = writeln!(
        out,
        "trajectory identity residual: {:e}",
        s.formula_residual
    );
}

/// 1-based entries of a driver input pattern.
pub fn one_based_entries(pattern: &crate::pattern::PatternMatrix) -> Vec<(usize, usize)> {
    pattern.iter().map(|(i, j)| (i + 1, j + 1)).collect()
}

/// Names of a set of states.
pub fn state_names(states: &BTreeSet<usize>) -> Vec<String> {
    names(states.iter().copied())
}
