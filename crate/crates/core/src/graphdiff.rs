//! Procedural graphs extracted from the model and from a mined heuristics
//! net, their diff, and DOT rendering.

use crate::eventlog::decode_activity;
use crate::miner::{HeuristicsNet, END, START};
use crate::model::Model;
use crate::sim::DEADLOCK_LABEL;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

/// Edge key: source state, rendered action label, target state.
pub type EdgeKey = (String, String, String);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EdgeInfo {
    /// Observed activity frequency; absent for spec edges.
    pub freq: Option<u64>,
    /// Number of model transitions collapsing onto this edge.
    pub collapsed: u32,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ProcGraph {
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<EdgeKey, EdgeInfo>,
}

/// Graph of the specified process behaviour: one edge per distinct
/// (source, action, target) triple across all processes.
pub fn spec_graph(model: &Model) -> ProcGraph {
    let mut g = ProcGraph::default();
    for p in &model.processes {
        for s in &p.states {
            g.nodes.insert(s.clone());
        }
        for t in &p.transitions {
            let key = (t.source.clone(), t.action.to_string(), t.target.clone());
            g.edges.entry(key).or_default().collapsed += 1;
        }
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("undecodable activity `{0}`")]
pub struct DecodeError(pub String);

/// Graph recovered from a mined net by decoding activity names back into
/// (source, action, target) triples. `START` and `END` are discarded.
pub fn mined_graph(net: &HeuristicsNet) -> Result<ProcGraph, DecodeError> {
    let mut g = ProcGraph::default();
    for (activity, &freq) in &net.activity_freq {
        if activity == START || activity == END {
            continue;
        }
        let (action, source, target) =
            decode_activity(activity).ok_or_else(|| DecodeError(activity.clone()))?;
        g.nodes.insert(source.clone());
        g.nodes.insert(target.clone());
        let info = g.edges.entry((source, action, target)).or_default();
        info.freq = Some(info.freq.unwrap_or(0) + freq);
        info.collapsed += 1;
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffClass {
    Both,
    SpecOnly,
    MinedOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffResult {
    pub nodes: BTreeMap<String, DiffClass>,
    pub edges: BTreeMap<EdgeKey, (DiffClass, EdgeInfo)>,
}

impl DiffResult {
    pub fn spec_only(&self) -> Vec<&EdgeKey> {
        self.edges
            .iter()
            .filter(|(_, (c, _))| *c == DiffClass::SpecOnly)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn mined_only(&self) -> Vec<&EdgeKey> {
        self.edges
            .iter()
            .filter(|(_, (c, _))| *c == DiffClass::MinedOnly)
            .map(|(k, _)| k)
            .collect()
    }
}

pub fn diff(spec: &ProcGraph, mined: &ProcGraph) -> DiffResult {
    let mut nodes = BTreeMap::new();
    for n in spec.nodes.union(&mined.nodes) {
        let class = match (spec.nodes.contains(n), mined.nodes.contains(n)) {
            (true, true) => DiffClass::Both,
            (true, false) => DiffClass::SpecOnly,
            (false, true) => DiffClass::MinedOnly,
            (false, false) => unreachable!(),
        };
        nodes.insert(n.clone(), class);
    }
    let mut edges = BTreeMap::new();
    for (k, info) in &spec.edges {
        match mined.edges.get(k) {
            Some(mi) => {
                let merged = EdgeInfo {
                    freq: mi.freq,
                    collapsed: info.collapsed,
                };
                edges.insert(k.clone(), (DiffClass::Both, merged));
            }
            None => {
                edges.insert(k.clone(), (DiffClass::SpecOnly, info.clone()));
            }
        }
    }
    for (k, info) in &mined.edges {
        if !spec.edges.contains_key(k) {
            edges.insert(k.clone(), (DiffClass::MinedOnly, info.clone()));
        }
    }
    DiffResult { nodes, edges }
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\\\""))
}

/// Deterministic DOT rendering. Spec-only edges are dashed red, mined-only
/// edges solid red, shared edges solid black. A node is red when it is
/// missing on one side, when it is the deadlock sink, or when none of its
/// incident spec edges were ever observed.
pub fn to_dot(d: &DiffResult) -> String {
    let mut out = String::from("digraph G {\n");
    for (n, class) in &d.nodes {
        let mut attrs: Vec<String> = Vec::new();
        if n == DEADLOCK_LABEL {
            attrs.push("shape=octagon".into());
        }
        let incident: Vec<&(DiffClass, EdgeInfo)> = d
            .edges
            .iter()
            .filter(|((s, _, t), _)| s == n || t == n)
            .map(|(_, v)| v)
            .collect();
        let unobserved =
            !incident.is_empty() && incident.iter().all(|(c, _)| *c == DiffClass::SpecOnly);
        if *class != DiffClass::Both || n == DEADLOCK_LABEL || unobserved {
            attrs.push("color=red".into());
        }
        if attrs.is_empty() {
            writeln!(out, "    {};", dot_id(n)).unwrap();
        } else {
            writeln!(out, "    {} [{}];", dot_id(n), attrs.join(" ")).unwrap();
        }
    }
    for ((s, a, t), (class, info)) in &d.edges {
        let label = edge_label(a, info);
        let style = match class {
            DiffClass::Both => "",
            DiffClass::SpecOnly => "color=red, style=dashed, ",
            DiffClass::MinedOnly => "color=red, style=solid, ",
        };
        writeln!(
            out,
            "    {} -> {} [{style}label=\"{}\"];",
            dot_id(s),
            dot_id(t),
            label.replace('"', "\\\"")
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

fn edge_label(action: &str, info: &EdgeInfo) -> String {
    match info.freq {
        Some(f) => format!("{action} [{f}]"),
        None => action.to_string(),
    }
}

/// DOT rendering of a single graph with no diff classes, used for the
/// spec-side and mined-side outputs.
pub fn graph_to_dot(g: &ProcGraph) -> String {
    let mut out = String::from("digraph G {\n");
    for n in &g.nodes {
        if n == DEADLOCK_LABEL {
            writeln!(out, "    {} [shape=octagon color=red];", dot_id(n)).unwrap();
        } else {
            writeln!(out, "    {};", dot_id(n)).unwrap();
        }
    }
    for ((s, a, t), info) in &g.edges {
        let label = edge_label(a, info);
        writeln!(
            out,
            "    {} -> {} [label=\"{}\"];",
            dot_id(s),
            dot_id(t),
            label.replace('"', "\\\"")
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(nodes: &[&str], edges: &[(&str, &str, &str)]) -> ProcGraph {
        let mut g = ProcGraph {
            nodes: nodes.iter().map(|s| s.to_string()).collect(),
            ..ProcGraph::default()
        };
        for (s, a, t) in edges {
            g.edges.insert(
                (s.to_string(), a.to_string(), t.to_string()),
                EdgeInfo {
                    freq: None,
                    collapsed: 1,
                },
            );
        }
        g
    }

    #[test]
    fn classes() {
        let spec = graph(&["a", "b"], &[("a", "x", "b"), ("b", "y", "a")]);
        let mined = graph(&["a", "b"], &[("a", "x", "b"), ("a", "z", "a")]);
        let d = diff(&spec, &mined);
        assert_eq!(
            d.edges[&("a".into(), "x".into(), "b".into())].0,
            DiffClass::Both
        );
        assert_eq!(d.spec_only().len(), 1);
        assert_eq!(d.mined_only().len(), 1);
    }

    #[test]
    fn dot_styles() {
        let spec = graph(&["a", "b"], &[("a", "x", "b")]);
        let mined = graph(&["a"], &[("a", "z", "a")]);
        let d = diff(&spec, &mined);
        let dot = to_dot(&d);
        assert!(dot.contains("\"a\" -> \"b\" [color=red, style=dashed, label=\"x\"];"));
        assert!(dot.contains("\"a\" -> \"a\" [color=red, style=solid, label=\"z\"];"));
        // b only appears in the spec, so it is red.
        assert!(dot.contains("\"b\" [color=red];"));
    }

    #[test]
    fn identical_graphs_empty_diff() {
        let g = graph(&["a"], &[("a", "x", "a")]);
        let d = diff(&g, &g);
        assert!(d.spec_only().is_empty());
        assert!(d.mined_only().is_empty());
    }
}
