//! Heuristics Miner over encoded activity traces: directly-follows counts,
//! dependency measures, loop handling, and the all-connected repair.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

pub const START: &str = "START";
pub const END: &str = "END";

#[derive(Debug, Clone, Copy)]
pub struct MinerParams {
    pub dependency_threshold: f64,
    pub and_threshold: f64,
    pub loop_two_threshold: f64,
    /// Directly-follows edges with frequency below `noise * max_frequency`
    /// are dropped before mining. Zero keeps everything.
    pub noise_threshold: f64,
}

impl Default for MinerParams {
    fn default() -> Self {
        MinerParams {
            dependency_threshold: 0.5,
            and_threshold: 0.65,
            loop_two_threshold: 0.5,
            noise_threshold: 0.0,
        }
    }
}

/// Directly-follows statistics of a trace set, with artificial `START` and
/// `END` activities wrapped around every trace.
#[derive(Debug, Clone, Default)]
pub struct DfgStats {
    pub activity_freq: BTreeMap<String, u64>,
    pub direct: BTreeMap<(String, String), u64>,
    /// Counts of the two-step loop pattern `a b a`.
    pub two_loop: BTreeMap<(String, String), u64>,
}

impl DfgStats {
    pub fn from_traces<S: AsRef<str>>(traces: &[Vec<S>]) -> Self {
        let mut stats = DfgStats::default();
        for trace in traces {
            let mut seq: Vec<&str> = Vec::with_capacity(trace.len() + 2);
            seq.push(START);
            seq.extend(trace.iter().map(|s| s.as_ref()));
            seq.push(END);
            for a in &seq {
                *stats.activity_freq.entry(a.to_string()).or_default() += 1;
            }
            for w in seq.windows(2) {
                *stats
                    .direct
                    .entry((w[0].to_string(), w[1].to_string()))
                    .or_default() += 1;
            }
            for w in seq.windows(3) {
                if w[0] == w[2] && w[0] != w[1] {
                    *stats
                        .two_loop
                        .entry((w[0].to_string(), w[1].to_string()))
                        .or_default() += 1;
                }
            }
        }
        stats
    }

    pub fn count(&self, a: &str, b: &str) -> u64 {
        self.direct
            .get(&(a.to_string(), b.to_string()))
            .copied()
            .unwrap_or(0)
    }

    fn loop_count(&self, a: &str, b: &str) -> u64 {
        self.two_loop
            .get(&(a.to_string(), b.to_string()))
            .copied()
            .unwrap_or(0)
    }

    /// Classic dependency measure: `(|a>b| - |b>a|) / (|a>b| + |b>a| + 1)`
    /// for distinct activities, `|a>a| / (|a>a| + 1)` for self-loops.
    pub fn dependency(&self, a: &str, b: &str) -> f64 {
        if a == b {
            let n = self.count(a, a) as f64;
            n / (n + 1.0)
        } else {
            let ab = self.count(a, b) as f64;
            let ba = self.count(b, a) as f64;
            (ab - ba) / (ab + ba + 1.0)
        }
    }

    /// Length-two-loop measure: `(|a>>b| + |b>>a|) / (|a>>b| + |b>>a| + 1)`.
    pub fn loop_two(&self, a: &str, b: &str) -> f64 {
        let n = (self.loop_count(a, b) + self.loop_count(b, a)) as f64;
        n / (n + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeStat {
    pub freq: u64,
    pub dependency: f64,
}

#[derive(Debug, Clone, Default)]
pub struct HeuristicsNet {
    pub activity_freq: BTreeMap<String, u64>,
    pub edges: BTreeMap<(String, String), EdgeStat>,
    /// Output pairs judged parallel by the AND measure, keyed as
    /// `(split activity, smaller successor, larger successor)`.
    pub parallel: BTreeSet<(String, String, String)>,
}

impl HeuristicsNet {
    pub fn activities(&self) -> BTreeSet<&str> {
        self.activity_freq.keys().map(String::as_str).collect()
    }
}

pub fn discover<S: AsRef<str>>(traces: &[Vec<S>], params: &MinerParams) -> HeuristicsNet {
    let mut stats = DfgStats::from_traces(traces);

    if params.noise_threshold > 0.0 {
        let max = stats.direct.values().copied().max().unwrap_or(0) as f64;
        let cut = params.noise_threshold * max;
        stats.direct.retain(|_, &mut f| f as f64 >= cut);
    }

    let acts: Vec<String> = stats.activity_freq.keys().cloned().collect();
    let mut kept: BTreeSet<(String, String)> = BTreeSet::new();

    // Length-one loops.
    let mut l1: BTreeSet<&str> = BTreeSet::new();
    for a in &acts {
        if stats.dependency(a, a) >= params.dependency_threshold {
            kept.insert((a.clone(), a.clone()));
            l1.insert(a);
        }
    }

    // Length-two loops between activities that are not length-one loops.
    for a in &acts {
        for b in &acts {
            if a >= b || l1.contains(a.as_str()) || l1.contains(b.as_str()) {
                continue;
            }
            if stats.loop_two(a, b) >= params.loop_two_threshold
                && stats.loop_count(a, b) + stats.loop_count(b, a) > 0
            {
                kept.insert((a.clone(), b.clone()));
                kept.insert((b.clone(), a.clone()));
            }
        }
    }

    // Plain dependency edges.
    for (a, b) in stats.direct.keys() {
        if a != b && stats.dependency(a, b) >= params.dependency_threshold {
            kept.insert((a.clone(), b.clone()));
        }
    }

    // All-connected repair: every activity keeps its strongest incoming and
    // outgoing edge even below threshold. START needs no input, END no
    // output.
    for a in &acts {
        if a != END && !kept.iter().any(|(s, _)| s == a) {
            let best = acts
                .iter()
                .filter(|b| *b != a && stats.count(a, b) > 0)
                .max_by(|x, y| {
                    stats
                        .dependency(a, x)
                        .partial_cmp(&stats.dependency(a, y))
                        .unwrap()
                        .then(y.cmp(x))
                });
            if let Some(b) = best {
                kept.insert((a.clone(), b.clone()));
            }
        }
        if a != START && !kept.iter().any(|(_, t)| t == a) {
            let best = acts
                .iter()
                .filter(|b| *b != a && stats.count(b, a) > 0)
                .max_by(|x, y| {
                    stats
                        .dependency(x, a)
                        .partial_cmp(&stats.dependency(y, a))
                        .unwrap()
                        .then(y.cmp(x))
                });
            if let Some(b) = best {
                kept.insert((b.clone(), a.clone()));
            }
        }
    }

    let mut net = HeuristicsNet {
        activity_freq: stats.activity_freq.clone(),
        ..Default::default()
    };
    for (a, b) in &kept {
        net.edges.insert(
            (a.clone(), b.clone()),
            EdgeStat {
                freq: stats.count(a, b),
                dependency: stats.dependency(a, b),
            },
        );
    }

    // AND measure over kept output pairs; recorded, not used to prune.
    for a in &acts {
        let outs: Vec<&String> = kept
            .iter()
            .filter(|(s, t)| s == a && t != a)
            .map(|(_, t)| t)
            .collect();
        for i in 0..outs.len() {
            for j in i + 1..outs.len() {
                let (b, c) = (outs[i], outs[j]);
                let num = (stats.count(b, c) + stats.count(c, b)) as f64;
                let den = (stats.count(a, b) + stats.count(a, c)) as f64 + 1.0;
                if num / den >= params.and_threshold {
                    net.parallel.insert((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    net
}

fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('"', "\\\""))
}

/// Renders the heuristics net itself, before decoding activities back into
/// process edges.
pub fn hn_to_dot(net: &HeuristicsNet) -> String {
    let mut out = String::from("digraph HN {\n");
    out.push_str("    node [shape=box];\n");
    for (a, freq) in &net.activity_freq {
        let attrs = match a.as_str() {
            START => " shape=circle style=filled fillcolor=green".to_string(),
            END => " shape=circle style=filled fillcolor=red".to_string(),
            _ => String::new(),
        };
        writeln!(
            out,
            "    {} [label=\"{}\\n({})\"{attrs}];",
            dot_id(a),
            a.replace('"', "\\\""),
            freq
        )
        .unwrap();
    }
    for ((a, b), stat) in &net.edges {
        writeln!(
            out,
            "    {} -> {} [label=\"{} / {:.3}\"];",
            dot_id(a),
            dot_id(b),
            stat.freq,
            stat.dependency
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn traces(raw: &[&[&str]]) -> Vec<Vec<String>> {
        raw.iter()
            .map(|t| t.iter().map(|s| s.to_string()).collect())
            .collect()
    }

    #[test]
    fn dependency_one_sided() {
        // a followed by b five times, never the reverse.
        let t = traces(&[&["a", "b"][..]; 5]);
        let stats = DfgStats::from_traces(&t);
        assert_eq!(stats.dependency("a", "b"), 5.0 / 6.0);
    }

    #[test]
    fn dependency_balanced_is_zero() {
        let t = traces(&[&["a", "b", "a", "b"], &["b", "a", "b", "a"]]);
        let stats = DfgStats::from_traces(&t);
        assert_eq!(stats.dependency("a", "b"), 0.0);
    }

    #[test]
    fn self_loop_dependency() {
        let t = traces(&[&["a", "a", "a", "a"]]);
        let stats = DfgStats::from_traces(&t);
        assert_eq!(stats.dependency("a", "a"), 0.75);
    }

    #[test]
    fn all_activities_kept() {
        let t = traces(&[&["a", "b", "c"], &["a", "c"]]);
        let net = discover(&t, &MinerParams::default());
        let acts = net.activities();
        for a in ["a", "b", "c", START, END] {
            assert!(acts.contains(a), "missing {a}");
        }
        // Every non-terminal activity has input and output edges.
        for a in ["a", "b", "c"] {
            assert!(net.edges.keys().any(|(s, _)| s == a));
            assert!(net.edges.keys().any(|(_, t)| t == a));
        }
    }

    #[test]
    fn two_loop_measure() {
        let t = traces(&[&["a", "b", "a", "b", "a"]]);
        let stats = DfgStats::from_traces(&t);
        // Patterns: aba at 0, bab at 1, aba at 2.
        assert_eq!(stats.loop_two("a", "b"), 3.0 / 4.0);
    }
}
