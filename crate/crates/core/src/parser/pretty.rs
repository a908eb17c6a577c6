//! Canonical textual rendering of a parsed model. Re-parsing the output
//! yields a structurally equal model.

use crate::model::{ChildRelation, Model, Transition};
use crate::rat::format_rat;
use crate::smc::{PropertyExpr, QueryKind, QuerySpec};
use std::fmt::Write;

pub fn pretty_print(model: &Model) -> String {
    let mut out = String::new();

    let tree_lines = feature_tree_lines(model);
    if !tree_lines.is_empty() {
        block(&mut out, "feature tree", &tree_lines);
    }

    let attr_lines: Vec<String> = model
        .features
        .feats
        .iter()
        .flat_map(|f| {
            f.attributes
                .iter()
                .map(|(attr, v)| format!("{attr}({}) = {}", f.name, format_rat(v)))
                .collect::<Vec<_>>()
        })
        .collect();
    if !attr_lines.is_empty() {
        block(&mut out, "attributes", &attr_lines);
    }

    let ct_lines: Vec<String> = model
        .cross_tree
        .iter()
        .map(|c| {
            let kw = match c.kind {
                crate::model::CrossTreeKind::Requires => "requires",
                crate::model::CrossTreeKind::Excludes => "excludes",
            };
            format!("{} {kw} {}", c.lhs, c.rhs)
        })
        .collect();
    if !ct_lines.is_empty() {
        block(&mut out, "feature constraints", &ct_lines);
    }

    let ac_lines: Vec<String> = model
        .action_constraints
        .iter()
        .map(|ac| format!("do({}) -> {}", ac.action, ac.cond))
        .collect();
    if !ac_lines.is_empty() {
        block(&mut out, "action constraints", &ac_lines);
    }

    let qc_lines: Vec<String> = model
        .quant_constraints
        .iter()
        .map(|q| format!("{{{q}}}"))
        .collect();
    if !qc_lines.is_empty() {
        block(&mut out, "quantitative constraints", &qc_lines);
    }

    if !model.actions.is_empty() {
        let line = model.actions.iter().cloned().collect::<Vec<_>>().join(" ");
        block(&mut out, "actions", &[line]);
    }

    let var_lines: Vec<String> = model
        .variables
        .iter()
        .map(|(n, v)| format!("{n} = {}", format_rat(v)))
        .collect();
    if !var_lines.is_empty() {
        block(&mut out, "variables", &var_lines);
    }

    if !model.processes.is_empty() {
        writeln!(out, "begin processes diagram").unwrap();
        for p in &model.processes {
            writeln!(out, "    begin process {}", p.name).unwrap();
            writeln!(out, "        states = {}", p.states.join(", ")).unwrap();
            write!(out, "        transitions = ").unwrap();
            for (i, t) in p.transitions.iter().enumerate() {
                if i > 0 {
                    write!(out, ",\n            ").unwrap();
                }
                write!(out, "{}", render_transition(t)).unwrap();
            }
            writeln!(out).unwrap();
            writeln!(out, "    end process").unwrap();
        }
        writeln!(out, "end processes diagram").unwrap();
        writeln!(out).unwrap();
    }

    let mut init_lines = Vec::new();
    if !model.init_installed.is_empty() {
        init_lines.push(format!(
            "installedFeatures = {{{}}}",
            model.init_installed.join(", ")
        ));
    }
    if !model.init_processes.is_empty() {
        init_lines.push(format!(
            "initialProcesses = {}",
            model.init_processes.join(", ")
        ));
    }
    if !init_lines.is_empty() {
        block(&mut out, "init", &init_lines);
    }

    for q in &model.analyses {
        block(&mut out, "analysis", &analysis_lines(q));
    }

    out
}

fn block(out: &mut String, name: &str, lines: &[String]) {
    writeln!(out, "begin {name}").unwrap();
    for line in lines {
        writeln!(out, "    {line}").unwrap();
    }
    writeln!(out, "end {name}").unwrap();
    writeln!(out).unwrap();
}

fn feature_tree_lines(model: &Model) -> Vec<String> {
    let mut lines = Vec::new();
    for f in &model.features.feats {
        let mut i = 0;
        // Adjacent children under the same group relation collapse into one
        // `or { .. }` / `xor { .. }` line.
        while i < f.children.len() {
            let child = f.children[i];
            let rel = model.features.feats[child].relation;
            match rel {
                Some(ChildRelation::Mandatory) => {
                    lines.push(format!(
                        "{} -> mandatory {}",
                        f.name, model.features.feats[child].name
                    ));
                    i += 1;
                }
                Some(ChildRelation::Optional) => {
                    lines.push(format!(
                        "{} -> optional {}",
                        f.name, model.features.feats[child].name
                    ));
                    i += 1;
                }
                Some(rel @ (ChildRelation::Or | ChildRelation::Xor)) => {
                    let mut names = Vec::new();
                    while i < f.children.len()
                        && model.features.feats[f.children[i]].relation == Some(rel)
                    {
                        names.push(model.features.feats[f.children[i]].name.clone());
                        i += 1;
                    }
                    let kw = if rel == ChildRelation::Or {
                        "or"
                    } else {
                        "xor"
                    };
                    lines.push(format!("{} -> {kw} {{{}}}", f.name, names.join(", ")));
                }
                None => {
                    i += 1;
                }
            }
        }
    }
    lines
}

fn render_transition(t: &Transition) -> String {
    let mut s = format!("{} -({}, {}", t.source, t.action, format_rat(&t.weight));
    if !t.effects.is_empty() {
        let effs: Vec<String> = t
            .effects
            .iter()
            .map(|(v, e)| format!("{v} = {e}"))
            .collect();
        s.push_str(&format!(", {{{}}}", effs.join(", ")));
    }
    if let Some(g) = &t.guard {
        s.push_str(&format!(", {g}"));
    }
    s.push_str(&format!(")-> {}", t.target));
    s
}

fn analysis_lines(q: &QuerySpec) -> Vec<String> {
    let props: Vec<String> = q
        .properties
        .iter()
        .map(|p| {
            let base = match &p.expr {
                PropertyExpr::Name(n) => n.clone(),
                PropertyExpr::Expr(e) => e.to_string(),
            };
            match p.delta {
                Some(d) => format!("{base} [delta = {d}]"),
                None => base,
            }
        })
        .collect();
    let head = match &q.kind {
        QueryKind::When(cond) => format!("query = when {cond} : {{{}}}", props.join(", ")),
        QueryKind::Eval { from, to, by } => format!(
            "query = eval from {from} to {to} by {by} : {{{}}}",
            props.join(", ")
        ),
    };
    let mut lines = vec![
        head,
        format!("default delta = {}", q.delta),
        format!("alpha = {}", q.alpha),
        format!("parallelism = {}", q.parallelism),
    ];
    if let Some(path) = &q.logs {
        lines.push(format!("logs = \"{path}\""));
    }
    lines
}
