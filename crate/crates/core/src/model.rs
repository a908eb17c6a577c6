//! Domain types for product-line models and their runtime configurations,
//! plus static well-formedness checking.

use crate::expr::{ArithExpr, BoolExpr};
use crate::rat::Rat;
use crate::smc::QuerySpec;
use crate::span::SourceSpan;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type FeatId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    /// Internal grouping node; presence is derived from descendants.
    Abstract,
    /// Installable leaf.
    Concrete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChildRelation {
    Mandatory,
    Optional,
    Or,
    Xor,
}

#[derive(Debug, Clone)]
pub struct Feature {
    pub name: String,
    pub kind: FeatureKind,
    pub attributes: BTreeMap<String, Rat>,
    pub parent: Option<FeatId>,
    pub relation: Option<ChildRelation>,
    pub children: Vec<FeatId>,
    pub span: Option<SourceSpan>,
}

/// Feature diagram stored as an arena. The root, when present, is the unique
/// feature without a parent.
#[derive(Debug, Clone, Default)]
pub struct FeatureTree {
    pub feats: Vec<Feature>,
    pub by_name: BTreeMap<String, FeatId>,
    pub root: Option<FeatId>,
}

impl FeatureTree {
    pub fn id(&self, name: &str) -> Option<FeatId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, id: FeatId) -> &Feature {
        &self.feats[id]
    }

    pub fn is_concrete(&self, name: &str) -> bool {
        self.id(name)
            .map(|i| self.feats[i].kind == FeatureKind::Concrete)
            .unwrap_or(false)
    }

    /// Concrete features in the subtree rooted at `id` (including `id` itself
    /// when concrete).
    pub fn concrete_descendants(&self, id: FeatId) -> Vec<FeatId> {
        let mut out = Vec::new();
        let mut stack = vec![id];
        while let Some(i) = stack.pop() {
            if self.feats[i].kind == FeatureKind::Concrete {
                out.push(i);
            }
            stack.extend(self.feats[i].children.iter().copied());
        }
        out
    }

    /// A feature is present in a configuration when it is an installed
    /// concrete feature, or an abstract feature with at least one installed
    /// concrete descendant.
    pub fn present(&self, id: FeatId, installed: &BTreeSet<String>) -> bool {
        match self.feats[id].kind {
            FeatureKind::Concrete => installed.contains(&self.feats[id].name),
            FeatureKind::Abstract => self
                .concrete_descendants(id)
                .iter()
                .any(|&c| installed.contains(&self.feats[c].name)),
        }
    }

    /// Sibling sets related to their parent by `xor`, one group per parent.
    pub fn xor_groups(&self) -> Vec<Vec<FeatId>> {
        let mut out = Vec::new();
        for f in &self.feats {
            let group: Vec<FeatId> = f
                .children
                .iter()
                .copied()
                .filter(|&c| self.feats[c].relation == Some(ChildRelation::Xor))
                .collect();
            if group.len() > 1 {
                out.push(group);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossTreeKind {
    Requires,
    Excludes,
}

#[derive(Debug, Clone)]
pub struct CrossTreeConstraint {
    pub kind: CrossTreeKind,
    pub lhs: String,
    pub rhs: String,
    pub span: Option<SourceSpan>,
}

#[derive(Debug, Clone)]
pub struct ActionConstraint {
    pub action: String,
    pub cond: BoolExpr,
    pub span: Option<SourceSpan>,
}

/// Parameterized action argument kept for listings outside the core
/// product-line semantics (e.g. `succ(RobBank)`, `ask({floor==0})`).
#[derive(Debug, Clone, PartialEq)]
pub enum ParamArg {
    Names(Vec<String>),
    Cond(Box<BoolExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ActionLabel {
    /// Custom action or feature use, depending on how the name resolves.
    Act(String),
    Install(String),
    Uninstall(String),
    Replace(String, String),
    /// Generic parameterized action; parsed and round-tripped but not given
    /// reconfiguration semantics.
    Param {
        name: String,
        arg: ParamArg,
    },
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionLabel::Act(name) => write!(f, "{name}"),
            ActionLabel::Install(x) => write!(f, "install({x})"),
            ActionLabel::Uninstall(x) => write!(f, "uninstall({x})"),
            ActionLabel::Replace(a, b) => write!(f, "replace({a},{b})"),
            ActionLabel::Param { name, arg } => match arg {
                ParamArg::Names(ns) => write!(f, "{name}({})", ns.join(",")),
                ParamArg::Cond(c) => write!(f, "{name}({{{c}}})"),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub source: String,
    pub action: ActionLabel,
    pub weight: Rat,
    pub effects: Vec<(String, ArithExpr)>,
    pub guard: Option<BoolExpr>,
    pub target: String,
    pub span: Option<SourceSpan>,
}

#[derive(Debug, Clone)]
pub struct Process {
    pub name: String,
    pub states: Vec<String>,
    pub transitions: Vec<Transition>,
    pub span: Option<SourceSpan>,
}

/// A simulation state: installed concrete features, variable valuation, and
/// the current state of every process.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub installed: BTreeSet<String>,
    pub vars: BTreeMap<String, Rat>,
    pub locus: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default)]
pub struct Model {
    pub features: FeatureTree,
    pub cross_tree: Vec<CrossTreeConstraint>,
    pub action_constraints: Vec<ActionConstraint>,
    pub quant_constraints: Vec<BoolExpr>,
    pub actions: BTreeSet<String>,
    pub variables: Vec<(String, Rat)>,
    pub processes: Vec<Process>,
    pub init_installed: Vec<String>,
    pub init_processes: Vec<String>,
    pub analyses: Vec<QuerySpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub span: Option<SourceSpan>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.span {
            Some(s) => write!(f, "{s}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl Model {
    pub fn process(&self, name: &str) -> Option<&Process> {
        self.processes.iter().find(|p| p.name == name)
    }

    /// Builds the initial configuration from the init block. Processes listed
    /// in `initialProcesses` start in their first declared state.
    pub fn initial_configuration(&self) -> Configuration {
        let mut locus = BTreeMap::new();
        for name in &self.init_processes {
            if let Some(p) = self.process(name) {
                if let Some(first) = p.states.first() {
                    locus.insert(p.name.clone(), first.clone());
                }
            }
        }
        Configuration {
            installed: self.init_installed.iter().cloned().collect(),
            vars: self.variables.iter().cloned().collect(),
            locus,
        }
    }

    /// Sum of `attr` over installed concrete features in the subtree rooted
    /// at `root`. Features without the attribute contribute 0.
    pub fn attribute_sum(
        &self,
        cfg: &Configuration,
        attr: &str,
        root: &str,
    ) -> Result<Rat, String> {
        let root_id = self
            .features
            .id(root)
            .ok_or_else(|| format!("unknown feature `{root}`"))?;
        let mut sum = Rat::from_integer(0.into());
        for id in self.features.concrete_descendants(root_id) {
            let feat = self.features.get(id);
            if cfg.installed.contains(&feat.name) {
                if let Some(v) = feat.attributes.get(attr) {
                    sum += v;
                }
            }
        }
        Ok(sum)
    }

    /// Static well-formedness checks over the parsed model. An empty result
    /// means all type invariants hold. Pure: the same model always yields the
    /// same diagnostics in the same order.
    pub fn validate_static(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let diag = |out: &mut Vec<Diagnostic>, span: &Option<SourceSpan>, msg: String| {
            out.push(Diagnostic {
                span: span.clone(),
                message: msg,
            });
        };

        // Feature tree shape.
        for f in &self.features.feats {
            if f.kind == FeatureKind::Abstract && f.children.is_empty() {
                diag(
                    &mut out,
                    &f.span,
                    format!("abstract feature `{}` has no children", f.name),
                );
            }
        }
        let feature_names: BTreeSet<&str> = self
            .features
            .feats
            .iter()
            .map(|f| f.name.as_str())
            .collect();

        for c in &self.cross_tree {
            if c.lhs == c.rhs {
                diag(
                    &mut out,
                    &c.span,
                    format!("self-reference in cross-tree constraint on `{}`", c.lhs),
                );
            }
            for name in [&c.lhs, &c.rhs] {
                if !feature_names.contains(name.as_str()) {
                    diag(&mut out, &c.span, format!("unknown feature `{name}`"));
                }
            }
        }

        let var_names: BTreeSet<&str> = self.variables.iter().map(|(n, _)| n.as_str()).collect();

        for ac in &self.action_constraints {
            if !self.actions.contains(&ac.action) && !feature_names.contains(ac.action.as_str()) {
                diag(
                    &mut out,
                    &ac.span,
                    format!(
                        "action constraint refers to undeclared action `{}`",
                        ac.action
                    ),
                );
            }
            self.check_bool(&ac.cond, &ac.span, &feature_names, &var_names, &mut out);
        }

        for q in &self.quant_constraints {
            self.check_bool(q, &None, &feature_names, &var_names, &mut out);
        }

        if self.processes.is_empty() {
            diag(&mut out, &None, "model declares no process".to_string());
        }
        for p in &self.processes {
            let states: BTreeSet<&str> = p.states.iter().map(|s| s.as_str()).collect();
            for t in &p.transitions {
                for s in [&t.source, &t.target] {
                    if !states.contains(s.as_str()) {
                        diag(
                            &mut out,
                            &t.span,
                            format!("unknown state `{s}` in process `{}`", p.name),
                        );
                    }
                }
                if t.weight < Rat::from_integer(0.into()) {
                    diag(&mut out, &t.span, "negative transition weight".to_string());
                }
                for (v, e) in &t.effects {
                    if !var_names.contains(v.as_str()) {
                        diag(&mut out, &t.span, format!("undeclared variable `{v}`"));
                    }
                    self.check_arith(e, &t.span, &feature_names, &var_names, &mut out);
                }
                if let Some(g) = &t.guard {
                    self.check_bool(g, &t.span, &feature_names, &var_names, &mut out);
                }
                match &t.action {
                    ActionLabel::Act(name) => {
                        if !self.actions.contains(name) && !feature_names.contains(name.as_str()) {
                            diag(
                                &mut out,
                                &t.span,
                                format!("action `{name}` is neither declared nor a feature"),
                            );
                        }
                    }
                    ActionLabel::Install(x) | ActionLabel::Uninstall(x) => {
                        if !self.features.is_concrete(x) {
                            diag(
                                &mut out,
                                &t.span,
                                format!("`{x}` is not a concrete feature"),
                            );
                        }
                    }
                    ActionLabel::Replace(a, b) => {
                        for x in [a, b] {
                            if !self.features.is_concrete(x) {
                                diag(
                                    &mut out,
                                    &t.span,
                                    format!("`{x}` is not a concrete feature"),
                                );
                            }
                        }
                    }
                    ActionLabel::Param { .. } => {}
                }
            }
        }

        for name in &self.init_installed {
            if !self.features.is_concrete(name) {
                diag(
                    &mut out,
                    &None,
                    format!("initial feature `{name}` is not a concrete feature"),
                );
            }
        }
        for name in &self.init_processes {
            if self.process(name).is_none() {
                diag(&mut out, &None, format!("unknown initial process `{name}`"));
            }
        }
        out
    }

    fn check_arith(
        &self,
        e: &ArithExpr,
        span: &Option<SourceSpan>,
        feats: &BTreeSet<&str>,
        vars: &BTreeSet<&str>,
        out: &mut Vec<Diagnostic>,
    ) {
        match e {
            ArithExpr::Const(_) => {}
            ArithExpr::Var(v) => {
                if !vars.contains(v.as_str()) {
                    out.push(Diagnostic {
                        span: span.clone(),
                        message: format!("undeclared variable `{v}`"),
                    });
                }
            }
            ArithExpr::AttrSum { feature, .. } => {
                if !feats.contains(feature.as_str()) {
                    out.push(Diagnostic {
                        span: span.clone(),
                        message: format!("unknown feature `{feature}`"),
                    });
                }
            }
            ArithExpr::Bin { left, right, .. } => {
                self.check_arith(left, span, feats, vars, out);
                self.check_arith(right, span, feats, vars, out);
            }
        }
    }

    fn check_bool(
        &self,
        e: &BoolExpr,
        span: &Option<SourceSpan>,
        feats: &BTreeSet<&str>,
        vars: &BTreeSet<&str>,
        out: &mut Vec<Diagnostic>,
    ) {
        match e {
            BoolExpr::Cmp { left, right, .. } => {
                self.check_arith(left, span, feats, vars, out);
                self.check_arith(right, span, feats, vars, out);
            }
            BoolExpr::Has(name) => {
                if !feats.contains(name.as_str()) {
                    out.push(Diagnostic {
                        span: span.clone(),
                        message: format!("unknown feature `{name}`"),
                    });
                }
            }
            BoolExpr::Not(i) => self.check_bool(i, span, feats, vars, out),
            BoolExpr::And(l, r) | BoolExpr::Or(l, r) => {
                self.check_bool(l, span, feats, vars, out);
                self.check_bool(r, span, feats, vars, out);
            }
            BoolExpr::Pred { .. } => {}
        }
    }
}
