//! Recursive-descent parser for the modeling language, plus the canonical
//! pretty-printer.

pub mod lexer;
mod pretty;

pub use pretty::pretty_print;

use crate::expr::{ArithExpr, ArithOp, BoolExpr, CmpOp};
use crate::model::{
    ActionConstraint, ActionLabel, ChildRelation, CrossTreeConstraint, CrossTreeKind, FeatId,
    Feature, FeatureKind, Model, ParamArg, Process, Transition,
};
use crate::rat::{parse_decimal, rat_to_f64, Rat};
use crate::smc::{Property, PropertyExpr, QueryKind, QuerySpec};
use crate::span::SourceSpan;
use lexer::{lex, Tok, Token};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    /// Token descriptions the parser would have accepted at this point.
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(message: impl Into<String>, span: SourceSpan, expected: Vec<String>) -> Self {
        ParseError {
            message: message.into(),
            span,
            expected,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(" or "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

pub fn parse_model(text: &str, file: &str) -> Result<Model, ParseError> {
    let tokens = lex(text, file)?;
    let mut p = Parser { tokens, pos: 0 };
    p.model()
}

/// Parses a stand-alone analysis query, either as a full `begin analysis`
/// block or as the bare block body starting at `query =`.
pub fn parse_query(text: &str, file: &str) -> Result<QuerySpec, ParseError> {
    let tokens = lex(text, file)?;
    let mut p = Parser { tokens, pos: 0 };
    let spec = if p.at_keyword("begin") {
        p.keyword("begin")?;
        p.keyword("analysis")?;
        let spec = p.analysis_body()?;
        p.keyword("end")?;
        p.keyword("analysis")?;
        spec
    } else {
        p.analysis_body()?
    };
    p.expect(Tok::Eof)?;
    Ok(spec)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span.clone()
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>, expected: Vec<String>) -> ParseError {
        ParseError::new(
            format!("{}, found {}", message.into(), self.peek().describe()),
            self.span(),
            expected,
        )
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {}", tok.describe()), vec![tok.describe()]))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.err("expected identifier", vec!["identifier".into()])),
        }
    }

    fn at_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        if self.at_keyword(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{word}`"), vec![format!("`{word}`")]))
        }
    }

    fn number(&mut self) -> Result<Rat, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek() {
            Tok::Number(raw) => {
                let raw = raw.clone();
                let span = self.span();
                self.bump();
                let v = parse_decimal(&raw)
                    .ok_or_else(|| ParseError::new("malformed number", span, vec![]))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err("expected number", vec!["number".into()])),
        }
    }

    // ---- model -------------------------------------------------------

    fn model(&mut self) -> Result<Model, ParseError> {
        let mut model = Model::default();
        let mut seen = BTreeSet::new();
        let mut init_owner: Option<String> = None;
        while *self.peek() != Tok::Eof {
            let span = self.span();
            self.keyword("begin")?;
            let first = self.ident()?;
            let words: Vec<String> = match first.as_str() {
                "feature" | "action" | "quantitative" | "processes" | "attacker" => {
                    vec![first, self.ident()?]
                }
                _ => vec![first],
            };
            let key = words.join(" ");
            if key != "analysis" && !seen.insert(key.clone()) {
                return Err(ParseError::new(
                    format!("duplicate block `{key}`"),
                    span,
                    vec![],
                ));
            }
            match key.as_str() {
                "feature tree" => self.feature_tree(&mut model)?,
                "feature constraints" => self.cross_tree(&mut model)?,
                "attributes" => self.attributes(&mut model)?,
                "action constraints" => self.action_constraints(&mut model)?,
                "quantitative constraints" => self.quant_constraints(&mut model)?,
                "actions" => self.actions(&mut model)?,
                "variables" => self.variables(&mut model)?,
                "processes diagram" => self.processes(&mut model)?,
                "attacker behaviour" => self.attacker(&mut model)?,
                "init" => init_owner = self.init(&mut model)?,
                "analysis" => {
                    let spec = self.analysis_body()?;
                    model.analyses.push(spec);
                }
                other => {
                    return Err(ParseError::new(
                        format!("unknown block `{other}`"),
                        span,
                        vec![],
                    ));
                }
            }
            self.keyword("end")?;
            for w in &words {
                self.keyword(w)?;
            }
        }
        finalize(&mut model, init_owner);
        Ok(model)
    }

    fn ensure_feat(&self, model: &mut Model, name: &str, span: SourceSpan) -> FeatId {
        if let Some(id) = model.features.id(name) {
            return id;
        }
        let id = model.features.feats.len();
        model.features.feats.push(Feature {
            name: name.to_string(),
            kind: FeatureKind::Concrete,
            attributes: Default::default(),
            parent: None,
            relation: None,
            children: Vec::new(),
            span: Some(span),
        });
        model.features.by_name.insert(name.to_string(), id);
        id
    }

    fn feature_tree(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            let span = self.span();
            let parent_name = self.ident()?;
            let parent = self.ensure_feat(model, &parent_name, span);
            self.expect(Tok::Arrow)?;
            let rel_span = self.span();
            let rel_word = self.ident()?;
            let spanned_ident = |p: &mut Self| -> Result<(String, SourceSpan), ParseError> {
                let span = p.span();
                Ok((p.ident()?, span))
            };
            let (relation, children) = match rel_word.as_str() {
                "mandatory" => (ChildRelation::Mandatory, vec![spanned_ident(self)?]),
                "optional" => (ChildRelation::Optional, vec![spanned_ident(self)?]),
                "or" | "xor" => {
                    let rel = if rel_word == "or" {
                        ChildRelation::Or
                    } else {
                        ChildRelation::Xor
                    };
                    self.expect(Tok::LBrace)?;
                    let mut names = vec![spanned_ident(self)?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        names.push(spanned_ident(self)?);
                    }
                    self.expect(Tok::RBrace)?;
                    (rel, names)
                }
                other => {
                    return Err(ParseError::new(
                        format!("unknown child relation `{other}`"),
                        rel_span,
                        vec![
                            "`mandatory`".into(),
                            "`optional`".into(),
                            "`or`".into(),
                            "`xor`".into(),
                        ],
                    ));
                }
            };
            for (child_name, span) in children {
                let child = self.ensure_feat(model, &child_name, span.clone());
                if model.features.feats[child].parent.is_some() {
                    return Err(ParseError::new(
                        format!("feature `{child_name}` already has a parent"),
                        span,
                        vec![],
                    ));
                }
                model.features.feats[child].parent = Some(parent);
                model.features.feats[child].relation = Some(relation);
                model.features.feats[parent].children.push(child);
            }
        }
        Ok(())
    }

    fn cross_tree(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            let span = self.span();
            let lhs = self.ident()?;
            let kw_span = self.span();
            let kw = self.ident()?;
            let kind = match kw.as_str() {
                "requires" => CrossTreeKind::Requires,
                "excludes" => CrossTreeKind::Excludes,
                other => {
                    return Err(ParseError::new(
                        format!("unknown constraint `{other}`"),
                        kw_span,
                        vec!["`requires`".into(), "`excludes`".into()],
                    ));
                }
            };
            let rhs = self.ident()?;
            model.cross_tree.push(CrossTreeConstraint {
                kind,
                lhs,
                rhs,
                span: Some(span),
            });
        }
        Ok(())
    }

    fn attributes(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            let attr = self.ident()?;
            self.expect(Tok::LParen)?;
            let span = self.span();
            let feat_name = self.ident()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Eq)?;
            let value = self.number()?;
            let id = self.ensure_feat(model, &feat_name, span);
            model.features.feats[id].attributes.insert(attr, value);
        }
        Ok(())
    }

    fn action_constraints(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            let span = self.span();
            self.keyword("do")?;
            self.expect(Tok::LParen)?;
            let action = self.ident()?;
            self.expect(Tok::RParen)?;
            self.expect(Tok::Arrow)?;
            let cond = self.bool_expr()?;
            model.action_constraints.push(ActionConstraint {
                action,
                cond,
                span: Some(span),
            });
        }
        Ok(())
    }

    fn quant_constraints(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            self.expect(Tok::LBrace)?;
            let e = self.bool_expr()?;
            self.expect(Tok::RBrace)?;
            model.quant_constraints.push(e);
        }
        Ok(())
    }

    fn actions(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            let name = self.ident()?;
            model.actions.insert(name);
            if *self.peek() == Tok::Comma {
                self.bump();
            }
        }
        Ok(())
    }

    fn variables(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            let name = self.ident()?;
            self.expect(Tok::Eq)?;
            let value = self.number()?;
            model.variables.push((name, value));
        }
        Ok(())
    }

    fn processes(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            self.keyword("begin")?;
            self.keyword("process")?;
            let span = self.span();
            let name = self.ident()?;
            let (states, transitions) = self.process_body()?;
            self.keyword("end")?;
            self.keyword("process")?;
            model.processes.push(Process {
                name,
                states,
                transitions,
                span: Some(span),
            });
        }
        Ok(())
    }

    fn attacker(&mut self, model: &mut Model) -> Result<(), ParseError> {
        while !self.at_keyword("end") {
            self.keyword("begin")?;
            self.keyword("attack")?;
            self.keyword("attacker")?;
            self.expect(Tok::Eq)?;
            let span = self.span();
            let name = self.ident()?;
            let (states, transitions) = self.process_body()?;
            self.keyword("end")?;
            self.keyword("attack")?;
            model.processes.push(Process {
                name,
                states,
                transitions,
                span: Some(span),
            });
        }
        Ok(())
    }

    fn process_body(&mut self) -> Result<(Vec<String>, Vec<Transition>), ParseError> {
        self.keyword("states")?;
        self.expect(Tok::Eq)?;
        let mut states = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            states.push(self.ident()?);
        }
        self.keyword("transitions")?;
        self.expect(Tok::Eq)?;
        let mut transitions = vec![self.transition()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            transitions.push(self.transition()?);
        }
        Ok((states, transitions))
    }

    fn transition(&mut self) -> Result<Transition, ParseError> {
        let span = self.span();
        let source = self.ident()?;
        self.expect(Tok::Minus)?;
        self.expect(Tok::LParen)?;
        let action = self.action_label()?;
        self.expect(Tok::Comma)?;
        let weight = self.number()?;
        let mut effects = Vec::new();
        let mut guard = None;
        // Up to two optional trailing elements: an effect block and a guard,
        // in either order.
        for _ in 0..2 {
            if *self.peek() != Tok::Comma {
                break;
            }
            self.bump();
            if *self.peek() == Tok::LBrace {
                if !effects.is_empty() {
                    return Err(self.err("duplicate effect block", vec![]));
                }
                self.bump();
                effects.push(self.effect()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    effects.push(self.effect()?);
                }
                self.expect(Tok::RBrace)?;
            } else {
                if guard.is_some() {
                    return Err(self.err("duplicate guard", vec![]));
                }
                guard = Some(self.bool_expr()?);
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Arrow)?;
        let target = self.ident()?;
        Ok(Transition {
            source,
            action,
            weight,
            effects,
            guard,
            target,
            span: Some(span),
        })
    }

    fn effect(&mut self) -> Result<(String, ArithExpr), ParseError> {
        let var = self.ident()?;
        self.expect(Tok::Eq)?;
        let expr = self.arith_expr()?;
        Ok((var, expr))
    }

    fn action_label(&mut self) -> Result<ActionLabel, ParseError> {
        let name = self.ident()?;
        if *self.peek() != Tok::LParen {
            return Ok(ActionLabel::Act(name));
        }
        self.bump();
        match name.as_str() {
            "install" | "uninstall" => {
                let f = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(if name == "install" {
                    ActionLabel::Install(f)
                } else {
                    ActionLabel::Uninstall(f)
                })
            }
            "replace" => {
                let from = self.ident()?;
                self.expect(Tok::Comma)?;
                let to = self.ident()?;
                self.expect(Tok::RParen)?;
                Ok(ActionLabel::Replace(from, to))
            }
            _ => {
                let arg = if *self.peek() == Tok::LBrace {
                    self.bump();
                    let cond = self.bool_expr()?;
                    self.expect(Tok::RBrace)?;
                    ParamArg::Cond(Box::new(cond))
                } else {
                    let mut names = vec![self.ident()?];
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        names.push(self.ident()?);
                    }
                    ParamArg::Names(names)
                };
                self.expect(Tok::RParen)?;
                Ok(ActionLabel::Param { name, arg })
            }
        }
    }

    fn init(&mut self, model: &mut Model) -> Result<Option<String>, ParseError> {
        let mut owner = None;
        while !self.at_keyword("end") {
            let name = self.ident()?;
            self.expect(Tok::Eq)?;
            match name.as_str() {
                "initialProcesses" => {
                    model.init_processes.push(self.ident()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        model.init_processes.push(self.ident()?);
                    }
                }
                _ => {
                    self.expect(Tok::LBrace)?;
                    if !self.at_keyword("end") && *self.peek() != Tok::RBrace {
                        model.init_installed.push(self.ident()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            model.init_installed.push(self.ident()?);
                        }
                    }
                    self.expect(Tok::RBrace)?;
                    if name != "installedFeatures" {
                        owner = Some(name);
                    }
                }
            }
        }
        Ok(owner)
    }

    // ---- analysis ----------------------------------------------------

    fn analysis_body(&mut self) -> Result<QuerySpec, ParseError> {
        self.keyword("query")?;
        self.expect(Tok::Eq)?;
        let kind_span = self.span();
        let kind = if self.at_keyword("when") {
            self.bump();
            QueryKind::When(self.bool_expr()?)
        } else if self.at_keyword("eval") {
            self.bump();
            self.keyword("from")?;
            let from = self.number()?;
            self.keyword("to")?;
            let to = self.number()?;
            self.keyword("by")?;
            let by = self.number()?;
            let as_int = |r: &Rat| -> Option<i64> {
                use num::ToPrimitive;
                if r.is_integer() {
                    r.numer().to_i64()
                } else {
                    None
                }
            };
            let (from, to, by) = match (as_int(&from), as_int(&to), as_int(&by)) {
                (Some(f), Some(t), Some(b)) => (f, t, b),
                _ => {
                    return Err(ParseError::new(
                        "eval bounds must be integers",
                        kind_span,
                        vec![],
                    ));
                }
            };
            if from > to {
                return Err(ParseError::new(
                    format!("empty eval range: from {from} > to {to}"),
                    kind_span,
                    vec![],
                ));
            }
            if by <= 0 {
                return Err(ParseError::new(
                    format!("eval step must be positive, got {by}"),
                    kind_span,
                    vec![],
                ));
            }
            QueryKind::Eval { from, to, by }
        } else {
            return Err(self.err(
                "expected query kind",
                vec!["`when`".into(), "`eval`".into()],
            ));
        };
        self.expect(Tok::Colon)?;
        self.expect(Tok::LBrace)?;
        let mut properties = vec![self.property()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            properties.push(self.property()?);
        }
        self.expect(Tok::RBrace)?;

        let mut spec = QuerySpec {
            kind,
            properties,
            ..QuerySpec::default()
        };
        loop {
            let span = self.span();
            if self.at_keyword("default") {
                self.bump();
                self.keyword("delta")?;
                self.expect(Tok::Eq)?;
                let d = rat_to_f64(&self.number()?);
                if d <= 0.0 {
                    return Err(ParseError::new(
                        format!("delta must be positive, got {d}"),
                        span,
                        vec![],
                    ));
                }
                spec.delta = d;
            } else if self.at_keyword("alpha") {
                self.bump();
                self.expect(Tok::Eq)?;
                let a = rat_to_f64(&self.number()?);
                if !(a > 0.0 && a < 1.0) {
                    return Err(ParseError::new(
                        format!("alpha must lie strictly between 0 and 1, got {a}"),
                        span,
                        vec![],
                    ));
                }
                spec.alpha = a;
            } else if self.at_keyword("parallelism") {
                self.bump();
                self.expect(Tok::Eq)?;
                let p = rat_to_f64(&self.number()?) as usize;
                spec.parallelism = p.max(1);
            } else if self.at_keyword("logs") {
                self.bump();
                self.expect(Tok::Eq)?;
                match self.peek() {
                    Tok::Str(s) => {
                        spec.logs = Some(s.clone());
                        self.bump();
                    }
                    _ => return Err(self.err("expected log path", vec!["string".into()])),
                }
            } else {
                break;
            }
        }
        Ok(spec)
    }

    fn property(&mut self) -> Result<Property, ParseError> {
        let expr = self.arith_expr()?;
        let expr = match expr {
            ArithExpr::Var(name) => PropertyExpr::Name(name),
            other => PropertyExpr::Expr(other),
        };
        let mut delta = None;
        if *self.peek() == Tok::LBracket {
            let span = self.span();
            self.bump();
            self.keyword("delta")?;
            self.expect(Tok::Eq)?;
            let d = rat_to_f64(&self.number()?);
            if d <= 0.0 {
                return Err(ParseError::new(
                    format!("delta must be positive, got {d}"),
                    span,
                    vec![],
                ));
            }
            delta = Some(d);
            self.expect(Tok::RBracket)?;
        }
        Ok(Property { expr, delta })
    }

    // ---- expressions -------------------------------------------------

    fn bool_expr(&mut self) -> Result<BoolExpr, ParseError> {
        let mut left = self.bool_and()?;
        while self.at_keyword("or") {
            self.bump();
            let right = self.bool_and()?;
            left = BoolExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn bool_and(&mut self) -> Result<BoolExpr, ParseError> {
        let mut left = self.bool_primary()?;
        while self.at_keyword("and") {
            self.bump();
            let right = self.bool_primary()?;
            left = BoolExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn bool_primary(&mut self) -> Result<BoolExpr, ParseError> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(BoolExpr::Not(Box::new(self.bool_primary()?)));
        }
        if self.at_keyword("has") && *self.peek2() == Tok::LParen {
            self.bump();
            self.bump();
            let name = self.ident()?;
            self.expect(Tok::RParen)?;
            return Ok(BoolExpr::Has(name));
        }
        // A parenthesis may open either a boolean group or an arithmetic
        // subexpression of a comparison; try the boolean reading first and
        // backtrack on failure.
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            if let Ok(inner) = self.bool_expr() {
                if self.expect(Tok::RParen).is_ok() {
                    return Ok(inner);
                }
            }
            self.pos = save;
        }
        let left = self.arith_expr()?;
        let op = match self.peek() {
            Tok::Lt => Some(CmpOp::Lt),
            Tok::Le => Some(CmpOp::Le),
            Tok::EqEq => Some(CmpOp::Eq),
            Tok::Ne => Some(CmpOp::Ne),
            Tok::Ge => Some(CmpOp::Ge),
            Tok::Gt => Some(CmpOp::Gt),
            _ => None,
        };
        match op {
            Some(op) => {
                self.bump();
                let right = self.arith_expr()?;
                Ok(BoolExpr::Cmp { left, op, right })
            }
            None => match left {
                // A bare `name(Arg)` in boolean position is a predicate.
                ArithExpr::AttrSum { attr, feature } => Ok(BoolExpr::Pred {
                    name: attr,
                    arg: feature,
                }),
                _ => Err(self.err(
                    "expected comparison operator",
                    vec!["`<`".into(), "`<=`".into(), "`==`".into(), "`!=`".into()],
                )),
            },
        }
    }

    fn arith_expr(&mut self) -> Result<ArithExpr, ParseError> {
        let mut left = self.arith_term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => ArithOp::Add,
                Tok::Minus => ArithOp::Sub,
                _ => break,
            };
            self.bump();
            let right = self.arith_term()?;
            left = ArithExpr::Bin {
                op,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn arith_term(&mut self) -> Result<ArithExpr, ParseError> {
        let mut left = self.arith_factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => ArithOp::Mul,
                Tok::Slash => ArithOp::Div,
                _ => break,
            };
            self.bump();
            let right = self.arith_factor()?;
            left = ArithExpr::Bin {
                op,
                left: Box::new(left),
                right: Box::new(right),
            };
        }
        Ok(left)
    }

    fn arith_factor(&mut self) -> Result<ArithExpr, ParseError> {
        match self.peek().clone() {
            Tok::Number(_) | Tok::Minus => Ok(ArithExpr::Const(self.number()?)),
            Tok::LParen => {
                self.bump();
                let inner = self.arith_expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    let feature = self.ident()?;
                    self.expect(Tok::RParen)?;
                    Ok(ArithExpr::AttrSum {
                        attr: name,
                        feature,
                    })
                } else {
                    Ok(ArithExpr::Var(name))
                }
            }
            _ => Err(self.err(
                "expected expression",
                vec!["number".into(), "identifier".into(), "`(`".into()],
            )),
        }
    }
}

/// Post-parse derivations: the root feature, abstract/concrete kinds, and the
/// default process start list.
fn finalize(model: &mut Model, init_owner: Option<String>) {
    for i in 0..model.features.feats.len() {
        model.features.feats[i].kind = if model.features.feats[i].children.is_empty() {
            FeatureKind::Concrete
        } else {
            FeatureKind::Abstract
        };
    }
    model.features.root = model.features.feats.iter().position(|f| f.parent.is_none());
    if model.init_processes.is_empty() {
        match init_owner {
            Some(name) if model.process(&name).is_some() => model.init_processes.push(name),
            _ => {
                model.init_processes = model.processes.iter().map(|p| p.name.clone()).collect();
            }
        }
    }
}
