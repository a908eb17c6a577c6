//! Expression evaluation, constraint satisfaction, and action admissibility
//! against a configuration.

use crate::expr::{ArithExpr, ArithOp, BoolExpr, CmpOp};
use crate::model::{ActionLabel, Configuration, CrossTreeKind, Model};
use crate::rat::Rat;
use num::Zero;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("unsupported predicate `{0}`")]
    UnsupportedPredicate(String),
}

pub fn eval_arith(expr: &ArithExpr, model: &Model, cfg: &Configuration) -> Result<Rat, EvalError> {
    match expr {
        ArithExpr::Const(r) => Ok(r.clone()),
        ArithExpr::Var(name) => cfg
            .vars
            .get(name)
            .cloned()
            .ok_or_else(|| EvalError::UnknownVariable(name.clone())),
        ArithExpr::AttrSum { attr, feature } => model
            .attribute_sum(cfg, attr, feature)
            .map_err(|_| EvalError::UnknownFeature(feature.clone())),
        ArithExpr::Bin { op, left, right } => {
            let l = eval_arith(left, model, cfg)?;
            let r = eval_arith(right, model, cfg)?;
            Ok(match op {
                ArithOp::Add => l + r,
                ArithOp::Sub => l - r,
                ArithOp::Mul => l * r,
                ArithOp::Div => {
                    if r.is_zero() {
                        return Err(EvalError::DivisionByZero);
                    }
                    l / r
                }
            })
        }
    }
}

pub fn eval_bool(expr: &BoolExpr, model: &Model, cfg: &Configuration) -> Result<bool, EvalError> {
    match expr {
        BoolExpr::Cmp { left, op, right } => {
            let l = eval_arith(left, model, cfg)?;
            let r = eval_arith(right, model, cfg)?;
            Ok(match op {
                CmpOp::Lt => l < r,
                CmpOp::Le => l <= r,
                CmpOp::Eq => l == r,
                CmpOp::Ne => l != r,
                CmpOp::Ge => l >= r,
                CmpOp::Gt => l > r,
            })
        }
        BoolExpr::Has(name) => {
            let id = model
                .features
                .id(name)
                .ok_or_else(|| EvalError::UnknownFeature(name.clone()))?;
            Ok(model.features.present(id, &cfg.installed))
        }
        BoolExpr::Not(inner) => Ok(!eval_bool(inner, model, cfg)?),
        BoolExpr::And(l, r) => Ok(eval_bool(l, model, cfg)? && eval_bool(r, model, cfg)?),
        BoolExpr::Or(l, r) => Ok(eval_bool(l, model, cfg)? || eval_bool(r, model, cfg)?),
        BoolExpr::Pred { name, .. } => Err(EvalError::UnsupportedPredicate(name.clone())),
    }
}

/// True iff the configuration satisfies every quantitative constraint, no
/// excludes pair is co-present, every requires of an installed feature holds,
/// and every xor group has at most one present member.
pub fn config_admissible(model: &Model, cfg: &Configuration) -> Result<bool, EvalError> {
    for q in &model.quant_constraints {
        if !eval_bool(q, model, cfg)? {
            return Ok(false);
        }
    }
    for c in &model.cross_tree {
        let lhs = present(model, &c.lhs, cfg)?;
        let rhs = present(model, &c.rhs, cfg)?;
        match c.kind {
            CrossTreeKind::Requires => {
                if lhs && !rhs {
                    return Ok(false);
                }
            }
            CrossTreeKind::Excludes => {
                if lhs && rhs {
                    return Ok(false);
                }
            }
        }
    }
    for group in model.features.xor_groups() {
        let installed = group
            .iter()
            .filter(|&&id| model.features.present(id, &cfg.installed))
            .count();
        if installed > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn present(model: &Model, name: &str, cfg: &Configuration) -> Result<bool, EvalError> {
    let id = model
        .features
        .id(name)
        .ok_or_else(|| EvalError::UnknownFeature(name.to_string()))?;
    Ok(model.features.present(id, &cfg.installed))
}

/// Applies the feature-set change of a reconfiguration action, without
/// judging admissibility. Returns `None` when the action's precondition on
/// the current set fails (installing an installed feature, uninstalling or
/// replacing an absent one).
pub fn feature_delta(cfg: &Configuration, label: &ActionLabel) -> Option<Configuration> {
    match label {
        ActionLabel::Install(f) => {
            if cfg.installed.contains(f) {
                return None;
            }
            let mut next = cfg.clone();
            next.installed.insert(f.clone());
            Some(next)
        }
        ActionLabel::Uninstall(f) => {
            if !cfg.installed.contains(f) {
                return None;
            }
            let mut next = cfg.clone();
            next.installed.remove(f);
            Some(next)
        }
        ActionLabel::Replace(from, to) => {
            // Atomic: judged on the configuration with `from` removed and
            // `to` added in one step.
            if !cfg.installed.contains(from) || cfg.installed.contains(to) {
                return None;
            }
            let mut next = cfg.clone();
            next.installed.remove(from);
            next.installed.insert(to.clone());
            Some(next)
        }
        ActionLabel::Act(_) | ActionLabel::Param { .. } => Some(cfg.clone()),
    }
}

/// Action admissibility: feature-use labels require the feature present,
/// matching action constraints must hold, and reconfiguration actions must
/// lead to an admissible feature set.
pub fn action_admissible(
    model: &Model,
    cfg: &Configuration,
    label: &ActionLabel,
) -> Result<bool, EvalError> {
    match label {
        ActionLabel::Act(name) => {
            if model.features.id(name).is_some() && !present(model, name, cfg)? {
                return Ok(false);
            }
            for ac in &model.action_constraints {
                if ac.action == *name && !eval_bool(&ac.cond, model, cfg)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        ActionLabel::Install(_) | ActionLabel::Uninstall(_) | ActionLabel::Replace(..) => {
            match feature_delta(cfg, label) {
                Some(next) => config_admissible(model, &next),
                None => Ok(false),
            }
        }
        // No reconfiguration semantics; treated as a plain enabled action.
        ActionLabel::Param { .. } => Ok(true),
    }
}

/// Applies an ordered effect list with immediate visibility: each assignment
/// sees the updates of the assignments before it.
pub fn apply_effects(
    model: &Model,
    cfg: &mut Configuration,
    effects: &[(String, ArithExpr)],
) -> Result<(), EvalError> {
    for (var, expr) in effects {
        let value = eval_arith(expr, model, cfg)?;
        if !cfg.vars.contains_key(var) {
            return Err(EvalError::UnknownVariable(var.clone()));
        }
        cfg.vars.insert(var.clone(), value);
    }
    Ok(())
}
