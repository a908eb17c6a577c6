//! Probabilistic simulation of a model: constraint-aware transition
//! enabling, weighted choice, and per-step event records.

use crate::eval::{
    action_admissible, apply_effects, config_admissible, eval_bool, feature_delta, EvalError,
};
use crate::expr::BoolExpr;
use crate::model::{Configuration, Model, Transition};
use crate::rat::{rat_to_f64, Rat};
use num::Zero;
use rand::Rng;

/// One executed step, snapshotting the configuration after the step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub step: u64,
    pub case_id: u64,
    pub action: String,
    pub source: String,
    pub target: String,
    pub installed: Vec<String>,
    pub vars: Vec<(String, Rat)>,
}

pub const DEADLOCK_LABEL: &str = "DEADLOCK";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terminal {
    MaxSteps,
    ConditionMet,
    Deadlock,
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub records: Vec<StepRecord>,
    pub terminal: Terminal,
    pub final_cfg: Configuration,
}

pub enum StopRule<'a> {
    MaxSteps(u64),
    /// Run until the condition holds, giving up after `cap` steps.
    Until {
        cond: &'a BoolExpr,
        cap: u64,
    },
}

/// A transition currently enabled for some process, together with the
/// configuration it leads to (feature delta and effects applied, locus not
/// yet moved). Weight-zero entries are included: they are part of the
/// specified behaviour even though sampling never picks them.
pub struct Enabled<'m> {
    pub process: &'m str,
    pub transition: &'m Transition,
    pub next: Configuration,
}

/// Collects the enabled transitions of every active process: source state
/// matches, the guard holds, the action is admissible, and the post-effect
/// configuration is itself admissible.
pub fn enabled_transitions<'m>(
    model: &'m Model,
    cfg: &Configuration,
) -> Result<Vec<Enabled<'m>>, EvalError> {
    let mut out = Vec::new();
    for p in &model.processes {
        let Some(state) = cfg.locus.get(&p.name) else {
            continue;
        };
        for t in &p.transitions {
            if t.source != *state {
                continue;
            }
            if let Some(g) = &t.guard {
                if !eval_bool(g, model, cfg)? {
                    continue;
                }
            }
            if !action_admissible(model, cfg, &t.action)? {
                continue;
            }
            let Some(mut next) = feature_delta(cfg, &t.action) else {
                continue;
            };
            apply_effects(model, &mut next, &t.effects)?;
            if !config_admissible(model, &next)? {
                continue;
            }
            out.push(Enabled {
                process: &p.name,
                transition: t,
                next,
            });
        }
    }
    Ok(out)
}

/// Picks one enabled transition with probability proportional to weight.
/// Returns `None` when the total weight is zero.
pub fn sample_transition<'a, 'm, R: Rng>(
    enabled: &'a [Enabled<'m>],
    rng: &mut R,
) -> Option<&'a Enabled<'m>> {
    let total: f64 = enabled
        .iter()
        .map(|e| rat_to_f64(&e.transition.weight))
        .sum();
    if total <= 0.0 {
        return None;
    }
    let mut x = rng.random::<f64>() * total;
    for e in enabled {
        let w = rat_to_f64(&e.transition.weight);
        x -= w;
        if x < 0.0 && w > 0.0 {
            return Some(e);
        }
    }
    // Fell off the end through rounding; take the last positive-weight entry.
    enabled
        .iter()
        .rev()
        .find(|e| !e.transition.weight.is_zero())
}

fn snapshot(cfg: &Configuration) -> (Vec<String>, Vec<(String, Rat)>) {
    (
        cfg.installed.iter().cloned().collect(),
        cfg.vars
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
    )
}

/// Runs one simulation from the model's initial configuration.
pub fn simulate<R: Rng>(
    model: &Model,
    rule: &StopRule,
    rng: &mut R,
    case_id: u64,
) -> Result<SimOutcome, EvalError> {
    let mut cfg = model.initial_configuration();
    let mut records = Vec::new();
    let cap = match rule {
        StopRule::MaxSteps(n) => *n,
        StopRule::Until { cap, .. } => *cap,
    };
    if let StopRule::Until { cond, .. } = rule {
        if eval_bool(cond, model, &cfg)? {
            return Ok(SimOutcome {
                records,
                terminal: Terminal::ConditionMet,
                final_cfg: cfg,
            });
        }
    }
    for step in 1..=cap {
        let enabled = enabled_transitions(model, &cfg)?;
        let Some(choice) = sample_transition(&enabled, rng) else {
            // Deadlock: attribute it to the state of the first active
            // process for the event log.
            let state = model
                .init_processes
                .iter()
                .find_map(|p| cfg.locus.get(p))
                .cloned()
                .unwrap_or_else(|| "?".to_string());
            let (installed, vars) = snapshot(&cfg);
            records.push(StepRecord {
                step,
                case_id,
                action: DEADLOCK_LABEL.to_string(),
                source: state,
                target: DEADLOCK_LABEL.to_string(),
                installed,
                vars,
            });
            return Ok(SimOutcome {
                records,
                terminal: Terminal::Deadlock,
                final_cfg: cfg,
            });
        };
        let t = choice.transition;
        let process = choice.process.to_string();
        cfg = choice.next.clone();
        cfg.locus.insert(process, t.target.clone());
        let (installed, vars) = snapshot(&cfg);
        records.push(StepRecord {
            step,
            case_id,
            action: t.action.to_string(),
            source: t.source.clone(),
            target: t.target.clone(),
            installed,
            vars,
        });
        if let StopRule::Until { cond, .. } = rule {
            if eval_bool(cond, model, &cfg)? {
                return Ok(SimOutcome {
                    records,
                    terminal: Terminal::ConditionMet,
                    final_cfg: cfg,
                });
            }
        }
    }
    Ok(SimOutcome {
        records,
        terminal: Terminal::MaxSteps,
        final_cfg: cfg,
    })
}
