//! Statistical estimation of query properties with Student-t
//! confidence-interval stopping.

use crate::eval::{eval_arith, EvalError};
use crate::expr::{ArithExpr, BoolExpr};
use crate::model::{Configuration, Model};
use crate::rat::rat_to_f64;
use crate::sim::{simulate, SimOutcome, StopRule, Terminal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum PropertyExpr {
    /// Bare name resolved at observation time: a variable reads its value, a
    /// feature name reads a presence indicator in {0, 1}.
    Name(String),
    Expr(ArithExpr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub expr: PropertyExpr,
    /// Per-property half-width target overriding the query default.
    pub delta: Option<f64>,
}

impl Property {
    pub fn name(&self) -> String {
        match &self.expr {
            PropertyExpr::Name(n) => n.clone(),
            PropertyExpr::Expr(e) => e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryKind {
    /// Observe at the first state satisfying the condition.
    When(BoolExpr),
    /// Observe at fixed step depths `from, from+by, ..., <= to`.
    Eval { from: i64, to: i64, by: i64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuerySpec {
    pub kind: QueryKind,
    pub properties: Vec<Property>,
    pub delta: f64,
    pub alpha: f64,
    pub parallelism: usize,
    pub logs: Option<String>,
}

impl Default for QuerySpec {
    fn default() -> Self {
        QuerySpec {
            kind: QueryKind::Eval {
                from: 1,
                to: 1,
                by: 1,
            },
            properties: Vec::new(),
            delta: 0.05,
            alpha: 0.05,
            parallelism: 1,
            logs: None,
        }
    }
}

impl QueryKind {
    pub fn depths(&self) -> Vec<i64> {
        match self {
            QueryKind::When(_) => vec![],
            QueryKind::Eval { from, to, by } => (*from..=*to).step_by(*by as usize).collect(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EstimateError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("property `{0}` is neither a variable nor a feature")]
    UnknownProperty(String),
}

#[derive(Debug, Clone, Copy)]
pub struct EstimateOptions {
    /// Simulations added between stopping checks.
    pub batch: u64,
    /// No stopping decision before this many simulations.
    pub min_sims: u64,
    /// Hard cap guarding against unreachable conditions.
    pub max_sims: u64,
    /// Step cap for `when` simulations; hitting it counts as a miss.
    pub when_cap: u64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            batch: 20,
            min_sims: 40,
            max_sims: 1 << 20,
            when_cap: 10_000,
        }
    }
}

/// One estimated cell: a property at a given observation point.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    /// `None` for `when` queries, the step depth for `eval` queries.
    pub depth: Option<i64>,
    pub property: String,
    pub mean: f64,
    pub half_width: f64,
    pub n: u64,
    /// The half-width target this cell was held to.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub rows: Vec<EstimateRow>,
    pub simulations: u64,
    /// Simulations whose `when` condition never held.
    pub misses: u64,
    pub miss_rate: f64,
}

/// Streaming mean and variance.
#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Cell {
    fn add(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn half_width(&self, alpha: f64) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        let var = self.m2 / (self.n - 1) as f64;
        let q = t_quantile(1.0 - alpha / 2.0, (self.n - 1) as f64);
        q * (var / self.n as f64).sqrt()
    }
}

/// Two-sided Student-t quantile, switching to the normal approximation for
/// large degrees of freedom.
pub fn t_quantile(p: f64, df: f64) -> f64 {
    if df > 1000.0 {
        Normal::new(0.0, 1.0).unwrap().inverse_cdf(p)
    } else {
        StudentsT::new(0.0, 1.0, df).unwrap().inverse_cdf(p)
    }
}

fn observe(prop: &Property, model: &Model, cfg: &Configuration) -> Result<f64, EstimateError> {
    match &prop.expr {
        PropertyExpr::Expr(e) => Ok(rat_to_f64(&eval_arith(e, model, cfg)?)),
        PropertyExpr::Name(n) => {
            if let Some(v) = cfg.vars.get(n) {
                return Ok(rat_to_f64(v));
            }
            if let Some(id) = model.features.id(n) {
                return Ok(if model.features.present(id, &cfg.installed) {
                    1.0
                } else {
                    0.0
                });
            }
            Err(EstimateError::UnknownProperty(n.clone()))
        }
    }
}

/// Configuration snapshot at a given step depth of a finished simulation:
/// the initial configuration at depth 0, the post-step state otherwise, with
/// carry-forward past early termination.
fn cfg_at_depth(model: &Model, outcome: &SimOutcome, depth: i64) -> Configuration {
    if depth <= 0 || outcome.records.is_empty() {
        return model.initial_configuration();
    }
    let idx = ((depth as usize).min(outcome.records.len())) - 1;
    let rec = &outcome.records[idx];
    Configuration {
        installed: rec.installed.iter().cloned().collect(),
        vars: rec
            .vars
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
        locus: Default::default(),
    }
}

/// Runs simulations `start .. start + count`, each seeded with
/// `base_seed + index`, preserving index order in the result.
pub fn run_batch(
    model: &Model,
    rule: &StopRule,
    start: u64,
    count: u64,
    base_seed: u64,
    parallelism: usize,
) -> Result<Vec<SimOutcome>, EvalError> {
    let one = |i: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed.wrapping_add(i));
        simulate(model, rule, &mut rng, i)
    };
    #[cfg(feature = "parallel")]
    if parallelism > 1 {
        use rayon::prelude::*;
        return (start..start + count).into_par_iter().map(one).collect();
    }
    let _ = parallelism;
    (start..start + count).map(one).collect()
}

/// Estimates all properties of the query, adding simulations in batches
/// until every cell's interval is within its half-width target. Every
/// property shares the same simulation set. For `when` queries,
/// simulations that never reach the condition are excluded from the cells
/// and reported through the miss rate. `sink` sees every simulation once,
/// in index order.
pub fn estimate(
    model: &Model,
    spec: &QuerySpec,
    base_seed: u64,
    opts: &EstimateOptions,
    mut sink: Option<&mut dyn FnMut(&SimOutcome)>,
) -> Result<EstimationResult, EstimateError> {
    let depths = spec.kind.depths();
    let rule = match &spec.kind {
        QueryKind::When(cond) => StopRule::Until {
            cond,
            cap: opts.when_cap,
        },
        QueryKind::Eval { to, .. } => StopRule::MaxSteps((*to).max(0) as u64),
    };
    // One cell per (observation point, property).
    let points = depths.len().max(1);
    let mut cells = vec![Cell::default(); points * spec.properties.len()];
    let mut sims = 0u64;
    let mut misses = 0u64;

    loop {
        let count = if sims == 0 {
            opts.min_sims.max(opts.batch)
        } else {
            opts.batch
        };
        let count = count.min(opts.max_sims - sims);
        if count == 0 {
            break;
        }
        let outcomes = run_batch(model, &rule, sims, count, base_seed, spec.parallelism)?;
        sims += count;
        for outcome in &outcomes {
            if let Some(sink) = sink.as_mut() {
                sink(outcome);
            }
            match &spec.kind {
                QueryKind::When(_) => {
                    if outcome.terminal != Terminal::ConditionMet {
                        misses += 1;
                        continue;
                    }
                    for (pi, prop) in spec.properties.iter().enumerate() {
                        let x = observe(prop, model, &outcome.final_cfg)?;
                        cells[pi].add(x);
                    }
                }
                QueryKind::Eval { .. } => {
                    for (di, &d) in depths.iter().enumerate() {
                        let cfg = cfg_at_depth(model, outcome, d);
                        for (pi, prop) in spec.properties.iter().enumerate() {
                            let x = observe(prop, model, &cfg)?;
                            cells[di * spec.properties.len() + pi].add(x);
                        }
                    }
                }
            }
        }
        if sims >= opts.min_sims {
            let done = cells.iter().enumerate().all(|(ci, cell)| {
                let pi = ci % spec.properties.len();
                let target = spec.properties[pi].delta.unwrap_or(spec.delta);
                cell.n >= 2 && 2.0 * cell.half_width(spec.alpha) <= target
            });
            if done {
                break;
            }
        }
    }

    let mut rows = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let pi = ci % spec.properties.len();
        let depth = if depths.is_empty() {
            None
        } else {
            Some(depths[ci / spec.properties.len()])
        };
        rows.push(EstimateRow {
            depth,
            property: spec.properties[pi].name(),
            mean: cell.mean,
            half_width: cell.half_width(spec.alpha),
            n: cell.n,
            delta: spec.properties[pi].delta.unwrap_or(spec.delta),
        });
    }
    Ok(EstimationResult {
        rows,
        simulations: sims,
        misses,
        miss_rate: if sims == 0 {
            0.0
        } else {
            misses as f64 / sims as f64
        },
    })
}

/// Reconstructs a configuration from a step record's snapshot columns, for
/// callers that analyze logs rather than live simulations.
pub fn record_configuration(record: &crate::sim::StepRecord) -> Configuration {
    Configuration {
        installed: record.installed.iter().cloned().collect(),
        vars: record
            .vars
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
        locus: Default::default(),
    }
}
