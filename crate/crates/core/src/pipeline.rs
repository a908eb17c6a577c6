//! End-to-end orchestration: estimation with log emission, mining, graph
//! reconstruction, diffing, and the run manifest.

use crate::eventlog::{encode_activity, EventLogWriter, LogError};
use crate::graphdiff::{
    diff, graph_to_dot, mined_graph, spec_graph, to_dot, DecodeError, DiffResult,
};
use crate::miner::{discover, hn_to_dot, MinerParams};
use crate::model::Model;
use crate::smc::{EstimateError, EstimateOptions, EstimationResult, QuerySpec};
use serde::Serialize;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Log(#[from] LogError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("{0}")]
    Msg(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct StageTiming {
    pub stage: String,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub model: String,
    pub analysis: usize,
    pub seed: u64,
    pub out_dir: String,
    pub artifacts: Vec<String>,
    pub stages: Vec<StageTiming>,
    pub simulations: u64,
    pub miss_rate: f64,
    pub spec_only: usize,
    pub mined_only: usize,
    pub warnings: Vec<String>,
    pub failed_stage: Option<String>,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub analysis: usize,
    pub seed: u64,
    /// Force at least this many simulations, beyond what the stopping rule
    /// needs.
    pub min_sims: Option<u64>,
    pub estimate: EstimateOptions,
    pub miner: MinerParams,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            analysis: 0,
            seed: 42,
            min_sims: None,
            estimate: EstimateOptions::default(),
            miner: MinerParams::default(),
        }
    }
}

pub struct AnalysisOutput {
    pub report: EstimationResult,
    /// Encoded activity traces, one per simulation in index order.
    pub traces: Vec<Vec<String>>,
    pub events_path: PathBuf,
}

pub fn select_query(model: &Model, index: usize) -> Result<&QuerySpec, PipelineError> {
    model.analyses.get(index).ok_or_else(|| {
        PipelineError::Msg(format!(
            "analysis index {index} out of range: model declares {}",
            model.analyses.len()
        ))
    })
}

pub fn report_csv(report: &EstimationResult) -> String {
    let mut out = String::from("depth,property,mean,ciHalfWidth,n,delta\n");
    for row in &report.rows {
        let depth = row.depth.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{depth},{},{:.6},{:.6},{},{}\n",
            row.property, row.mean, row.half_width, row.n, row.delta
        ));
    }
    out
}

/// Runs the estimation stage: simulations stream into `events.csv`, the
/// estimate lands in `report.csv`, and the encoded traces are returned for
/// mining.
pub fn run_analysis(
    model: &Model,
    out_dir: &Path,
    po: &PipelineOptions,
) -> Result<AnalysisOutput, PipelineError> {
    fs::create_dir_all(out_dir)?;
    let query = select_query(model, po.analysis)?;
    let mut opts = po.estimate;
    if let Some(n) = po.min_sims {
        opts.min_sims = opts.min_sims.max(n);
    }
    let log_name = query.logs.clone().unwrap_or_else(|| "events.csv".into());
    let events_path = out_dir.join(log_name);
    let mut writer = Some(EventLogWriter::create(&events_path)?);
    let mut traces: Vec<Vec<String>> = Vec::new();
    let mut log_err: Option<LogError> = None;
    let report = {
        let mut sink = |outcome: &crate::sim::SimOutcome| {
            if let Some(w) = writer.as_mut() {
                if let Err(e) = w.write_outcome(outcome) {
                    log_err.get_or_insert(e);
                }
            }
            traces.push(
                outcome
                    .records
                    .iter()
                    .map(|r| encode_activity(&r.action, &r.source, &r.target))
                    .collect(),
            );
        };
        crate::smc::estimate(model, query, po.seed, &opts, Some(&mut sink))?
    };
    if let Some(e) = log_err {
        // Partial log is useless; remove it before surfacing the failure.
        let _ = fs::remove_file(&events_path);
        return Err(e.into());
    }
    writer.take().unwrap().finish()?;
    fs::write(out_dir.join("report.csv"), report_csv(&report))?;
    Ok(AnalysisOutput {
        report,
        traces,
        events_path,
    })
}

pub struct PipelineOutcome {
    pub manifest: RunManifest,
    pub report: EstimationResult,
    pub diff: DiffResult,
}

/// Full pipeline: analyze, mine, reconstruct, diff, manifest. On failure the
/// manifest is still written, naming the failed stage, and artifacts
/// produced so far are kept.
pub fn run_pipeline(
    model: &Model,
    model_path: &str,
    out_dir: &Path,
    po: &PipelineOptions,
) -> Result<PipelineOutcome, PipelineError> {
    fs::create_dir_all(out_dir)?;
    let mut manifest = RunManifest {
        model: model_path.to_string(),
        analysis: po.analysis,
        seed: po.seed,
        out_dir: out_dir.display().to_string(),
        artifacts: Vec::new(),
        stages: Vec::new(),
        simulations: 0,
        miss_rate: 0.0,
        spec_only: 0,
        mined_only: 0,
        warnings: Vec::new(),
        failed_stage: None,
    };

    macro_rules! stage {
        ($name:expr, $body:expr) => {{
            let start = Instant::now();
            let result = $body;
            manifest.stages.push(StageTiming {
                stage: $name.to_string(),
                millis: start.elapsed().as_millis(),
            });
            match result {
                Ok(v) => v,
                Err(e) => {
                    manifest.failed_stage = Some($name.to_string());
                    write_manifest(out_dir, &manifest)?;
                    return Err(e.into());
                }
            }
        }};
    }

    let analysis = stage!("smc", run_analysis(model, out_dir, po));
    manifest.simulations = analysis.report.simulations;
    manifest.miss_rate = analysis.report.miss_rate;
    manifest
        .artifacts
        .push(analysis.events_path.display().to_string());
    manifest
        .artifacts
        .push(out_dir.join("report.csv").display().to_string());

    let net = stage!(
        "mine",
        Ok::<_, PipelineError>(discover(&analysis.traces, &po.miner))
    );
    let spec = spec_graph(model);
    let mined = stage!("reconstruct", mined_graph(&net));
    let d = stage!("diff", Ok::<_, PipelineError>(diff(&spec, &mined)));

    stage!("export", {
        let write = |name: &str, text: String| -> Result<PathBuf, PipelineError> {
            let path = out_dir.join(name);
            fs::write(&path, text)?;
            Ok(path)
        };
        let result: Result<Vec<PathBuf>, PipelineError> = (|| {
            Ok(vec![
                write("spec.dot", graph_to_dot(&spec))?,
                write("mined.dot", graph_to_dot(&mined))?,
                write("hn.dot", hn_to_dot(&net))?,
                write("diff.dot", to_dot(&d))?,
            ])
        })();
        result.map(|paths| {
            for p in paths {
                manifest.artifacts.push(p.display().to_string());
            }
        })
    });

    manifest.spec_only = d.spec_only().len();
    manifest.mined_only = d.mined_only().len();

    let smc_ms = manifest
        .stages
        .iter()
        .find(|s| s.stage == "smc")
        .map(|s| s.millis)
        .unwrap_or(0);
    let post_ms: u128 = manifest
        .stages
        .iter()
        .filter(|s| s.stage != "smc")
        .map(|s| s.millis)
        .sum();
    if smc_ms > 0 && post_ms > 5 * smc_ms {
        manifest.warnings.push(format!(
            "post-analysis stages took {post_ms} ms, more than 5x the {smc_ms} ms analysis stage"
        ));
    }

    write_manifest(out_dir, &manifest)?;
    Ok(PipelineOutcome {
        manifest,
        report: analysis.report,
        diff: d,
    })
}

fn write_manifest(out_dir: &Path, manifest: &RunManifest) -> Result<(), io::Error> {
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    fs::write(out_dir.join("manifest.json"), json)
}
