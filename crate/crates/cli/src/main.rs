use clap::{Parser, Subcommand};
use plwb_core::eventlog::{preprocess, read_log};
use plwb_core::graphdiff::{diff, mined_graph, spec_graph, to_dot};
use plwb_core::miner::{discover, hn_to_dot, MinerParams};
use plwb_core::pipeline::{run_analysis, run_pipeline, PipelineOptions};
use plwb_core::smc::{EstimateOptions, EstimationResult};
use plwb_core::Model;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "plwb",
    about = "White-box validation of quantitative product-line models",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a model and run static well-formedness checks.
    Validate { model: PathBuf },
    /// Run a fixed number of simulations and write the event log.
    Simulate {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        analysis: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        sims: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the statistical analysis, writing events.csv and report.csv.
    Analyze {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        analysis: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        min_sims: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Mine a heuristics net from a stored event log.
    Mine {
        log: PathBuf,
        #[arg(long, default_value = "hn.dot")]
        out: PathBuf,
    },
    /// Diff the model's specified graph against one mined from a stored log.
    Diff {
        model: PathBuf,
        log: PathBuf,
        #[arg(long, default_value = "diff.dot")]
        out: PathBuf,
    },
    /// Full run: analyze, mine, reconstruct, diff, manifest.
    Pipeline {
        model: PathBuf,
        #[arg(long, default_value_t = 0)]
        analysis: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        min_sims: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load_model(path: &Path) -> Result<Model, ExitCode> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(1)
    })?;
    let name = path.display().to_string();
    let model = plwb_core::parse_model(&text, &name).map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(1)
    })?;
    let diagnostics = model.validate_static();
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("{d}");
        }
        return Err(ExitCode::from(2));
    }
    Ok(model)
}

fn print_report(report: &EstimationResult) {
    println!("depth  property                       mean     ci-half  n");
    for row in &report.rows {
        let depth = row
            .depth
            .map(|d| d.to_string())
            .unwrap_or_else(|| "-".into());
        println!(
            "{depth:<6} {:<30} {:<8.4} {:<8.4} {}",
            row.property, row.mean, row.half_width, row.n
        );
    }
    println!(
        "simulations: {}  miss rate: {:.4}",
        report.simulations, report.miss_rate
    );
}

fn run() -> Result<(), ExitCode> {
    let fail = |msg: String| {
        eprintln!("{msg}");
        ExitCode::from(1)
    };
    match Cli::parse().command {
        Command::Validate { model } => {
            load_model(&model)?;
            println!("ok");
        }
        Command::Simulate {
            model,
            analysis,
            seed,
            sims,
            out,
        } => {
            let m = load_model(&model)?;
            let po = PipelineOptions {
                analysis,
                seed,
                min_sims: Some(sims),
                estimate: EstimateOptions {
                    min_sims: sims,
                    max_sims: sims,
                    ..EstimateOptions::default()
                },
                miner: MinerParams::default(),
            };
            let res = run_analysis(&m, &out, &po).map_err(|e| fail(e.to_string()))?;
            println!(
                "{} simulations written to {}",
                res.report.simulations,
                res.events_path.display()
            );
        }
        Command::Analyze {
            model,
            analysis,
            seed,
            min_sims,
            out,
        } => {
            let m = load_model(&model)?;
            let po = PipelineOptions {
                analysis,
                seed,
                min_sims,
                ..PipelineOptions::default()
            };
            let res = run_analysis(&m, &out, &po).map_err(|e| fail(e.to_string()))?;
            print_report(&res.report);
        }
        Command::Mine { log, out } => {
            let records = read_log(&log).map_err(|e| fail(e.to_string()))?;
            let traces: Vec<Vec<String>> =
                preprocess(&records).into_iter().map(|(_, t)| t).collect();
            if traces.is_empty() {
                return Err(fail("no cases".into()));
            }
            let net = discover(&traces, &MinerParams::default());
            std::fs::write(&out, hn_to_dot(&net)).map_err(|e| fail(e.to_string()))?;
            println!(
                "{} activities, {} edges -> {}",
                net.activity_freq.len(),
                net.edges.len(),
                out.display()
            );
        }
        Command::Diff { model, log, out } => {
            let m = load_model(&model)?;
            let records = read_log(&log).map_err(|e| fail(e.to_string()))?;
            let traces: Vec<Vec<String>> =
                preprocess(&records).into_iter().map(|(_, t)| t).collect();
            if traces.is_empty() {
                return Err(fail("no cases".into()));
            }
            let net = discover(&traces, &MinerParams::default());
            let mined = mined_graph(&net).map_err(|e| fail(e.to_string()))?;
            let d = diff(&spec_graph(&m), &mined);
            std::fs::write(&out, to_dot(&d)).map_err(|e| fail(e.to_string()))?;
            println!(
                "{} specOnly edges, {} minedOnly edges",
                d.spec_only().len(),
                d.mined_only().len()
            );
        }
        Command::Pipeline {
            model,
            analysis,
            seed,
            min_sims,
            out,
        } => {
            let m = load_model(&model)?;
            let po = PipelineOptions {
                analysis,
                seed,
                min_sims,
                ..PipelineOptions::default()
            };
            let name = model.display().to_string();
            let res = run_pipeline(&m, &name, &out, &po).map_err(|e| fail(e.to_string()))?;
            print_report(&res.report);
            println!(
                "{} specOnly edges, {} minedOnly edges",
                res.manifest.spec_only, res.manifest.mined_only
            );
            for w in &res.manifest.warnings {
                eprintln!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}
