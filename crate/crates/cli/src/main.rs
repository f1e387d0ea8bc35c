//! `strongmatch` command-line tool.
//!
//! Exit codes: 0 success, 1 a bound or feasibility check failed, 2 usage,
//! input or config error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use strongmatch::experiments::{
    run_experiment, with_threads, ChernoffConfig, ExperimentConfig, ExperimentReport, GeneratorSpec,
};
use strongmatch::io::{load_graph, save_graph};
use strongmatch::matching::{greedy_k_strong, max_k_strong_exact, BoundsReport, DEFAULT_BUDGET};
use strongmatch::random_graphs::{validate_model, EdgeProbModel};
use strongmatch::weights::{min_weight_max_k_strong, sample_weights, WeightAssignment, WeightModel};
use strongmatch::{Graph, Matching};

#[derive(Parser)]
#[command(name = "strongmatch", version, about = "k-strong matchings, bounds and random-graph experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Path,
    Cycle,
    Complete,
    Star,
    Chords,
}

#[derive(Subcommand)]
enum Command {
    /// Sample or build a graph and save it (.json or edge list).
    Gen {
        #[arg(long)]
        n: usize,
        /// Edge-probability model file.
        #[arg(long, conflicts_with_all = ["p", "family"])]
        model: Option<PathBuf>,
        /// Homogeneous edge probability.
        #[arg(long, conflicts_with = "family")]
        p: Option<f64>,
        #[arg(long, value_enum)]
        family: Option<Family>,
        /// Chord count for `--family chords`.
        #[arg(long, default_value_t = 0)]
        chords: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximum k-strong matching size and witness.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// Min-degree greedy instead of the exact search.
        #[arg(long)]
        greedy: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Neighbourhood lower and upper bounds on the k-strong matching number.
    Bounds {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Minimum weight of a maximum k-strong matching for one weight draw.
    Mweight {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        /// JSON array of weights indexed by edge id.
        #[arg(long, conflicts_with = "model", required_unless_present = "model")]
        weights: Option<PathBuf>,
        /// Weight model file; weights are sampled with `--seed`.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Run a weight experiment config.
    ExpWeight(ExpArgs),
    /// Run a scaling experiment config.
    ExpScaling(ExpArgs),
    /// Exact binomial tails against the Chernoff bound.
    ExpChernoff {
        #[arg(long, conflicts_with_all = ["l", "p", "eps"])]
        config: Option<PathBuf>,
        #[arg(long = "L", required_unless_present = "config")]
        l: Option<u64>,
        #[arg(long, required_unless_present = "config")]
        p: Option<f64>,
        #[arg(long, required_unless_present = "config")]
        eps: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        mc_trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exponents and feasibility of an edge-probability model at size n.
    ValidateModel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(clap::Args)]
struct ExpArgs {
    #[arg(long)]
    config: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(clap::Args)]
struct OutputArgs {
    /// CSV destination; defaults to the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write records and the summary as JSON lines.
    #[arg(long)]
    jsonl: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

enum Outcome {
    Pass,
    VerdictFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::VerdictFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON value"));
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load(path: &Path) -> Result<Graph> {
    load_graph(path).with_context(|| format!("loading graph {}", path.display()))
}

fn witness_json(g: &Graph, m: &Matching) -> serde_json::Value {
    let ids: Vec<usize> = m.edge_ids().iter().map(|e| e.0).collect();
    let edges: Vec<[usize; 2]> = ids.iter().map(|&i| g.edges()[i]).map(|(u, v)| [u, v]).collect();
    json!({ "edge_ids": ids, "edges": edges })
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Gen { n, model, p, family, chords, seed, out } => {
            let spec = match (model, p, family) {
                (Some(path), _, _) => GeneratorSpec::Model { model: read_json::<EdgeProbModel>(&path)?, n },
                (_, Some(p), _) => GeneratorSpec::Gnp { n, p },
                (_, _, Some(Family::Path)) => GeneratorSpec::Path { n },
                (_, _, Some(Family::Cycle)) => GeneratorSpec::Cycle { n },
                (_, _, Some(Family::Complete)) => GeneratorSpec::Complete { n },
                (_, _, Some(Family::Star)) => GeneratorSpec::Star { leaves: n.saturating_sub(1) },
                (_, _, Some(Family::Chords)) => GeneratorSpec::CycleWithChords { n, chords },
                (None, None, None) => bail!("one of --model, --p or --family is required"),
            };
            let g = spec.build(seed)?;
            save_graph(&g, &out)?;
            print_json(&json!({ "n": g.vertex_count(), "m": g.edge_count(), "seed": seed, "out": out }));
            Ok(Outcome::Pass)
        }
        Command::Solve { graph, k, greedy, budget } => {
            let g = load(&graph)?;
            let (size, m, method) = if greedy {
                let (s, m) = greedy_k_strong(&g, k)?;
                (s, m, "greedy")
            } else {
                let (s, m) = max_k_strong_exact(&g, k, budget)?;
                (s, m, "exact")
            };
            print_json(&json!({ "k": k, "method": method, "size": size, "witness": witness_json(&g, &m) }));
            Ok(Outcome::Pass)
        }
        Command::Bounds { graph, k } => {
            let g = load(&graph)?;
            let report = BoundsReport::compute(&g, k)?;
            let mut v = serde_json::to_value(report)?;
            v["nu_avg_lower_ceil"] = report.nu_avg_lower.ceil().to_string().into();
            v["nu_maxdeg_lower_ceil"] = report.nu_maxdeg_lower.ceil().to_string().into();
            print_json(&v);
            Ok(Outcome::Pass)
        }
        Command::Mweight { graph, k, weights, model, seed, budget } => {
            let g = load(&graph)?;
            let w = match (weights, model) {
                (Some(path), _) => {
                    WeightAssignment { weights: read_json::<Vec<f64>>(&path)?, seed, trial: 0 }
                }
                (None, Some(path)) => sample_weights(&g, &read_json::<WeightModel>(&path)?, seed)?,
                (None, None) => unreachable!("clap requires one of --weights, --model"),
            };
            let (value, m) = min_weight_max_k_strong(&g, &w, k, budget)?;
            print_json(&json!({
                "k": k, "value": value, "size": m.size(), "seed": seed, "witness": witness_json(&g, &m),
            }));
            Ok(Outcome::Pass)
        }
        Command::ExpWeight(args) => run_config(&args.config, "weight", args.output),
        Command::ExpScaling(args) => run_config(&args.config, "scaling", args.output),
        Command::ExpChernoff { config: Some(path), output, .. } => run_config(&path, "chernoff", output),
        Command::ExpChernoff { config: None, l, p, eps, mc_trials, seed, output } => {
            let cfg = ExperimentConfig::Chernoff(ChernoffConfig {
                l: vec![l.expect("required")],
                p: vec![p.expect("required")],
                eps: vec![eps.expect("required")],
                mc_trials,
                seed,
                output: None,
            });
            execute(&cfg, Path::new("."), output)
        }
        Command::ValidateModel { model, n } => {
            let m: EdgeProbModel = read_json(&model)?;
            let d = validate_model(&m, n)?;
            print_json(&serde_json::to_value(&d)?);
            Ok(if d.feasible { Outcome::Pass } else { Outcome::VerdictFailed })
        }
    }
}

fn run_config(path: &Path, expected: &str, output: OutputArgs) -> Result<Outcome> {
    let cfg = ExperimentConfig::load(path).with_context(|| format!("config {}", path.display()))?;
    let kind = match cfg {
        ExperimentConfig::Weight(_) => "weight",
        ExperimentConfig::Scaling(_) => "scaling",
        ExperimentConfig::Chernoff(_) => "chernoff",
    };
    if kind != expected {
        bail!("config {}: field `kind` is \"{kind}\", expected \"{expected}\"", path.display());
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let output = OutputArgs { out: output.out.or_else(|| cfg.output().map(|p| base.join(p))), ..output };
    execute(&cfg, base, output)
}

fn execute(cfg: &ExperimentConfig, base: &Path, output: OutputArgs) -> Result<Outcome> {
    let start = Instant::now();
    let report = with_threads(output.threads, || run_experiment(cfg, base))?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut summary = report.summary_json();
    summary["passed"] = report.passed().into();
    summary["wall_time_ms"] = wall_time_ms.into();

    if let Some(path) = &output.jsonl {
        write_jsonl(&report, &summary, path)?;
    }
    match &output.out {
        Some(path) => {
            let file = create(path)?;
            report.write_csv(BufWriter::new(file))?;
            summary["csv"] = path.display().to_string().into();
            print_json(&summary);
        }
        None => {
            report.write_csv(std::io::stdout().lock())?;
            eprintln!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    if let ExperimentReport::Weight { records } = &report {
        for r in records.iter().filter(|r| r.error.is_some()) {
            eprintln!("graph {}: {}", r.graph_id, r.error.as_deref().unwrap_or_default());
        }
    }
    Ok(if report.passed() { Outcome::Pass } else { Outcome::VerdictFailed })
}

/// Creates `path`, making missing parent directories first.
fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn write_jsonl(report: &ExperimentReport, summary: &serde_json::Value, path: &Path) -> Result<()> {
    let file = create(path)?;
    let mut w = BufWriter::new(file);
    let records = match serde_json::to_value(report)? {
        serde_json::Value::Object(mut o) => o.remove("records").ok_or_else(|| anyhow!("report without records"))?,
        _ => bail!("unexpected report shape"),
    };
    for r in records.as_array().into_iter().flatten() {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    serde_json::to_writer(&mut w, &json!({ "summary": summary }))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
