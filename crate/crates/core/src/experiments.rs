//! Batch experiments driven by JSON configs.
//!
//! Config schemas (the `kind` field selects one):
//!
//! ```text
//! weight:   {"kind":"weight", "graphs":[GraphSource...], "model":WeightModel,
//!            "k":0, "trials":1000, "seed":1, "budget":50000000?, "output":"w.csv"?}
//! scaling:  {"kind":"scaling", "model":EdgeProbModel, "n_grid":[200,400],
//!            "trials":20, "seed":1, "budget"?, "exact_edge_limit":60?,
//!            "slope_tolerance":0.15?, "output"?}
//! chernoff: {"kind":"chernoff", "l":[100], "p":[0.5], "eps":[0.5],
//!            "mc_trials":10000?, "seed":1, "output"?}
//! GraphSource: {"id":"p4"?, "file":"p4.json"} or {"id"?, "generator":{"kind":"path","n":4}}
//! ```
//!
//! All randomness derives from the config seed. Records are produced in a
//! fixed order regardless of thread count, so CSV output is byte-identical
//! across reruns.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::io::{load_graph, FormatError};
use crate::matching::{greedy_k_strong, k1, max_k_strong_exact, nu_lower_bounds, MatchingError, DEFAULT_BUDGET};
use crate::random_graphs::{
    cycle_with_chords, degree_sum_statistic, min_neighborhood, sample_gnp, sample_graph, validate_model,
    EdgeProbModel, ModelError,
};
use crate::rng::derive_seed;
use crate::stats::{chernoff_check, fit_power_law, median, ChernoffCheck, PowerLawFit, StatsError};
use crate::weights::{mc_weight_stats, WeightModel};

const SALT_GRAPH: u64 = 11;
const SALT_WEIGHTS: u64 = 12;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("model infeasible at n = {n}: {}", reasons.join("; "))]
    InfeasibleModel { n: usize, reasons: Vec<String> },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ExperimentError {
    fn config(field: &str, message: impl Into<String>) -> Self {
        ExperimentError::Config { field: field.to_string(), message: message.into() }
    }
}

/// Deterministic graph families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Path { n: usize },
    Cycle { n: usize },
    Complete { n: usize },
    Star { leaves: usize },
    Gnp { n: usize, p: f64 },
    CycleWithChords { n: usize, chords: usize },
    Model { model: EdgeProbModel, n: usize },
}

impl GeneratorSpec {
    /// `seed` is used only by random families.
    pub fn build(&self, seed: u64) -> Result<Graph, ModelError> {
        Ok(match self {
            GeneratorSpec::Path { n } => Graph::path(*n),
            GeneratorSpec::Cycle { n } => {
                if *n < 3 {
                    return Err(ModelError::InvalidParameter("a cycle needs n >= 3".into()));
                }
                Graph::cycle(*n)
            }
            GeneratorSpec::Complete { n } => Graph::complete(*n),
            GeneratorSpec::Star { leaves } => Graph::star(*leaves),
            GeneratorSpec::Gnp { n, p } => sample_gnp(*n, *p, seed)?,
            GeneratorSpec::CycleWithChords { n, chords } => {
                if *n < 3 {
                    return Err(ModelError::InvalidParameter("a cycle needs n >= 3".into()));
                }
                cycle_with_chords(*n, *chords, seed)
            }
            GeneratorSpec::Model { model, n } => sample_graph(model, *n, seed)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSource {
    File {
        #[serde(default)]
        id: Option<String>,
        file: PathBuf,
    },
    Generator {
        #[serde(default)]
        id: Option<String>,
        generator: GeneratorSpec,
    },
}

impl GraphSource {
    fn id(&self, index: usize) -> String {
        let explicit = match self {
            GraphSource::File { id, .. } | GraphSource::Generator { id, .. } => id.clone(),
        };
        explicit.unwrap_or_else(|| format!("g{index}"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub graphs: Vec<GraphSource>,
    pub model: WeightModel,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub model: EdgeProbModel,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Exact `nu_k` is attempted only for graphs with at most this many edges.
    #[serde(default = "default_exact_edge_limit")]
    pub exact_edge_limit: usize,
    /// When set, fitted slopes must lie within this distance of the exponents.
    #[serde(default)]
    pub slope_tolerance: Option<f64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernoffConfig {
    pub l: Vec<u64>,
    pub p: Vec<f64>,
    pub eps: Vec<f64>,
    #[serde(default = "default_mc_trials")]
    pub mc_trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_exact_edge_limit() -> usize {
    60
}

fn default_mc_trials() -> u64 {
    10_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentConfig {
    Weight(WeightConfig),
    Scaling(ScalingConfig),
    Chernoff(ChernoffConfig),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| {
            let field = if e.is_data() { "<schema>" } else { "<syntax>" };
            ExperimentError::config(field, e.to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        match self {
            ExperimentConfig::Weight(c) => {
                if c.graphs.is_empty() {
                    return Err(ExperimentError::config("graphs", "at least one graph is required"));
                }
                if c.trials < 30 {
                    return Err(ExperimentError::config("trials", format!("need at least 30, got {}", c.trials)));
                }
            }
            ExperimentConfig::Scaling(c) => {
                if c.trials < 1 {
                    return Err(ExperimentError::config("trials", "must be at least 1"));
                }
                if c.n_grid.is_empty() || c.n_grid.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(ExperimentError::config("n_grid", "must be nonempty and strictly increasing"));
                }
                if let Some(t) = c.slope_tolerance {
                    if !(t >= 0.0) {
                        return Err(ExperimentError::config("slope_tolerance", "must be nonnegative"));
                    }
                }
            }
            ExperimentConfig::Chernoff(c) => {
                if c.l.is_empty() || c.p.is_empty() || c.eps.is_empty() {
                    return Err(ExperimentError::config("l/p/eps", "grids must be nonempty"));
                }
                if let Some(e) = c.eps.iter().find(|e| !(**e > 0.0 && **e <= 0.5)) {
                    return Err(ExperimentError::config("eps", format!("{e} is outside (0, 1/2]")));
                }
                if let Some(p) = c.p.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
                    return Err(ExperimentError::config("p", format!("{p} is outside (0, 1]")));
                }
            }
        }
        Ok(())
    }

    pub fn output(&self) -> Option<&Path> {
        match self {
            ExperimentConfig::Weight(c) => c.output.as_deref(),
            ExperimentConfig::Scaling(c) => c.output.as_deref(),
            ExperimentConfig::Chernoff(c) => c.output.as_deref(),
        }
    }
}

/// One CSV row of a weight experiment. The first thirteen columns are the
/// documented schema; later columns were appended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightRecord {
    pub graph_id: String,
    pub k: usize,
    pub model: String,
    pub trials: usize,
    pub seed: u64,
    pub mean: Option<f64>,
    pub var: Option<f64>,
    pub stderr: Option<f64>,
    pub gamma: Option<f64>,
    pub deviation_rate: Option<f64>,
    #[serde(rename = "fitted_C")]
    pub fitted_c: Option<f64>,
    pub verdict_mean: Option<bool>,
    pub verdict_var: Option<bool>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub nu_k: Option<usize>,
    pub max_degree: Option<usize>,
    pub mu: Option<f64>,
    pub mu2: Option<f64>,
    pub var_stderr: Option<f64>,
    pub var_slack: Option<f64>,
    pub deviation_floor: Option<f64>,
    pub verdict_deviation: Option<bool>,
    pub gamma2: Option<f64>,
    pub mean_bad_edges: Option<f64>,
    pub error: Option<String>,
}

impl WeightRecord {
    fn failed(graph_id: String, k: usize, model: String, trials: usize, seed: u64, error: String) -> Self {
        WeightRecord {
            graph_id,
            k,
            model,
            trials,
            seed,
            mean: None,
            var: None,
            stderr: None,
            gamma: None,
            deviation_rate: None,
            fitted_c: None,
            verdict_mean: None,
            verdict_var: None,
            n: None,
            m: None,
            nu_k: None,
            max_degree: None,
            mu: None,
            mu2: None,
            var_stderr: None,
            var_slack: None,
            deviation_floor: None,
            verdict_deviation: None,
            gamma2: None,
            mean_bad_edges: None,
            error: Some(error),
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none()
            && self.verdict_mean == Some(true)
            && self.verdict_var == Some(true)
            && self.verdict_deviation != Some(false)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() { p.to_path_buf() } else { base.join(p) }
}

/// Runs every configured graph. A graph that fails to load or solve yields
/// a record with `error` set instead of aborting the batch.
pub fn run_weight_experiment(cfg: &WeightConfig, base_dir: &Path) -> Vec<WeightRecord> {
    let label = cfg.model.label();
    cfg.graphs
        .iter()
        .enumerate()
        .map(|(i, src)| {
            let id = src.id(i);
            let seed = derive_seed(cfg.seed, SALT_WEIGHTS, i as u64);
            let graph = match src {
                GraphSource::File { file, .. } => load_graph(&resolve(base_dir, file)).map_err(|e| e.to_string()),
                GraphSource::Generator { generator, .. } => generator
                    .build(derive_seed(cfg.seed, SALT_GRAPH, i as u64))
                    .map_err(|e| e.to_string()),
            };
            let g = match graph {
                Ok(g) => g,
                Err(e) => return WeightRecord::failed(id, cfg.k, label.clone(), cfg.trials, seed, e),
            };
            match mc_weight_stats(&g, &cfg.model, cfg.k, cfg.trials, seed, cfg.budget) {
                Ok(s) => WeightRecord {
                    graph_id: id,
                    k: cfg.k,
                    model: label.clone(),
                    trials: cfg.trials,
                    seed,
                    mean: Some(s.mean_mk),
                    var: Some(s.var_mk),
                    stderr: Some(s.stderr_mean),
                    gamma: s.gamma,
                    deviation_rate: s.deviation_rate,
                    fitted_c: Some(s.fitted_c),
                    verdict_mean: Some(s.verdict_mean),
                    verdict_var: Some(s.verdict_var),
                    n: Some(g.vertex_count()),
                    m: Some(s.m),
                    nu_k: Some(s.nu_k),
                    max_degree: Some(s.max_degree),
                    mu: Some(s.mu),
                    mu2: Some(s.mu2),
                    var_stderr: Some(s.var_stderr),
                    var_slack: Some(s.var_slack),
                    deviation_floor: s.deviation_floor,
                    verdict_deviation: s.verdict_deviation,
                    gamma2: s.gamma2_estimate,
                    mean_bad_edges: s.mean_bad_edges,
                    error: None,
                },
                Err(e) => WeightRecord::failed(id, cfg.k, label.clone(), cfg.trials, seed, e.to_string()),
            }
        })
        .collect()
}

/// One sampled graph of a scaling experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub n: usize,
    pub trial: usize,
    /// Reproduces the graph via `sample_graph(model, n, seed)`.
    pub seed: u64,
    pub m: usize,
    pub isolated_edges: usize,
    pub min_degree: usize,
    pub greedy: usize,
    /// Absent above the exact edge limit or when the budget is exhausted.
    pub exact: Option<usize>,
    /// `m^2 / (4 sum_u d_1(u) (d_{k+1}(u) - 1))`; absent when the sum is 0.
    pub avg_degree_stat: Option<f64>,
    /// `n / min_u d_{k1}(u)`; infinite when some vertex is isolated.
    pub upper_stat: f64,
    pub degree_sum: u128,
    pub min_neighborhood: usize,
    /// Both neighbourhood bounds around `exact`; absent unless `exact` is
    /// known and the graph has edges but no isolated edge.
    pub sandwich: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCell {
    pub n: usize,
    pub samples: usize,
    pub median_greedy: f64,
    pub median_exact: Option<f64>,
    pub median_avg_degree_stat: Option<f64>,
    pub median_upper_stat: f64,
    pub median_degree_sum: f64,
    pub samples_with_isolated_edge: usize,
    pub samples_with_isolated_vertex: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitOutcome {
    pub fit: Option<PowerLawFit>,
    pub error: Option<String>,
    /// Exponent the slope is compared against.
    pub target: f64,
    /// `|slope - target| <= tolerance`; absent without a tolerance.
    pub verdict: Option<bool>,
}

impl FitOutcome {
    fn new(points: &[(f64, f64)], target: f64, tolerance: Option<f64>) -> Self {
        match fit_power_law(points) {
            Ok(fit) => FitOutcome {
                verdict: tolerance.map(|t| (fit.slope - target).abs() <= t),
                fit: Some(fit),
                error: None,
                target,
            },
            Err(e) => FitOutcome {
                fit: None,
                error: Some(e.to_string()),
                target,
                verdict: tolerance.map(|_| false),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingSummary {
    pub k: usize,
    pub beta: f64,
    pub theta_low: f64,
    pub theta_up: f64,
    pub k1: usize,
    pub seed: u64,
    pub cells: Vec<ScalingCell>,
    /// Median average-degree statistic against `theta_low`.
    pub lower_fit: FitOutcome,
    /// Median `n / min d_{k1}` against `theta_up`.
    pub upper_fit: FitOutcome,
    /// Median greedy size against `theta_low`; informational.
    pub greedy_fit: FitOutcome,
    /// Slope of `ln(median greedy / n^theta_low)` on `ln ln n`; exploratory.
    pub log_correction_slope: Option<f64>,
    pub sandwich_checked: usize,
    pub sandwich_violations: usize,
    pub sandwich_skipped: usize,
    /// Checked samples whose upper bound was finite (no isolated vertex).
    pub sandwich_upper_finite: usize,
}

impl ScalingSummary {
    pub fn passed(&self) -> bool {
        self.sandwich_violations == 0
            && self.lower_fit.verdict != Some(false)
            && self.upper_fit.verdict != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub records: Vec<ScalingRecord>,
    pub summary: ScalingSummary,
}

fn scaling_sample(cfg: &ScalingConfig, n: usize, trial: usize) -> Result<ScalingRecord, ExperimentError> {
    let k = cfg.model.k;
    let seed = derive_seed(cfg.seed, n as u64, trial as u64);
    let g = sample_graph(&cfg.model, n, seed)?;
    let m = g.edge_count();
    let greedy = if m == 0 { 0 } else { greedy_k_strong(&g, k).map_err(model_err)?.0 };
    let exact = if m == 0 {
        Some(0)
    } else if m <= cfg.exact_edge_limit {
        match max_k_strong_exact(&g, k, cfg.budget) {
            Ok((s, _)) => Some(s),
            Err(MatchingError::BudgetExceeded { .. }) => None,
            Err(e) => return Err(model_err(e)),
        }
    } else {
        None
    };
    let degree_sum = degree_sum_statistic(&g, k);
    let denom = degree_sum - 2 * m as u128;
    let avg_degree_stat = (denom > 0).then(|| (m as f64) * (m as f64) / (4.0 * denom as f64));
    let min_nb = min_neighborhood(&g, k1(k))?;
    let upper_stat = if min_nb == 0 { f64::INFINITY } else { n as f64 / min_nb as f64 };

    let sandwich = match exact {
        Some(nu) if m > 0 && !g.has_isolated_edge() => {
            let lower = nu_lower_bounds(&g, k).map_err(model_err)?;
            let low_ok = lower.nu_avg_lower.ceil() <= nu as u128 && lower.nu_maxdeg_lower.ceil() <= nu as u128;
            let up_ok = min_nb == 0 || nu * min_nb <= n;
            Some(low_ok && up_ok)
        }
        _ => None,
    };

    Ok(ScalingRecord {
        n,
        trial,
        seed,
        m,
        isolated_edges: g.isolated_edge_count(),
        min_degree: g.min_degree(),
        greedy,
        exact,
        avg_degree_stat,
        upper_stat,
        degree_sum,
        min_neighborhood: min_nb,
        sandwich,
    })
}

fn model_err(e: MatchingError) -> ExperimentError {
    ExperimentError::config("model", e.to_string())
}

pub fn run_scaling_experiment(cfg: &ScalingConfig) -> Result<ScalingReport, ExperimentError> {
    let mut diagnostics = None;
    for &n in &cfg.n_grid {
        let d = validate_model(&cfg.model, n)?;
        if !d.feasible {
            return Err(ExperimentError::InfeasibleModel { n, reasons: d.reasons });
        }
        diagnostics.get_or_insert(d);
    }
    let d = diagnostics.expect("n_grid is nonempty");

    let work: Vec<(usize, usize)> =
        cfg.n_grid.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect();
    let run = |&(n, t): &(usize, usize)| scaling_sample(cfg, n, t);
    #[cfg(feature = "parallel")]
    let records: Vec<ScalingRecord> = {
        use rayon::prelude::*;
        work.par_iter().map(run).collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let records: Vec<ScalingRecord> = work.iter().map(run).collect::<Result<_, _>>()?;

    let mut cells = Vec::new();
    for &n in &cfg.n_grid {
        let rs: Vec<&ScalingRecord> = records.iter().filter(|r| r.n == n).collect();
        let col = |f: &dyn Fn(&ScalingRecord) -> f64| median(&rs.iter().map(|r| f(r)).collect::<Vec<_>>());
        let exact: Vec<f64> = rs.iter().filter_map(|r| r.exact.map(|e| e as f64)).collect();
        let avg: Vec<f64> = rs.iter().filter_map(|r| r.avg_degree_stat).collect();
        cells.push(ScalingCell {
            n,
            samples: rs.len(),
            median_greedy: col(&|r| r.greedy as f64),
            median_exact: (exact.len() == rs.len()).then(|| median(&exact)),
            median_avg_degree_stat: (!avg.is_empty()).then(|| median(&avg)),
            median_upper_stat: col(&|r| r.upper_stat),
            median_degree_sum: col(&|r| r.degree_sum as f64),
            samples_with_isolated_edge: rs.iter().filter(|r| r.isolated_edges > 0).count(),
            samples_with_isolated_vertex: rs.iter().filter(|r| r.min_degree == 0).count(),
        });
    }

    let points = |f: &dyn Fn(&ScalingCell) -> Option<f64>| -> Vec<(f64, f64)> {
        cells.iter().map(|c| (c.n as f64, f(c).unwrap_or(f64::NAN))).collect()
    };
    let tol = cfg.slope_tolerance;
    let lower_fit = FitOutcome::new(&points(&|c| c.median_avg_degree_stat), d.theta_low, tol);
    let upper_fit = FitOutcome::new(&points(&|c| Some(c.median_upper_stat)), d.theta_up, tol);
    let greedy_fit = FitOutcome::new(&points(&|c| Some(c.median_greedy)), d.theta_low, None);

    let corrected: Vec<(f64, f64)> = cells
        .iter()
        .filter(|c| c.n >= 3 && c.median_greedy > 0.0)
        .map(|c| {
            let nf = c.n as f64;
            (nf.ln(), c.median_greedy / nf.powf(d.theta_low))
        })
        .collect();
    let log_correction_slope = fit_power_law(&corrected).ok().map(|f| f.slope);

    let checked = records.iter().filter(|r| r.sandwich.is_some()).count();
    let summary = ScalingSummary {
        k: cfg.model.k,
        beta: cfg.model.beta,
        theta_low: d.theta_low,
        theta_up: d.theta_up,
        k1: d.k1,
        seed: cfg.seed,
        cells,
        lower_fit,
        upper_fit,
        greedy_fit,
        log_correction_slope,
        sandwich_checked: checked,
        sandwich_violations: records.iter().filter(|r| r.sandwich == Some(false)).count(),
        sandwich_skipped: records.len() - checked,
        sandwich_upper_finite: records.iter().filter(|r| r.sandwich.is_some() && r.min_neighborhood > 0).count(),
    };
    Ok(ScalingReport { records, summary })
}

/// One exact-versus-bound comparison per `(l, p, eps)` grid point.
pub fn run_chernoff_check(cfg: &ChernoffConfig) -> Result<Vec<ChernoffCheck>, ExperimentError> {
    let mut out = Vec::new();
    for &l in &cfg.l {
        for &p in &cfg.p {
            for &eps in &cfg.eps {
                out.push(chernoff_check(l, p, eps, cfg.mc_trials, cfg.seed)?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentReport {
    Weight { records: Vec<WeightRecord> },
    Scaling(ScalingReport),
    Chernoff { records: Vec<ChernoffCheck> },
}

impl ExperimentReport {
    pub fn passed(&self) -> bool {
        match self {
            ExperimentReport::Weight { records } => records.iter().all(WeightRecord::passed),
            ExperimentReport::Scaling(r) => r.summary.passed(),
            ExperimentReport::Chernoff { records } => records.iter().all(|r| r.verdict),
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), ExperimentError> {
        let mut out = csv::Writer::from_writer(w);
        match self {
            ExperimentReport::Weight { records } => records.iter().try_for_each(|r| out.serialize(r))?,
            ExperimentReport::Scaling(r) => r.records.iter().try_for_each(|r| out.serialize(r))?,
            ExperimentReport::Chernoff { records } => records.iter().try_for_each(|r| out.serialize(r))?,
        }
        out.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String, ExperimentError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Everything except the per-row records.
    pub fn summary_json(&self) -> serde_json::Value {
        match self {
            ExperimentReport::Weight { records } => serde_json::json!({
                "kind": "weight",
                "graphs": records.len(),
                "passed": records.iter().filter(|r| r.passed()).count(),
                "errors": records.iter().filter(|r| r.error.is_some()).count(),
            }),
            ExperimentReport::Scaling(r) => {
                let mut v = serde_json::to_value(&r.summary).expect("summary serializes");
                v["kind"] = "scaling".into();
                v
            }
            ExperimentReport::Chernoff { records } => serde_json::json!({
                "kind": "chernoff",
                "cells": records.len(),
                "violations": records.iter().filter(|r| !r.verdict).count(),
            }),
        }
    }
}

/// Runs a validated config. `base_dir` resolves relative graph paths.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: &Path) -> Result<ExperimentReport, ExperimentError> {
    cfg.validate()?;
    Ok(match cfg {
        ExperimentConfig::Weight(c) => ExperimentReport::Weight { records: run_weight_experiment(c, base_dir) },
        ExperimentConfig::Scaling(c) => ExperimentReport::Scaling(run_scaling_experiment(c)?),
        ExperimentConfig::Chernoff(c) => ExperimentReport::Chernoff { records: run_chernoff_check(c)? },
    })
}

/// Runs `f` on a dedicated pool of `threads` workers, or on the global pool.
#[cfg(feature = "parallel")]
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<T: Send>(_threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    f()
}
