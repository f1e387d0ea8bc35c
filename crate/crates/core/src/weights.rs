//! Random edge weights and `M_k`, the minimum total weight of a maximum
//! k-strong matching.
//!
//! Weight of edge `e` in trial `t` is drawn from its own ChaCha stream keyed
//! by `(seed, t, e)`, so adding edges or reordering trials never changes
//! existing draws.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Graph};
use crate::matching::{Matching, MatchingError, StrongMatchingSolver};
use crate::rng::{substream, DOMAIN_WEIGHTS};
use crate::stats::Summary;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WeightError {
    #[error("invalid weight model: {0}")]
    InvalidModel(String),
    #[error("weight model has no finite second moment")]
    UnboundedMoment,
    #[error("no threshold on the search grid satisfies F2(gamma) <= {target}")]
    NoFeasibleGamma { target: f64 },
    #[error("at least 30 trials are required, got {0}")]
    TooFewTrials(usize),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Distribution of a single edge weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightDist {
    Exponential { rate: f64 },
    /// Uniform on `[0, upper]`.
    Uniform { upper: f64 },
    Constant { value: f64 },
    /// `1` if a uniform variate falls below `p`, else `0`.
    BernoulliIndicator { p: f64 },
}

impl WeightDist {
    pub fn validate(&self) -> Result<(), WeightError> {
        let ok = match *self {
            WeightDist::Exponential { rate } => rate.is_finite() && rate > 0.0,
            WeightDist::Uniform { upper } => upper.is_finite() && upper > 0.0,
            WeightDist::Constant { value } => value.is_finite() && value >= 0.0,
            WeightDist::BernoulliIndicator { p } => (0.0..=1.0).contains(&p),
        };
        if ok {
            Ok(())
        } else {
            Err(WeightError::InvalidModel(format!("{self:?}")))
        }
    }

    /// `(E w, E w^2)`.
    pub fn moments(&self) -> (f64, f64) {
        match *self {
            WeightDist::Exponential { rate } => (1.0 / rate, 2.0 / (rate * rate)),
            WeightDist::Uniform { upper } => (upper / 2.0, upper * upper / 3.0),
            WeightDist::Constant { value } => (value, value * value),
            WeightDist::BernoulliIndicator { p } => (p, p),
        }
    }

    /// `P(w <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match *self {
            WeightDist::Exponential { rate } => -(-rate * x).exp_m1(),
            WeightDist::Uniform { upper } => (x / upper).min(1.0),
            WeightDist::Constant { value } => {
                if x >= value { 1.0 } else { 0.0 }
            }
            WeightDist::BernoulliIndicator { p } => {
                if x >= 1.0 { 1.0 } else { 1.0 - p }
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightDist::Exponential { rate } => Exp::new(rate).expect("validated").sample(rng),
            WeightDist::Uniform { upper } => upper * rng.random::<f64>(),
            WeightDist::Constant { value } => value,
            WeightDist::BernoulliIndicator { p } => {
                if rng.random::<f64>() < p { 1.0 } else { 0.0 }
            }
        }
    }

    pub fn label(&self) -> String {
        match *self {
            WeightDist::Exponential { rate } => format!("exponential(rate={rate})"),
            WeightDist::Uniform { upper } => format!("uniform(0,{upper})"),
            WeightDist::Constant { value } => format!("constant({value})"),
            WeightDist::BernoulliIndicator { p } => format!("bernoulli({p})"),
        }
    }
}

/// One distribution shared by all edges, or one per edge id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightModel {
    Homogeneous(WeightDist),
    PerEdge { per_edge: Vec<WeightDist> },
}

impl WeightModel {
    fn dists(&self) -> &[WeightDist] {
        match self {
            WeightModel::Homogeneous(d) => std::slice::from_ref(d),
            WeightModel::PerEdge { per_edge } => per_edge,
        }
    }

    pub fn dist(&self, e: EdgeId) -> &WeightDist {
        match self {
            WeightModel::Homogeneous(d) => d,
            WeightModel::PerEdge { per_edge } => &per_edge[e.0],
        }
    }

    pub fn validate_for(&self, g: &Graph) -> Result<(), WeightError> {
        if let WeightModel::PerEdge { per_edge } = self {
            if per_edge.len() != g.edge_count() {
                return Err(WeightError::InvalidModel(format!(
                    "{} per-edge distributions for {} edges",
                    per_edge.len(),
                    g.edge_count()
                )));
            }
            if per_edge.is_empty() {
                return Err(WeightError::InvalidModel("no distributions".into()));
            }
        }
        self.dists().iter().try_for_each(WeightDist::validate)
    }

    /// `(mu, mu2)`: the largest first and second moments over all edges.
    pub fn moments(&self) -> Result<(f64, f64), WeightError> {
        let mut mu = 0.0f64;
        let mut mu2 = 0.0f64;
        for d in self.dists() {
            d.validate()?;
            let (a, b) = d.moments();
            if !(a.is_finite() && b.is_finite()) {
                return Err(WeightError::UnboundedMoment);
            }
            mu = mu.max(a);
            mu2 = mu2.max(b);
        }
        Ok((mu, mu2))
    }

    /// Lower CDF envelope: `min_e P(w(e) <= x)`.
    pub fn f1(&self, x: f64) -> f64 {
        self.dists().iter().map(|d| d.cdf(x)).fold(1.0, f64::min)
    }

    /// Upper CDF envelope: `max_e P(w(e) <= x)`.
    pub fn f2(&self, x: f64) -> f64 {
        self.dists().iter().map(|d| d.cdf(x)).fold(0.0, f64::max)
    }

    /// True when `F2(x) -> 0` as `x -> 0` and `F1(x) > 0` for `x > 0`.
    pub fn supports_lower_deviation(&self) -> bool {
        self.dists()
            .iter()
            .all(|d| matches!(d, WeightDist::Exponential { .. } | WeightDist::Uniform { .. }))
    }

    pub fn label(&self) -> String {
        match self {
            WeightModel::Homogeneous(d) => d.label(),
            WeightModel::PerEdge { per_edge } => format!("per_edge({})", per_edge.len()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightAssignment {
    /// Indexed by edge id.
    pub weights: Vec<f64>,
    pub seed: u64,
    pub trial: u64,
}

impl WeightAssignment {
    pub fn get(&self, e: EdgeId) -> f64 {
        self.weights[e.0]
    }

    pub fn scaled(&self, factor: f64) -> WeightAssignment {
        WeightAssignment {
            weights: self.weights.iter().map(|w| w * factor).collect(),
            ..self.clone()
        }
    }
}

pub fn sample_weights(g: &Graph, model: &WeightModel, seed: u64) -> Result<WeightAssignment, WeightError> {
    sample_weights_trial(g, model, seed, 0)
}

/// Weights for one Monte Carlo trial.
pub fn sample_weights_trial(
    g: &Graph,
    model: &WeightModel,
    seed: u64,
    trial: u64,
) -> Result<WeightAssignment, WeightError> {
    model.validate_for(g)?;
    Ok(draw(g, model, seed, trial))
}

fn draw(g: &Graph, model: &WeightModel, seed: u64, trial: u64) -> WeightAssignment {
    let weights = g
        .edge_ids()
        .map(|e| model.dist(e).sample(&mut substream(seed, DOMAIN_WEIGHTS, trial, e.0 as u64)))
        .collect();
    WeightAssignment { weights, seed, trial }
}

/// `M_k` and a witness: among maximum k-strong matchings, the one of least
/// total weight (lexicographically smallest edge ids on ties).
pub fn min_weight_max_k_strong(
    g: &Graph,
    w: &WeightAssignment,
    k: usize,
    budget: u64,
) -> Result<(f64, Matching), WeightError> {
    if w.weights.len() != g.edge_count() {
        return Err(WeightError::InvalidModel(format!(
            "{} weights for {} edges",
            w.weights.len(),
            g.edge_count()
        )));
    }
    if let Some(bad) = w.weights.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(WeightError::InvalidModel(format!("weight {bad} is not a nonnegative number")));
    }
    let solver = StrongMatchingSolver::new(g, k)?;
    let out = solver.min_weight(&w.weights, budget)?;
    Ok((out.weight, Matching::new(k, out.members.into_iter().map(EdgeId))))
}

/// Number of edges with weight at most `gamma` (inclusive).
pub fn bad_edge_count(w: &WeightAssignment, gamma: f64) -> usize {
    w.weights.iter().filter(|&&x| x <= gamma).count()
}

/// Largest `gamma` with `F2(gamma) <= 1 / (24 Delta^(k+1))`: the first
/// feasible point of the grid `2^0, 2^-1, ..., 2^-60`, refined by bisection
/// towards the next infeasible grid point.
pub fn select_gamma(model: &WeightModel, max_degree: usize, k: usize) -> Result<f64, WeightError> {
    let target = 1.0 / (24.0 * (max_degree.max(1) as f64).powi(k as i32 + 1));
    let feasible = |x: f64| model.f2(x) <= target;
    let Some(j) = (0..=60).find(|&j| feasible((-(j as f64)).exp2())) else {
        return Err(WeightError::NoFeasibleGamma { target });
    };
    let mut lo = (-(j as f64)).exp2();
    if j == 0 {
        return Ok(lo);
    }
    let mut hi = 2.0 * lo;
    for _ in 0..200 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightStats {
    pub k: usize,
    pub model: String,
    pub trials: usize,
    pub seed: u64,
    pub m: usize,
    pub max_degree: usize,
    pub nu_k: usize,
    pub mu: f64,
    pub mu2: f64,
    pub mean_mk: f64,
    pub var_mk: f64,
    pub stderr_mean: f64,
    /// Jackknife standard error of `var_mk`.
    pub var_stderr: f64,
    pub fitted_c: f64,
    /// `mean_mk <= mu nu_k + 3 stderr`.
    pub verdict_mean: bool,
    /// Relative slack `3 var_stderr / (4 mu2 nu_k)` added to the variance bound.
    pub var_slack: f64,
    /// `var_mk <= 4 mu2 nu_k (1 + var_slack)`.
    pub verdict_var: bool,
    /// Threshold from [`select_gamma`]; absent when the model has mass at 0.
    pub gamma: Option<f64>,
    /// Fraction of trials with `M_k >= nu_k gamma / 2`.
    pub deviation_rate: Option<f64>,
    /// `1 - 2 exp(-m F1(gamma) / 16)`.
    pub deviation_floor: Option<f64>,
    /// `deviation_rate >= deviation_floor - 3 sqrt(r (1 - r) / trials)`.
    pub verdict_deviation: Option<bool>,
    /// `-ln(1 - deviation_rate) / m`; absent when every trial deviates.
    pub gamma2_estimate: Option<f64>,
    /// Mean number of edges with weight at most `gamma`.
    pub mean_bad_edges: Option<f64>,
    /// Search nodes summed over all trials.
    pub solver_nodes: u64,
}

impl WeightStats {
    pub fn all_pass(&self) -> bool {
        self.verdict_mean && self.verdict_var && self.verdict_deviation.unwrap_or(true)
    }
}

struct Trial {
    value: f64,
    bad: usize,
    nodes: u64,
}

/// Monte Carlo estimates of the mean, variance and lower deviation of `M_k`
/// on a fixed host graph. Trials run in parallel under the `parallel`
/// feature; results are reduced in trial order.
pub fn mc_weight_stats(
    g: &Graph,
    model: &WeightModel,
    k: usize,
    trials: usize,
    seed: u64,
    budget: u64,
) -> Result<WeightStats, WeightError> {
    if trials < 30 {
        return Err(WeightError::TooFewTrials(trials));
    }
    model.validate_for(g)?;
    let (mu, mu2) = model.moments()?;
    let solver = StrongMatchingSolver::new(g, k)?;
    let nu_k = solver.max_size(budget)?.size;
    let m = g.edge_count();
    let max_degree = g.max_degree();
    let gamma = if model.supports_lower_deviation() {
        Some(select_gamma(model, max_degree, k)?)
    } else {
        None
    };

    let run = |t: usize| -> Result<Trial, WeightError> {
        let w = draw(g, model, seed, t as u64);
        let out = solver.min_weight(&w.weights, budget)?;
        Ok(Trial {
            value: out.weight,
            bad: gamma.map_or(0, |gm| bad_edge_count(&w, gm)),
            nodes: out.nodes,
        })
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Trial> = {
        use rayon::prelude::*;
        (0..trials).into_par_iter().map(run).collect::<Result<_, _>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Trial> = (0..trials).map(run).collect::<Result<_, _>>()?;

    let values: Vec<f64> = results.iter().map(|r| r.value).collect();
    let s = Summary::of(&values);
    let nu = nu_k as f64;
    let tol = |x: f64| 1e-12 * x.abs().max(1.0);

    let mean_bound = mu * nu;
    let verdict_mean = s.mean <= mean_bound + 3.0 * s.stderr + tol(mean_bound);
    let var_bound = 4.0 * mu2 * nu;
    let var_slack = if var_bound > 0.0 { 3.0 * s.variance_stderr / var_bound } else { 0.0 };
    let verdict_var = s.variance <= var_bound * (1.0 + var_slack) + tol(var_bound);

    let tf = trials as f64;
    let (deviation_rate, deviation_floor, verdict_deviation, gamma2_estimate, mean_bad_edges) = match gamma {
        Some(gm) => {
            let level = nu * gm / 2.0;
            let hits = values.iter().filter(|&&v| v >= level).count();
            let r = hits as f64 / tf;
            let floor = 1.0 - 2.0 * (-(m as f64) * model.f1(gm) / 16.0).exp();
            let se = (r * (1.0 - r) / tf).sqrt();
            let g2 = (r < 1.0).then(|| -(-r).ln_1p() / m as f64);
            let bad = results.iter().map(|t| t.bad as f64).sum::<f64>() / tf;
            (Some(r), Some(floor), Some(r >= floor - 3.0 * se), g2, Some(bad))
        }
        None => (None, None, None, None, None),
    };

    Ok(WeightStats {
        k,
        model: model.label(),
        trials,
        seed,
        m,
        max_degree,
        nu_k,
        mu,
        mu2,
        mean_mk: s.mean,
        var_mk: s.variance,
        stderr_mean: s.stderr,
        var_stderr: s.variance_stderr,
        fitted_c: if nu_k > 0 { s.mean / nu } else { f64::NAN },
        verdict_mean,
        var_slack,
        verdict_var,
        gamma,
        deviation_rate,
        deviation_floor,
        verdict_deviation,
        gamma2_estimate,
        mean_bad_edges,
        solver_nodes: results.iter().map(|t| t.nodes).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{is_k_strong, max_k_strong_exact, DEFAULT_BUDGET};

    fn homo(d: WeightDist) -> WeightModel {
        WeightModel::Homogeneous(d)
    }

    fn fixed(ws: &[f64]) -> WeightAssignment {
        WeightAssignment { weights: ws.to_vec(), seed: 0, trial: 0 }
    }

    #[test]
    fn sampling_examples() {
        let p4 = Graph::path(4);
        let w = sample_weights(&p4, &homo(WeightDist::Constant { value: 2.5 }), 9).unwrap();
        assert_eq!(w.weights, vec![2.5; 3]);
        let w = sample_weights(&p4, &homo(WeightDist::BernoulliIndicator { p: 1.0 }), 9).unwrap();
        assert_eq!(w.weights, vec![1.0; 3]);
        let exp = homo(WeightDist::Exponential { rate: 1.0 });
        assert_eq!(sample_weights(&p4, &exp, 3).unwrap(), sample_weights(&p4, &exp, 3).unwrap());
        assert_ne!(sample_weights(&p4, &exp, 3).unwrap(), sample_weights(&p4, &exp, 4).unwrap());
        assert!(matches!(
            sample_weights(&p4, &homo(WeightDist::Exponential { rate: 0.0 }), 1),
            Err(WeightError::InvalidModel(_))
        ));
        let short = WeightModel::PerEdge { per_edge: vec![WeightDist::Constant { value: 1.0 }] };
        assert!(matches!(sample_weights(&p4, &short, 1), Err(WeightError::InvalidModel(_))));
    }

    #[test]
    fn draws_are_keyed_by_edge() {
        let exp = homo(WeightDist::Exponential { rate: 1.0 });
        let small = sample_weights_trial(&Graph::path(4), &exp, 11, 5).unwrap();
        let large = sample_weights_trial(&Graph::path(9), &exp, 11, 5).unwrap();
        assert_eq!(small.weights[..], large.weights[..3]);
    }

    #[test]
    fn moment_examples() {
        assert_eq!(homo(WeightDist::Exponential { rate: 1.0 }).moments().unwrap(), (1.0, 2.0));
        let (a, b) = homo(WeightDist::Uniform { upper: 1.0 }).moments().unwrap();
        assert_eq!(a, 0.5);
        assert!((b - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(homo(WeightDist::BernoulliIndicator { p: 0.3 }).moments().unwrap(), (0.3, 0.3));
        let mixed = WeightModel::PerEdge {
            per_edge: vec![WeightDist::Exponential { rate: 2.0 }, WeightDist::Uniform { upper: 3.0 }],
        };
        assert_eq!(mixed.moments().unwrap(), (1.5, 3.0));
        for d in [
            WeightDist::Exponential { rate: 0.7 },
            WeightDist::Uniform { upper: 2.0 },
            WeightDist::Constant { value: 1.5 },
            WeightDist::BernoulliIndicator { p: 0.2 },
        ] {
            let (a, b) = d.moments();
            assert!(a * a <= b + 1e-15, "{d:?}");
        }
    }

    #[test]
    fn envelopes_are_ordered() {
        let mixed = WeightModel::PerEdge {
            per_edge: vec![
                WeightDist::Exponential { rate: 2.0 },
                WeightDist::Uniform { upper: 3.0 },
                WeightDist::BernoulliIndicator { p: 0.5 },
            ],
        };
        for i in 0..200 {
            let x = i as f64 * 0.02;
            assert!(mixed.f1(x) <= mixed.f2(x));
        }
        assert!(!mixed.supports_lower_deviation());
        assert!(homo(WeightDist::Uniform { upper: 1.0 }).supports_lower_deviation());
    }

    #[test]
    fn min_weight_examples() {
        let p4 = Graph::path(4);
        let w = fixed(&[0.5, 0.2, 0.7]);
        let (v, wit) = min_weight_max_k_strong(&p4, &w, 0, DEFAULT_BUDGET).unwrap();
        assert!((v - 1.2).abs() < 1e-15);
        assert_eq!(wit.edge_ids(), &[EdgeId(0), EdgeId(2)]);
        let (v, wit) = min_weight_max_k_strong(&p4, &w, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(v, 0.2);
        assert_eq!(wit.edge_ids(), &[EdgeId(1)]);
        assert!(matches!(
            min_weight_max_k_strong(&Graph::empty(3), &fixed(&[]), 0, DEFAULT_BUDGET),
            Err(WeightError::Matching(MatchingError::EmptyGraph))
        ));
    }

    #[test]
    fn constant_weights_give_c_times_nu() {
        let g = Graph::new(8, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0), (0, 4)]).unwrap();
        for c in [0.0, 0.25, 1.0, 3.5] {
            let w = sample_weights(&g, &homo(WeightDist::Constant { value: c }), 1).unwrap();
            for k in 0..4 {
                let nu = max_k_strong_exact(&g, k, DEFAULT_BUDGET).unwrap().0;
                let (v, wit) = min_weight_max_k_strong(&g, &w, k, DEFAULT_BUDGET).unwrap();
                assert_eq!(v, c * nu as f64);
                assert_eq!(wit.size(), nu);
                assert!(is_k_strong(&g, wit.edge_ids(), k).unwrap());
            }
        }
    }

    #[test]
    fn bad_edges() {
        assert_eq!(bad_edge_count(&fixed(&[1.0; 4]), 0.5), 0);
        assert_eq!(bad_edge_count(&fixed(&[1.0; 4]), 1.0), 4);
        assert_eq!(bad_edge_count(&fixed(&[0.5, 0.2, 0.7]), 0.3), 1);
    }

    #[test]
    fn gamma_selection() {
        let exp = homo(WeightDist::Exponential { rate: 1.0 });
        // Delta = 2, k = 2: target 1/192
        let g = select_gamma(&exp, 2, 2).unwrap();
        let exact = -(-1.0f64 / 192.0).ln_1p();
        assert!((g - exact).abs() < 1e-15, "{g} vs {exact}");
        assert!((g - 5.2e-3).abs() < 1e-4);
        // Delta = 2, k = 1: target 1/96
        let g = select_gamma(&exp, 2, 1).unwrap();
        assert!((g - (-(-1.0f64 / 96.0).ln_1p())).abs() < 1e-15);
        let g = select_gamma(&homo(WeightDist::Uniform { upper: 1.0 }), 2, 0).unwrap();
        assert!((g - 1.0 / 48.0).abs() < 1e-16);
        assert!(matches!(
            select_gamma(&homo(WeightDist::BernoulliIndicator { p: 0.5 }), 2, 0),
            Err(WeightError::NoFeasibleGamma { .. })
        ));
    }

    #[test]
    fn constant_model_stats_are_exact() {
        let g = Graph::cycle(7);
        let s = mc_weight_stats(&g, &homo(WeightDist::Constant { value: 0.75 }), 1, 40, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(s.nu_k, 2);
        assert_eq!(s.mean_mk, 1.5);
        assert_eq!(s.var_mk, 0.0);
        assert!(s.verdict_mean && s.verdict_var);
        assert_eq!(s.gamma, None);
        assert!(s.all_pass());
    }

    #[test]
    fn stats_are_deterministic_and_checked() {
        let g = Graph::path(6);
        let exp = homo(WeightDist::Exponential { rate: 1.0 });
        let a = mc_weight_stats(&g, &exp, 0, 200, 17, DEFAULT_BUDGET).unwrap();
        let b = mc_weight_stats(&g, &exp, 0, 200, 17, DEFAULT_BUDGET).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(a.gamma.is_some() && a.deviation_rate.is_some());
        assert!(matches!(
            mc_weight_stats(&g, &exp, 0, 29, 17, DEFAULT_BUDGET),
            Err(WeightError::TooFewTrials(29))
        ));
    }

    #[test]
    fn serde_shapes() {
        let m: WeightModel = serde_json::from_str(r#"{"kind":"exponential","rate":2.0}"#).unwrap();
        assert_eq!(m, homo(WeightDist::Exponential { rate: 2.0 }));
        let m: WeightModel =
            serde_json::from_str(r#"{"per_edge":[{"kind":"bernoulli_indicator","p":0.5}]}"#).unwrap();
        assert_eq!(m, WeightModel::PerEdge { per_edge: vec![WeightDist::BernoulliIndicator { p: 0.5 }] });
        assert!(serde_json::from_str::<WeightModel>(r#"{"kind":"exponential","rate":2.0,"x":1}"#).is_err());
    }
}
