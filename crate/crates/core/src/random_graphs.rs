//! Inhomogeneous random graphs on `n` vertices in which the pair `{u, v}` is
//! an edge independently with probability `p(u, v) = h(u, v) / n^beta`, plus
//! the neighbourhood statistics used to study their k-strong matching number.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BoundedBfs, Graph, GraphError};
use crate::matching::k1;
use crate::rng::{substream, DOMAIN_GRAPH};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("exponents must satisfy 0 <= delta_low <= delta_av <= delta_up < beta")]
    InvalidParameterOrder,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge probability {p} exceeds 1")]
    ProbabilityOverflow { p: f64 },
    #[error("graph has no vertices")]
    EmptyVertexSet,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Edge weight function `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum HSpec {
    /// `h = h0` on every pair.
    Constant { h0: f64 },
    /// The first `ceil(subset_fraction * n)` vertices form a designated set.
    /// Pairs touching it get `h_a n^exponent_a`, all others `h_b n^exponent_b`.
    TwoClass {
        h_a: f64,
        h_b: f64,
        subset_fraction: f64,
        #[serde(default)]
        exponent_a: f64,
        #[serde(default)]
        exponent_b: f64,
    },
    /// `h = c n^delta` on every pair.
    PowerOfN { c: f64, delta: f64 },
}

impl HSpec {
    fn subset_size(fraction: f64, n: usize) -> usize {
        ((fraction * n as f64).ceil() as usize).min(n)
    }

    /// `h(u, v)` for `u < v`.
    pub fn h(&self, u: usize, _v: usize, n: usize) -> f64 {
        let nf = n as f64;
        match *self {
            HSpec::Constant { h0 } => h0,
            HSpec::TwoClass { h_a, h_b, subset_fraction, exponent_a, exponent_b } => {
                if u < Self::subset_size(subset_fraction, n) {
                    h_a * nf.powf(exponent_a)
                } else {
                    h_b * nf.powf(exponent_b)
                }
            }
            HSpec::PowerOfN { c, delta } => c * nf.powf(delta),
        }
    }

    /// Distinct values of `h` at size `n` with the number of pairs carrying each.
    fn classes(&self, n: usize) -> Vec<(f64, f64)> {
        let nf = n as f64;
        let pairs = |a: f64| a * (a - 1.0) / 2.0;
        match *self {
            HSpec::Constant { .. } | HSpec::PowerOfN { .. } => vec![(self.h(0, 1, n), pairs(nf))],
            HSpec::TwoClass { h_a, h_b, subset_fraction, exponent_a, exponent_b } => {
                let s = Self::subset_size(subset_fraction, n) as f64;
                let touching = pairs(s) + s * (nf - s);
                let rest = pairs(nf - s);
                [(h_a * nf.powf(exponent_a), touching), (h_b * nf.powf(exponent_b), rest)]
                    .into_iter()
                    .filter(|c| c.1 > 0.0)
                    .collect()
            }
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let ok = match *self {
            HSpec::Constant { h0 } => h0.is_finite() && h0 >= 0.0,
            HSpec::TwoClass { h_a, h_b, subset_fraction, exponent_a, exponent_b } => {
                h_a.is_finite()
                    && h_a >= 0.0
                    && h_b.is_finite()
                    && h_b >= 0.0
                    && (0.0..=1.0).contains(&subset_fraction)
                    && exponent_a.is_finite()
                    && exponent_b.is_finite()
            }
            HSpec::PowerOfN { c, delta } => c.is_finite() && c >= 0.0 && delta.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidParameter(format!("{self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeProbModel {
    pub beta: f64,
    pub k: usize,
    pub h_spec: HSpec,
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub delta_low: f64,
    pub delta_av: f64,
    pub delta_up: f64,
}

impl EdgeProbModel {
    /// Constant `h = h0` with zero exponents and the tightest constants.
    pub fn constant(beta: f64, k: usize, h0: f64) -> Self {
        EdgeProbModel {
            beta,
            k,
            h_spec: HSpec::Constant { h0 },
            gamma0: h0.powi(k as i32 + 2),
            gamma1: h0,
            gamma2: h0,
            delta_low: 0.0,
            delta_av: 0.0,
            delta_up: 0.0,
        }
    }

    fn check_parameters(&self, n: usize) -> Result<(), ModelError> {
        let order = 0.0 <= self.delta_low
            && self.delta_low <= self.delta_av
            && self.delta_av <= self.delta_up
            && self.delta_up < self.beta;
        if !order {
            return Err(ModelError::InvalidParameterOrder);
        }
        let bad = |what: &str| Err(ModelError::InvalidParameter(what.to_string()));
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("beta must lie in (0, 1)");
        }
        if self.k < 3 {
            return bad("k must be at least 3");
        }
        if n < 2 {
            return bad("n must be at least 2");
        }
        if ![self.gamma0, self.gamma1, self.gamma2].iter().all(|g| g.is_finite() && *g > 0.0) {
            return bad("gamma0, gamma1, gamma2 must be positive");
        }
        self.h_spec.validate()
    }

    fn scale(&self, n: usize) -> f64 {
        (n as f64).powf(self.beta)
    }

    /// `p(u, v)` for `u < v`; rounding above 1 by less than `1e-12` is clipped.
    fn probability(&self, u: usize, v: usize, n: usize, scale: f64) -> f64 {
        (self.h_spec.h(u, v, n) / scale).min(1.0)
    }

    fn check_overflow(&self, n: usize) -> Result<(), ModelError> {
        let scale = self.scale(n);
        for (h, _) in self.h_spec.classes(n) {
            let p = h / scale;
            if p > 1.0 + 1e-12 {
                return Err(ModelError::ProbabilityOverflow { p });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDiagnostics {
    pub n: usize,
    pub theta_low: f64,
    pub theta_up: f64,
    pub k1: usize,
    pub p_low: f64,
    pub p_up: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// `C(n,2)^-1 sum_e h(e)^(k+2)`.
    pub h_power_mean: f64,
    pub feasible: bool,
    /// One entry per violated condition; empty when feasible.
    pub reasons: Vec<String>,
}

/// Exponents, probability range and feasibility of `model` at size `n`.
pub fn validate_model(model: &EdgeProbModel, n: usize) -> Result<ModelDiagnostics, ModelError> {
    model.check_parameters(n)?;
    model.check_overflow(n)?;
    let nf = n as f64;
    let k = model.k as f64;
    let radius = k1(model.k);
    let theta_low = 1.0 - k * (1.0 - model.beta + model.delta_av) - 2.0 * (model.delta_av - model.delta_low);
    let theta_up = 1.0 - radius as f64 * (1.0 - model.beta + model.delta_low);
    let p_low = model.gamma1 / nf.powf(model.beta - model.delta_low);
    let p_up = model.gamma2 / nf.powf(model.beta - model.delta_up);

    let classes = model.h_spec.classes(n);
    let h_min = classes.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let h_max = classes.iter().map(|c| c.0).fold(0.0, f64::max);
    let total: f64 = classes.iter().map(|c| c.1).sum();
    let h_power_mean = classes.iter().map(|&(h, w)| w * h.powi(model.k as i32 + 2)).sum::<f64>() / total;

    let rel = 1e-9;
    let mut reasons = Vec::new();
    if theta_low <= 0.0 {
        reasons.push(format!("theta_low = {theta_low} is not positive"));
    }
    let up = radius as f64 * (1.0 - model.beta + model.delta_up);
    if up >= 1.0 {
        reasons.push(format!("k1 (1 - beta + delta_up) = {up} is not below 1"));
    }
    let lo_h = model.gamma1 * nf.powf(model.delta_low);
    if h_min < lo_h * (1.0 - rel) {
        reasons.push(format!("min h = {h_min} is below gamma1 n^delta_low = {lo_h}"));
    }
    let hi_h = model.gamma2 * nf.powf(model.delta_up);
    if h_max > hi_h * (1.0 + rel) {
        reasons.push(format!("max h = {h_max} exceeds gamma2 n^delta_up = {hi_h}"));
    }
    let av = model.gamma0 * nf.powf((k + 2.0) * model.delta_av);
    if h_power_mean > av * (1.0 + rel) {
        reasons.push(format!("mean h^(k+2) = {h_power_mean} exceeds gamma0 n^((k+2) delta_av) = {av}"));
    }

    Ok(ModelDiagnostics {
        n,
        theta_low,
        theta_up,
        k1: radius,
        p_low,
        p_up,
        h_min,
        h_max,
        h_power_mean,
        feasible: reasons.is_empty(),
        reasons,
    })
}

fn sample_pairs(n: usize, seed: u64, p: impl Fn(usize, usize) -> f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        // one stream per row, consumed in increasing v: each draw belongs to a fixed pair
        let mut rng = substream(seed, DOMAIN_GRAPH, 0, u as u64);
        for v in u + 1..n {
            if rng.random::<f64>() < p(u, v) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_checked_edges(n, edges)
}

/// Draws a graph from `model`. Feasibility flags are not required.
pub fn sample_graph(model: &EdgeProbModel, n: usize, seed: u64) -> Result<Graph, ModelError> {
    model.check_parameters(n)?;
    model.check_overflow(n)?;
    let scale = model.scale(n);
    Ok(sample_pairs(n, seed, |u, v| model.probability(u, v, n, scale)))
}

/// Homogeneous random graph `G(n, p)`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph, ModelError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(ModelError::InvalidParameter(format!("p = {p} is not a probability")));
    }
    Ok(sample_pairs(n, seed, |_, _| p))
}

/// Cycle `C_n` plus up to `chords` random chords between distinct
/// non-adjacent vertices, each vertex receiving at most one chord, so the
/// maximum degree is at most 3 and no edge is isolated.
pub fn cycle_with_chords(n: usize, chords: usize, seed: u64) -> Graph {
    let mut edges: Vec<(usize, usize)> = Graph::cycle(n).edges().to_vec();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut substream(seed, DOMAIN_GRAPH, 1, n as u64));
    let adjacent = |a: usize, b: usize| (a + 1) % n == b || (b + 1) % n == a;
    let mut free = vec![true; n];
    let mut added = 0;
    for i in 0..n {
        if added == chords {
            break;
        }
        let a = order[i];
        if !free[a] {
            continue;
        }
        if let Some(&b) = order[i + 1..].iter().find(|&&b| free[b] && !adjacent(a, b)) {
            free[a] = false;
            free[b] = false;
            edges.push((a.min(b), a.max(b)));
            added += 1;
        }
    }
    Graph::from_checked_edges(n, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationRecord {
    pub source: usize,
    /// `layer_sizes[i]` vertices lie at distance exactly `i` from `source`.
    pub layer_sizes: Vec<usize>,
    /// `cumulative[j]` vertices lie within distance `j`.
    pub cumulative: Vec<usize>,
}

impl ExplorationRecord {
    /// `layer_sizes[i+1] / layer_sizes[i]` while the layer is nonempty.
    pub fn growth_ratios(&self) -> Vec<f64> {
        self.layer_sizes
            .windows(2)
            .take_while(|w| w[0] > 0)
            .map(|w| w[1] as f64 / w[0] as f64)
            .collect()
    }
}

pub fn exploration_layers(g: &Graph, source: usize, depth: usize) -> Result<ExplorationRecord, GraphError> {
    let n = g.vertex_count();
    if source >= n {
        return Err(GraphError::VertexOutOfRange { vertex: source, n });
    }
    let mut bfs = BoundedBfs::new(n);
    bfs.explore(g, &[source], depth);
    let layer_sizes = bfs.layers().to_vec();
    let cumulative = layer_sizes
        .iter()
        .scan(0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();
    Ok(ExplorationRecord { source, layer_sizes, cumulative })
}

/// `sum_u d_1(u) d_{k+1}(u)`.
pub fn degree_sum_statistic(g: &Graph, k: usize) -> u128 {
    let mut bfs = BoundedBfs::new(g.vertex_count());
    (0..g.vertex_count())
        .filter(|&u| g.degree(u) > 0)
        .map(|u| g.degree(u) as u128 * (bfs.ball_size(g, &[u], k + 1) - 1) as u128)
        .sum()
}

/// `min_u d_radius(u)`.
pub fn min_neighborhood(g: &Graph, radius: usize) -> Result<usize, ModelError> {
    let mut bfs = BoundedBfs::new(g.vertex_count());
    (0..g.vertex_count())
        .map(|u| bfs.ball_size(g, &[u], radius) - 1)
        .min()
        .ok_or(ModelError::EmptyVertexSet)
}
