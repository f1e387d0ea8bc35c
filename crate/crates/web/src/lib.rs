//! wasm-bindgen entry points for the browser demo in `www/`.
//!
//! Every export takes plain numbers or a JSON request and returns a JSON
//! string. The `*_json` functions hold the logic and run natively in tests;
//! the exports only convert errors into JS exceptions.

use serde::{Deserialize, Serialize};
use strongmatch::matching::{greedy_k_strong, max_k_strong_exact, BoundsReport, MatchingError};
use strongmatch::random_graphs::{cycle_with_chords, sample_gnp, sample_graph, validate_model, EdgeProbModel};
use strongmatch::stats::chernoff_check;
use strongmatch::Graph;
use wasm_bindgen::prelude::*;

/// Search nodes allowed before the demo falls back to the greedy answer.
pub const DEMO_BUDGET: u64 = 2_000_000;
/// Largest graph the page may request.
pub const MAX_VERTICES: usize = 400;
/// Largest Monte Carlo run the page may request.
pub const MAX_MC_TRIALS: u64 = 200_000;

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphRequest {
    Model { n: usize, beta: f64, h0: f64, k: usize, seed: u64 },
    Gnp { n: usize, p: f64, k: usize, seed: u64 },
    Chords { n: usize, chords: usize, k: usize, seed: u64 },
}

#[derive(Debug, Serialize)]
pub struct MatchingView {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
    /// Edge ids of the highlighted matching, sorted.
    pub matching: Vec<usize>,
    pub size: usize,
    /// `exact`, or `greedy` when the search budget ran out.
    pub method: &'static str,
    pub greedy_size: usize,
    /// Absent when the graph has an isolated edge or no edges.
    pub bounds: Option<BoundsReport>,
}

/// Samples the requested graph and finds a maximum k-strong matching.
pub fn sample_and_match_json(request: &str) -> Result<String, String> {
    let req: GraphRequest = serde_json::from_str(request).map_err(|e| format!("bad request: {e}"))?;
    let (g, k) = build(&req)?;
    let (greedy_size, greedy) = greedy_k_strong(&g, k).map_err(|e| e.to_string())?;
    let (size, witness, method) = match max_k_strong_exact(&g, k, DEMO_BUDGET) {
        Ok((size, w)) => (size, w, "exact"),
        Err(MatchingError::BudgetExceeded { .. }) => (greedy_size, greedy, "greedy"),
        Err(e) => return Err(e.to_string()),
    };
    let view = MatchingView {
        n: g.vertex_count(),
        edges: g.edges().to_vec(),
        k,
        matching: witness.edge_ids().iter().map(|e| e.0).collect(),
        size,
        method,
        greedy_size,
        bounds: BoundsReport::compute(&g, k).ok(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

fn build(req: &GraphRequest) -> Result<(Graph, usize), String> {
    let n = match *req {
        GraphRequest::Model { n, .. } | GraphRequest::Gnp { n, .. } | GraphRequest::Chords { n, .. } => n,
    };
    if !(2..=MAX_VERTICES).contains(&n) {
        return Err(format!("n must lie in 2..={MAX_VERTICES}, got {n}"));
    }
    let g = match *req {
        GraphRequest::Model { n, beta, h0, k, seed } => {
            (sample_graph(&EdgeProbModel::constant(beta, k, h0), n, seed).map_err(|e| e.to_string())?, k)
        }
        GraphRequest::Gnp { n, p, k, seed } => (sample_gnp(n, p, seed).map_err(|e| e.to_string())?, k),
        GraphRequest::Chords { n, chords, k, seed } => {
            if n < 3 {
                return Err("a cycle needs n >= 3".into());
            }
            (cycle_with_chords(n, chords, seed), k)
        }
    };
    if g.0.edge_count() == 0 {
        return Err("the sampled graph has no edges; raise n, p or h0".into());
    }
    Ok(g)
}

/// Exponents and feasibility of the constant-h model at size `n`.
pub fn model_diagnostics_json(beta: f64, k: usize, h0: f64, n: usize) -> Result<String, String> {
    let d = validate_model(&EdgeProbModel::constant(beta, k, h0), n).map_err(|e| e.to_string())?;
    serde_json::to_string(&d).map_err(|e| e.to_string())
}

/// Exact binomial two-sided tail against its Chernoff bound.
pub fn chernoff_json(l: u64, p: f64, eps: f64, mc_trials: u64, seed: u64) -> Result<String, String> {
    if mc_trials > MAX_MC_TRIALS {
        return Err(format!("at most {MAX_MC_TRIALS} Monte Carlo trials"));
    }
    let c = chernoff_check(l, p, eps, mc_trials, seed).map_err(|e| e.to_string())?;
    serde_json::to_string(&c).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn sample_and_match(request: &str) -> Result<String, JsValue> {
    sample_and_match_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn model_diagnostics(beta: f64, k: usize, h0: f64, n: usize) -> Result<String, JsValue> {
    model_diagnostics_json(beta, k, h0, n).map_err(|e| JsValue::from_str(&e))
}

/// 32-bit integers keep the JS side free of BigInt.
#[wasm_bindgen]
pub fn chernoff(l: u32, p: f64, eps: f64, mc_trials: u32, seed: u32) -> Result<String, JsValue> {
    chernoff_json(l.into(), p, eps, mc_trials.into(), seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn chords_graph_gets_an_exact_matching() {
        let v = parse(&sample_and_match_json(r#"{"family":"chords","n":16,"chords":4,"k":1,"seed":3}"#).unwrap());
        assert_eq!(v["method"], "exact");
        assert_eq!(v["edges"].as_array().unwrap().len(), 20);
        assert_eq!(v["matching"].as_array().unwrap().len() as u64, v["size"].as_u64().unwrap());
        assert!(v["greedy_size"].as_u64().unwrap() <= v["size"].as_u64().unwrap());
        assert!(v["bounds"]["nu_avg_lower"]["num"].is_number());
    }

    #[test]
    fn requests_are_reproducible() {
        let req = r#"{"family":"model","n":60,"beta":0.8,"h0":1.0,"k":3,"seed":9}"#;
        assert_eq!(sample_and_match_json(req).unwrap(), sample_and_match_json(req).unwrap());
    }

    #[test]
    fn bad_requests_are_reported() {
        assert!(sample_and_match_json(r#"{"family":"gnp","n":5000,"p":0.1,"k":1,"seed":1}"#).is_err());
        assert!(sample_and_match_json(r#"{"family":"gnp","n":5,"p":0.0,"k":1,"seed":1}"#).unwrap_err().contains("no edges"));
        assert!(sample_and_match_json(r#"{"family":"tree","n":5}"#).unwrap_err().starts_with("bad request"));
    }

    #[test]
    fn diagnostics_flag_infeasible_exponents() {
        let v = parse(&model_diagnostics_json(0.8, 3, 1.0, 100).unwrap());
        assert_eq!(v["feasible"], true);
        assert_eq!(v["k1"], 1);
        let v = parse(&model_diagnostics_json(0.5, 3, 1.0, 100).unwrap());
        assert_eq!(v["feasible"], false);
    }

    #[test]
    fn chernoff_tail_is_below_bound() {
        let v = parse(&chernoff_json(200, 0.3, 0.2, 2000, 5).unwrap());
        assert!(v["exact_tail"].as_f64().unwrap() <= v["bound"].as_f64().unwrap());
        assert!(chernoff_json(200, 0.3, 0.7, 10, 5).is_err());
        assert!(chernoff_json(200, 0.3, 0.2, MAX_MC_TRIALS + 1, 5).is_err());
    }
}
