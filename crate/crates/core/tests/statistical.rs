//! Sampler checks with pinned error rates: DKW bands for weight draws,
//! per-pair inclusion frequencies, isolated-edge frequencies and noiseless
//! power-law recovery.

use strongmatch::random_graphs::{sample_graph, validate_model, EdgeProbModel, HSpec};
use strongmatch::stats::fit_power_law;
use strongmatch::weights::{sample_weights_trial, WeightDist, WeightModel};
use strongmatch::Graph;

/// DKW: P(sup |F_n - F| > eps) <= 2 exp(-2 n eps^2); eps for failure rate 1e-6.
fn dkw_eps(n: usize) -> f64 {
    ((2.0f64 / 1e-6).ln() / (2.0 * n as f64)).sqrt()
}

#[test]
fn weight_samplers_match_their_cdfs() {
    let g = Graph::path(10_001);
    let n = g.edge_count();
    for dist in [
        WeightDist::Exponential { rate: 1.0 },
        WeightDist::Exponential { rate: 3.5 },
        WeightDist::Uniform { upper: 1.0 },
        WeightDist::Uniform { upper: 4.0 },
        WeightDist::BernoulliIndicator { p: 0.3 },
    ] {
        let model = WeightModel::Homogeneous(dist);
        let mut xs = sample_weights_trial(&g, &model, 99, 0).unwrap().weights;
        xs.sort_by(f64::total_cmp);
        let mut worst = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            let f = dist.cdf(x);
            // the empirical CDF jumps from i/n to (i+1)/n at x
            worst = worst.max((f - i as f64 / n as f64).abs()).max(((i + 1) as f64 / n as f64 - f).abs());
        }
        if let WeightDist::BernoulliIndicator { p } = dist {
            let ones = xs.iter().filter(|&&x| x == 1.0).count() as f64 / n as f64;
            worst = (ones - p).abs();
        }
        assert!(worst <= dkw_eps(n), "{dist:?}: sup distance {worst} > {}", dkw_eps(n));
    }
}

#[test]
fn tracked_pairs_appear_at_their_probability() {
    let n = 40;
    let model = EdgeProbModel {
        beta: 0.8,
        k: 3,
        h_spec: HSpec::TwoClass { h_a: 8.0, h_b: 2.0, subset_fraction: 0.25, exponent_a: 0.0, exponent_b: 0.0 },
        gamma0: 8f64.powi(5),
        gamma1: 2.0,
        gamma2: 8.0,
        delta_low: 0.0,
        delta_av: 0.0,
        delta_up: 0.0,
    };
    let scale = (n as f64).powf(0.8);
    // pairs inside the designated subset, across it, and outside it
    let tracked: Vec<(usize, usize)> = (0..20).map(|i| (i, i + 1 + (i * 7) % 19)).collect();
    let t = 1000;
    let mut hits = vec![0usize; tracked.len()];
    for seed in 0..t {
        let g = sample_graph(&model, n, seed as u64).unwrap();
        for (h, &(u, v)) in hits.iter_mut().zip(&tracked) {
            *h += g.has_edge(u, v) as usize;
        }
    }
    for (&(u, v), &h) in tracked.iter().zip(&hits) {
        let p = model.h_spec.h(u, v, n) / scale;
        let freq = h as f64 / t as f64;
        let tol = 4.0 * (p * (1.0 - p) / t as f64).sqrt();
        assert!((freq - p).abs() <= tol, "pair ({u},{v}): {freq} vs {p}");
    }
}

#[test]
fn feasible_model_rarely_has_isolated_edges() {
    let model = EdgeProbModel::constant(0.7, 3, 1.0);
    let n = 500;
    assert!(validate_model(&model, n).unwrap().feasible);
    let samples = 100;
    let with_isolated = (0..samples)
        .filter(|&s| sample_graph(&model, n, 1000 + s).unwrap().has_isolated_edge())
        .count();
    assert!(with_isolated as f64 <= 0.05 * samples as f64, "{with_isolated} of {samples}");
}

#[test]
fn theta_low_increases_with_beta() {
    let mut last = f64::NEG_INFINITY;
    for i in 1..20 {
        let beta = i as f64 / 20.0;
        let d = validate_model(&EdgeProbModel::constant(beta, 3, 0.5), 1000).unwrap();
        assert!(d.theta_low > last);
        last = d.theta_low;
    }
}

#[test]
fn planted_exponent_is_recovered() {
    for slope in [-0.7, 0.0, 0.4, 0.8, 1.3] {
        let points: Vec<(f64, f64)> = [200.0, 400.0, 800.0, 1600.0, 3200.0]
            .into_iter()
            .map(|n: f64| (n, 2.5 * n.powf(slope)))
            .collect();
        let fit = fit_power_law(&points).unwrap();
        assert!((fit.slope - slope).abs() < 1e-9, "{slope}: {}", fit.slope);
        assert!((fit.intercept - 2.5f64.ln()).abs() < 1e-9);
    }
}
