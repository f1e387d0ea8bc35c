//! Small statistics toolkit: sample summaries with a jackknife error for the
//! variance, medians, exact binomial tails against the multiplicative
//! Chernoff bound, and log-log power-law fits.

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::exact::neumaier_sum;
use crate::rng::{substream, DOMAIN_BINOMIAL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("epsilon must lie in (0, 1/2], got {0}")]
    EpsilonOutOfRange(f64),
    #[error("success probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

/// Mean, unbiased variance and their standard errors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// Jackknife standard error of the sample variance (0 for fewer than 3 samples).
    pub variance_stderr: f64,
}

impl Summary {
    /// Sums run in input order with compensation, and deviations are taken
    /// from the first sample, so identical samples give their exact value as
    /// the mean and an exactly zero variance.
    pub fn of(xs: &[f64]) -> Summary {
        let n = xs.len();
        if n == 0 {
            return Summary { count: 0, mean: f64::NAN, variance: f64::NAN, stderr: f64::NAN, variance_stderr: f64::NAN };
        }
        let x0 = xs[0];
        let mean = x0 + neumaier_sum(xs.iter().map(|x| x - x0)) / n as f64;
        if n == 1 {
            return Summary { count: 1, mean, variance: 0.0, stderr: 0.0, variance_stderr: 0.0 };
        }
        let ss = neumaier_sum(xs.iter().map(|x| (x - mean) * (x - mean)));
        let variance = ss / (n - 1) as f64;
        let stderr = (variance / n as f64).sqrt();

        let variance_stderr = if n < 3 {
            0.0
        } else {
            let nf = n as f64;
            let loo: Vec<f64> = xs
                .iter()
                .map(|x| {
                    let d = x - mean;
                    ((ss - d * d * nf / (nf - 1.0)) / (nf - 2.0)).max(0.0)
                })
                .collect();
            let loo_mean = neumaier_sum(loo.iter().copied()) / nf;
            let spread = neumaier_sum(loo.iter().map(|v| (v - loo_mean) * (v - loo_mean)));
            ((nf - 1.0) / nf * spread).sqrt()
        };
        Summary { count: n, mean, variance, stderr, variance_stderr }
    }
}

/// Median under IEEE total order; `NaN` for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        let (a, b) = (v[mid - 1], v[mid]);
        if a == b { a } else { a / 2.0 + b / 2.0 }
    }
}

fn ln_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `P(|T - theta| >= theta * eps)` for `T ~ Binomial(l, p)`, `theta = l p`,
/// by direct summation of the probability mass function. Points within
/// `1e-9` of the boundary are counted as inside the tail.
pub fn binomial_two_sided_tail(l: u64, p: f64, eps: f64) -> f64 {
    let theta = l as f64 * p;
    let cut = theta * eps - 1e-9;
    let in_tail = |t: u64| (t as f64 - theta).abs() >= cut;
    if p >= 1.0 {
        return if in_tail(l) { 1.0 } else { 0.0 };
    }
    if p <= 0.0 {
        return if in_tail(0) { 1.0 } else { 0.0 };
    }
    let lf = ln_factorials(l);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mass = (0..=l).filter(|&t| in_tail(t)).map(|t| {
        let lc = lf[l as usize] - lf[t as usize] - lf[(l - t) as usize];
        (lc + t as f64 * lp + (l - t) as f64 * lq).exp()
    });
    neumaier_sum(mass).min(1.0)
}

/// `2 exp(-eps^2 theta / 4)`.
pub fn chernoff_bound(theta: f64, eps: f64) -> f64 {
    2.0 * (-eps * eps * theta / 4.0).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChernoffCheck {
    pub l: u64,
    pub p: f64,
    pub eps: f64,
    pub theta: f64,
    pub exact_tail: f64,
    pub bound: f64,
    pub mc_trials: u64,
    pub mc_frequency: f64,
    pub seed: u64,
    /// `exact_tail <= bound`.
    pub verdict: bool,
}

/// Exact tail versus the bound, plus a Monte Carlo frequency for sanity.
pub fn chernoff_check(l: u64, p: f64, eps: f64, mc_trials: u64, seed: u64) -> Result<ChernoffCheck, StatsError> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(StatsError::EpsilonOutOfRange(eps));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(StatsError::InvalidProbability(p));
    }
    let theta = l as f64 * p;
    let exact_tail = binomial_two_sided_tail(l, p, eps);
    let bound = chernoff_bound(theta, eps);

    let dist = Binomial::new(l, p).map_err(|e| StatsError::DegenerateInput(e.to_string()))?;
    let mut rng = substream(seed, DOMAIN_BINOMIAL, l, p.to_bits() ^ eps.to_bits().rotate_left(17));
    let cut = theta * eps - 1e-9;
    let hits = (0..mc_trials)
        .filter(|_| (dist.sample(&mut rng) as f64 - theta).abs() >= cut)
        .count();
    let mc_frequency = if mc_trials == 0 { f64::NAN } else { hits as f64 / mc_trials as f64 };

    Ok(ChernoffCheck {
        l,
        p,
        eps,
        theta,
        exact_tail,
        bound,
        mc_trials,
        mc_frequency,
        seed,
        verdict: exact_tail <= bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ln value` on `ln n`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, StatsError> {
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 3 {
        return Err(StatsError::DegenerateInput(format!(
            "need at least 3 distinct sizes, got {}",
            xs.len()
        )));
    }
    if let Some(bad) = points
        .iter()
        .find(|(n, v)| !(n.is_finite() && *n > 0.0 && v.is_finite() && *v > 0.0))
    {
        return Err(StatsError::DegenerateInput(format!(
            "point ({}, {}) is not finite and positive",
            bad.0, bad.1
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = Summary::of(&lx).mean;
    let my = Summary::of(&ly).mean;
    let sxx = neumaier_sum(lx.iter().map(|x| (x - mx) * (x - mx)));
    let sxy = neumaier_sum(lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)));
    let syy = neumaier_sum(ly.iter().map(|y| (y - my) * (y - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = neumaier_sum(lx.iter().zip(&ly).map(|(x, y)| {
        let r = y - (intercept + slope * x);
        r * r
    }));
    let r_squared = if syy == 0.0 || ss_res <= 1e-24 * syy.max(1.0) { 1.0 } else { 1.0 - ss_res / syy };
    Ok(PowerLawFit { slope, intercept, r_squared })
}
