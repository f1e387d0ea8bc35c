//! Neighbourhood bounds on the k-strong matching number.
//!
//! For a graph without isolated edges and any `k >= 0`:
//!
//! ```text
//! nu_k >= m^2 / (4 * sum_u d_1(u) (d_{k+1}(u) - 1)) >= m / (8 * Delta^(k+1))
//! ```
//!
//! and for `k >= 3`, `nu_k <= n / min_u d_{k1}(u)` where `k1` is
//! `(k-1)/2` for odd `k` and `(k-2)/2` for even `k`, so that `2 * k1 <= k - 1`.

use serde::{Deserialize, Serialize};

use crate::graph::{BoundedBfs, Graph};
use crate::rational::Rational;

use super::MatchingError;

/// Radius used by the upper bound.
pub fn k1(k: usize) -> usize {
    if k % 2 == 1 {
        (k - 1) / 2
    } else {
        k.saturating_sub(2) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBounds {
    /// Average-degree bound.
    pub nu_avg_lower: Rational,
    /// Maximum-degree bound.
    pub nu_maxdeg_lower: Rational,
    /// `sum_u d_1(u) (d_{k+1}(u) - 1)`.
    pub degree_sum: u128,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpperBound {
    pub nu_upper: Rational,
    pub k1: usize,
    pub min_neighborhood: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub k: usize,
    pub nu_avg_lower: Rational,
    pub nu_maxdeg_lower: Rational,
    /// Absent for `k < 3` or when some radius-`k1` neighbourhood is empty.
    pub nu_upper: Option<Rational>,
    pub k1: usize,
    pub degree_sum: u128,
}

impl BoundsReport {
    pub fn compute(g: &Graph, k: usize) -> Result<Self, MatchingError> {
        let lower = nu_lower_bounds(g, k)?;
        let upper = nu_upper_bound(g, k).ok();
        Ok(BoundsReport {
            k,
            nu_avg_lower: lower.nu_avg_lower,
            nu_maxdeg_lower: lower.nu_maxdeg_lower,
            nu_upper: upper.map(|u| u.nu_upper),
            k1: k1(k),
            degree_sum: lower.degree_sum,
        })
    }
}

pub fn nu_lower_bounds(g: &Graph, k: usize) -> Result<LowerBounds, MatchingError> {
    let m = g.edge_count() as u128;
    if m == 0 {
        return Err(MatchingError::EmptyGraph);
    }
    if g.has_isolated_edge() {
        return Err(MatchingError::IsolatedEdgePresent);
    }

    let mut bfs = BoundedBfs::new(g.vertex_count());
    let mut degree_sum: u128 = 0;
    for u in 0..g.vertex_count() {
        let d1 = g.degree(u) as u128;
        if d1 == 0 {
            continue;
        }
        // ball includes u; d_{k+1}(u) - 1 = ball - 2
        let ball = bfs.ball_size(g, &[u], k + 1) as u128;
        degree_sum += d1 * (ball - 2);
    }
    if degree_sum == 0 {
        return Err(MatchingError::ZeroDenominator);
    }
    let nu_avg_lower = Rational::new(m * m, 4 * degree_sum).expect("nonzero");

    let delta = g.max_degree() as u128;
    let pow = u32::try_from(k + 1)
        .ok()
        .and_then(|e| delta.checked_pow(e))
        .and_then(|p| p.checked_mul(8))
        .ok_or(MatchingError::Overflow)?;
    let nu_maxdeg_lower = Rational::new(m, pow).expect("delta >= 1 when m >= 1");

    Ok(LowerBounds { nu_avg_lower, nu_maxdeg_lower, degree_sum })
}

pub fn nu_upper_bound(g: &Graph, k: usize) -> Result<UpperBound, MatchingError> {
    if k < 3 {
        return Err(MatchingError::KTooSmall(k));
    }
    let radius = k1(k);
    let mut bfs = BoundedBfs::new(g.vertex_count());
    let min_neighborhood = (0..g.vertex_count())
        .map(|u| bfs.ball_size(g, &[u], radius) - 1)
        .min()
        .unwrap_or(0);
    if min_neighborhood == 0 {
        return Err(MatchingError::ZeroMinNeighborhood { radius });
    }
    let nu_upper = Rational::new(g.vertex_count() as u128, min_neighborhood as u128).expect("nonzero");
    Ok(UpperBound { nu_upper, k1: radius, min_neighborhood })
}
