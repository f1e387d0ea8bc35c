//! k-strong matchings.
//!
//! A matching is `k`-strong when no path with at most `k` edges joins an
//! endvertex of one matching edge to an endvertex of another. Two edges are
//! in conflict exactly when they are adjacent in the `(k+1)`-th power of the
//! line graph, so maximum k-strong matchings are maximum independent sets of
//! that conflict graph.

mod bounds;
mod conflict;
pub(crate) mod exact;
mod greedy;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{BoundedBfs, EdgeId, Graph};

pub use bounds::{k1, nu_lower_bounds, nu_upper_bound, BoundsReport, LowerBounds, UpperBound};
pub use conflict::ConflictGraph;
pub use exact::{SearchOutcome, StrongMatchingSolver, DEFAULT_BUDGET};
pub use greedy::{greedy_k_strong, greedy_on_conflicts};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchingError {
    #[error("unknown edge id {0}")]
    UnknownEdgeId(EdgeId),
    #[error("edge set is not a matching")]
    NotAMatching,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("search budget of {budget} nodes exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("graph contains an isolated edge")]
    IsolatedEdgePresent,
    #[error("neighbourhood sum is zero")]
    ZeroDenominator,
    #[error("upper bound needs k >= 3, got {0}")]
    KTooSmall(usize),
    #[error("some vertex has an empty radius-{radius} neighbourhood")]
    ZeroMinNeighborhood { radius: usize },
    #[error("bound does not fit in 128-bit arithmetic")]
    Overflow,
}

/// Edge set together with the strength it is claimed to satisfy.
///
/// Edge ids are kept sorted and unique. Serialized as
/// `{"k": .., "edge_ids": [..], "size": ..}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MatchingWire", into = "MatchingWire")]
pub struct Matching {
    k: usize,
    edge_ids: Vec<EdgeId>,
}

#[derive(Serialize, Deserialize)]
struct MatchingWire {
    k: usize,
    edge_ids: Vec<EdgeId>,
    size: usize,
}

impl TryFrom<MatchingWire> for Matching {
    type Error = String;

    fn try_from(w: MatchingWire) -> Result<Self, String> {
        let m = Matching::new(w.k, w.edge_ids);
        if m.size() != w.size {
            return Err(format!("size {} does not match {} distinct edge ids", w.size, m.size()));
        }
        Ok(m)
    }
}

impl From<Matching> for MatchingWire {
    fn from(m: Matching) -> Self {
        MatchingWire { k: m.k, size: m.edge_ids.len(), edge_ids: m.edge_ids }
    }
}

impl Matching {
    pub fn new(k: usize, ids: impl IntoIterator<Item = EdgeId>) -> Self {
        let edge_ids: BTreeSet<EdgeId> = ids.into_iter().collect();
        Matching { k, edge_ids: edge_ids.into_iter().collect() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edge_ids(&self) -> &[EdgeId] {
        &self.edge_ids
    }

    pub fn size(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.edge_ids.binary_search(&e).is_ok()
    }

    /// Checks the claimed strength against `g`.
    pub fn validate(&self, g: &Graph) -> Result<bool, MatchingError> {
        is_k_strong(g, &self.edge_ids, self.k)
    }
}

fn endpoints(g: &Graph, ids: &[EdgeId]) -> Result<Vec<(usize, usize)>, MatchingError> {
    ids.iter()
        .map(|&e| g.edge(e).ok_or(MatchingError::UnknownEdgeId(e)))
        .collect()
}

/// True iff the edges are pairwise vertex-disjoint.
pub fn is_matching(g: &Graph, ids: &[EdgeId]) -> Result<bool, MatchingError> {
    let ends = endpoints(g, ids)?;
    let mut used = vec![false; g.vertex_count()];
    let distinct: BTreeSet<_> = ids.iter().collect();
    if distinct.len() != ids.len() {
        return Ok(false);
    }
    for (u, v) in ends {
        if used[u] || used[v] {
            return Ok(false);
        }
        used[u] = true;
        used[v] = true;
    }
    Ok(true)
}

/// True iff every endvertex-to-endvertex distance between distinct edges of
/// the matching exceeds `k`. Distances are measured in the host graph.
pub fn is_k_strong(g: &Graph, ids: &[EdgeId], k: usize) -> Result<bool, MatchingError> {
    if !is_matching(g, ids)? {
        return Err(MatchingError::NotAMatching);
    }
    let ends = endpoints(g, ids)?;
    let mut owner = vec![usize::MAX; g.vertex_count()];
    for (i, &(u, v)) in ends.iter().enumerate() {
        owner[u] = i;
        owner[v] = i;
    }
    let mut bfs = BoundedBfs::new(g.vertex_count());
    for (i, &(u, v)) in ends.iter().enumerate() {
        bfs.explore(g, &[u, v], k);
        if bfs.visited().iter().any(|&x| owner[x] != usize::MAX && owner[x] != i) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `nu_k(g)` with a witness, by exact branch and bound on the conflict graph.
pub fn max_k_strong_exact(
    g: &Graph,
    k: usize,
    budget: u64,
) -> Result<(usize, Matching), MatchingError> {
    let solver = StrongMatchingSolver::new(g, k)?;
    let out = solver.max_size(budget)?;
    Ok((out.size, Matching::new(k, out.members.into_iter().map(EdgeId))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p4() -> Graph {
        Graph::path(4)
    }

    #[test]
    fn matching_predicate() {
        let g = p4();
        assert!(is_matching(&g, &[EdgeId(0), EdgeId(2)]).unwrap());
        assert!(!is_matching(&g, &[EdgeId(0), EdgeId(1)]).unwrap());
        assert!(is_matching(&g, &[]).unwrap());
        assert!(!is_matching(&g, &[EdgeId(0), EdgeId(0)]).unwrap());
        assert_eq!(
            is_matching(&g, &[EdgeId(3)]),
            Err(MatchingError::UnknownEdgeId(EdgeId(3)))
        );
    }

    #[test]
    fn strength_predicate() {
        let g = p4();
        let ac = [EdgeId(0), EdgeId(2)];
        assert!(is_k_strong(&g, &ac, 0).unwrap());
        assert!(!is_k_strong(&g, &ac, 1).unwrap());
        let c6 = Graph::cycle(6);
        assert!(is_k_strong(&c6, &[EdgeId(0), EdgeId(3)], 1).unwrap());
        assert!(!is_k_strong(&c6, &[EdgeId(0), EdgeId(3)], 2).unwrap());
        assert_eq!(
            is_k_strong(&g, &[EdgeId(0), EdgeId(1)], 0),
            Err(MatchingError::NotAMatching)
        );
        assert!(is_k_strong(&g, &[], 7).unwrap());
    }

    #[test]
    fn exact_examples() {
        let g = p4();
        assert_eq!(max_k_strong_exact(&g, 0, DEFAULT_BUDGET).unwrap().0, 2);
        assert_eq!(max_k_strong_exact(&g, 1, DEFAULT_BUDGET).unwrap().0, 1);
        let c6 = Graph::cycle(6);
        let sizes: Vec<_> = (0..3)
            .map(|k| max_k_strong_exact(&c6, k, DEFAULT_BUDGET).unwrap().0)
            .collect();
        assert_eq!(sizes, vec![3, 2, 1]);
        assert_eq!(
            max_k_strong_exact(&Graph::empty(3), 0, DEFAULT_BUDGET),
            Err(MatchingError::EmptyGraph)
        );
    }

    #[test]
    fn exact_witness_is_lexicographically_smallest() {
        // C6 at k=0 has two perfect matchings; {0,2,4} comes first.
        let (_, w) = max_k_strong_exact(&Graph::cycle(6), 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.edge_ids(), &[EdgeId(0), EdgeId(2), EdgeId(4)]);
        assert!(w.validate(&Graph::cycle(6)).unwrap());
        let (_, w) = max_k_strong_exact(&Graph::cycle(6), 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(w.edge_ids(), &[EdgeId(0), EdgeId(3)]);
    }

    #[test]
    fn budget_is_enforced() {
        let g = Graph::cycle(40);
        assert_eq!(
            max_k_strong_exact(&g, 0, 3),
            Err(MatchingError::BudgetExceeded { budget: 3 })
        );
    }

    #[test]
    fn matching_json() {
        let m = Matching::new(1, [EdgeId(3), EdgeId(0)]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"k":1,"edge_ids":[0,3],"size":2}"#);
        assert_eq!(serde_json::from_str::<Matching>(&s).unwrap(), m);
        assert!(serde_json::from_str::<Matching>(r#"{"k":1,"edge_ids":[0],"size":2}"#).is_err());
    }
}
