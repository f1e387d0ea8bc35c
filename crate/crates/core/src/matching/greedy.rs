use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::{EdgeId, Graph};

use super::conflict::{ConflictExplorer, ConflictGraph};
use super::{Matching, MatchingError};

trait Neighbors {
    fn len(&self) -> usize;
    fn fill(&mut self, i: usize, out: &mut Vec<usize>);
}

impl Neighbors for &ConflictGraph {
    fn len(&self) -> usize {
        ConflictGraph::len(self)
    }

    fn fill(&mut self, i: usize, out: &mut Vec<usize>) {
        out.clear();
        out.extend_from_slice(self.row(i));
    }
}

impl Neighbors for ConflictExplorer<'_> {
    fn len(&self) -> usize {
        self.graph().edge_count()
    }

    fn fill(&mut self, i: usize, out: &mut Vec<usize>) {
        self.conflicts(EdgeId(i), out);
    }
}

/// Min-degree greedy independent set: repeatedly take a remaining item of
/// least remaining degree (smallest id on ties) and delete its closed
/// neighbourhood. Reaches at least `sum 1/(deg+1) >= n/(d_av+1)`.
fn min_degree_greedy<N: Neighbors>(mut nb: N) -> Vec<usize> {
    let n = nb.len();
    let mut buf = Vec::new();
    let mut deg = Vec::with_capacity(n);
    for i in 0..n {
        nb.fill(i, &mut buf);
        deg.push(buf.len());
    }
    let max_deg = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<BinaryHeap<Reverse<usize>>> = vec![BinaryHeap::new(); max_deg + 1];
    for (i, &d) in deg.iter().enumerate() {
        buckets[d].push(Reverse(i));
    }
    let mut alive = vec![true; n];
    let mut chosen = Vec::new();
    let mut removed = Vec::new();
    let mut lowest = 0;

    while lowest <= max_deg {
        let Some(Reverse(i)) = buckets[lowest].pop() else {
            lowest += 1;
            continue;
        };
        if !alive[i] || deg[i] != lowest {
            continue;
        }
        chosen.push(i);
        alive[i] = false;
        nb.fill(i, &mut buf);
        removed.clear();
        for &w in &buf {
            if alive[w] {
                alive[w] = false;
                removed.push(w);
            }
        }
        for &w in &removed {
            nb.fill(w, &mut buf);
            for &x in &buf {
                if alive[x] {
                    deg[x] -= 1;
                    buckets[deg[x]].push(Reverse(x));
                    lowest = lowest.min(deg[x]);
                }
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Greedy independent set of a materialized conflict graph.
pub fn greedy_on_conflicts(c: &ConflictGraph) -> (usize, Vec<usize>) {
    let chosen = min_degree_greedy(c);
    (chosen.len(), chosen)
}

/// Greedy k-strong matching. Conflicts are enumerated on the fly, so the
/// power of the line graph is never stored.
pub fn greedy_k_strong(g: &Graph, k: usize) -> Result<(usize, Matching), MatchingError> {
    if g.edge_count() == 0 {
        return Err(MatchingError::EmptyGraph);
    }
    let chosen = min_degree_greedy(ConflictExplorer::new(g, k));
    Ok((chosen.len(), Matching::new(k, chosen.into_iter().map(EdgeId))))
}
