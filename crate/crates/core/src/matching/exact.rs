//! Exact maximum (minimum-weight) independent sets on a conflict graph.
//!
//! The objective is lexicographic: maximize the number of chosen items, then
//! minimize their total weight. Branching always takes the smallest remaining
//! item and tries "include" before "exclude", so leaves are visited in
//! lexicographic order of their sorted id sequences. Only strictly better
//! leaves replace the incumbent, which makes the returned witness the
//! lexicographically smallest optimum regardless of pruning.

use crate::graph::Graph;

use super::conflict::ConflictGraph;
use super::greedy::greedy_on_conflicts;
use super::MatchingError;

pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub size: usize,
    /// Sum of member weights in increasing id order; zero when unweighted.
    pub weight: f64,
    /// Chosen items, sorted.
    pub members: Vec<usize>,
    /// Search nodes visited.
    pub nodes: u64,
}

/// Conflict rows as dense bitsets, prepared once and reused for many
/// weight draws.
#[derive(Clone, Debug)]
pub struct StrongMatchingSolver {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    conflicts: ConflictGraph,
}

impl StrongMatchingSolver {
    /// Solver for k-strong matchings of `g`.
    pub fn new(g: &Graph, k: usize) -> Result<Self, MatchingError> {
        if g.edge_count() == 0 {
            return Err(MatchingError::EmptyGraph);
        }
        Ok(Self::from_conflicts(ConflictGraph::build(g, k)))
    }

    /// Solver for maximum independent sets of an arbitrary conflict graph.
    pub fn from_conflicts(conflicts: ConflictGraph) -> Self {
        let n = conflicts.len();
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * words];
        for i in 0..n {
            for &j in conflicts.row(i) {
                rows[i * words + j / 64] |= 1 << (j % 64);
            }
        }
        StrongMatchingSolver { n, words, rows, conflicts }
    }

    pub fn item_count(&self) -> usize {
        self.n
    }

    pub fn conflicts(&self) -> &ConflictGraph {
        &self.conflicts
    }

    /// Maximum number of pairwise non-conflicting items.
    pub fn max_size(&self, budget: u64) -> Result<SearchOutcome, MatchingError> {
        let zeros = vec![0.0; self.n];
        let mut out = self.search(&zeros, budget)?;
        out.weight = 0.0;
        Ok(out)
    }

    /// Maximum size first, then minimum total weight.
    pub fn min_weight(&self, weights: &[f64], budget: u64) -> Result<SearchOutcome, MatchingError> {
        assert_eq!(weights.len(), self.n, "one weight per item");
        self.search(weights, budget)
    }

    fn search(&self, weights: &[f64], budget: u64) -> Result<SearchOutcome, MatchingError> {
        let (greedy_size, greedy_members) = greedy_on_conflicts(&self.conflicts);
        let greedy_weight = greedy_members.iter().map(|&i| weights[i]).sum();
        let mut s = Search {
            solver: self,
            weights,
            budget,
            nodes: 0,
            current: Vec::new(),
            best: None,
            reference: (greedy_size, greedy_weight),
            cliques: Vec::new(),
        };
        let mut cand = vec![0u64; self.words];
        for i in 0..self.n {
            cand[i / 64] |= 1 << (i % 64);
        }
        s.expand(cand, 0, 0.0)?;
        let nodes = s.nodes;
        let (size, _, mut members) = s.best.expect("the empty set is always a leaf");
        members.sort_unstable();
        let weight = neumaier_sum(members.iter().map(|&i| weights[i]));
        Ok(SearchOutcome { size, weight, members, nodes })
    }
}

/// Compensated summation; deterministic for a fixed input order.
pub(crate) fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

struct Search<'a> {
    solver: &'a StrongMatchingSolver,
    weights: &'a [f64],
    budget: u64,
    nodes: u64,
    current: Vec<usize>,
    best: Option<(usize, f64, Vec<usize>)>,
    /// Greedy value; used only to prune subtrees that cannot beat it strictly.
    reference: (usize, f64),
    cliques: Vec<(Vec<u64>, f64)>,
}

fn ones(set: &[u64]) -> impl Iterator<Item = usize> + '_ {
    set.iter().enumerate().flat_map(|(w, &bits)| {
        let mut b = bits;
        std::iter::from_fn(move || {
            (b != 0).then(|| {
                let t = b.trailing_zeros() as usize;
                b &= b - 1;
                w * 64 + t
            })
        })
    })
}

fn count(set: &[u64]) -> usize {
    set.iter().map(|w| w.count_ones() as usize).sum()
}

impl Search<'_> {
    fn row(&self, i: usize) -> &[u64] {
        let w = self.solver.words;
        &self.solver.rows[i * w..(i + 1) * w]
    }

    fn expand(&mut self, mut cand: Vec<u64>, mut size: usize, mut weight: f64) -> Result<(), MatchingError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(MatchingError::BudgetExceeded { budget: self.budget });
        }

        // Items with no remaining conflicts belong to every optimum below here.
        let mark = self.current.len();
        let free: Vec<usize> = ones(&cand)
            .filter(|&i| self.row(i).iter().zip(&cand).all(|(r, c)| r & c == 0))
            .collect();
        for &i in &free {
            cand[i / 64] &= !(1 << (i % 64));
            self.current.push(i);
            size += 1;
            weight += self.weights[i];
        }

        let result = self.branch(cand, size, weight);
        self.current.truncate(mark);
        result
    }

    fn branch(&mut self, cand: Vec<u64>, size: usize, weight: f64) -> Result<(), MatchingError> {
        let Some(v) = ones(&cand).next() else {
            let better = match &self.best {
                None => true,
                Some((bs, bw, _)) => size > *bs || (size == *bs && weight < *bw),
            };
            if better {
                self.best = Some((size, weight, self.current.clone()));
            }
            return Ok(());
        };

        if self.prunable(&cand, size, weight) {
            return Ok(());
        }

        let mut with_v = cand.clone();
        for (c, r) in with_v.iter_mut().zip(self.row(v)) {
            *c &= !r;
        }
        with_v[v / 64] &= !(1 << (v % 64));
        self.current.push(v);
        let res = self.expand(with_v, size + 1, weight + self.weights[v]);
        self.current.pop();
        res?;

        let mut without_v = cand;
        without_v[v / 64] &= !(1 << (v % 64));
        self.expand(without_v, size, weight)
    }

    /// Clique-cover and degree bounds against the incumbent (ties pruned,
    /// since later leaves are lexicographically larger) and against the
    /// greedy reference (ties kept).
    fn prunable(&mut self, cand: &[u64], size: usize, weight: f64) -> bool {
        let (cover, min_extra_weight) = self.clique_cover(cand);
        let degree_ub = self.degree_bound(cand);
        let size_ub = size + cover.min(degree_ub);

        let beaten = |target: (usize, f64), ties_lose: bool| {
            if size_ub < target.0 {
                return true;
            }
            if size + cover == target.0 {
                let lb = weight + min_extra_weight;
                if ties_lose {
                    return lb >= target.1;
                }
                // The reference was summed in a different order; leave room for rounding.
                return lb > target.1 + 1e-9 * (1.0 + target.1.abs());
            }
            false
        };
        if beaten(self.reference, false) {
            return true;
        }
        match &self.best {
            Some((bs, bw, _)) => beaten((*bs, *bw), true),
            None => false,
        }
    }

    /// Greedy partition of `cand` into cliques. Returns the number of cliques
    /// and the sum over cliques of their lightest member.
    fn clique_cover(&mut self, cand: &[u64]) -> (usize, f64) {
        let mut used = 0;
        for v in ones(cand) {
            let (bit_word, bit) = (v / 64, 1u64 << (v % 64));
            let slot = self.cliques[..used]
                .iter()
                .position(|(common, _)| common[bit_word] & bit != 0);
            let w = self.weights[v];
            match slot {
                Some(c) => {
                    let words = self.solver.words;
                    let row = &self.solver.rows[v * words..(v + 1) * words];
                    let (common, min_w) = &mut self.cliques[c];
                    for (x, r) in common.iter_mut().zip(row) {
                        *x &= r;
                    }
                    *min_w = min_w.min(w);
                }
                None => {
                    if used == self.cliques.len() {
                        self.cliques.push((vec![0; self.solver.words], 0.0));
                    }
                    let words = self.solver.words;
                    let row = &self.solver.rows[v * words..(v + 1) * words];
                    let (common, min_w) = &mut self.cliques[used];
                    for ((x, r), c) in common.iter_mut().zip(row).zip(cand) {
                        *x = r & c;
                    }
                    *min_w = w;
                    used += 1;
                }
            }
        }
        let extra = self.cliques[..used].iter().map(|(_, w)| *w).sum();
        (used, extra)
    }

    /// Every conflict inside `cand` is covered by the items left out, and
    /// each item covers at most `max_deg` conflicts.
    fn degree_bound(&self, cand: &[u64]) -> usize {
        let mut pairs2 = 0usize;
        let mut max_deg = 0usize;
        for v in ones(cand) {
            let d = self.row(v).iter().zip(cand).map(|(r, c)| (r & c).count_ones() as usize).sum();
            pairs2 += d;
            max_deg = max_deg.max(d);
        }
        let total = count(cand);
        if max_deg == 0 {
            return total;
        }
        total - (pairs2 / 2).div_ceil(max_deg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn brute_force_mis(c: &ConflictGraph, weights: &[f64]) -> (usize, f64, Vec<usize>) {
        let n = c.len();
        let mut best: Option<(usize, f64, Vec<usize>)> = None;
        for mask in 0u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let independent = members
                .iter()
                .all(|&i| c.row(i).iter().all(|&j| mask >> j & 1 == 0));
            if !independent {
                continue;
            }
            let w: f64 = neumaier_sum(members.iter().map(|&i| weights[i]));
            let better = match &best {
                None => true,
                Some((bs, bw, bm)) => {
                    members.len() > *bs
                        || (members.len() == *bs && (w < *bw || (w == *bw && members < *bm)))
                }
            };
            if better {
                best = Some((members.len(), w, members));
            }
        }
        best.unwrap()
    }

    #[test]
    fn agrees_with_enumeration_on_small_graphs() {
        let graphs = [
            Graph::cycle(7),
            Graph::complete(5),
            Graph::path(9),
            Graph::star(5),
            Graph::new(8, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6), (6, 7), (7, 4)]).unwrap(),
        ];
        for g in &graphs {
            let c = ConflictGraph::from_graph(g);
            let solver = StrongMatchingSolver::from_conflicts(c.clone());
            let weights: Vec<f64> = (0..c.len()).map(|i| ((i * 7 + 3) % 5) as f64 * 0.25).collect();
            let out = solver.min_weight(&weights, DEFAULT_BUDGET).unwrap();
            let (bs, bw, bm) = brute_force_mis(&c, &weights);
            assert_eq!((out.size, out.weight, out.members.clone()), (bs, bw, bm), "{g:?}");

            let zero = vec![0.0; c.len()];
            let (zs, _, zm) = brute_force_mis(&c, &zero);
            let out = solver.max_size(DEFAULT_BUDGET).unwrap();
            assert_eq!((out.size, out.members), (zs, zm));
        }
    }

    #[test]
    fn compensated_sum() {
        assert_eq!(neumaier_sum(std::iter::repeat_n(0.1, 10)), 1.0);
        assert_eq!(neumaier_sum([1e16, 1.0, -1e16]), 1.0);
    }
}
