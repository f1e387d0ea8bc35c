use crate::graph::{BoundedBfs, EdgeId, Graph};

/// Enumerates, for one edge `e`, every other edge that cannot share a
/// k-strong matching with it: the edges incident to the radius-`k` ball
/// around the endpoints of `e`. This is the neighbourhood of `e` in the
/// `(k+1)`-th power of the line graph, computed without building it.
pub(crate) struct ConflictExplorer<'g> {
    g: &'g Graph,
    k: usize,
    bfs: BoundedBfs,
    edge_stamp: Vec<u32>,
    generation: u32,
}

impl<'g> ConflictExplorer<'g> {
    pub(crate) fn new(g: &'g Graph, k: usize) -> Self {
        ConflictExplorer {
            g,
            k,
            bfs: BoundedBfs::new(g.vertex_count()),
            edge_stamp: vec![0; g.edge_count()],
            generation: 0,
        }
    }

    pub(crate) fn graph(&self) -> &'g Graph {
        self.g
    }

    /// Writes the conflicts of `e` into `out` (cleared first), unordered.
    pub(crate) fn conflicts(&mut self, e: EdgeId, out: &mut Vec<usize>) {
        out.clear();
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.edge_stamp.fill(0);
            self.generation = 1;
        }
        let (u, v) = self.g.edges()[e.0];
        self.bfs.explore(self.g, &[u, v], self.k);
        self.edge_stamp[e.0] = self.generation;
        for &x in self.bfs.visited() {
            for &(_, f) in self.g.neighbors(x) {
                if self.edge_stamp[f.0] != self.generation {
                    self.edge_stamp[f.0] = self.generation;
                    out.push(f.0);
                }
            }
        }
    }
}

/// Materialized conflict graph in compressed sparse rows; row `i` lists the
/// conflicts of `EdgeId(i)` in increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl ConflictGraph {
    pub fn build(g: &Graph, k: usize) -> Self {
        let mut explorer = ConflictExplorer::new(g, k);
        let mut offsets = Vec::with_capacity(g.edge_count() + 1);
        let mut targets = Vec::new();
        let mut buf = Vec::new();
        offsets.push(0);
        for e in g.edge_ids() {
            explorer.conflicts(e, &mut buf);
            buf.sort_unstable();
            targets.extend_from_slice(&buf);
            offsets.push(targets.len());
        }
        ConflictGraph { offsets, targets }
    }

    /// Treats `g` itself as the conflict graph (vertices are the items).
    pub fn from_graph(g: &Graph) -> Self {
        let mut offsets = vec![0];
        let mut targets = Vec::new();
        for u in 0..g.vertex_count() {
            let mut row: Vec<usize> = g.neighbors(u).iter().map(|&(v, _)| v).collect();
            row.sort_unstable();
            targets.extend(row);
            offsets.push(targets.len());
        }
        ConflictGraph { offsets, targets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    /// Number of conflicting pairs.
    pub fn pair_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn average_degree(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.targets.len() as f64 / self.len() as f64
        }
    }
}
