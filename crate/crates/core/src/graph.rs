//! Immutable simple undirected graphs with hop-distance primitives.
//!
//! Vertices are dense `0..n` indices and every edge carries an [`EdgeId`]
//! equal to its position in the input list. Neighbourhood counts `d_j(u)`
//! never include `u` itself.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of an edge in the order the graph was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph has no edges")]
    EmptyGraph,
}

/// Hop distance; unreachable vertices are [`Hops::Infinite`].
///
/// The derived order puts every finite distance below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Hops {
    Finite(u32),
    Infinite,
}

impl Hops {
    pub fn finite(self) -> Option<u32> {
        match self {
            Hops::Finite(d) => Some(d),
            Hops::Infinite => None,
        }
    }

    pub fn is_within(self, radius: u32) -> bool {
        matches!(self, Hops::Finite(d) if d <= radius)
    }
}

impl fmt::Display for Hops {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hops::Finite(d) => write!(f, "{d}"),
            Hops::Infinite => f.write_str("inf"),
        }
    }
}

/// Single-source distances from one BFS.
#[derive(Clone, Debug)]
pub struct DistanceView {
    source: usize,
    dist: Arc<[Hops]>,
}

impl DistanceView {
    pub fn source(&self) -> usize {
        self.source
    }

    pub fn get(&self, v: usize) -> Hops {
        self.dist[v]
    }

    pub fn as_slice(&self) -> &[Hops] {
        &self.dist
    }
}

/// Simple undirected graph. Immutable once built.
///
/// Full single-source BFS results are memoized per source in a `OnceLock`
/// slot, so a `Graph` can be shared across threads.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, EdgeId)>>,
    bfs_cache: Vec<OnceLock<Arc<[Hops]>>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph, rejecting self-loops, repeated pairs and bad vertex ids.
    pub fn new<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut seen = HashSet::new();
        let mut edges = Vec::new();
        for (u, v) in pairs {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            edges.push((u, v));
        }
        Ok(Self::from_checked_edges(n, edges))
    }

    /// Caller guarantees the edge list already satisfies every invariant.
    pub(crate) fn from_checked_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((v, EdgeId(i)));
            adjacency[v].push((u, EdgeId(i)));
        }
        Graph {
            n,
            edges,
            adjacency,
            bfs_cache: (0..n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_checked_edges(n, Vec::new())
    }

    pub fn path(n: usize) -> Self {
        Self::from_checked_edges(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        edges.push((n - 1, 0));
        Self::from_checked_edges(n, edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_checked_edges(n, edges)
    }

    /// `K_{1,leaves}` with the centre at vertex 0.
    pub fn star(leaves: usize) -> Self {
        Self::from_checked_edges(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Option<(usize, usize)> {
        self.edges.get(id.0).copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, EdgeId)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adjacency[u].iter().any(|&(w, _)| w == v)
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Exact hop distances from `source`. Memoized per source.
    pub fn bfs_distances(&self, source: usize) -> Result<DistanceView, GraphError> {
        self.check_vertex(source)?;
        let dist = self.bfs_cache[source]
            .get_or_init(|| {
                let mut dist = vec![Hops::Infinite; self.n];
                dist[source] = Hops::Finite(0);
                let mut queue = VecDeque::from([source]);
                while let Some(u) = queue.pop_front() {
                    let Hops::Finite(du) = dist[u] else { unreachable!() };
                    for &(v, _) in &self.adjacency[u] {
                        if dist[v] == Hops::Infinite {
                            dist[v] = Hops::Finite(du + 1);
                            queue.push_back(v);
                        }
                    }
                }
                dist.into()
            })
            .clone();
        Ok(DistanceView { source, dist })
    }

    /// `d_j(u)`: vertices other than `u` within distance `j`.
    pub fn neighborhood_count(&self, u: usize, j: usize) -> Result<usize, GraphError> {
        self.check_vertex(u)?;
        let mut bfs = BoundedBfs::new(self.n);
        Ok(bfs.ball_size(self, &[u], j) - 1)
    }

    /// Maximum degree; zero for edgeless graphs.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// True iff some edge has both endpoints of degree one.
    pub fn has_isolated_edge(&self) -> bool {
        self.isolated_edge_count() > 0
    }

    pub fn isolated_edge_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| self.degree(u) == 1 && self.degree(v) == 1)
            .count()
    }

    /// Line graph. Output vertex `i` stands for input edge `map[i]`, which is
    /// always `EdgeId(i)`; the map is returned so callers need not rely on that.
    pub fn line_graph(&self) -> Result<(Graph, Vec<EdgeId>), GraphError> {
        if self.edges.is_empty() {
            return Err(GraphError::EmptyGraph);
        }
        let mut pairs = Vec::new();
        for adj in &self.adjacency {
            for (a, &(_, e)) in adj.iter().enumerate() {
                for &(_, f) in &adj[a + 1..] {
                    pairs.push((e.0.min(f.0), e.0.max(f.0)));
                }
            }
        }
        // Two edges share at most one endpoint in a simple graph, so
        // the pair list is already free of duplicates.
        pairs.sort_unstable();
        let line = Graph::from_checked_edges(self.edges.len(), pairs);
        Ok((line, self.edge_ids().collect()))
    }

    /// `r`-th power: `u ~ v` iff `1 <= dist(u, v) <= r`.
    pub fn power(&self, r: usize) -> Graph {
        assert!(r >= 1, "graph power needs r >= 1");
        let mut bfs = BoundedBfs::new(self.n);
        let mut pairs = Vec::new();
        for u in 0..self.n {
            bfs.explore(self, &[u], r);
            pairs.extend(bfs.visited().iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        pairs.sort_unstable();
        Graph::from_checked_edges(self.n, pairs)
    }
}

/// Depth-limited BFS with reusable scratch space.
///
/// Visit marks are generation stamps, so repeated searches over a large
/// graph only pay for the part they touch.
pub(crate) struct BoundedBfs {
    stamp: Vec<u32>,
    depth: Vec<u32>,
    generation: u32,
    order: Vec<usize>,
    layers: Vec<usize>,
}

impl BoundedBfs {
    pub(crate) fn new(n: usize) -> Self {
        BoundedBfs {
            stamp: vec![0; n],
            depth: vec![0; n],
            generation: 0,
            order: Vec::new(),
            layers: Vec::new(),
        }
    }

    fn next_generation(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.fill(0);
            self.generation = 1;
        }
    }

    /// Multi-source BFS to `max_depth`. Afterwards `visited()` lists the
    /// reached vertices in BFS order and `layers()[i]` counts those at depth `i`.
    pub(crate) fn explore(&mut self, g: &Graph, sources: &[usize], max_depth: usize) {
        self.next_generation();
        self.order.clear();
        self.layers.clear();
        for &s in sources {
            if self.stamp[s] != self.generation {
                self.stamp[s] = self.generation;
                self.depth[s] = 0;
                self.order.push(s);
            }
        }
        self.layers.push(self.order.len());
        let mut head = 0;
        while head < self.order.len() {
            let u = self.order[head];
            head += 1;
            let du = self.depth[u] as usize;
            if du == max_depth {
                continue;
            }
            for &(v, _) in g.neighbors(u) {
                if self.stamp[v] != self.generation {
                    self.stamp[v] = self.generation;
                    self.depth[v] = du as u32 + 1;
                    self.order.push(v);
                    if self.layers.len() <= du + 1 {
                        self.layers.push(0);
                    }
                    self.layers[du + 1] += 1;
                }
            }
        }
        self.layers.resize(max_depth + 1, 0);
    }

    pub(crate) fn ball_size(&mut self, g: &Graph, sources: &[usize], radius: usize) -> usize {
        self.explore(g, sources, radius);
        self.order.len()
    }

    pub(crate) fn visited(&self) -> &[usize] {
        &self.order
    }

    pub(crate) fn layers(&self) -> &[usize] {
        &self.layers
    }
}
