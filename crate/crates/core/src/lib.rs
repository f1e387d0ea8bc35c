//! k-strong matchings in graphs.
//!
//! A matching is *k-strong* when no path of at most `k` edges joins
//! endvertices of two different matching edges (`k = 0` is an ordinary
//! matching, `k = 1` an induced matching). The crate provides
//!
//! * [`graph`]: immutable graphs, BFS distances, neighbourhood counts,
//!   line graphs and graph powers;
//! * [`matching`]: validity checks, exact and greedy maximum k-strong
//!   matchings and neighbourhood bounds on their size;
//! * [`weights`]: random edge weights and the minimum weight of a maximum
//!   k-strong matching, with Monte Carlo statistics;
//! * [`random_graphs`]: inhomogeneous random graphs with edge
//!   probabilities `h(e) / n^beta` and their exponent diagnostics;
//! * [`stats`] and [`experiments`]: tail bounds, power-law fits and the
//!   batch experiment harness behind the CLI.

pub mod experiments;
pub mod graph;
pub mod io;
pub mod matching;
pub mod random_graphs;
pub mod rational;
mod rng;
pub mod stats;
pub mod weights;

pub use rng::derive_seed;

pub use graph::{EdgeId, Graph, GraphError, Hops};
pub use matching::{Matching, MatchingError};
pub use rational::Rational;
