//! Shell structure and fractal boundaries of random networks.
//!
//! The crate decomposes a network into breadth-first shells around sampled
//! origin nodes, extracts the clusters left over once every node closer than
//! a cut is removed, and compares the measured statistics with the
//! generating-function theory of branching processes.
//!
//! * [`graph`] — compressed adjacency storage, edge-list I/O, components,
//!   degree statistics.
//! * [`generators`] — seeded ER, configuration-model scale-free and random
//!   regular graphs.
//! * [`shells`] — BFS shells, mean distance, shell ensembles, residual
//!   fractions and per-shell branching.
//! * [`boundary`] — boundary clusters, their sizes and internal distances.
//! * [`gf`] — generating functions, fixed points, exponents, shell-size
//!   pdfs by composition, and the shell recursion.
//! * [`stats`] — CCDFs, log-binned pdfs, power-law and fractal-dimension
//!   fits, curve-collapse metric.
//! * [`figures`] — end-to-end pipelines producing plot-ready data.

pub mod boundary;
pub mod error;
pub mod figures;
pub mod generators;
pub mod gf;
pub mod graph;
pub mod shells;
pub mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use error::{Error, Result};
pub use graph::Graph;

/// Deterministic generator for a master seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` under `seed`, e.g. one per origin node.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
