//! Immutable undirected simple graphs in compressed adjacency form.
//!
//! Nodes are dense indices `0..N`. The original labels (from an edge-list
//! file, or the parent graph of an induced subgraph) are kept in an [`IdMap`]
//! so results can always be reported against the caller's identifiers.

mod components;
mod degree;
mod io;

use std::borrow::Cow;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub use components::{connected_components, giant_component, ComponentLabeling};
pub use degree::{branching_factor, degree_distribution, DegreeDistribution};
pub use io::{load_edge_list, read_edge_list, write_edge_list};

/// Mapping from dense node index to the label the node was created with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdMap {
    /// Label of node `i` is `i` itself.
    Identity,
    Numeric(Vec<u64>),
    Named(Vec<String>),
}

impl IdMap {
    fn label(&self, index: usize) -> Cow<'_, str> {
        match self {
            IdMap::Identity => Cow::Owned(index.to_string()),
            IdMap::Numeric(ids) => Cow::Owned(ids[index].to_string()),
            IdMap::Named(ids) => Cow::Borrowed(&ids[index]),
        }
    }

    /// Restricts the map to `kept` (new index `i` is old index `kept[i]`).
    fn restrict(&self, kept: &[u32]) -> IdMap {
        match self {
            IdMap::Identity => IdMap::Numeric(kept.iter().map(|&i| u64::from(i)).collect()),
            IdMap::Numeric(ids) => IdMap::Numeric(kept.iter().map(|&i| ids[i as usize]).collect()),
            IdMap::Named(ids) => {
                IdMap::Named(kept.iter().map(|&i| ids[i as usize].clone()).collect())
            }
        }
    }
}

/// What [`build_graph`] discarded while enforcing simplicity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Clone, Debug)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    ids: IdMap,
}

impl Graph {
    /// Builds a simple graph on nodes `0..n` from index pairs, dropping
    /// self-loops and repeated edges (in either orientation).
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn from_index_edges<I>(n: usize, edges: I) -> (Graph, BuildStats)
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        assert!(n <= u32::MAX as usize, "node count exceeds u32 index space");
        let mut stats = BuildStats::default();
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) out of range for {n} nodes");
            if a == b {
                stats.self_loops += 1;
                continue;
            }
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            pairs.push((lo as u32, hi as u32));
        }
        pairs.sort_unstable();
        let before = pairs.len();
        pairs.dedup();
        stats.duplicates = before - pairs.len();

        let mut degree = vec![0usize; n];
        for &(a, b) in &pairs {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        // Lower neighbors first, then higher ones; sorted pair order keeps
        // every list ascending.
        for &(a, b) in &pairs {
            targets[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        for &(a, b) in &pairs {
            targets[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
        }
        let graph = Graph {
            offsets,
            targets,
            ids: IdMap::Identity,
        };
        (graph, stats)
    }

    pub fn with_ids(mut self, ids: IdMap) -> Graph {
        match &ids {
            IdMap::Identity => {}
            IdMap::Numeric(v) => assert_eq!(v.len(), self.node_count()),
            IdMap::Named(v) => assert_eq!(v.len(), self.node_count()),
        }
        self.ids = ids;
        self
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.targets[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn mean_degree(&self) -> f64 {
        if self.node_count() == 0 {
            return 0.0;
        }
        self.targets.len() as f64 / self.node_count() as f64
    }

    pub fn ids(&self) -> &IdMap {
        &self.ids
    }

    pub fn label(&self, node: usize) -> Cow<'_, str> {
        self.ids.label(node)
    }

    /// Dense index of the node created with `label`, if any. Linear scan.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        match &self.ids {
            IdMap::Identity => label.parse::<usize>().ok().filter(|&i| i < self.node_count()),
            IdMap::Numeric(ids) => {
                let want: u64 = label.parse().ok()?;
                ids.iter().position(|&id| id == want)
            }
            IdMap::Named(ids) => ids.iter().position(|id| id == label),
        }
    }

    /// Each undirected edge once, as `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Subgraph induced on the nodes with `keep[i] == true`, reindexed
    /// densely in ascending original order. Labels carry over.
    pub fn induced_subgraph(&self, keep: &[bool]) -> Graph {
        assert_eq!(keep.len(), self.node_count());
        let kept: Vec<u32> = (0..self.node_count())
            .filter(|&i| keep[i])
            .map(|i| i as u32)
            .collect();
        let mut new_index = vec![u32::MAX; self.node_count()];
        for (new, &old) in kept.iter().enumerate() {
            new_index[old as usize] = new as u32;
        }
        let mut offsets = Vec::with_capacity(kept.len() + 1);
        offsets.push(0);
        let mut targets = Vec::new();
        for &old in &kept {
            for &j in self.neighbors(old as usize) {
                let mapped = new_index[j as usize];
                if mapped != u32::MAX {
                    targets.push(mapped);
                }
            }
            offsets.push(targets.len());
        }
        Graph {
            offsets,
            targets,
            ids: self.ids.restrict(&kept),
        }
    }
}

/// Builds a graph from labelled edges.
///
/// Labels are assigned dense indices in order of first appearance. When every
/// label is an unsigned integer the numeric values are retained, otherwise
/// the raw strings are.
pub fn build_graph<S: AsRef<str>>(edges: &[(S, S)]) -> Result<(Graph, BuildStats)> {
    if edges.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut order: Vec<&str> = Vec::new();
    let mut pairs = Vec::with_capacity(edges.len());
    for (a, b) in edges {
        let mut ends = [0usize; 2];
        for (slot, s) in ends.iter_mut().zip([a.as_ref(), b.as_ref()]) {
            let next = order.len();
            *slot = *index.entry(s).or_insert_with(|| {
                order.push(s);
                next
            });
        }
        pairs.push((ends[0], ends[1]));
    }
    let numeric: Option<Vec<u64>> = order.iter().map(|s| s.parse::<u64>().ok()).collect();
    let ids = match numeric {
        Some(v) => IdMap::Numeric(v),
        None => IdMap::Named(order.iter().map(|s| s.to_string()).collect()),
    };
    let (graph, stats) = Graph::from_index_edges(order.len(), pairs);
    Ok((graph.with_ids(ids), stats))
}
