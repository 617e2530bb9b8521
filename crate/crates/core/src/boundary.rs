//! Boundary clusters: the pieces a network falls into once every node
//! closer to the origin than a cut shell has been removed.

use std::collections::BTreeMap;

use rand::seq::index;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::shells::{ShellProfile, UNREACHED};
use crate::stats::{log_binned_counts, LogBin};
use crate::stream_rng;

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCluster {
    #[serde(skip)]
    pub members: Vec<u32>,
    pub size: usize,
    /// Mean shortest-path distance between members, measured inside the
    /// cluster only. Zero for singletons, NaN (`null` in JSON) when not measured.
    pub mean_distance: f64,
    /// False when `mean_distance` was estimated from sampled sources.
    pub distance_exact: bool,
    pub largest: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryClusterSet {
    pub origin: usize,
    pub cut: usize,
    pub clusters: Vec<BoundaryCluster>,
    /// Index into `clusters` of the largest cluster (first one on ties).
    pub largest: Option<usize>,
}

impl BoundaryClusterSet {
    /// Number of nodes kept by the cut.
    pub fn mass(&self) -> usize {
        self.clusters.iter().map(|c| c.size).sum()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BoundaryOptions {
    /// Clusters larger than this get sampled internal distances.
    pub exact_limit: usize,
    pub sampled_sources: usize,
    pub seed: u64,
    /// When false, internal distances are not computed.
    pub measure_distances: bool,
    /// When false, the largest cluster of each set is skipped.
    pub measure_largest: bool,
}

impl Default for BoundaryOptions {
    fn default() -> Self {
        BoundaryOptions {
            exact_limit: 2000,
            sampled_sources: 32,
            seed: 0,
            measure_distances: true,
            measure_largest: true,
        }
    }
}

pub fn boundary_clusters(graph: &Graph, profile: &ShellProfile, cut: usize) -> Result<BoundaryClusterSet> {
    boundary_clusters_with(graph, profile, cut, &BoundaryOptions::default())
}

/// Keeps the nodes with shell index `>= cut` and splits them into the
/// connected components of the induced subgraph. Shells `0..cut` are removed.
pub fn boundary_clusters_with(
    graph: &Graph,
    profile: &ShellProfile,
    cut: usize,
    options: &BoundaryOptions,
) -> Result<BoundaryClusterSet> {
    if cut == 0 {
        return Err(Error::InvalidParameter("cut must be at least 1".into()));
    }
    let n = graph.node_count();
    assert_eq!(profile.shell_of.len(), n, "profile computed on a different graph");
    let kept = |v: usize| {
        let s = profile.shell_of[v];
        s != UNREACHED && s as usize >= cut
    };

    let mut cluster_of = vec![u32::MAX; n];
    let mut clusters = Vec::new();
    let mut stack = Vec::new();
    for start in 0..n {
        if cluster_of[start] != u32::MAX || !kept(start) {
            continue;
        }
        let id = clusters.len() as u32;
        cluster_of[start] = id;
        stack.push(start as u32);
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &w in graph.neighbors(v as usize) {
                let wi = w as usize;
                if cluster_of[wi] == u32::MAX && kept(wi) {
                    cluster_of[wi] = id;
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        clusters.push(BoundaryCluster {
            size: members.len(),
            members,
            mean_distance: f64::NAN,
            distance_exact: true,
            largest: false,
        });
    }

    let largest = clusters
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, usize)>, (i, c)| match best {
            Some((_, s)) if s >= c.size => best,
            _ => Some((i, c.size)),
        })
        .map(|(i, _)| i);
    if let Some(i) = largest {
        clusters[i].largest = true;
    }

    if options.measure_distances {
        let mut scratch = InternalBfs::new(n);
        for (id, cluster) in clusters.iter_mut().enumerate() {
            if cluster.largest && !options.measure_largest {
                continue;
            }
            let (mean, exact) = if cluster.size <= options.exact_limit {
                (scratch.exact_mean(graph, &cluster.members, &cluster_of, id as u32), true)
            } else {
                let mut rng = stream_rng(options.seed ^ (cut as u64).rotate_left(32), profile.origin as u64);
                let k = options.sampled_sources.clamp(1, cluster.size);
                let sources: Vec<u32> = index::sample(&mut rng, cluster.size, k)
                    .iter()
                    .map(|i| cluster.members[i])
                    .collect();
                (scratch.mean_from_sources(graph, &sources, cluster.size, &cluster_of, id as u32), false)
            };
            cluster.mean_distance = mean;
            cluster.distance_exact = exact;
        }
    }

    Ok(BoundaryClusterSet {
        origin: profile.origin,
        cut,
        clusters,
        largest,
    })
}

/// BFS confined to the nodes carrying one cluster label.
struct InternalBfs {
    dist: Vec<u32>,
    queue: Vec<u32>,
}

impl InternalBfs {
    fn new(n: usize) -> Self {
        InternalBfs {
            dist: vec![u32::MAX; n],
            queue: Vec::new(),
        }
    }

    /// Sum of distances from `source` to every node it reaches, and the
    /// number of nodes reached (source included).
    fn run(&mut self, graph: &Graph, source: u32, label: &[u32], id: u32) -> (u64, usize) {
        for &v in &self.queue {
            self.dist[v as usize] = u32::MAX;
        }
        self.queue.clear();
        self.dist[source as usize] = 0;
        self.queue.push(source);
        let mut head = 0;
        let mut total = 0u64;
        while head < self.queue.len() {
            let v = self.queue[head] as usize;
            head += 1;
            let dv = self.dist[v];
            total += u64::from(dv);
            for &w in graph.neighbors(v) {
                let wi = w as usize;
                if label[wi] == id && self.dist[wi] == u32::MAX {
                    self.dist[wi] = dv + 1;
                    self.queue.push(w);
                }
            }
        }
        (total, self.queue.len())
    }

    fn exact_mean(&mut self, graph: &Graph, members: &[u32], label: &[u32], id: u32) -> f64 {
        let s = members.len();
        if s < 2 {
            return 0.0;
        }
        let total: u64 = members.iter().map(|&m| self.run(graph, m, label, id).0).sum();
        total as f64 / (s * (s - 1)) as f64
    }

    fn mean_from_sources(&mut self, graph: &Graph, sources: &[u32], size: usize, label: &[u32], id: u32) -> f64 {
        if size < 2 {
            return 0.0;
        }
        let total: u64 = sources.iter().map(|&m| self.run(graph, m, label, id).0).sum();
        total as f64 / (sources.len() * (size - 1)) as f64
    }
}

/// Exact mean over all unordered member pairs of the distance measured
/// inside the member set. Singletons give zero.
pub fn cluster_mean_distance(graph: &Graph, members: &[usize]) -> Result<f64> {
    if members.is_empty() {
        return Err(Error::InvalidParameter("cluster has no members".into()));
    }
    let mut label = vec![u32::MAX; graph.node_count()];
    for &m in members {
        label[m] = 0;
    }
    let as_u32: Vec<u32> = members.iter().map(|&m| m as u32).collect();
    let mut bfs = InternalBfs::new(graph.node_count());
    let distinct = label.iter().filter(|&&l| l == 0).count();
    let (_, reached) = bfs.run(graph, as_u32[0], &label, 0);
    if reached != distinct {
        return Err(Error::Disconnected {
            components: 2.max(distinct - reached),
        });
    }
    Ok(bfs.exact_mean(graph, &as_u32, &label, 0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SizeDistance {
    pub size: usize,
    pub distance: f64,
    pub largest: bool,
}

/// `(s, d_internal)` for every cluster with at least two nodes.
pub fn size_vs_distance(sets: &[BoundaryClusterSet]) -> Vec<SizeDistance> {
    sets.iter()
        .flat_map(|set| set.clusters.iter())
        .filter(|c| c.size >= 2)
        .map(|c| SizeDistance {
            size: c.size,
            distance: c.mean_distance,
            largest: c.largest,
        })
        .collect()
}

/// Cluster counts `n(s)` aggregated over cluster sets.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ClusterHistogram {
    pub counts: BTreeMap<usize, u64>,
}

impl ClusterHistogram {
    pub fn clusters(&self) -> u64 {
        self.counts.values().sum()
    }

    /// `Σ s n(s)`.
    pub fn mass(&self) -> u64 {
        self.counts.iter().map(|(&s, &c)| s as u64 * c).sum()
    }

    pub fn log_binned(&self, bins_per_decade: usize) -> Vec<LogBin> {
        log_binned_counts(&self.counts, bins_per_decade)
    }

    /// Every cluster size repeated by its count.
    pub fn expanded(&self) -> Vec<usize> {
        self.counts
            .iter()
            .flat_map(|(&s, &c)| std::iter::repeat_n(s, c as usize))
            .collect()
    }
}

pub fn cluster_size_histogram(sets: &[BoundaryClusterSet], include_largest: bool) -> Result<ClusterHistogram> {
    if sets.is_empty() {
        return Err(Error::InvalidParameter("no cluster sets given".into()));
    }
    let mut hist = ClusterHistogram::default();
    for c in sets.iter().flat_map(|s| s.clusters.iter()) {
        if c.largest && !include_largest {
            continue;
        }
        *hist.counts.entry(c.size).or_insert(0) += 1;
    }
    Ok(hist)
}
