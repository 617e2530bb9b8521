//! Breadth-first shell decomposition around origin nodes.
//!
//! Shell `ℓ` of an origin is the set of nodes at shortest-path distance
//! exactly `ℓ`; `B_ℓ` is its size. Ensembles aggregate shell sizes and
//! per-shell degree moments over many origins.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};
use crate::seeded_rng;

/// Marker for nodes not reached from the origin.
pub const UNREACHED: u32 = u32::MAX;

/// Graphs up to this size get exact all-pairs mean distances.
pub const EXACT_DISTANCE_LIMIT: usize = 2000;

/// Default number of sampled pairs for [`mean_distance`].
pub const DEFAULT_PAIR_SAMPLES: usize = 100_000;

const TARGETS_PER_SOURCE: usize = 1000;

#[derive(Clone, Debug)]
pub struct ShellProfile {
    pub origin: usize,
    /// `sizes[ℓ] = B_ℓ`; `sizes[0] == 1`.
    pub sizes: Vec<usize>,
    /// Shell index of every node, [`UNREACHED`] outside the origin's component.
    pub shell_of: Vec<u32>,
    pub reachable: usize,
}

impl ShellProfile {
    pub fn max_shell(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn shell(&self, node: usize) -> Option<usize> {
        match self.shell_of[node] {
            UNREACHED => None,
            s => Some(s as usize),
        }
    }

    pub fn residual_fractions(&self, n: usize) -> Vec<f64> {
        residual_fractions(&self.sizes, n)
    }
}

/// Reusable BFS buffers; resetting costs only the previously visited nodes.
#[derive(Clone, Debug)]
pub struct BfsScratch {
    dist: Vec<u32>,
    order: Vec<u32>,
}

impl BfsScratch {
    pub fn new(node_count: usize) -> Self {
        BfsScratch {
            dist: vec![UNREACHED; node_count],
            order: Vec::new(),
        }
    }

    /// Runs BFS from `origin`, not expanding past `max_shell`, and returns
    /// the shell sizes.
    pub fn run(&mut self, graph: &Graph, origin: usize, max_shell: Option<usize>) -> Vec<usize> {
        assert!(origin < graph.node_count(), "origin {origin} out of range");
        assert_eq!(self.dist.len(), graph.node_count(), "scratch sized for another graph");
        for &v in &self.order {
            self.dist[v as usize] = UNREACHED;
        }
        self.order.clear();

        let limit = max_shell.map_or(u32::MAX - 1, |m| m as u32);
        let mut sizes = vec![1usize];
        self.dist[origin] = 0;
        self.order.push(origin as u32);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head] as usize;
            head += 1;
            let dv = self.dist[v];
            if dv >= limit {
                continue;
            }
            for &w in graph.neighbors(v) {
                let w = w as usize;
                if self.dist[w] == UNREACHED {
                    self.dist[w] = dv + 1;
                    self.order.push(w as u32);
                    if sizes.len() <= (dv + 1) as usize {
                        sizes.push(0);
                    }
                    sizes[(dv + 1) as usize] += 1;
                }
            }
        }
        sizes
    }

    /// Nodes reached by the last run, in visit order.
    pub fn visited(&self) -> &[u32] {
        &self.order
    }

    pub fn distance(&self, node: usize) -> Option<u32> {
        match self.dist[node] {
            UNREACHED => None,
            d => Some(d),
        }
    }
}

pub fn bfs_shells(graph: &Graph, origin: usize) -> ShellProfile {
    let mut scratch = BfsScratch::new(graph.node_count());
    let sizes = scratch.run(graph, origin, None);
    let reachable = scratch.visited().len();
    ShellProfile {
        origin,
        sizes,
        shell_of: scratch.dist,
        reachable,
    }
}

/// `r[m] = 1 - (B_0 + ... + B_m) / n`: fraction of the `n` nodes lying
/// outside shell `m` once the origin itself is counted as removed.
pub fn residual_fractions(sizes: &[usize], n: usize) -> Vec<f64> {
    let mut inside = 0usize;
    sizes
        .iter()
        .map(|&b| {
            inside += b;
            1.0 - inside as f64 / n as f64
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DistanceEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub pairs: u64,
    pub sources: usize,
    pub exact: bool,
}

/// Mean shortest-path distance of a connected graph.
///
/// Exact over all pairs when `N <= 2000`. Otherwise `pair_samples` pairs are
/// drawn as BFS sources (uniform without replacement) each paired with up
/// to 1000 uniform distinct targets; the standard error comes from the
/// spread of per-source means.
pub fn mean_distance(graph: &Graph, pair_samples: usize, seed: u64) -> Result<DistanceEstimate> {
    let n = graph.node_count();
    if pair_samples == 0 {
        return Err(Error::InvalidParameter("pair_samples must be at least 1".into()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter("mean distance needs at least two nodes".into()));
    }
    let comps = connected_components(graph);
    if comps.component_count() > 1 {
        return Err(Error::Disconnected {
            components: comps.component_count(),
        });
    }

    if n <= EXACT_DISTANCE_LIMIT {
        let per_source: Vec<f64> = (0..n)
            .into_par_iter()
            .map_init(
                || BfsScratch::new(n),
                |scratch, s| {
                    let sizes = scratch.run(graph, s, None);
                    let total: usize = sizes.iter().enumerate().map(|(l, &b)| l * b).sum();
                    total as f64 / (n - 1) as f64
                },
            )
            .collect();
        let mean = per_source.iter().sum::<f64>() / n as f64;
        return Ok(DistanceEstimate {
            mean,
            stderr: 0.0,
            pairs: (n * (n - 1) / 2) as u64,
            sources: n,
            exact: true,
        });
    }

    let sources = pair_samples.div_ceil(TARGETS_PER_SOURCE).clamp(1, n);
    let targets_each = (pair_samples / sources).clamp(1, n - 1);
    let mut rng = seeded_rng(seed);
    let chosen: Vec<usize> = index::sample(&mut rng, n, sources).into_vec();
    let target_seeds: Vec<u64> = (0..sources).map(|_| rng.random()).collect();
    let per_source: Vec<f64> = chosen
        .par_iter()
        .zip(target_seeds.par_iter())
        .map_init(
            || BfsScratch::new(n),
            |scratch, (&s, &tseed)| {
                scratch.run(graph, s, None);
                let mut trng = seeded_rng(tseed);
                // targets are drawn from the n - 1 non-source nodes
                let picks = index::sample(&mut trng, n - 1, targets_each);
                let total: u64 = picks
                    .iter()
                    .map(|t| {
                        let t = if t >= s { t + 1 } else { t };
                        u64::from(scratch.distance(t).expect("graph is connected"))
                    })
                    .sum();
                total as f64 / targets_each as f64
            },
        )
        .collect();
    let (mean, stderr) = mean_and_stderr(&per_source);
    Ok(DistanceEstimate {
        mean,
        stderr,
        pairs: (sources * targets_each) as u64,
        sources,
        exact: false,
    })
}

fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Shell sizes seen from one origin of one graph realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OriginProfile {
    pub realization: usize,
    pub origin: usize,
    pub sizes: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShellMoments {
    pub shell: usize,
    /// Node visits in this shell summed over origins.
    pub members: u64,
    pub mean_k: f64,
    pub mean_k2: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ShellBranching {
    pub shell: usize,
    pub members: u64,
    /// `<k_ℓ^2>/<k_ℓ> - 1` over the nodes of shell `ℓ`.
    pub ktilde: f64,
}

/// Shell statistics aggregated over origins (and optionally over several
/// graph realizations).
#[derive(Clone, Debug, Serialize)]
pub struct ShellEnsemble {
    /// Node count of each realization.
    pub graph_sizes: Vec<usize>,
    pub mean_degree: f64,
    /// Depth limit of the BFS runs, if truncated.
    pub max_shell: Option<usize>,
    pub profiles: Vec<OriginProfile>,
    shell_members: Vec<u64>,
    shell_degree_sum: Vec<u64>,
    shell_degree_sq_sum: Vec<u64>,
}

impl ShellEnsemble {
    pub fn realizations(&self) -> usize {
        self.graph_sizes.len()
    }

    pub fn origin_count(&self) -> usize {
        self.profiles.len()
    }

    /// Number of shells with at least one member across all origins.
    pub fn shell_count(&self) -> usize {
        self.shell_members.len()
    }

    /// `B_ℓ` for every origin, zero where the origin's BFS ended earlier.
    pub fn samples(&self, shell: usize) -> Vec<usize> {
        self.profiles
            .iter()
            .map(|p| p.sizes.get(shell).copied().unwrap_or(0))
            .collect()
    }

    pub fn positive_samples(&self, shell: usize) -> Vec<usize> {
        self.samples(shell).into_iter().filter(|&b| b > 0).collect()
    }

    /// `<B_ℓ>` over origins, per shell.
    pub fn mean_sizes(&self) -> Vec<f64> {
        let k = self.origin_count() as f64;
        (0..self.shell_count())
            .map(|l| self.samples(l).iter().sum::<usize>() as f64 / k)
            .collect()
    }

    /// `<B_ℓ / N>` over origins, each origin normalized by its own graph size.
    pub fn mean_normalized_sizes(&self) -> Vec<f64> {
        let k = self.origin_count() as f64;
        (0..self.shell_count())
            .map(|l| {
                self.profiles
                    .iter()
                    .map(|p| {
                        p.sizes.get(l).copied().unwrap_or(0) as f64
                            / self.graph_sizes[p.realization] as f64
                    })
                    .sum::<f64>()
                    / k
            })
            .collect()
    }

    pub fn shell_moments(&self) -> Vec<ShellMoments> {
        (0..self.shell_count())
            .map(|l| {
                let m = self.shell_members[l];
                let (mean_k, mean_k2) = if m == 0 {
                    (0.0, 0.0)
                } else {
                    (
                        self.shell_degree_sum[l] as f64 / m as f64,
                        self.shell_degree_sq_sum[l] as f64 / m as f64,
                    )
                };
                ShellMoments {
                    shell: l,
                    members: m,
                    mean_k,
                    mean_k2,
                }
            })
            .collect()
    }

    /// Mean distance from origins to all other reachable nodes. `None` for
    /// depth-truncated ensembles.
    pub fn mean_distance(&self) -> Option<DistanceEstimate> {
        if self.max_shell.is_some() || self.profiles.is_empty() {
            return None;
        }
        let per_origin: Vec<f64> = self
            .profiles
            .iter()
            .filter_map(|p| {
                let reach: usize = p.sizes.iter().sum();
                (reach > 1).then(|| {
                    let total: usize = p.sizes.iter().enumerate().map(|(l, &b)| l * b).sum();
                    total as f64 / (reach - 1) as f64
                })
            })
            .collect();
        if per_origin.is_empty() {
            return None;
        }
        let (mean, stderr) = mean_and_stderr(&per_origin);
        let pairs = self
            .profiles
            .iter()
            .map(|p| p.sizes.iter().sum::<usize>().saturating_sub(1) as u64)
            .sum();
        Some(DistanceEstimate {
            mean,
            stderr,
            pairs,
            sources: per_origin.len(),
            exact: false,
        })
    }

    /// Appends another ensemble as additional realizations.
    pub fn merge(&mut self, other: ShellEnsemble) {
        assert_eq!(self.max_shell, other.max_shell, "cannot merge different depth limits");
        let offset = self.graph_sizes.len();
        let total_nodes_self: usize = self.graph_sizes.iter().sum();
        let total_nodes_other: usize = other.graph_sizes.iter().sum();
        self.mean_degree = (self.mean_degree * total_nodes_self as f64
            + other.mean_degree * total_nodes_other as f64)
            / (total_nodes_self + total_nodes_other) as f64;
        self.graph_sizes.extend(other.graph_sizes);
        self.profiles.extend(other.profiles.into_iter().map(|mut p| {
            p.realization += offset;
            p
        }));
        let len = self.shell_members.len().max(other.shell_members.len());
        for v in [
            &mut self.shell_members,
            &mut self.shell_degree_sum,
            &mut self.shell_degree_sq_sum,
        ] {
            v.resize(len, 0);
        }
        for l in 0..other.shell_members.len() {
            self.shell_members[l] += other.shell_members[l];
            self.shell_degree_sum[l] += other.shell_degree_sum[l];
            self.shell_degree_sq_sum[l] += other.shell_degree_sq_sum[l];
        }
    }
}

/// `count` distinct origins drawn uniformly, returned in ascending order.
pub fn sample_origins(node_count: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 {
        return Err(Error::InvalidParameter("at least one origin is required".into()));
    }
    if count > node_count {
        return Err(Error::InvalidParameter(format!(
            "requested {count} origins from a graph with {node_count} nodes"
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut origins = index::sample(&mut rng, node_count, count).into_vec();
    origins.sort_unstable();
    Ok(origins)
}

/// Ensemble over `origins` origins sampled without replacement. The graph
/// is expected to be a giant component.
pub fn shell_ensemble(graph: &Graph, origins: usize, seed: u64) -> Result<ShellEnsemble> {
    let chosen = sample_origins(graph.node_count(), origins, seed)?;
    Ok(shell_ensemble_from(graph, &chosen, None))
}

struct OriginRun {
    sizes: Vec<usize>,
    degree_sum: Vec<u64>,
    degree_sq_sum: Vec<u64>,
}

/// Ensemble over explicit origins, optionally stopping every BFS at
/// `max_shell`. Output does not depend on the rayon thread count.
pub fn shell_ensemble_from(graph: &Graph, origins: &[usize], max_shell: Option<usize>) -> ShellEnsemble {
    let n = graph.node_count();
    let runs: Vec<OriginRun> = origins
        .par_iter()
        .map_init(
            || BfsScratch::new(n),
            |scratch, &origin| {
                let sizes = scratch.run(graph, origin, max_shell);
                let mut degree_sum = vec![0u64; sizes.len()];
                let mut degree_sq_sum = vec![0u64; sizes.len()];
                for &v in scratch.visited() {
                    let l = scratch.dist[v as usize] as usize;
                    let k = graph.degree(v as usize) as u64;
                    degree_sum[l] += k;
                    degree_sq_sum[l] += k * k;
                }
                OriginRun {
                    sizes,
                    degree_sum,
                    degree_sq_sum,
                }
            },
        )
        .collect();

    let depth = runs.iter().map(|r| r.sizes.len()).max().unwrap_or(0);
    let mut shell_members = vec![0u64; depth];
    let mut shell_degree_sum = vec![0u64; depth];
    let mut shell_degree_sq_sum = vec![0u64; depth];
    let mut profiles = Vec::with_capacity(runs.len());
    for (run, &origin) in runs.into_iter().zip(origins) {
        for l in 0..run.sizes.len() {
            shell_members[l] += run.sizes[l] as u64;
            shell_degree_sum[l] += run.degree_sum[l];
            shell_degree_sq_sum[l] += run.degree_sq_sum[l];
        }
        profiles.push(OriginProfile {
            realization: 0,
            origin,
            sizes: run.sizes,
        });
    }
    ShellEnsemble {
        graph_sizes: vec![n],
        mean_degree: graph.mean_degree(),
        max_shell,
        profiles,
        shell_members,
        shell_degree_sum,
        shell_degree_sq_sum,
    }
}

/// Per-shell `k̃_ℓ`, omitting shells nobody reached.
pub fn shell_branching(ensemble: &ShellEnsemble) -> Vec<ShellBranching> {
    ensemble
        .shell_moments()
        .into_iter()
        .filter(|m| m.members > 0 && m.mean_k > 0.0)
        .map(|m| ShellBranching {
            shell: m.shell,
            members: m.members,
            ktilde: m.mean_k2 / m.mean_k - 1.0,
        })
        .collect()
}
