//! Seeded random network models: G(N, M) Erdős–Rényi graphs, configuration
//! model scale-free graphs and random regular graphs.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{BuildStats, DegreeDistribution, Graph};
use crate::seeded_rng;

/// Erdős–Rényi graph with exactly `round(n * mean_degree / 2)` distinct edges
/// drawn uniformly from all `n (n - 1) / 2` node pairs.
pub fn generate_er(n: usize, mean_degree: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("ER graph needs n >= 2, got {n}")));
    }
    if !(mean_degree > 0.0) || mean_degree > (n - 1) as f64 {
        return Err(Error::InvalidParameter(format!(
            "mean degree {mean_degree} must lie in (0, n - 1 = {}]",
            n - 1
        )));
    }
    let pairs = n * (n - 1) / 2;
    let m = ((n as f64 * mean_degree / 2.0).round() as usize).min(pairs);
    let mut rng = seeded_rng(seed);
    let chosen = index::sample(&mut rng, pairs, m);
    let edges = chosen.into_iter().map(pair_from_index);
    Ok(Graph::from_index_edges(n, edges).0)
}

/// Inverse of `t = v (v - 1) / 2 + u` for `u < v`.
fn pair_from_index(t: usize) -> (usize, usize) {
    let mut v = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0) as usize;
    while v * (v - 1) / 2 > t {
        v -= 1;
    }
    while (v + 1) * v / 2 <= t {
        v += 1;
    }
    (t - v * (v - 1) / 2, v)
}

/// Degree-sequence bookkeeping for a configuration-model graph.
#[derive(Clone, Debug, Serialize)]
pub struct GenerationAudit {
    pub k_min: usize,
    pub k_cut: usize,
    pub stub_count: usize,
    pub min_degree_before: usize,
    pub min_degree_after: usize,
    pub self_loops_erased: usize,
    pub multi_edges_erased: usize,
    /// Fraction of nodes whose final degree is below their sampled degree.
    pub affected_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct ScaleFreeGraph {
    pub graph: Graph,
    pub audit: GenerationAudit,
}

/// Natural cutoff `floor(n^(1/(lambda-1)))`, clamped to `[k_min, n - 1]`.
pub fn natural_cutoff(n: usize, lambda: f64, k_min: usize) -> usize {
    let raw = (n as f64).powf(1.0 / (lambda - 1.0)).floor() as usize;
    raw.clamp(k_min, n.saturating_sub(1).max(k_min))
}

/// Configuration-model graph with i.i.d. degrees `q(k) ∝ k^-lambda` on
/// `[k_min, k_cut]`. Self-loops and multi-edges are erased after matching.
pub fn generate_sf_config(n: usize, lambda: f64, k_min: usize, seed: u64) -> Result<ScaleFreeGraph> {
    if !(lambda > 2.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must exceed 2 for a finite mean degree, got {lambda}"
        )));
    }
    if k_min == 0 {
        return Err(Error::InvalidParameter("k_min must be at least 1".into()));
    }
    if k_min >= n {
        return Err(Error::InvalidParameter(format!("k_min = {k_min} must be below n = {n}")));
    }
    if n < 10 {
        return Err(Error::InvalidParameter(format!("scale-free graph needs n >= 10, got {n}")));
    }
    let k_cut = natural_cutoff(n, lambda, k_min);
    let weights: Vec<f64> = (k_min..=k_cut).map(|k| (k as f64).powf(-lambda)).collect();
    let sampler = WeightedIndex::new(&weights).expect("power-law weights are positive");
    let mut rng = seeded_rng(seed);
    let mut degrees: Vec<usize> = (0..n).map(|_| k_min + sampler.sample(&mut rng)).collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        if k_cut == k_min {
            return Err(Error::InvalidParameter(format!(
                "no even degree sum exists with n = {n} and every degree equal to {k_min}"
            )));
        }
        let node = rng.random_range(0..n);
        let old = degrees[node];
        loop {
            let k = k_min + sampler.sample(&mut rng);
            if (k + old) % 2 == 1 {
                degrees[node] = k;
                break;
            }
        }
    }
    let (graph, stats) = configuration_model(&degrees, &mut rng);
    let affected = (0..n).filter(|&i| graph.degree(i) < degrees[i]).count();
    let audit = GenerationAudit {
        k_min,
        k_cut,
        stub_count: degrees.iter().sum(),
        min_degree_before: degrees.iter().copied().min().unwrap_or(0),
        min_degree_after: (0..n).map(|i| graph.degree(i)).min().unwrap_or(0),
        self_loops_erased: stats.self_loops,
        multi_edges_erased: stats.duplicates,
        affected_fraction: affected as f64 / n as f64,
    };
    Ok(ScaleFreeGraph { graph, audit })
}

/// Uniform stub matching on a degree sequence with an even sum. Loops and
/// repeated edges are dropped and counted.
pub fn configuration_model<R: Rng + ?Sized>(degrees: &[usize], rng: &mut R) -> (Graph, BuildStats) {
    let mut stubs: Vec<usize> = Vec::with_capacity(degrees.iter().sum());
    for (node, &k) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(node, k));
    }
    assert!(stubs.len().is_multiple_of(2), "degree sum must be even");
    stubs.shuffle(rng);
    let edges = stubs.chunks_exact(2).map(|p| (p[0], p[1]));
    Graph::from_index_edges(degrees.len(), edges)
}

const REGULAR_MAX_ATTEMPTS: usize = 10_000;

/// Random `k`-regular simple graph by repeated stub matching until no
/// self-loop or multi-edge occurs. Practical for small `k`.
pub fn generate_regular(n: usize, k: usize, seed: u64) -> Result<Graph> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!("need 1 <= k < n, got k = {k}, n = {n}")));
    }
    if (n * k) % 2 == 1 {
        return Err(Error::InvalidParameter(format!("n * k = {} must be even", n * k)));
    }
    let mut rng = seeded_rng(seed);
    let degrees = vec![k; n];
    for _ in 0..REGULAR_MAX_ATTEMPTS {
        let (graph, stats) = configuration_model(&degrees, &mut rng);
        if stats.self_loops == 0 && stats.duplicates == 0 {
            return Ok(graph);
        }
    }
    Err(Error::NoConvergence(REGULAR_MAX_ATTEMPTS))
}

/// A generator together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum NetworkModel {
    Er { n: usize, mean_degree: f64 },
    ScaleFree { n: usize, lambda: f64, k_min: usize },
    Regular { n: usize, degree: usize },
}

impl NetworkModel {
    pub fn node_count(&self) -> usize {
        match *self {
            NetworkModel::Er { n, .. } | NetworkModel::ScaleFree { n, .. } | NetworkModel::Regular { n, .. } => n,
        }
    }

    /// Same model at a different size.
    pub fn resized(&self, n: usize) -> NetworkModel {
        match *self {
            NetworkModel::Er { mean_degree, .. } => NetworkModel::Er { n, mean_degree },
            NetworkModel::ScaleFree { lambda, k_min, .. } => NetworkModel::ScaleFree { n, lambda, k_min },
            NetworkModel::Regular { degree, .. } => NetworkModel::Regular { n, degree },
        }
    }

    pub fn generate(&self, seed: u64) -> Result<(Graph, Option<GenerationAudit>)> {
        match *self {
            NetworkModel::Er { n, mean_degree } => Ok((generate_er(n, mean_degree, seed)?, None)),
            NetworkModel::ScaleFree { n, lambda, k_min } => {
                let sf = generate_sf_config(n, lambda, k_min, seed)?;
                Ok((sf.graph, Some(sf.audit)))
            }
            NetworkModel::Regular { n, degree } => Ok((generate_regular(n, degree, seed)?, None)),
        }
    }

    /// Degree distribution the generator samples from: Poisson for ER, the
    /// truncated power law for scale-free graphs.
    pub fn degree_distribution(&self) -> Result<DegreeDistribution> {
        match *self {
            NetworkModel::Er { mean_degree, .. } => {
                let cap = (mean_degree + 12.0 * mean_degree.sqrt() + 40.0).ceil() as usize;
                DegreeDistribution::poisson(mean_degree, cap)
            }
            NetworkModel::ScaleFree { n, lambda, k_min } => {
                DegreeDistribution::power_law(lambda, k_min, natural_cutoff(n, lambda, k_min))
            }
            NetworkModel::Regular { degree, .. } => Ok(DegreeDistribution::regular(degree)),
        }
    }

    /// Nominal mean degree.
    pub fn mean_degree(&self) -> Result<f64> {
        match *self {
            NetworkModel::Er { mean_degree, .. } => Ok(mean_degree),
            NetworkModel::Regular { degree, .. } => Ok(degree as f64),
            NetworkModel::ScaleFree { .. } => Ok(self.degree_distribution()?.mean()),
        }
    }
}
