//! Figure pipelines: generate (or load) networks, run the shell, boundary
//! and generating-function analyses, and return plot-ready curves with a
//! JSON summary of the fitted exponents.
//!
//! Every analysis step is a public function so the acceptance suite and
//! the CLI share one implementation.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::boundary::{
    boundary_clusters_with, cluster_size_histogram, size_vs_distance, BoundaryClusterSet, BoundaryOptions,
    ClusterHistogram,
};
use crate::error::{Error, Result};
use crate::generators::{GenerationAudit, NetworkModel};
use crate::gf::{self, GfModel, ModelTag, Mu, ShellPdf};
use crate::graph::{connected_components, degree_distribution, Graph};
use crate::shells::{
    bfs_shells, mean_distance, residual_fractions, sample_origins, shell_branching, shell_ensemble,
    shell_ensemble_from, DistanceEstimate, ShellEnsemble, DEFAULT_PAIR_SAMPLES,
};
use crate::stats::{
    bin_points, collapse_metric, empirical_ccdf, fit_discrete_power_law, fit_fractal_dimension, fit_loglog,
    log_binned_pdf, mode, power_law_vs_exponential, quantile, scaling_window, FitResult, LikelihoodRatio,
    MIN_FIT_SAMPLES,
};
use crate::stream_rng;

/// Log bins per decade for shell-size pdfs.
pub const PDF_BINS_PER_DECADE: usize = 10;
/// Log bins per decade for cluster-size histograms.
pub const CLUSTER_BINS_PER_DECADE: usize = 5;
/// Clusters with a smaller internal distance are left out of the φ fit.
pub const FRACTAL_MIN_DISTANCE: f64 = 2.0;
/// Shells with fewer visits are too noisy for the branching summary.
pub const BRANCHING_MIN_MEMBERS: u64 = 100;
/// Deepest shell compared against the composition pdfs.
pub const SMALL_SHELL_DEPTH: usize = 3;
/// Histogram bins are merged until each expects `samples / 50` counts.
pub const AGREEMENT_BIN_DIVISOR: f64 = 50.0;
/// A histogram bin agrees with theory when `|z|` stays below this.
pub const AGREEMENT_MAX_Z: f64 = 3.0;
/// Rough flop budget for one truncated composition.
const COMPOSITION_BUDGET: f64 = 2e9;
const COMPOSITION_MAX_CAP: usize = 2000;
const THEORY_GRID: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Figure {
    F2a,
    F2b,
    F2c,
    F2d,
    F3a,
    F3b,
    F3c,
    F3d,
    F4a,
    F4b,
    F4c,
    F4d,
}

/// What a figure computes, independent of which network it runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    ShellSizes,
    Collapse,
    Branching,
    SmallShells,
    Recursion,
    ClusterSizes,
    FractalDimension,
}

impl Figure {
    pub const ALL: [Figure; 12] = [
        Figure::F2a,
        Figure::F2b,
        Figure::F2c,
        Figure::F2d,
        Figure::F3a,
        Figure::F3b,
        Figure::F3c,
        Figure::F3d,
        Figure::F4a,
        Figure::F4b,
        Figure::F4c,
        Figure::F4d,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Figure::F2a => "2a",
            Figure::F2b => "2b",
            Figure::F2c => "2c",
            Figure::F2d => "2d",
            Figure::F3a => "3a",
            Figure::F3b => "3b",
            Figure::F3c => "3c",
            Figure::F3d => "3d",
            Figure::F4a => "4a",
            Figure::F4b => "4b",
            Figure::F4c => "4c",
            Figure::F4d => "4d",
        }
    }

    pub fn pipeline(self) -> Pipeline {
        match self {
            Figure::F2a | Figure::F2b | Figure::F2c | Figure::F2d => Pipeline::ShellSizes,
            Figure::F3a => Pipeline::Collapse,
            Figure::F3b => Pipeline::Branching,
            Figure::F3c => Pipeline::SmallShells,
            Figure::F3d => Pipeline::Recursion,
            Figure::F4a | Figure::F4b => Pipeline::ClusterSizes,
            Figure::F4c | Figure::F4d => Pipeline::FractalDimension,
        }
    }

    /// Real-network panels; they only run on a user-supplied edge list.
    pub fn needs_user_graph(self) -> bool {
        matches!(self, Figure::F2c | Figure::F2d | Figure::F4b | Figure::F4d)
    }

    pub fn default_origins(self) -> usize {
        match self.pipeline() {
            Pipeline::ClusterSizes | Pipeline::FractalDimension => 200,
            _ => 1000,
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Figure> {
        Figure::ALL
            .into_iter()
            .find(|f| f.tag().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                let tags: Vec<&str> = Figure::ALL.iter().map(|f| f.tag()).collect();
                Error::InvalidParameter(format!("unknown figure '{s}', expected one of {}", tags.join(", ")))
            })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FigureOptions {
    pub n: usize,
    pub mean_degree: f64,
    pub lambda: f64,
    pub k_min: usize,
    /// Replaces the figure's default network(s).
    pub model: Option<NetworkModel>,
    /// `None` uses the figure default (all nodes for 3c).
    pub origins: Option<usize>,
    pub seed: u64,
    /// Independent graph realizations pooled for shell and cluster figures.
    pub realizations: usize,
    pub pair_samples: usize,
    /// Boundary cut for cluster figures; `None` means `⌈d⌉`.
    pub cut: Option<usize>,
    /// Also analyse the two cuts after the default one.
    pub sweep: bool,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            n: 100_000,
            mean_degree: 6.0,
            lambda: 2.5,
            k_min: 2,
            model: None,
            origins: None,
            seed: 1,
            realizations: 1,
            pair_samples: DEFAULT_PAIR_SAMPLES,
            cut: None,
            sweep: false,
        }
    }
}

impl FigureOptions {
    pub fn er(&self) -> NetworkModel {
        NetworkModel::Er {
            n: self.n,
            mean_degree: self.mean_degree,
        }
    }

    pub fn scale_free(&self) -> NetworkModel {
        NetworkModel::ScaleFree {
            n: self.n,
            lambda: self.lambda,
            k_min: self.k_min,
        }
    }

    /// Generated networks a figure runs on when no graph is supplied.
    pub fn models_for(&self, figure: Figure) -> Vec<NetworkModel> {
        if let Some(m) = self.model {
            return vec![m];
        }
        match figure {
            Figure::F2b | Figure::F4c => vec![self.scale_free()],
            Figure::F3b | Figure::F4a => vec![self.er(), self.scale_free()],
            _ => vec![self.er()],
        }
    }
}

/// One plot series, written as two whitespace-separated columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curve {
    pub name: String,
    pub columns: [String; 2],
    #[serde(skip)]
    pub points: Vec<(f64, f64)>,
}

impl Curve {
    pub fn new(name: impl Into<String>, x: &str, y: &str, points: Vec<(f64, f64)>) -> Curve {
        Curve {
            name: name.into(),
            columns: [x.to_string(), y.to_string()],
            points,
        }
    }

    /// Writes `header` lines prefixed with `# `, the column names, then the
    /// points.
    pub fn write_to<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "# curve: {}", self.name)?;
        writeln!(out, "# {} {}", self.columns[0], self.columns[1])?;
        for (x, y) in &self.points {
            writeln!(out, "{x} {y}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdCheck {
    pub name: String,
    pub value: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub passed: bool,
}

impl ThresholdCheck {
    pub fn new(name: impl Into<String>, value: Option<f64>, min: f64, max: f64) -> ThresholdCheck {
        let value = value.filter(|v| !v.is_nan());
        ThresholdCheck {
            name: name.into(),
            value,
            min,
            max,
            passed: value.is_some_and(|v| v >= min && v <= max),
        }
    }
}

/// Where a network came from and what it looks like.
#[derive(Clone, Debug, Serialize)]
pub struct NetworkInfo {
    pub label: String,
    pub model: Option<NetworkModel>,
    pub seed: Option<u64>,
    pub nodes: usize,
    pub edges: usize,
    pub mean_degree: f64,
    pub giant_nodes: usize,
    pub giant_edges: usize,
    pub audit: Option<GenerationAudit>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FigureReport {
    pub figure: String,
    pub pipeline: Pipeline,
    pub options: FigureOptions,
    pub networks: Vec<NetworkInfo>,
    pub metrics: BTreeMap<String, Value>,
    pub checks: Vec<ThresholdCheck>,
    /// `None` when nothing was checked (user graphs).
    pub passed: Option<bool>,
    pub curves: Vec<Curve>,
}

#[derive(Clone, Debug)]
pub struct FigureOutput {
    pub report: FigureReport,
    pub curves: Vec<Curve>,
}

/// A network ready for analysis: the full graph, its giant component, and
/// the full-graph index of every giant node.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub info: NetworkInfo,
    pub full: Graph,
    pub giant: Graph,
    pub giant_nodes: Vec<usize>,
}

impl Prepared {
    pub fn from_graph(label: impl Into<String>, full: Graph) -> Prepared {
        Prepared::build(label.into(), full, None, None, None)
    }

    pub fn generate(model: &NetworkModel, seed: u64) -> Result<Prepared> {
        let (full, audit) = model.generate(seed)?;
        Ok(Prepared::build(model_label(model).into(), full, Some(*model), Some(seed), audit))
    }

    fn build(
        label: String,
        full: Graph,
        model: Option<NetworkModel>,
        seed: Option<u64>,
        audit: Option<GenerationAudit>,
    ) -> Prepared {
        let comps = connected_components(&full);
        let keep: Vec<bool> = comps.label.iter().map(|&c| c as usize == comps.giant_id).collect();
        let giant_nodes: Vec<usize> = (0..full.node_count()).filter(|&v| keep[v]).collect();
        let giant = full.induced_subgraph(&keep);
        let info = NetworkInfo {
            label,
            model,
            seed,
            nodes: full.node_count(),
            edges: full.edge_count(),
            mean_degree: full.mean_degree(),
            giant_nodes: giant.node_count(),
            giant_edges: giant.edge_count(),
            audit,
        };
        Prepared {
            info,
            full,
            giant,
            giant_nodes,
        }
    }
}

pub fn model_label(model: &NetworkModel) -> &'static str {
    match model {
        NetworkModel::Er { .. } => "er",
        NetworkModel::ScaleFree { .. } => "sf",
        NetworkModel::Regular { .. } => "regular",
    }
}

pub fn model_tag(model: &NetworkModel) -> Option<ModelTag> {
    match *model {
        NetworkModel::Er { .. } => Some(ModelTag::ErdosRenyi),
        NetworkModel::ScaleFree { lambda, .. } => Some(ModelTag::ScaleFree { lambda }),
        NetworkModel::Regular { .. } => None,
    }
}

/// Seed for sub-task `task` under `seed`.
pub fn derive_seed(seed: u64, task: u64) -> u64 {
    stream_rng(seed, task).next_u64()
}

const TASK_DISTANCE: u64 = 1;
const TASK_ORIGINS: u64 = 2;
const TASK_BOUNDARY: u64 = 3;

/// Shell ensemble pooled over one or more realizations, with the mean
/// distance averaged over them.
#[derive(Clone, Debug)]
pub struct ShellStudy {
    pub networks: Vec<NetworkInfo>,
    pub distances: Vec<DistanceEstimate>,
    pub ensemble: ShellEnsemble,
}

impl ShellStudy {
    pub fn mean_distance(&self) -> f64 {
        self.distances.iter().map(|d| d.mean).sum::<f64>() / self.distances.len() as f64
    }

    pub fn cut(&self) -> usize {
        self.mean_distance().ceil() as usize
    }
}

/// Distance and shell ensemble on the giant component of one network.
pub fn study_prepared(net: &Prepared, origins: usize, pair_samples: usize, seed: u64) -> Result<ShellStudy> {
    let distance = mean_distance(&net.giant, pair_samples, derive_seed(seed, TASK_DISTANCE))?;
    let count = origins.min(net.giant.node_count());
    let ensemble = shell_ensemble(&net.giant, count, derive_seed(seed, TASK_ORIGINS))?;
    Ok(ShellStudy {
        networks: vec![net.info.clone()],
        distances: vec![distance],
        ensemble,
    })
}

/// Realization `r` uses graph seed `seed + r`.
pub fn study_model(
    model: &NetworkModel,
    realizations: usize,
    origins: usize,
    pair_samples: usize,
    seed: u64,
) -> Result<ShellStudy> {
    let mut pooled: Option<ShellStudy> = None;
    for r in 0..realizations.max(1) {
        let s = seed.wrapping_add(r as u64);
        let net = Prepared::generate(model, s)?;
        let study = study_prepared(&net, origins, pair_samples, s)?;
        pooled = Some(match pooled {
            None => study,
            Some(mut acc) => {
                acc.networks.extend(study.networks);
                acc.distances.extend(study.distances);
                acc.ensemble.merge(study.ensemble);
                acc
            }
        });
    }
    Ok(pooled.expect("at least one realization"))
}

/// Tail statistics of one shell's size distribution.
#[derive(Clone, Debug, Serialize)]
pub struct ShellFit {
    pub shell: usize,
    /// Origins whose BFS reached this shell.
    pub samples: usize,
    pub window: Option<(usize, usize)>,
    pub ccdf: Option<FitResult>,
    pub pdf: Option<FitResult>,
    pub likelihood_ratio: Option<LikelihoodRatio>,
}

/// CCDF and log-binned pdf slopes over [`scaling_window`], plus the
/// power-law vs exponential test from the median upward.
pub fn fit_shell(ensemble: &ShellEnsemble, shell: usize) -> ShellFit {
    let samples = ensemble.positive_samples(shell);
    let window = scaling_window(&samples);
    let (ccdf, pdf) = match window {
        Some((lo, hi)) => {
            let (lo, hi) = (lo as f64, hi as f64);
            let ccdf = empirical_ccdf(&samples).ok().and_then(|c| {
                let pts: Vec<(f64, f64)> = c.into_iter().map(|(x, p)| (x as f64, p)).collect();
                fit_loglog(&pts, lo, hi).ok()
            });
            let bins = log_binned_pdf(&samples, PDF_BINS_PER_DECADE);
            let pdf = fit_loglog(&bin_points(&bins), lo, hi).ok();
            (ccdf, pdf)
        }
        None => (None, None),
    };
    let likelihood_ratio = quantile(&samples, 0.5).and_then(|m| power_law_vs_exponential(&samples, m).ok());
    ShellFit {
        shell,
        samples: samples.len(),
        window,
        ccdf,
        pdf,
        likelihood_ratio,
    }
}

/// Observed against expected counts in one merged histogram bin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AgreementBin {
    pub lo: usize,
    /// `None` for the open bin above the composition cap.
    pub hi: Option<usize>,
    pub observed: u64,
    pub expected: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramAgreement {
    pub samples: usize,
    pub bins: Vec<AgreementBin>,
    pub max_abs_z: f64,
}

/// Compares an integer sample with a pmf. Consecutive values are merged
/// until each bin expects at least `min_expected` counts; the mass above
/// the pmf's support forms a final open bin. `z` uses the binomial standard
/// error of the expected count.
pub fn histogram_agreement(samples: &[usize], pdf: &ShellPdf, min_expected: f64) -> Result<HistogramAgreement> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = samples.len();
    let cap = pdf.probs.len() - 1;
    let mut observed = vec![0u64; cap + 2];
    for &b in samples {
        observed[b.min(cap + 1)] += 1;
    }
    let mut prob: Vec<f64> = pdf.probs.clone();
    prob.push(pdf.deficit);

    // (lo, hi inclusive, observed, probability)
    let mut groups: Vec<(usize, usize, u64, f64)> = Vec::new();
    let mut open: Option<(usize, u64, f64)> = None;
    for b in 0..=cap + 1 {
        let (lo, o, p) = open.unwrap_or((b, 0, 0.0));
        let (o, p) = (o + observed[b], p + prob[b]);
        if p * n as f64 >= min_expected {
            groups.push((lo, b, o, p));
            open = None;
        } else {
            open = Some((lo, o, p));
        }
    }
    if let Some((lo, o, p)) = open {
        match groups.last_mut() {
            Some(last) => {
                last.1 = cap + 1;
                last.2 += o;
                last.3 += p;
            }
            None => groups.push((lo, cap + 1, o, p)),
        }
    }

    let bins: Vec<AgreementBin> = groups
        .into_iter()
        .map(|(lo, hi, o, p)| {
            let expected = p * n as f64;
            let se = (n as f64 * p * (1.0 - p)).max(0.0).sqrt();
            let z = if se > 0.0 {
                (o as f64 - expected) / se
            } else if (o as f64 - expected).abs() < 0.5 {
                0.0
            } else {
                f64::INFINITY
            };
            AgreementBin {
                lo,
                hi: (hi <= cap).then_some(hi),
                observed: o,
                expected,
                z,
            }
        })
        .collect();
    let max_abs_z = bins.iter().map(|b| b.z.abs()).fold(0.0, f64::max);
    Ok(HistogramAgreement {
        samples: n,
        bins,
        max_abs_z,
    })
}

/// Bounded discrete MLE of the small-size law `P(B) ∝ B^μ` over
/// `[1, B*/10]`, `B*` being the mode of the positive samples.
pub fn small_size_exponent(samples: &[usize]) -> Result<FitResult> {
    let positive: Vec<usize> = samples.iter().copied().filter(|&b| b > 0).collect();
    let peak = mode(&positive).ok_or(Error::EmptyInput)?;
    let hi = peak / 10;
    if hi < 2 {
        return Err(Error::InsufficientData {
            needed: 20,
            got: peak,
        });
    }
    fit_discrete_power_law(&positive, 1, Some(hi))
}

/// Largest composition cap whose cost stays within budget.
pub fn composition_cap(model: &GfModel, largest_sample: usize) -> usize {
    let k_max = model.degree_distribution().k_max().max(1) as f64;
    let budget = (COMPOSITION_BUDGET / k_max).sqrt() as usize;
    (largest_sample + 10).min(COMPOSITION_MAX_CAP).min(budget).max(1)
}

/// `(r_ℓ, r_{ℓ+1})` pairs for every origin and the deviations from a
/// one-step map.
#[derive(Clone, Debug, Serialize)]
pub struct RecursionDeviation {
    /// For each shell, the mean over origins of `|r_{ℓ+1} - map(r_ℓ)|`.
    pub shell_mean: Vec<f64>,
    pub max_shell_mean: f64,
    /// Worst single origin and shell.
    pub max_point: f64,
    #[serde(skip)]
    pub pairs: Vec<(f64, f64)>,
}

/// Residual fractions `r_ℓ` measured against the whole graph of `n` nodes
/// (origin included in the reached set), compared with `map`. Shells past
/// an origin's last shell are not used.
pub fn recursion_deviation(ensemble: &ShellEnsemble, n: usize, map: impl Fn(f64) -> Option<f64>) -> RecursionDeviation {
    let mut sums: Vec<f64> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let mut max_point: f64 = 0.0;
    let mut pairs = Vec::new();
    for p in &ensemble.profiles {
        let r = residual_fractions(&p.sizes, n);
        for l in 0..r.len().saturating_sub(1) {
            pairs.push((r[l], r[l + 1]));
            let Some(pred) = map(r[l]) else { continue };
            let dev = (r[l + 1] - pred).abs();
            if sums.len() <= l {
                sums.resize(l + 1, 0.0);
                counts.resize(l + 1, 0);
            }
            sums[l] += dev;
            counts[l] += 1;
            max_point = max_point.max(dev);
        }
    }
    let shell_mean: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c == 0 { f64::NAN } else { s / c as f64 })
        .collect();
    let max_shell_mean = shell_mean.iter().copied().filter(|v| !v.is_nan()).fold(0.0, f64::max);
    RecursionDeviation {
        shell_mean,
        max_shell_mean,
        max_point,
        pairs,
    }
}

/// `r ↦ G0(G1(G0^-1(r)))`; `None` where `G0^-1` is undefined.
pub fn gf_recursion_map(model: &GfModel) -> impl Fn(f64) -> Option<f64> + '_ {
    move |r| model.g0_inverse(r).ok().map(|u| model.g0(model.g1(u)))
}

/// `r ↦ exp(k (r - 1))`.
pub fn poisson_recursion_map(mean_degree: f64) -> impl Fn(f64) -> Option<f64> {
    move |r| Some((mean_degree * (r - 1.0)).exp())
}

/// Deepest well-populated boundary shell and whether `k̃_ℓ + 1` never
/// increases past `d`.
#[derive(Clone, Debug, Serialize)]
pub struct BranchingSummary {
    /// `(ℓ, members, k̃_ℓ + 1)` for every reached shell.
    pub shells: Vec<(usize, u64, f64)>,
    pub deepest_shell: Option<usize>,
    pub deepest_value: Option<f64>,
    pub non_increasing: bool,
}

/// Considers shells with `ℓ > distance` and at least
/// [`BRANCHING_MIN_MEMBERS`] visits.
pub fn branching_summary(ensemble: &ShellEnsemble, distance: f64) -> BranchingSummary {
    let shells: Vec<(usize, u64, f64)> = shell_branching(ensemble)
        .into_iter()
        .map(|b| (b.shell, b.members, b.ktilde + 1.0))
        .collect();
    let boundary: Vec<(usize, f64)> = shells
        .iter()
        .filter(|(l, m, _)| *l as f64 > distance && *m >= BRANCHING_MIN_MEMBERS)
        .map(|&(l, _, v)| (l, v))
        .collect();
    let non_increasing = boundary.windows(2).all(|w| w[1].1 <= w[0].1);
    BranchingSummary {
        deepest_shell: boundary.last().map(|b| b.0),
        deepest_value: boundary.last().map(|b| b.1),
        non_increasing,
        shells,
    }
}

/// Boundary clusters at each cut in `cuts` for every origin, indexed
/// `[cut][origin]`. Member lists are dropped to keep memory flat.
pub fn cluster_sets(
    giant: &Graph,
    origins: &[usize],
    cuts: &[usize],
    options: &BoundaryOptions,
) -> Result<Vec<Vec<BoundaryClusterSet>>> {
    let per_origin: Vec<Vec<BoundaryClusterSet>> = origins
        .par_iter()
        .map(|&o| {
            let profile = bfs_shells(giant, o);
            cuts.iter()
                .map(|&c| {
                    let mut set = boundary_clusters_with(giant, &profile, c, options)?;
                    for cluster in &mut set.clusters {
                        cluster.members = Vec::new();
                    }
                    Ok(set)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut by_cut: Vec<Vec<BoundaryClusterSet>> = vec![Vec::with_capacity(origins.len()); cuts.len()];
    for sets in per_origin {
        for (acc, set) in by_cut.iter_mut().zip(sets) {
            acc.push(set);
        }
    }
    Ok(by_cut)
}

/// `count` origins drawn from the giant component, as full-graph indices.
pub fn sample_origins_in_giant(net: &Prepared, count: usize, seed: u64) -> Result<Vec<usize>> {
    let k = count.min(net.giant_nodes.len());
    let picks = sample_origins(net.giant_nodes.len(), k, derive_seed(seed, TASK_ORIGINS))?;
    Ok(picks.into_iter().map(|i| net.giant_nodes[i]).collect())
}

/// Cluster sets of one network, `sets[i]` belonging to `cuts[i]`.
#[derive(Clone, Debug)]
pub struct BoundaryStudy {
    pub distance: DistanceEstimate,
    pub cuts: Vec<usize>,
    pub sets: Vec<Vec<BoundaryClusterSet>>,
}

/// Boundary clusters around `origins` giant-component origins. Without
/// explicit `cuts` the cut is `⌈d⌉`, followed by the next two when `sweep`
/// is set. Internal distances are measured for every cluster except the
/// largest when `measure_distances` is set.
pub fn boundary_study(
    net: &Prepared,
    origins: usize,
    cuts: Option<&[usize]>,
    sweep: bool,
    measure_distances: bool,
    pair_samples: usize,
    seed: u64,
) -> Result<BoundaryStudy> {
    let distance = mean_distance(&net.giant, pair_samples, derive_seed(seed, TASK_DISTANCE))?;
    let cuts: Vec<usize> = match cuts {
        Some(c) => c.to_vec(),
        None => {
            let first = (distance.mean.ceil() as usize).max(1);
            (first..=first + if sweep { 2 } else { 0 }).collect()
        }
    };
    let count = origins.min(net.giant.node_count());
    let chosen = sample_origins(net.giant.node_count(), count, derive_seed(seed, TASK_ORIGINS))?;
    let options = BoundaryOptions {
        seed: derive_seed(seed, TASK_BOUNDARY),
        measure_distances,
        measure_largest: false,
        ..BoundaryOptions::default()
    };
    let sets = cluster_sets(&net.giant, &chosen, &cuts, &options)?;
    Ok(BoundaryStudy { distance, cuts, sets })
}

/// Least-squares slope of the log-binned `n(s)` over bins holding at least
/// [`MIN_FIT_SAMPLES`] clusters.
pub fn fit_cluster_exponent(hist: &ClusterHistogram) -> Result<FitResult> {
    let pts: Vec<(f64, f64)> = hist
        .log_binned(CLUSTER_BINS_PER_DECADE)
        .into_iter()
        .filter(|b| b.count >= MIN_FIT_SAMPLES as u64)
        .map(|b| (b.center, b.density))
        .collect();
    fit_loglog(&pts, 0.0, f64::INFINITY)
}

/// `(s, d_internal)` of every non-largest cluster with `d >= FRACTAL_MIN_DISTANCE`.
pub fn fractal_pairs(sets: &[BoundaryClusterSet]) -> Vec<(f64, f64)> {
    size_vs_distance(sets)
        .into_iter()
        .filter(|p| !p.largest && p.distance >= FRACTAL_MIN_DISTANCE)
        .map(|p| (p.size as f64, p.distance))
        .collect()
}

/// Sizes `[n/10, 3n/10, n]` used by the collapse figure.
pub fn collapse_sizes(n: usize) -> [usize; 3] {
    [n / 10, 3 * n / 10, n]
}

/// `⟨B_ℓ⟩/N` against `ℓ - ln N / ln⟨k⟩` for one shell ensemble.
pub fn collapse_curve(ensemble: &ShellEnsemble, n: usize, mean_degree: f64) -> Vec<(f64, f64)> {
    let shift = (n as f64).ln() / mean_degree.ln();
    ensemble
        .mean_normalized_sizes()
        .into_iter()
        .enumerate()
        .map(|(l, y)| (l as f64 - shift, y))
        .collect()
}

/// Runs `figure`. With `graph`, the pipeline runs on that network and no
/// thresholds are checked.
pub fn reproduce(figure: Figure, graph: Option<(&str, Graph)>, opts: &FigureOptions) -> Result<FigureOutput> {
    if opts.n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    if graph.is_none() && figure.needs_user_graph() {
        return Err(Error::InvalidParameter(format!(
            "figure {figure} shows a real network; supply its edge list with --graph"
        )));
    }
    let origins = opts.origins.unwrap_or(figure.default_origins());
    if origins == 0 {
        return Err(Error::InvalidParameter("at least one origin is required".into()));
    }
    let mut ctx = Context {
        opts,
        origins,
        networks: Vec::new(),
        metrics: BTreeMap::new(),
        checks: Vec::new(),
        curves: Vec::new(),
    };
    let user = graph.map(|(label, g)| Prepared::from_graph(label, g));
    match (figure.pipeline(), user) {
        (Pipeline::Collapse, Some(_)) => {
            return Err(Error::InvalidParameter(
                "figure 3a compares generated networks of several sizes and takes no --graph".into(),
            ))
        }
        (Pipeline::Collapse, None) => ctx.collapse(figure)?,
        (p, Some(net)) => ctx.run_network(p, Source::User(&net))?,
        (p, None) => {
            for model in opts.models_for(figure) {
                ctx.run_network(p, Source::Model(&model))?;
            }
        }
    }
    let passed = (!ctx.checks.is_empty()).then(|| ctx.checks.iter().all(|c| c.passed));
    let report = FigureReport {
        figure: figure.tag().to_string(),
        pipeline: figure.pipeline(),
        options: opts.clone(),
        networks: ctx.networks,
        metrics: ctx.metrics,
        checks: ctx.checks,
        passed,
        curves: ctx.curves.clone(),
    };
    Ok(FigureOutput {
        report,
        curves: ctx.curves,
    })
}

enum Source<'a> {
    Model(&'a NetworkModel),
    User(&'a Prepared),
}

impl Source<'_> {
    fn label(&self) -> &str {
        match self {
            Source::Model(m) => model_label(m),
            Source::User(_) => "graph",
        }
    }

    fn model(&self) -> Option<&NetworkModel> {
        match self {
            Source::Model(m) => Some(m),
            Source::User(_) => None,
        }
    }
}

struct Context<'a> {
    opts: &'a FigureOptions,
    origins: usize,
    networks: Vec<NetworkInfo>,
    metrics: BTreeMap<String, Value>,
    checks: Vec<ThresholdCheck>,
    curves: Vec<Curve>,
}

impl Context<'_> {
    fn metric(&mut self, key: String, value: impl Serialize) {
        self.metrics.insert(key, json!(value));
    }

    fn check(&mut self, name: String, value: Option<f64>, min: f64, max: f64) {
        self.checks.push(ThresholdCheck::new(name, value, min, max));
    }

    fn run_network(&mut self, pipeline: Pipeline, src: Source<'_>) -> Result<()> {
        match pipeline {
            Pipeline::ShellSizes | Pipeline::Branching => {
                let study = self.shell_study(&src)?;
                if pipeline == Pipeline::ShellSizes {
                    self.shell_sizes(&src, &study)
                } else {
                    self.branching(&src, &study);
                    Ok(())
                }
            }
            Pipeline::SmallShells => self.small_shells(&src),
            Pipeline::Recursion => self.recursion(&src),
            Pipeline::ClusterSizes | Pipeline::FractalDimension => self.clusters(pipeline, &src),
            Pipeline::Collapse => unreachable!("collapse runs on its own"),
        }
    }

    fn shell_study(&mut self, src: &Source<'_>) -> Result<ShellStudy> {
        let o = self.opts;
        let study = match src {
            Source::Model(m) => study_model(m, o.realizations, self.origins, o.pair_samples, o.seed)?,
            Source::User(net) => study_prepared(net, self.origins, o.pair_samples, o.seed)?,
        };
        self.networks.extend(study.networks.iter().cloned());
        let p = src.label();
        self.metric(format!("{p}.mean_distance"), study.mean_distance());
        self.metric(format!("{p}.distances"), &study.distances);
        self.metric(format!("{p}.origins"), study.ensemble.origin_count());
        Ok(study)
    }

    fn shell_sizes(&mut self, src: &Source<'_>, study: &ShellStudy) -> Result<()> {
        let p = src.label();
        let ens = &study.ensemble;
        let d = study.mean_distance();
        let fits: Vec<ShellFit> = (1..ens.shell_count()).map(|l| fit_shell(ens, l)).collect();
        for fit in &fits {
            let l = fit.shell;
            let samples = ens.positive_samples(l);
            if let Ok(ccdf) = empirical_ccdf(&samples) {
                let pts = ccdf.into_iter().map(|(x, y)| (x as f64, y)).collect();
                self.curves.push(Curve::new(format!("{p}_shell{l:02}_ccdf"), "B", "P(>B)", pts));
                let pdf = bin_points(&log_binned_pdf(&samples, PDF_BINS_PER_DECADE));
                self.curves.push(Curve::new(format!("{p}_shell{l:02}_pdf"), "B", "p(B)", pdf));
            }
        }
        self.metric(format!("{p}.shell_fits"), &fits);
        let mean_sizes: Vec<(usize, f64)> = ens.mean_sizes().into_iter().enumerate().collect();
        self.metric(format!("{p}.mean_shell_sizes"), &mean_sizes);
        self.metric(format!("{p}.boundary_first_shell"), d.floor() as usize + 1);

        let Some(model) = src.model() else { return Ok(()) };
        let cut = d.ceil() as usize;
        let fit_at = |l: usize| fits.iter().find(|f| f.shell == l);
        let ccdf_at = |l: usize| fit_at(l).and_then(|f| f.ccdf).map(|f| f.exponent);
        match model {
            NetworkModel::Er { n, mean_degree } => {
                for l in [cut + 1, cut + 2] {
                    self.check(format!("{p} CCDF slope, shell {l}"), ccdf_at(l), -1.2, -0.8);
                }
                let pdf = fit_at(cut + 2).and_then(|f| f.pdf).map(|f| f.exponent);
                self.check(format!("{p} pdf slope, shell {}", cut + 2), pdf, -2.4, -1.6);
                let interior: Vec<&ShellFit> = fits.iter().filter(|f| f.shell as f64 <= d - 2.0).collect();
                let kept = interior
                    .iter()
                    .filter(|f| !f.likelihood_ratio.is_some_and(|lr| lr.power_law_rejected()))
                    .count();
                let value = (!interior.is_empty()).then_some(kept as f64);
                self.check(format!("{p} interior shells not rejected as power laws"), value, 0.0, 0.0);
                let gap = d - (*n as f64).ln() / mean_degree.ln();
                self.check(format!("{p} mean distance minus ln N / ln <k>"), Some(gap), -0.5, 0.5);
            }
            NetworkModel::ScaleFree { .. } => {
                for l in [cut + 1, cut + 2] {
                    self.check(format!("{p} CCDF slope, shell {l}"), ccdf_at(l), -1.25, -0.75);
                }
            }
            NetworkModel::Regular { .. } => {
                let shells = [cut + 1, cut + 2];
                let kept = shells
                    .iter()
                    .filter(|&&l| !fit_at(l).and_then(|f| f.likelihood_ratio).is_some_and(|lr| lr.power_law_rejected()))
                    .count();
                self.check(
                    format!("{p} boundary shells not rejected as power laws"),
                    Some(kept as f64),
                    0.0,
                    0.0,
                );
                let theory = gf::gf_from_degree_dist(&model.degree_distribution()?)?;
                let infinite = matches!(gf::delta_exponent(&theory), Ok(gf::Delta::Infinite));
                let no_mu = matches!(gf::mu_exponent(&theory), Ok(Mu::NoFractalBoundary));
                self.metric(format!("{p}.delta_infinite"), infinite);
                self.metric(format!("{p}.no_fractal_boundary"), no_mu);
                self.check(
                    format!("{p} theory flags delta infinite and no mu"),
                    Some(f64::from(u8::from(infinite && no_mu))),
                    1.0,
                    1.0,
                );
            }
        }
        Ok(())
    }

    fn branching(&mut self, src: &Source<'_>, study: &ShellStudy) {
        let p = src.label();
        let summary = branching_summary(&study.ensemble, study.mean_distance());
        let pts = summary.shells.iter().map(|&(l, _, v)| (l as f64, v)).collect();
        self.curves.push(Curve::new(format!("{p}_branching"), "shell", "ktilde+1", pts));
        let limit = match src.model() {
            Some(NetworkModel::Er { .. }) => Some(1.3),
            Some(NetworkModel::ScaleFree { .. }) => Some(2.3),
            _ => None,
        };
        if let Some(limit) = limit {
            if matches!(src.model(), Some(NetworkModel::Er { .. })) {
                self.check(
                    format!("{p} ktilde+1 non-increasing past d"),
                    Some(f64::from(u8::from(summary.non_increasing))),
                    1.0,
                    1.0,
                );
            }
            self.check(format!("{p} ktilde+1 at deepest populated shell"), summary.deepest_value, 0.0, limit);
        }
        self.metric(format!("{p}.branching"), &summary);
    }

    fn small_shells(&mut self, src: &Source<'_>) -> Result<()> {
        let p = src.label();
        let generated;
        let net = match src {
            Source::Model(m) => {
                generated = Prepared::generate(m, self.opts.seed)?;
                &generated
            }
            Source::User(net) => net,
        };
        self.networks.push(net.info.clone());
        let n = net.full.node_count();
        let origins: Vec<usize> = match self.opts.origins {
            Some(k) => sample_origins(n, k.min(n), derive_seed(self.opts.seed, TASK_ORIGINS))?,
            None => (0..n).collect(),
        };
        let ens = shell_ensemble_from(&net.full, &origins, Some(SMALL_SHELL_DEPTH));
        let dd = match src.model() {
            Some(m) => m.degree_distribution()?,
            None => degree_distribution(&net.full),
        };
        let theory = gf::gf_from_degree_dist(&dd)?;
        let mu = gf::mu_exponent(&theory).ok();
        self.metric(format!("{p}.mu_theory"), mu.and_then(Mu::finite));
        self.metric(format!("{p}.no_fractal_boundary"), mu == Some(Mu::NoFractalBoundary));
        self.metric(format!("{p}.delta"), gf::delta_exponent(&theory).ok().and_then(|d| d.finite()));

        for m in 1..=SMALL_SHELL_DEPTH {
            let samples = ens.samples(m);
            let positive: Vec<usize> = samples.iter().copied().filter(|&b| b > 0).collect();
            let pts = bin_points(&log_binned_pdf(&positive, PDF_BINS_PER_DECADE));
            self.curves.push(Curve::new(format!("{p}_shell{m}_pdf"), "B", "p(B)", pts));
            let largest = samples.iter().copied().max().unwrap_or(0);
            let pdf = gf::shell_size_pdf(&theory, m, composition_cap(&theory, largest))?;
            let theory_pts = pdf
                .probs
                .iter()
                .enumerate()
                .skip(1)
                .filter(|(_, &q)| q > 0.0)
                .map(|(b, &q)| (b as f64, q))
                .collect();
            self.curves.push(Curve::new(format!("{p}_shell{m}_composition"), "B", "P(B)", theory_pts));
            let agreement = histogram_agreement(&samples, &pdf, samples.len() as f64 / AGREEMENT_BIN_DIVISOR)?;
            if src.model().is_some() {
                self.check(
                    format!("{p} shell {m} histogram vs composition, max |z|"),
                    Some(agreement.max_abs_z),
                    0.0,
                    AGREEMENT_MAX_Z,
                );
            }
            self.metric(format!("{p}.shell{m}_agreement"), &agreement);
        }

        let fit = small_size_exponent(&ens.samples(SMALL_SHELL_DEPTH)).ok();
        self.metric(format!("{p}.mu_fit"), fit);
        if let (Some(Mu::Finite { value, .. }), Some(fit)) = (mu, fit) {
            self.metric(format!("{p}.mu_gap"), fit.exponent - value);
        }
        if src.model().is_some() {
            if let Some(Mu::Finite { value, .. }) = mu {
                self.check(
                    format!("{p} small-B slope at shell {SMALL_SHELL_DEPTH} minus mu"),
                    fit.map(|f| f.exponent - value),
                    -0.3,
                    0.3,
                );
            }
        }
        Ok(())
    }

    fn recursion(&mut self, src: &Source<'_>) -> Result<()> {
        let p = src.label();
        let generated;
        let net = match src {
            Source::Model(m) => {
                generated = Prepared::generate(m, self.opts.seed)?;
                &generated
            }
            Source::User(net) => net,
        };
        self.networks.push(net.info.clone());
        let origins = sample_origins_in_giant(net, self.origins, self.opts.seed)?;
        let ens = shell_ensemble_from(&net.full, &origins, None);
        let n = net.full.node_count();

        let theory = match src.model() {
            Some(m) => gf::gf_from_degree_dist(&m.degree_distribution()?)?,
            None => gf::gf_from_degree_dist(&degree_distribution(&net.full))?,
        };
        let deviation = match src.model() {
            Some(NetworkModel::Er { mean_degree, .. }) => recursion_deviation(&ens, n, poisson_recursion_map(*mean_degree)),
            _ => recursion_deviation(&ens, n, gf_recursion_map(&theory)),
        };
        self.curves.push(Curve::new(format!("{p}_recursion_scatter"), "r_l", "r_l+1", deviation.pairs.clone()));

        let r_min = deviation.pairs.iter().map(|q| q.0).fold(1.0, f64::min);
        let grid: Vec<(f64, f64)> = (0..=THEORY_GRID)
            .filter_map(|i| {
                let r = r_min + (1.0 - r_min) * i as f64 / THEORY_GRID as f64;
                let next = match src.model() {
                    Some(NetworkModel::Er { mean_degree, .. }) => poisson_recursion_map(*mean_degree)(r),
                    _ => gf_recursion_map(&theory)(r),
                };
                next.map(|y| (r, y))
            })
            .collect();
        self.curves.push(Curve::new(format!("{p}_recursion_theory"), "r", "map(r)", grid));

        self.metric(format!("{p}.r_inf_theory"), theory.r_inf());
        self.metric(format!("{p}.max_point_deviation"), deviation.max_point);
        self.metric(format!("{p}.shell_mean_deviation"), &deviation.shell_mean);
        self.metric(format!("{p}.max_shell_mean_deviation"), deviation.max_shell_mean);
        if matches!(src.model(), Some(NetworkModel::Er { .. })) {
            self.check(
                format!("{p} max shell-averaged recursion deviation"),
                Some(deviation.max_shell_mean),
                0.0,
                0.02,
            );
        }
        Ok(())
    }

    fn clusters(&mut self, pipeline: Pipeline, src: &Source<'_>) -> Result<()> {
        let p = src.label();
        let o = self.opts;
        let measure = pipeline == Pipeline::FractalDimension;
        let mut distances = Vec::new();
        let mut cuts: Option<Vec<usize>> = o.cut.map(|c| {
            let extra = if o.sweep { 2 } else { 0 };
            (c..=c + extra).collect()
        });
        let mut pooled: Vec<Vec<BoundaryClusterSet>> = Vec::new();
        let mut run = |ctx: &mut Context<'_>, net: &Prepared, seed: u64| -> Result<()> {
            ctx.networks.push(net.info.clone());
            let study = boundary_study(net, ctx.origins, cuts.as_deref(), o.sweep, measure, o.pair_samples, seed)?;
            if cuts.is_none() {
                cuts = Some(study.cuts.clone());
            }
            pooled.resize(study.cuts.len(), Vec::new());
            distances.push(study.distance);
            for (acc, s) in pooled.iter_mut().zip(study.sets) {
                acc.extend(s);
            }
            Ok(())
        };
        match src {
            Source::Model(m) => {
                for r in 0..o.realizations.max(1) {
                    let seed = o.seed.wrapping_add(r as u64);
                    let net = Prepared::generate(m, seed)?;
                    run(self, &net, seed)?;
                }
            }
            Source::User(net) => run(self, net, o.seed)?,
        }
        let cuts = cuts.unwrap_or_default();
        let d = distances.iter().map(|x| x.mean).sum::<f64>() / distances.len() as f64;
        self.metric(format!("{p}.mean_distance"), d);
        self.metric(format!("{p}.distances"), &distances);
        self.metric(format!("{p}.cuts"), &cuts);
        if let Some(tag) = src.model().and_then(model_tag) {
            self.metric(format!("{p}.theory_exponents"), gf::theoretical_cluster_exponents(tag).ok());
        }
        let checked = src.model().is_some_and(|m| !matches!(m, NetworkModel::Regular { .. }));

        for (i, (&cut, sets)) in cuts.iter().zip(&pooled).enumerate() {
            let suffix = if cuts.len() > 1 { format!("_cut{cut}") } else { String::new() };
            let hist = cluster_size_histogram(sets, false)?;
            let largest: Vec<usize> = sets
                .iter()
                .filter_map(|s| s.largest.map(|i| s.clusters[i].size))
                .collect();
            self.metric(format!("{p}.cut{cut}.clusters"), hist.clusters());
            self.metric(format!("{p}.cut{cut}.mass_excluding_largest"), hist.mass());
            self.metric(format!("{p}.cut{cut}.largest_sizes"), &largest);
            match pipeline {
                Pipeline::ClusterSizes => {
                    let pts = bin_points(&hist.log_binned(CLUSTER_BINS_PER_DECADE));
                    self.curves.push(Curve::new(format!("{p}_ns{suffix}"), "s", "n(s)", pts));
                    let raw = hist.counts.iter().map(|(&s, &c)| (s as f64, c as f64)).collect();
                    self.curves.push(Curve::new(format!("{p}_ns_raw{suffix}"), "s", "count", raw));
                    let fit = fit_cluster_exponent(&hist);
                    self.metric(format!("{p}.cut{cut}.theta_fit"), fit.as_ref().ok());
                    if let Err(e) = &fit {
                        self.metric(format!("{p}.cut{cut}.theta_error"), e.to_string());
                    }
                    if checked && i == 0 && o.cut.is_none() {
                        let v = fit.ok().map(|f| f.exponent);
                        self.check(format!("{p} n(s) slope at cut {cut}"), v, -3.4, -2.6);
                    }
                }
                Pipeline::FractalDimension => {
                    let pairs = fractal_pairs(sets);
                    let scatter = pairs.iter().map(|&(s, dist)| (dist, s)).collect();
                    self.curves.push(Curve::new(format!("{p}_size_vs_distance{suffix}"), "d_internal", "s", scatter));
                    let fit = fit_fractal_dimension(&pairs, FRACTAL_MIN_DISTANCE, f64::INFINITY);
                    self.metric(format!("{p}.cut{cut}.phi_fit"), fit.as_ref().ok());
                    if let Err(e) = &fit {
                        self.metric(format!("{p}.cut{cut}.phi_error"), e.to_string());
                    }
                    if checked && i == 0 && o.cut.is_none() {
                        let v = fit.ok().map(|f| f.exponent);
                        self.check(format!("{p} fractal dimension at cut {cut}"), v, 1.6, 2.4);
                    }
                }
                _ => unreachable!(),
            }
        }
        Ok(())
    }

    fn collapse(&mut self, figure: Figure) -> Result<()> {
        let model = self.opts.models_for(figure)[0];
        let p = model_label(&model);
        let k = model.mean_degree()?;
        let mut curves = Vec::new();
        for (i, size) in collapse_sizes(model.node_count()).into_iter().enumerate() {
            let sized = model.resized(size);
            let seed = self.opts.seed.wrapping_add(i as u64);
            let net = Prepared::generate(&sized, seed)?;
            self.networks.push(net.info.clone());
            let count = self.origins.min(net.giant.node_count());
            let ens = shell_ensemble_from(
                &net.giant,
                &sample_origins(net.giant.node_count(), count, derive_seed(seed, TASK_ORIGINS))?,
                None,
            );
            let curve = collapse_curve(&ens, net.giant.node_count(), k);
            self.curves.push(Curve::new(format!("{p}_n{size}"), "l - lnN/ln<k>", "<B_l>/N", curve.clone()));
            curves.push(curve);
        }
        let metric = collapse_metric(&curves).ok();
        self.metric(format!("{p}.collapse_sup_distance"), metric);
        if matches!(model, NetworkModel::Er { .. }) {
            self.check(format!("{p} collapse sup-distance"), metric, 0.0, 0.1);
        }
        Ok(())
    }
}
