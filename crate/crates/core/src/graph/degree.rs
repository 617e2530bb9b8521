use serde::Serialize;

use super::Graph;
use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-12;

/// Probability mass `q(k)` over degrees, stored densely for `k = 0..=k_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeDistribution {
    probs: Vec<f64>,
    k_min: usize,
    k_max: usize,
    mean: f64,
    second_moment: f64,
}

impl DegreeDistribution {
    /// Validates and wraps a pmf indexed by degree. Trailing zeros are trimmed.
    pub fn from_pmf(mut probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidParameter(
                "degree probabilities must be finite and non-negative".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Unnormalized(total));
        }
        while probs.len() > 1 && *probs.last().unwrap() == 0.0 {
            probs.pop();
        }
        let k_max = probs.len() - 1;
        let k_min = probs.iter().position(|&p| p > 0.0).unwrap_or(0);
        let mut mean = 0.0;
        let mut second_moment = 0.0;
        for (k, &p) in probs.iter().enumerate() {
            let k = k as f64;
            mean += k * p;
            second_moment += k * k * p;
        }
        Ok(DegreeDistribution {
            probs,
            k_min,
            k_max,
            mean,
            second_moment,
        })
    }

    /// Normalizes non-negative weights into a pmf.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidParameter("weights must have a positive finite sum".into()));
        }
        Self::from_pmf(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        Self::from_weights(counts.iter().map(|&c| c as f64).collect())
    }

    /// All nodes have degree `k`.
    pub fn regular(k: usize) -> Self {
        let mut probs = vec![0.0; k + 1];
        probs[k] = 1.0;
        Self::from_pmf(probs).expect("point mass is normalized")
    }

    /// Poisson pmf truncated at `k_cut` and renormalized.
    pub fn poisson(mean: f64, k_cut: usize) -> Result<Self> {
        if !(mean > 0.0) {
            return Err(Error::InvalidParameter(format!("poisson mean must be positive, got {mean}")));
        }
        let mut weights = Vec::with_capacity(k_cut + 1);
        // log-space recurrence avoids overflow for large k_cut
        let mut log_p = -mean;
        for k in 0..=k_cut {
            if k > 0 {
                log_p += mean.ln() - (k as f64).ln();
            }
            weights.push(log_p.exp());
        }
        Self::from_weights(weights)
    }

    /// `q(k) ∝ k^-lambda` on `[k_min, k_max]`.
    pub fn power_law(lambda: f64, k_min: usize, k_max: usize) -> Result<Self> {
        if k_min == 0 || k_max < k_min {
            return Err(Error::InvalidParameter(format!(
                "power-law support [{k_min}, {k_max}] must satisfy 1 <= k_min <= k_max"
            )));
        }
        let weights = (0..=k_max)
            .map(|k| if k < k_min { 0.0 } else { (k as f64).powf(-lambda) })
            .collect();
        Self::from_weights(weights)
    }

    /// `q(k)`, zero outside the support.
    #[inline]
    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }
}

pub fn degree_distribution(graph: &Graph) -> DegreeDistribution {
    let n = graph.node_count();
    let k_max = (0..n).map(|i| graph.degree(i)).max().unwrap_or(0);
    let mut counts = vec![0u64; k_max + 1];
    for i in 0..n {
        counts[graph.degree(i)] += 1;
    }
    if n == 0 {
        return DegreeDistribution::regular(0);
    }
    DegreeDistribution::from_counts(&counts).expect("empirical counts are normalizable")
}

/// `<k^2>/<k> - 1`.
pub fn branching_factor(dd: &DegreeDistribution) -> Result<f64> {
    if dd.mean() <= 0.0 {
        return Err(Error::ZeroDegrees);
    }
    Ok(dd.second_moment() / dd.mean() - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_degree_distribution() {
        let (g, _) = Graph::from_index_edges(3, [(0, 1), (1, 2)]);
        let dd = degree_distribution(&g);
        assert!((dd.prob(1) - 2.0 / 3.0).abs() < 1e-15);
        assert!((dd.prob(2) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(dd.k_min(), 1);
        assert_eq!(dd.k_max(), 2);
    }

    #[test]
    fn regular_branching_factor_is_two() {
        let dd = DegreeDistribution::regular(3);
        assert_eq!(dd.prob(3), 1.0);
        assert!((branching_factor(&dd).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mixed_one_three_branching_factor() {
        let dd = DegreeDistribution::from_pmf(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        assert!((dd.mean() - 2.0).abs() < 1e-15);
        assert!((dd.second_moment() - 5.0).abs() < 1e-15);
        assert!((branching_factor(&dd).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn zero_degrees_error() {
        let dd = DegreeDistribution::regular(0);
        assert!(matches!(branching_factor(&dd), Err(Error::ZeroDegrees)));
    }

    #[test]
    fn unnormalized_pmf_rejected() {
        assert!(matches!(
            DegreeDistribution::from_pmf(vec![0.5, 0.4]),
            Err(Error::Unnormalized(_))
        ));
    }

    #[test]
    fn poisson_moments() {
        let dd = DegreeDistribution::poisson(6.0, 80).unwrap();
        assert!((dd.mean() - 6.0).abs() < 1e-12);
        // <k^2> = <k>^2 + <k>
        assert!((dd.second_moment() - 42.0).abs() < 1e-10);
        assert!((branching_factor(&dd).unwrap() - 6.0).abs() < 1e-10);
    }
}
