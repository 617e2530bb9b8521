//! Distribution estimates and exponent fits.
//!
//! Exponents are reported as signed powers: a pdf `p(x) ∝ x^-2` fits to
//! `exponent = -2`, a cumulative tail `P(X > x) ∝ x^-1` to `-1`, and a
//! growth law `s ∝ d^2` to `+2`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Minimum number of samples (or points) behind any reported fit.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Two-sided significance level of the likelihood-ratio verdict.
pub const LR_SIGNIFICANCE: f64 = 0.1;

/// `(x, fraction of samples strictly greater than x)` for every distinct
/// sample value, ascending. The last point always has fraction zero.
pub fn empirical_ccdf(samples: &[usize]) -> Result<Vec<(usize, f64)>> {
    if samples.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let v = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == v {
            j += 1;
        }
        out.push((v, (sorted.len() - j) as f64 / n));
        i = j;
    }
    Ok(out)
}

/// Value at quantile `q` (nearest rank on the sorted samples).
pub fn quantile(samples: &[usize], q: f64) -> Option<usize> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let rank = ((q.clamp(0.0, 1.0) * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

/// Fit window `[q10, x_top]` for a heavy-tailed sample, where `x_top` is the
/// largest value with at least [`MIN_FIT_SAMPLES`] samples above it. The
/// lower decile is the saturated head of the CCDF; beyond `x_top` the tail
/// rests on too few samples.
pub fn scaling_window(samples: &[usize]) -> Option<(usize, usize)> {
    if samples.len() <= 2 * MIN_FIT_SAMPLES {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let lo = quantile(&sorted, 0.1)?;
    let hi = sorted[sorted.len() - 1 - MIN_FIT_SAMPLES];
    (hi > lo).then_some((lo, hi))
}

/// Most frequent value; the smallest one on ties.
pub fn mode(samples: &[usize]) -> Option<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &s in samples {
        *counts.entry(s).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .fold(None, |best: Option<(usize, usize)>, (v, c)| match best {
            Some((_, bc)) if bc >= c => best,
            _ => Some((v, c)),
        })
        .map(|(v, _)| v)
}

/// A geometric bin over the integers `lo..hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogBin {
    pub lo: usize,
    pub hi: usize,
    /// Geometric mean of the smallest and largest integer in the bin.
    pub center: f64,
    pub count: u64,
    /// `count / (total * width)` with `width = hi - lo` integers.
    pub density: f64,
}

impl LogBin {
    pub fn width(&self) -> usize {
        self.hi - self.lo
    }
}

/// Integer bin edges `ceil(10^(i / bins_per_decade))`, deduplicated.
fn log_edges(max_value: usize, bins_per_decade: usize) -> Vec<usize> {
    assert!(bins_per_decade >= 1, "bins_per_decade must be at least 1");
    let mut edges = vec![1usize];
    let mut i = 1;
    while *edges.last().unwrap() <= max_value {
        let e = 10f64.powf(i as f64 / bins_per_decade as f64).ceil() as usize;
        if e > *edges.last().unwrap() {
            edges.push(e);
        }
        i += 1;
    }
    edges
}

/// Log-binned density of positive integer samples; non-positive samples are
/// ignored. Only occupied bins are returned.
pub fn log_binned_pdf(samples: &[usize], bins_per_decade: usize) -> Vec<LogBin> {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for &s in samples.iter().filter(|&&s| s > 0) {
        *counts.entry(s).or_insert(0) += 1;
    }
    log_binned_counts(&counts, bins_per_decade)
}

/// Same as [`log_binned_pdf`] for a value → count histogram.
pub fn log_binned_counts(counts: &BTreeMap<usize, u64>, bins_per_decade: usize) -> Vec<LogBin> {
    let total: u64 = counts.iter().filter(|(&v, _)| v > 0).map(|(_, &c)| c).sum();
    let Some((&max_value, _)) = counts.iter().next_back() else {
        return Vec::new();
    };
    if total == 0 {
        return Vec::new();
    }
    let edges = log_edges(max_value, bins_per_decade);
    edges
        .windows(2)
        .filter_map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let count: u64 = counts.range(lo..hi).map(|(_, &c)| c).sum();
            (count > 0).then(|| LogBin {
                lo,
                hi,
                center: ((lo * (hi - 1)) as f64).sqrt(),
                count,
                density: count as f64 / (total as f64 * (hi - lo) as f64),
            })
        })
        .collect()
}

/// `(center, density)` pairs of log bins.
pub fn bin_points(bins: &[LogBin]) -> Vec<(f64, f64)> {
    bins.iter().map(|b| (b.center, b.density)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    Mle,
    LeastSquaresLoglog,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitResult {
    /// Signed power of the fitted law.
    pub exponent: f64,
    pub stderr: f64,
    pub fit_range: (f64, f64),
    pub method: FitMethod,
    pub sample_count: usize,
}

/// Input to [`fit_power_law`].
#[derive(Clone, Copy, Debug)]
pub enum FitData<'a> {
    /// Raw integer samples, fitted by discrete maximum likelihood.
    Samples(&'a [usize]),
    /// `(x, y)` points, fitted by least squares in log-log space.
    Points(&'a [(f64, f64)]),
}

/// Fits `y ∝ x^exponent` (points) or `p(x) ∝ x^exponent` (samples) over
/// `[lo, hi]`; `hi = None` means unbounded.
pub fn fit_power_law(data: FitData<'_>, lo: f64, hi: Option<f64>) -> Result<FitResult> {
    match data {
        FitData::Samples(s) => {
            let x_min = lo.ceil().max(1.0) as usize;
            fit_discrete_power_law(s, x_min, hi.map(|h| h.floor() as usize))
        }
        FitData::Points(p) => fit_loglog(p, lo, hi.unwrap_or(f64::INFINITY)),
    }
}

/// Ordinary least squares of `ln y` on `ln x` over points with
/// `lo <= x <= hi` and `y > 0`.
pub fn fit_loglog(points: &[(f64, f64)], lo: f64, hi: f64) -> Result<FitResult> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && *x >= lo && *x <= hi)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if used.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: used.len(),
        });
    }
    let (slope, stderr) = least_squares(&used);
    let xmin = used.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).exp();
    let xmax = used.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(FitResult {
        exponent: slope,
        stderr,
        fit_range: (xmin, xmax),
        method: FitMethod::LeastSquaresLoglog,
        sample_count: used.len(),
    })
}

/// Slope and its standard error.
fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (f64::NAN, f64::INFINITY);
    }
    let slope = sxy / sxx;
    let resid: f64 = points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let stderr = if points.len() > 2 {
        (resid / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    (slope, stderr)
}

/// Sums `Σ x^-a`, `Σ ln x · x^-a`, `Σ (ln x)^2 · x^-a` over a support.
#[derive(Clone, Copy, Debug)]
struct LogMoments {
    z: f64,
    z1: f64,
    z2: f64,
}

impl LogMoments {
    fn mean_log(&self) -> f64 {
        self.z1 / self.z
    }

    fn var_log(&self) -> f64 {
        (self.z2 / self.z - self.mean_log().powi(2)).max(0.0)
    }
}

const DIRECT_TERMS: usize = 2000;

/// Moments over `x_min..=x_max`, or `x_min..` (needs `a > 1`) when `x_max`
/// is `None`. The unbounded tail uses the Euler–Maclaurin formula.
fn log_moments(a: f64, x_min: usize, x_max: Option<usize>) -> LogMoments {
    let direct_end = match x_max {
        Some(m) => m,
        None => x_min + DIRECT_TERMS - 1,
    };
    let (mut z, mut z1, mut z2) = (0.0, 0.0, 0.0);
    for x in x_min..=direct_end {
        let lx = (x as f64).ln();
        let t = (-a * lx).exp();
        z += t;
        z1 += lx * t;
        z2 += lx * lx * t;
    }
    if x_max.is_none() {
        let s = (direct_end + 1) as f64;
        let ls = s.ln();
        let b = a - 1.0;
        let p = s.powf(-a);
        let p1 = s.powf(-a - 1.0);
        // integral + f(s)/2 - f'(s)/12
        z += s * p / b + p / 2.0 + a * p1 / 12.0;
        z1 += s * p * (ls / b + 1.0 / (b * b)) + ls * p / 2.0 - p1 * (1.0 - a * ls) / 12.0;
        z2 += s * p * (ls * ls / b + 2.0 * ls / (b * b) + 2.0 / (b * b * b)) + ls * ls * p / 2.0
            - p1 * (2.0 * ls - a * ls * ls) / 12.0;
    }
    LogMoments { z, z1, z2 }
}

/// Discrete power-law MLE of `p(x) ∝ x^-alpha` on `[x_min, x_max]`.
///
/// With `x_max = None` the support is unbounded and `alpha > 1`; with a
/// finite bound any real `alpha` is allowed, so rising densities (negative
/// `alpha`) can be fitted too. The reported exponent is `-alpha`; its
/// standard error is the inverse square root of the Fisher information.
pub fn fit_discrete_power_law(samples: &[usize], x_min: usize, x_max: Option<usize>) -> Result<FitResult> {
    let x_min = x_min.max(1);
    if let Some(m) = x_max {
        if m <= x_min {
            return Err(Error::InvalidParameter(format!("empty fit range [{x_min}, {m}]")));
        }
    }
    let used: Vec<usize> = samples
        .iter()
        .copied()
        .filter(|&x| x >= x_min && x_max.is_none_or(|m| x <= m))
        .collect();
    if used.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: used.len(),
        });
    }
    let target = used.iter().map(|&x| (x as f64).ln()).sum::<f64>() / used.len() as f64;
    let alpha = solve_alpha(target, x_min, x_max)?;
    let var = log_moments(alpha, x_min, x_max).var_log();
    let stderr = if var > 0.0 {
        1.0 / (used.len() as f64 * var).sqrt()
    } else {
        f64::INFINITY
    };
    let hi = x_max.map_or(used.iter().copied().max().unwrap() as f64, |m| m as f64);
    Ok(FitResult {
        exponent: -alpha,
        stderr,
        fit_range: (x_min as f64, hi),
        method: FitMethod::Mle,
        sample_count: used.len(),
    })
}

/// Solves `E_alpha[ln x] = target`; the left side decreases in `alpha`.
fn solve_alpha(target: f64, x_min: usize, x_max: Option<usize>) -> Result<f64> {
    let mean_log = |a: f64| log_moments(a, x_min, x_max).mean_log();
    let (mut lo, mut hi) = match x_max {
        None => (1.0 + 1e-6, 20.0),
        Some(_) => (-20.0, 20.0),
    };
    if x_max.is_some() {
        while mean_log(lo) < target && lo > -1e3 {
            lo *= 2.0;
        }
    }
    while mean_log(hi) > target && hi < 1e3 {
        hi *= 2.0;
    }
    if mean_log(lo) < target {
        // sample mean of ln x exceeds anything the support allows near alpha = 1
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_log(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LrVerdict {
    PowerLaw,
    Exponential,
    Inconclusive,
}

/// Vuong likelihood-ratio comparison of a discrete power law against a
/// discrete exponential on the tail `x >= x_min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LikelihoodRatio {
    pub x_min: usize,
    pub tail_samples: usize,
    pub alpha: f64,
    pub lambda: f64,
    /// `Σ ln p_powerlaw(x) - ln p_exponential(x)`.
    pub log_ratio: f64,
    /// `log_ratio / (sd * sqrt(n))`.
    pub normalized: f64,
    pub p_value: f64,
    pub verdict: LrVerdict,
}

impl LikelihoodRatio {
    /// The exponential form fits the tail significantly better.
    pub fn power_law_rejected(&self) -> bool {
        self.verdict == LrVerdict::Exponential
    }
}

pub fn power_law_vs_exponential(samples: &[usize], x_min: usize) -> Result<LikelihoodRatio> {
    let x_min = x_min.max(1);
    let tail: Vec<usize> = samples.iter().copied().filter(|&x| x >= x_min).collect();
    if tail.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            got: tail.len(),
        });
    }
    let n = tail.len() as f64;
    let pl = fit_discrete_power_law(&tail, x_min, None)?;
    let alpha = -pl.exponent;
    let log_z = log_moments(alpha, x_min, None).z.ln();
    let excess = tail.iter().map(|&x| (x - x_min) as f64).sum::<f64>() / n;

    if excess == 0.0 {
        // a point mass at x_min is the limit of both families
        return Ok(LikelihoodRatio {
            x_min,
            tail_samples: tail.len(),
            alpha,
            lambda: f64::INFINITY,
            log_ratio: 0.0,
            normalized: 0.0,
            p_value: 1.0,
            verdict: LrVerdict::Inconclusive,
        });
    }
    let lambda = (1.0 + 1.0 / excess).ln();
    let log_norm = (-(-lambda).exp_m1()).ln();
    let diffs: Vec<f64> = tail
        .iter()
        .map(|&x| {
            let lp = -alpha * (x as f64).ln() - log_z;
            let le = log_norm - lambda * (x - x_min) as f64;
            lp - le
        })
        .collect();
    let log_ratio: f64 = diffs.iter().sum();
    let mean = log_ratio / n;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
    let (normalized, p_value) = if sd > 0.0 {
        let z = log_ratio / (sd * n.sqrt());
        (z, libm::erfc(z.abs() / std::f64::consts::SQRT_2))
    } else if log_ratio == 0.0 {
        (0.0, 1.0)
    } else {
        (log_ratio.signum() * f64::INFINITY, 0.0)
    };
    let verdict = if p_value >= LR_SIGNIFICANCE {
        LrVerdict::Inconclusive
    } else if log_ratio > 0.0 {
        LrVerdict::PowerLaw
    } else {
        LrVerdict::Exponential
    };
    Ok(LikelihoodRatio {
        x_min,
        tail_samples: tail.len(),
        alpha,
        lambda,
        log_ratio,
        normalized,
        p_value,
        verdict,
    })
}

/// Least squares of `ln s` on `ln d` for `(s, d)` pairs with `d` in
/// `[d_lo, d_hi]` and `d > 0`; the exponent is the fractal dimension.
pub fn fit_fractal_dimension(pairs: &[(f64, f64)], d_lo: f64, d_hi: f64) -> Result<FitResult> {
    let swapped: Vec<(f64, f64)> = pairs.iter().map(|&(s, d)| (d, s)).collect();
    fit_loglog(&swapped, d_lo, d_hi)
}

/// Largest vertical gap between any two piecewise-linear curves over the
/// x-range all of them cover.
pub fn collapse_metric(curves: &[Vec<(f64, f64)>]) -> Result<f64> {
    if curves.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: curves.len(),
        });
    }
    let mut sorted: Vec<Vec<(f64, f64)>> = curves.to_vec();
    for c in &mut sorted {
        if c.is_empty() {
            return Err(Error::NoOverlap);
        }
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    let lo = sorted.iter().map(|c| c[0].0).fold(f64::NEG_INFINITY, f64::max);
    let hi = sorted.iter().map(|c| c[c.len() - 1].0).fold(f64::INFINITY, f64::min);
    if !(lo <= hi) {
        return Err(Error::NoOverlap);
    }
    let mut knots: Vec<f64> = sorted
        .iter()
        .flat_map(|c| c.iter().map(|p| p.0))
        .filter(|&x| x >= lo && x <= hi)
        .chain([lo, hi])
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    let mut worst: f64 = 0.0;
    for &x in &knots {
        let ys: Vec<f64> = sorted.iter().map(|c| interpolate(c, x)).collect();
        let max = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ys.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max(max - min);
    }
    Ok(worst)
}

fn interpolate(curve: &[(f64, f64)], x: f64) -> f64 {
    let i = curve.partition_point(|p| p.0 < x);
    if i == 0 {
        return curve[0].1;
    }
    if i == curve.len() {
        return curve[curve.len() - 1].1;
    }
    let (x0, y0) = curve[i - 1];
    let (x1, y1) = curve[i];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
