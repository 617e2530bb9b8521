//! Generating-function theory of shell growth.
//!
//! `G0(x) = Σ q(k) x^k` generates the degree of a random node and
//! `G1(x) = G0'(x) / <k>` the number of further links of a node reached by
//! following a link. Compositions of these give shell-size distributions;
//! the fixed point of `G1` gives the giant-component statistics; and the
//! behaviour of `G1` near that fixed point gives the small-shell exponents.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::NetworkModel;
use crate::graph::{branching_factor, DegreeDistribution};

/// Largest degree kept in coefficient arrays unless the caller says otherwise.
pub const DEFAULT_DEGREE_CAP: usize = 10_000;

const NORMALIZATION_TOL: f64 = 1e-12;
/// Convergence threshold on `|G1(f) - f|`.
pub const FIXED_POINT_TOL: f64 = 1e-15;
const MAX_FIXED_POINT_ITERATIONS: usize = 10_000_000;
const INVERSE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FixedPoint {
    /// Smallest root of `G1(f) = f` in `[0, 1]`.
    pub value: f64,
    /// Branching factor `<= 1`; `value` is then 1 and there is no giant component.
    pub subcritical: bool,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Delta {
    Finite(f64),
    /// `q(1) = q(2) = 0`: `G1'(f_inf) = 0` and the singularity is exponential.
    Infinite,
}

impl Delta {
    pub fn finite(self) -> Option<f64> {
        match self {
            Delta::Finite(d) => Some(d),
            Delta::Infinite => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuCase {
    /// `q(1) > 0`: `mu = delta - 1`.
    DegreeOnePresent,
    /// `q(1) = 0, q(2) > 0`: `mu = 2 delta - 1`.
    MinimumDegreeTwo,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Mu {
    Finite { value: f64, case: MuCase },
    /// Minimum degree at least 3: no power-law regime, no fractal boundary.
    NoFractalBoundary,
}

impl Mu {
    pub fn finite(self) -> Option<f64> {
        match self {
            Mu::Finite { value, .. } => Some(value),
            Mu::NoFractalBoundary => None,
        }
    }
}

/// Generating functions of a degree distribution plus the constants
/// derived from them.
#[derive(Clone, Debug)]
pub struct GfModel {
    q: DegreeDistribution,
    g1: Vec<f64>,
    mean_k: f64,
    ktilde: f64,
    fixed_point: FixedPoint,
}

pub fn gf_from_degree_dist(dd: &DegreeDistribution) -> Result<GfModel> {
    let total: f64 = dd.probs().iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized(total));
    }
    let ktilde = branching_factor(dd)?;
    let mean_k = dd.mean();
    let q = dd.probs();
    let g1: Vec<f64> = (0..q.len().saturating_sub(1).max(1))
        .map(|k| (k + 1) as f64 * q.get(k + 1).copied().unwrap_or(0.0) / mean_k)
        .collect();
    let mut model = GfModel {
        q: dd.clone(),
        g1,
        mean_k,
        ktilde,
        fixed_point: FixedPoint {
            value: 1.0,
            subcritical: true,
            iterations: 0,
        },
    };
    model.fixed_point = fixed_point_f_inf(&model, FIXED_POINT_TOL)?;
    Ok(model)
}

/// Poisson degrees (ER graphs), truncated where the tail is below 1e-20.
pub fn poisson_model(mean_degree: f64) -> Result<GfModel> {
    let dd = NetworkModel::Er { n: usize::MAX, mean_degree }.degree_distribution()?;
    gf_from_degree_dist(&dd)
}

impl GfModel {
    pub fn degree_distribution(&self) -> &DegreeDistribution {
        &self.q
    }

    pub fn g0_coeffs(&self) -> &[f64] {
        self.q.probs()
    }

    /// `q̃(k) = (k + 1) q(k + 1) / <k>`.
    pub fn g1_coeffs(&self) -> &[f64] {
        &self.g1
    }

    pub fn mean_k(&self) -> f64 {
        self.mean_k
    }

    pub fn ktilde(&self) -> f64 {
        self.ktilde
    }

    pub fn f_inf(&self) -> f64 {
        self.fixed_point.value
    }

    pub fn fixed_point(&self) -> FixedPoint {
        self.fixed_point
    }

    pub fn is_subcritical(&self) -> bool {
        self.fixed_point.subcritical
    }

    /// `r_inf = G0(f_inf)`, the fraction of nodes outside the giant component.
    pub fn r_inf(&self) -> f64 {
        self.g0(self.f_inf())
    }

    /// Scale `k̃^m` of the exponential cutoff of the shell-`m` size pdf.
    pub fn cutoff_scale(&self, shell: usize) -> f64 {
        self.ktilde.powi(shell as i32)
    }

    pub fn g0(&self, x: f64) -> f64 {
        horner(self.q.probs(), x)
    }

    pub fn g1(&self, x: f64) -> f64 {
        horner(&self.g1, x)
    }

    pub fn g0_prime(&self, x: f64) -> f64 {
        horner_derivative(self.q.probs(), x, 1)
    }

    pub fn g0_second(&self, x: f64) -> f64 {
        horner_derivative(self.q.probs(), x, 2)
    }

    pub fn g1_prime(&self, x: f64) -> f64 {
        horner_derivative(&self.g1, x, 1)
    }

    /// `u` in `[0, 1]` with `G0(u) = r`, by bisection; `G0` increases on `[0, 1]`.
    pub fn g0_inverse(&self, r: f64) -> Result<f64> {
        let lo_val = self.g0(0.0);
        if !(lo_val - INVERSE_TOL..=1.0 + INVERSE_TOL).contains(&r) {
            return Err(Error::OutOfRange {
                what: "r",
                value: r,
                lo: lo_val,
                hi: 1.0,
            });
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.g0(mid) < r {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-16 {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Largest `|q(k) - q̃(k)|`; zero exactly when `G0 = G1`, as for Poisson degrees.
    pub fn g0_g1_max_gap(&self) -> f64 {
        let q = self.q.probs();
        (0..q.len().max(self.g1.len()))
            .map(|k| (q.get(k).copied().unwrap_or(0.0) - self.g1.get(k).copied().unwrap_or(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn report(&self, model: Option<ModelTag>) -> GfReport {
        let delta = delta_exponent(self).ok();
        let mu = mu_exponent(self).ok();
        GfReport {
            mean_k: self.mean_k,
            ktilde: self.ktilde,
            k_min: self.q.k_min(),
            k_max: self.q.k_max(),
            f_inf: self.f_inf(),
            subcritical: self.is_subcritical(),
            r_inf: self.r_inf(),
            delta: delta.and_then(Delta::finite),
            delta_infinite: delta == Some(Delta::Infinite),
            mu: mu.and_then(Mu::finite),
            mu_case: match mu {
                Some(Mu::Finite { case, .. }) => Some(case),
                _ => None,
            },
            no_fractal_boundary: mu == Some(Mu::NoFractalBoundary),
            g0_g1_max_gap: self.g0_g1_max_gap(),
            exponents: model.and_then(|m| theoretical_cluster_exponents(m).ok()),
        }
    }
}

/// Flat summary of a [`GfModel`] for JSON output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GfReport {
    pub mean_k: f64,
    pub ktilde: f64,
    pub k_min: usize,
    pub k_max: usize,
    pub f_inf: f64,
    pub subcritical: bool,
    pub r_inf: f64,
    pub delta: Option<f64>,
    pub delta_infinite: bool,
    pub mu: Option<f64>,
    pub mu_case: Option<MuCase>,
    pub no_fractal_boundary: bool,
    pub g0_g1_max_gap: f64,
    pub exponents: Option<ClusterExponents>,
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `order`-th derivative (1 or 2) of the polynomial at `x`.
fn horner_derivative(coeffs: &[f64], x: f64, order: usize) -> f64 {
    let scaled: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(order)
        .map(|(k, &c)| {
            let falling: f64 = (0..order).map(|j| (k - j) as f64).product();
            falling * c
        })
        .collect();
    horner(&scaled, x)
}

/// Iterates `f <- G1(f)` from 0 until `|G1(f) - f| < tol`, which converges
/// to the smallest fixed point. Subcritical models return 1 with a flag.
pub fn fixed_point_f_inf(model: &GfModel, tol: f64) -> Result<FixedPoint> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if model.ktilde <= 1.0 {
        return Ok(FixedPoint {
            value: 1.0,
            subcritical: true,
            iterations: 0,
        });
    }
    let mut f = 0.0;
    for it in 0..MAX_FIXED_POINT_ITERATIONS {
        let next = model.g1(f);
        if (next - f).abs() < tol {
            return Ok(FixedPoint {
                value: next,
                subcritical: false,
                iterations: it + 1,
            });
        }
        f = next;
    }
    Err(Error::NoConvergence(MAX_FIXED_POINT_ITERATIONS))
}

/// `delta = -ln G1'(f_inf) / ln k̃`.
pub fn delta_exponent(model: &GfModel) -> Result<Delta> {
    if model.ktilde <= 1.0 {
        return Err(Error::Subcritical(model.ktilde));
    }
    let slope = model.g1_prime(model.f_inf());
    if slope <= 0.0 {
        return Ok(Delta::Infinite);
    }
    Ok(Delta::Finite(-slope.ln() / model.ktilde.ln()))
}

/// Small-shell exponent `mu` of `P(B_m) ∝ B_m^mu`.
pub fn mu_exponent(model: &GfModel) -> Result<Mu> {
    let q1 = model.q.prob(1);
    let q2 = model.q.prob(2);
    if q1 == 0.0 && q2 == 0.0 {
        return Ok(Mu::NoFractalBoundary);
    }
    let delta = match delta_exponent(model)? {
        Delta::Finite(d) => d,
        Delta::Infinite => return Ok(Mu::NoFractalBoundary),
    };
    Ok(if q1 > 0.0 {
        Mu::Finite {
            value: delta - 1.0,
            case: MuCase::DegreeOnePresent,
        }
    } else {
        Mu::Finite {
            value: 2.0 * delta - 1.0,
            case: MuCase::MinimumDegreeTwo,
        }
    })
}

/// Distribution of `B_m` read off the coefficients of `G0(G1^(m-1)(x))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellPdf {
    pub shell: usize,
    /// `probs[b] = P(B_m = b)` for `b = 0..=b_max`.
    pub probs: Vec<f64>,
    /// Probability mass above `b_max`.
    pub deficit: f64,
}

/// `outer(inner(x))` truncated after degree `cap`. Coefficients up to `cap`
/// are exact since all series involved have non-negative powers only.
pub fn compose_truncated(outer: &[f64], inner: &[f64], cap: usize) -> Vec<f64> {
    let inner = &inner[..inner.len().min(cap + 1)];
    let mut acc: Vec<f64> = vec![0.0; 1];
    for &c in outer.iter().rev() {
        let mut next = vec![0.0; (acc.len() + inner.len() - 1).min(cap + 1)];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in inner.iter().enumerate().take(cap + 1 - i) {
                next[i + j] += a * b;
            }
        }
        next[0] += c;
        acc = next;
    }
    acc.resize(cap + 1, 0.0);
    acc
}

pub fn shell_size_pdf(model: &GfModel, shell: usize, b_max: usize) -> Result<ShellPdf> {
    if shell == 0 || b_max == 0 {
        return Err(Error::InvalidParameter(format!(
            "shell ({shell}) and b_max ({b_max}) must be at least 1"
        )));
    }
    let mut inner = vec![0.0, 1.0];
    for _ in 1..shell {
        inner = compose_truncated(&model.g1, &inner, b_max);
    }
    let probs = compose_truncated(model.q.probs(), &inner, b_max);
    let deficit = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    Ok(ShellPdf {
        shell,
        probs,
        deficit,
    })
}

/// Shell recursion `r_{j+1} = G0(G1(G0^-1(r_j)))`, returned as
/// `[r_start, r_1, ..., r_steps]`.
pub fn iterate_r(model: &GfModel, r_start: f64, steps: usize) -> Result<Vec<f64>> {
    let r_inf = model.r_inf();
    if !(r_inf - INVERSE_TOL..=1.0).contains(&r_start) {
        return Err(Error::OutOfRange {
            what: "r_start",
            value: r_start,
            lo: r_inf,
            hi: 1.0,
        });
    }
    let mut out = Vec::with_capacity(steps + 1);
    out.push(r_start);
    let mut u = if r_start == 1.0 { 1.0 } else { model.g0_inverse(r_start)? };
    for _ in 0..steps {
        u = model.g1(u);
        out.push(model.g0(u));
    }
    Ok(out)
}

/// Branching factor `u G0''(u) / G0'(u)` of the nodes left outside a shell
/// whose residual fraction is `r`, with `u = G0^-1(r)`.
pub fn residual_branching(model: &GfModel, r: f64) -> Result<f64> {
    let r_inf = model.r_inf();
    if !(r > r_inf && r <= 1.0) {
        return Err(Error::OutOfRange {
            what: "r",
            value: r,
            lo: r_inf,
            hi: 1.0,
        });
    }
    let u = if r == 1.0 { 1.0 } else { model.g0_inverse(r)? };
    Ok(u * model.g0_second(u) / model.g0_prime(u))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ModelTag {
    ErdosRenyi,
    ScaleFree { lambda: f64 },
}

/// Percolation exponents with `theta = tau + sigma` for `n(s) ∝ s^-theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClusterExponents {
    pub tau: f64,
    pub sigma: f64,
    pub theta: f64,
    /// `2 < lambda < 3`: `tau + sigma` is not 3 and `theta = 3` is a conjecture.
    pub conjecture: bool,
}

pub fn theoretical_cluster_exponents(model: ModelTag) -> Result<ClusterExponents> {
    let mean_field = ClusterExponents {
        tau: 2.5,
        sigma: 0.5,
        theta: 3.0,
        conjecture: false,
    };
    match model {
        ModelTag::ErdosRenyi => Ok(mean_field),
        ModelTag::ScaleFree { lambda } if !(lambda > 2.0) => Err(Error::InvalidParameter(format!(
            "scale-free exponent must exceed 2, got {lambda}"
        ))),
        ModelTag::ScaleFree { lambda } if lambda > 4.0 => Ok(mean_field),
        ModelTag::ScaleFree { lambda } => {
            let tau = (2.0 * lambda - 3.0) / (lambda - 2.0);
            let sigma = (lambda - 3.0).abs() / (lambda - 2.0);
            if lambda < 3.0 {
                Ok(ClusterExponents {
                    tau,
                    sigma,
                    theta: 3.0,
                    conjecture: true,
                })
            } else {
                Ok(ClusterExponents {
                    tau,
                    sigma,
                    theta: tau + sigma,
                    conjecture: false,
                })
            }
        }
    }
}
