//! Acceptance suite: one PASS/FAIL line per criterion at the pinned
//! tolerances. Exits non-zero when any criterion fails.
//!
//! Every criterion uses seed 1 and the desk-scale defaults (N = 1e5, 1000
//! origins, 200 for cluster statistics). Set `NETBOUNDARY_LONG=1` to add
//! the N = 1e6 mean-distance run.

use std::time::Instant;

use netboundary::boundary::cluster_size_histogram;
use netboundary::figures::{
    boundary_study, branching_summary, fit_cluster_exponent, fit_shell, fractal_pairs, histogram_agreement,
    poisson_recursion_map, recursion_deviation, reproduce, sample_origins_in_giant, small_size_exponent,
    study_model, Figure, FigureOptions, Prepared, ShellStudy, AGREEMENT_BIN_DIVISOR, FRACTAL_MIN_DISTANCE,
};
use netboundary::generators::NetworkModel;
use netboundary::gf::{self, Delta, ModelTag, Mu};
use netboundary::graph::DegreeDistribution;
use netboundary::shells::{mean_distance, shell_ensemble_from, DEFAULT_PAIR_SAMPLES};
use netboundary::stats::{empirical_ccdf, fit_fractal_dimension, fit_loglog, quantile, FitResult};

const SEED: u64 = 1;
const N: usize = 100_000;
const K: f64 = 6.0;
const ORIGINS: usize = 1000;
const CLUSTER_ORIGINS: usize = 200;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn within(v: Option<f64>, lo: f64, hi: f64) -> bool {
    v.is_some_and(|v| v >= lo && v <= hi)
}

fn show(v: Option<f64>) -> String {
    v.map_or("none".to_string(), |v| format!("{v:.4}"))
}

fn er() -> NetworkModel {
    NetworkModel::Er { n: N, mean_degree: K }
}

fn sf() -> NetworkModel {
    NetworkModel::ScaleFree {
        n: N,
        lambda: 2.5,
        k_min: 2,
    }
}

fn ccdf_slope(study: &ShellStudy, shell: usize) -> Option<f64> {
    fit_shell(&study.ensemble, shell).ccdf.map(|f| f.exponent)
}

/// CCDF slope over `[q90, q99]` instead of the scaling window, for context.
fn upper_tail_slope(study: &ShellStudy, shell: usize) -> Option<f64> {
    let samples = study.ensemble.positive_samples(shell);
    let mut sorted = samples.clone();
    sorted.sort_unstable();
    let lo = quantile(&sorted, 0.9)? as f64;
    let hi = quantile(&sorted, 0.99)? as f64;
    let pts: Vec<(f64, f64)> = empirical_ccdf(&samples)
        .ok()?
        .into_iter()
        .map(|(x, p)| (x as f64, p))
        .collect();
    fit_loglog(&pts, lo, hi).ok().map(|f| f.exponent)
}

fn c1(study: &ShellStudy) -> Outcome {
    let cut = study.cut();
    let slopes: Vec<(usize, Option<f64>)> = [cut + 1, cut + 2].iter().map(|&l| (l, ccdf_slope(study, l))).collect();
    let passed = slopes.iter().all(|(_, s)| within(*s, -1.2, -0.8));
    let detail = slopes
        .iter()
        .map(|(l, s)| format!("shell {l}: {} (q90-q99 tail {})", show(*s), show(upper_tail_slope(study, *l))))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(passed, format!("d = {:.3}; {detail}; want [-1.2, -0.8]", study.mean_distance()))
}

fn c2(study: &ShellStudy) -> Outcome {
    let cut = study.cut();
    let slopes: Vec<(usize, Option<f64>)> = [cut + 1, cut + 2].iter().map(|&l| (l, ccdf_slope(study, l))).collect();
    let passed = slopes.iter().all(|(_, s)| within(*s, -1.25, -0.75));
    let detail = slopes
        .iter()
        .map(|(l, s)| format!("shell {l}: {} (q90-q99 tail {})", show(*s), show(upper_tail_slope(study, *l))))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(passed, format!("d = {:.3}; {detail}; want [-1.25, -0.75]", study.mean_distance()))
}

fn c3(study: &ShellStudy) -> Outcome {
    let cut = study.cut();
    let deep = fit_shell(&study.ensemble, cut + 2).pdf.map(|f| f.exponent);
    let near = fit_shell(&study.ensemble, cut + 1).pdf.map(|f| f.exponent);
    outcome(
        within(deep, -2.4, -1.6),
        format!("shell {}: {} (shell {}: {}); want [-2.4, -1.6]", cut + 2, show(deep), cut + 1, show(near)),
    )
}

fn c4(study: &ShellStudy) -> Outcome {
    let d = study.mean_distance();
    let shells: Vec<usize> = (1..study.ensemble.shell_count()).filter(|&l| l as f64 <= d - 2.0).collect();
    let mut parts = Vec::new();
    let mut passed = !shells.is_empty();
    for l in shells {
        let lr = fit_shell(&study.ensemble, l).likelihood_ratio;
        let rejected = lr.is_some_and(|lr| lr.power_law_rejected());
        passed &= rejected;
        parts.push(format!(
            "shell {l}: {}",
            lr.map_or("no test".into(), |lr| format!("{:?} z={:.1}", lr.verdict, lr.normalized))
        ));
    }
    outcome(passed, format!("{}; want all exponential", parts.join(", ")))
}

fn theta_for(model: &NetworkModel) -> (usize, Result<FitResult, String>) {
    let net = Prepared::generate(model, SEED).expect("generate");
    let study = boundary_study(&net, CLUSTER_ORIGINS, None, false, false, DEFAULT_PAIR_SAMPLES, SEED).expect("clusters");
    let hist = cluster_size_histogram(&study.sets[0], false).expect("histogram");
    (study.cuts[0], fit_cluster_exponent(&hist).map_err(|e| e.to_string()))
}

fn c5() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, model) in [("ER", er()), ("SF", sf())] {
        let (cut, fit) = theta_for(&model);
        let v = fit.as_ref().ok().map(|f| f.exponent);
        passed &= within(v, -3.4, -2.6);
        match fit {
            Ok(f) => parts.push(format!("{name} cut {cut}: {:.4} ({} bins)", f.exponent, f.sample_count)),
            Err(e) => parts.push(format!("{name} cut {cut}: no fit ({e})")),
        }
    }
    outcome(passed, format!("{}; want [-3.4, -2.6]", parts.join(", ")))
}

fn c6() -> Outcome {
    let net = Prepared::generate(&sf(), SEED).expect("generate");
    let study = boundary_study(&net, CLUSTER_ORIGINS, None, false, true, DEFAULT_PAIR_SAMPLES, SEED).expect("clusters");
    let pairs = fractal_pairs(&study.sets[0]);
    let fit = fit_fractal_dimension(&pairs, FRACTAL_MIN_DISTANCE, f64::INFINITY).ok();
    let v = fit.map(|f| f.exponent);
    outcome(
        within(v, 1.6, 2.4),
        format!("SF cut {}, {} clusters: {}; want [1.6, 2.4]", study.cuts[0], pairs.len(), show(v)),
    )
}

fn c7() -> Outcome {
    let net = Prepared::generate(&er(), SEED).expect("generate");
    let origins = sample_origins_in_giant(&net, ORIGINS, SEED).expect("origins");
    let ens = shell_ensemble_from(&net.full, &origins, None);
    let dev = recursion_deviation(&ens, net.full.node_count(), poisson_recursion_map(K));
    outcome(
        dev.max_shell_mean <= 0.02,
        format!(
            "max over shells of origin-mean |dev| = {:.5} (worst single point {:.5}); want <= 0.02",
            dev.max_shell_mean, dev.max_point
        ),
    )
}

fn c8() -> Outcome {
    let opts = FigureOptions {
        n: N,
        seed: SEED,
        ..FigureOptions::default()
    };
    let out = reproduce(Figure::F3a, None, &opts).expect("collapse");
    let v = out.report.checks.first().and_then(|c| c.value);
    outcome(within(v, 0.0, 0.1), format!("sup-distance {}; want <= 0.1", show(v)))
}

fn c9(er_study: &ShellStudy, sf_study: &ShellStudy) -> Outcome {
    let e = branching_summary(&er_study.ensemble, er_study.mean_distance());
    let s = branching_summary(&sf_study.ensemble, sf_study.mean_distance());
    let passed = e.non_increasing && within(e.deepest_value, 0.0, 1.3) && within(s.deepest_value, 0.0, 2.3);
    outcome(
        passed,
        format!(
            "ER non-increasing past d: {}, shell {:?}: {} (want <= 1.3); SF shell {:?}: {} (want <= 2.3)",
            e.non_increasing,
            e.deepest_shell,
            show(e.deepest_value),
            s.deepest_shell,
            show(s.deepest_value)
        ),
    )
}

/// Depth-3 shells from every node of the full ER graph.
fn small_shell_samples() -> Vec<Vec<usize>> {
    let net = Prepared::generate(&er(), SEED).expect("generate");
    let all: Vec<usize> = (0..net.full.node_count()).collect();
    let ens = shell_ensemble_from(&net.full, &all, Some(3));
    (0..=3).map(|m| ens.samples(m)).collect()
}

fn c10(samples: &[Vec<usize>]) -> Outcome {
    let model = gf::poisson_model(K).expect("model");
    let mu = gf::mu_exponent(&model).ok().and_then(Mu::finite);
    let fit = small_size_exponent(&samples[3]).ok();
    let gap = mu.zip(fit).map(|(m, f)| f.exponent - m);
    outcome(
        within(gap, -0.3, 0.3),
        format!(
            "mu = {}, fit = {} +- {}; gap {}; want |gap| <= 0.3",
            show(mu),
            show(fit.map(|f| f.exponent)),
            show(fit.map(|f| f.stderr)),
            show(gap)
        ),
    )
}

/// `f = exp(k (f - 1))` by bisection on `[0, 1/2]`.
fn poisson_f_inf_oracle(k: f64) -> f64 {
    let g = |f: f64| (k * (f - 1.0)).exp() - f;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P(B_2 = b)` by enumerating first-shell degrees and the excess degrees
/// of every first-shell node.
fn brute_force_b2(q: &[(usize, f64)]) -> Vec<f64> {
    let mean: f64 = q.iter().map(|&(k, p)| k as f64 * p).sum();
    let excess: Vec<(usize, f64)> = q
        .iter()
        .filter(|&&(k, _)| k >= 1)
        .map(|&(k, p)| (k - 1, k as f64 * p / mean))
        .collect();
    let k_max = q.iter().map(|x| x.0).max().unwrap();
    let mut out = vec![0.0; k_max * k_max + 1];
    fn recurse(left: usize, sum: usize, prob: f64, excess: &[(usize, f64)], out: &mut [f64]) {
        if left == 0 {
            out[sum] += prob;
            return;
        }
        for &(j, p) in excess {
            recurse(left - 1, sum + j, prob * p, excess, out);
        }
    }
    for &(k, p) in q {
        recurse(k, 0, p, &excess, &mut out);
    }
    out
}

fn c11(samples: &[Vec<usize>]) -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;

    let model = gf::poisson_model(K).expect("model");
    let f = poisson_f_inf_oracle(K);
    let delta_oracle = -(K * f).ln() / K.ln();
    let delta = gf::delta_exponent(&model).ok().and_then(Delta::finite);
    let errs = [
        (model.f_inf() - f).abs(),
        delta.map_or(f64::INFINITY, |d| (d - delta_oracle).abs()),
        (model.r_inf() - f).abs(),
    ];
    let ok = errs.iter().all(|&e| e <= 1e-9);
    passed &= ok;
    parts.push(format!(
        "f_inf {:.12} / delta {} / r_inf errors {:.1e} {:.1e} {:.1e}",
        model.f_inf(),
        show(delta),
        errs[0],
        errs[1],
        errs[2]
    ));

    let supports: [&[(usize, f64)]; 4] = [
        &[(1, 0.5), (3, 0.5)],
        &[(1, 0.2), (2, 0.3), (4, 0.5)],
        &[(0, 0.1), (2, 0.4), (3, 0.3), (5, 0.2)],
        &[(3, 1.0)],
    ];
    let mut worst: f64 = 0.0;
    for q in supports {
        let k_max = q.iter().map(|x| x.0).max().unwrap();
        let mut pmf = vec![0.0; k_max + 1];
        for &(k, p) in q {
            pmf[k] = p;
        }
        let m = gf::gf_from_degree_dist(&DegreeDistribution::from_pmf(pmf).expect("pmf")).expect("gf");
        let oracle = brute_force_b2(q);
        let pdf = gf::shell_size_pdf(&m, 2, oracle.len() - 1).expect("pdf");
        for (a, b) in pdf.probs.iter().zip(&oracle) {
            worst = worst.max((a - b).abs());
        }
    }
    let ok = worst <= 1e-15;
    passed &= ok;
    parts.push(format!("composition vs enumeration max error {worst:.1e}"));

    for m in 1..=3 {
        let s = &samples[m];
        let largest = *s.iter().max().unwrap();
        let pdf = gf::shell_size_pdf(&model, m, largest + 10).expect("pdf");
        let agree = histogram_agreement(s, &pdf, s.len() as f64 / AGREEMENT_BIN_DIVISOR).expect("agreement");
        passed &= agree.max_abs_z <= 3.0;
        parts.push(format!("B_{m} max |z| {:.2} over {} bins", agree.max_abs_z, agree.bins.len()));
    }
    outcome(passed, parts.join("; "))
}

fn c12() -> Outcome {
    let model = NetworkModel::Regular { n: N, degree: 3 };
    let study = study_model(&model, 1, ORIGINS, DEFAULT_PAIR_SAMPLES, SEED).expect("study");
    let cut = study.cut();
    let mut passed = true;
    let mut parts = vec![format!("d = {:.3}", study.mean_distance())];
    for l in [cut + 1, cut + 2] {
        let fit = fit_shell(&study.ensemble, l);
        let lr = fit.likelihood_ratio;
        passed &= lr.is_some_and(|lr| lr.power_law_rejected());
        parts.push(format!(
            "shell {l}: {} (CCDF slope {})",
            lr.map_or("no test".into(), |lr| format!("{:?} z={:.1}", lr.verdict, lr.normalized)),
            show(fit.ccdf.map(|f| f.exponent))
        ));
    }
    let theory = gf::gf_from_degree_dist(&DegreeDistribution::regular(3)).expect("gf");
    let infinite = matches!(gf::delta_exponent(&theory), Ok(Delta::Infinite));
    let no_mu = matches!(gf::mu_exponent(&theory), Ok(Mu::NoFractalBoundary));
    passed &= infinite && no_mu;
    parts.push(format!("delta infinite: {infinite}, no mu: {no_mu}"));
    outcome(passed, parts.join(", "))
}

fn c13() -> Outcome {
    let er = gf::theoretical_cluster_exponents(ModelTag::ErdosRenyi).expect("er");
    let sf = gf::theoretical_cluster_exponents(ModelTag::ScaleFree { lambda: 3.5 }).expect("sf");
    let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let passed = close(er.tau, 2.5)
        && close(er.sigma, 0.5)
        && close(er.theta, 3.0)
        && close(sf.tau, 4.0 / 1.5)
        && close(sf.sigma, 0.5 / 1.5)
        && close(sf.theta, 3.0);
    outcome(
        passed,
        format!(
            "ER ({}, {}, {}); lambda 3.5 ({:.4}, {:.4}, {})",
            er.tau, er.sigma, er.theta, sf.tau, sf.sigma, sf.theta
        ),
    )
}

fn c14(study: &ShellStudy) -> Outcome {
    let d = study.mean_distance();
    let target = (N as f64).ln() / K.ln();
    let mut passed = (d - target).abs() <= 0.5;
    let mut detail = format!("d = {d:.3}, ln N / ln k = {target:.3}; want within 0.5");
    if std::env::var("NETBOUNDARY_LONG").is_ok_and(|v| v == "1") {
        let big = Prepared::generate(&NetworkModel::Er { n: 1_000_000, mean_degree: K }, SEED).expect("generate");
        let d6 = mean_distance(&big.giant, DEFAULT_PAIR_SAMPLES, SEED).expect("distance").mean;
        passed &= (d6 - 7.9).abs() <= 0.3;
        detail.push_str(&format!("; N = 1e6: d = {d6:.3}, want 7.9 +- 0.3"));
    }
    outcome(passed, detail)
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome, f64)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        println!(
            "{} C{id:<2} {name}: {} [{secs:.1}s]",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o, secs));
    };

    let er_study = study_model(&er(), 1, ORIGINS, DEFAULT_PAIR_SAMPLES, SEED).expect("ER study");
    let sf_study = study_model(&sf(), 1, ORIGINS, DEFAULT_PAIR_SAMPLES, SEED).expect("SF study");
    let small = small_shell_samples();

    run(1, "ER boundary CCDF slope", &mut || c1(&er_study));
    run(2, "SF boundary CCDF slope", &mut || c2(&sf_study));
    run(3, "boundary pdf slope", &mut || c3(&er_study));
    run(4, "interior shells exponential", &mut || c4(&er_study));
    run(5, "cluster exponent theta", &mut c5);
    run(6, "fractal dimension phi", &mut c6);
    run(7, "shell recursion", &mut c7);
    run(8, "collapse", &mut c8);
    run(9, "per-shell branching", &mut || c9(&er_study, &sf_study));
    run(10, "small-B exponent mu", &mut || c10(&small));
    run(11, "generating-function oracles", &mut || c11(&small));
    run(12, "3-regular negative control", &mut c12);
    run(13, "theoretical exponents", &mut c13);
    run(14, "mean distance", &mut || c14(&er_study));

    let failed: Vec<String> = results.iter().filter(|r| !r.2.passed).map(|r| format!("C{}", r.0)).collect();
    println!(
        "acceptance: {}/{} passed in {:.0}s{}",
        results.len() - failed.len(),
        results.len(),
        start.elapsed().as_secs_f64(),
        if failed.is_empty() { String::new() } else { format!("; failing: {}", failed.join(" ")) }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
