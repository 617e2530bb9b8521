use netboundary::gf::{
    delta_exponent, fixed_point_f_inf, gf_from_degree_dist, iterate_r, mu_exponent, poisson_model, shell_size_pdf,
    FIXED_POINT_TOL,
};
use netboundary::graph::DegreeDistribution;
use proptest::prelude::*;

fn pmf(support: &[(usize, f64)]) -> Vec<f64> {
    let k_max = support.iter().map(|s| s.0).max().unwrap();
    let mut p = vec![0.0; k_max + 1];
    for &(k, w) in support {
        p[k] += w;
    }
    p
}

/// Excess-degree pmf written out directly from `q`.
fn excess(q: &[f64]) -> Vec<f64> {
    let mean: f64 = q.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    (1..q.len()).map(|k| k as f64 * q[k] / mean).collect()
}

fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().enumerate().map(|(k, c)| c * x.powi(k as i32)).sum()
}

/// Smallest root of `G1(f) = f` below 1 by bisection.
fn bisect_f_inf(q: &[f64]) -> f64 {
    let g1 = excess(q);
    let h = |f: f64| eval(&g1, f) - f;
    let (mut lo, mut hi) = (0.0f64, 1.0 - 1e-6);
    assert!(h(lo) >= 0.0 && h(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `P(B_2 = b)` from every combination of first-shell excess degrees.
fn enumerate_b2(q: &[f64]) -> Vec<f64> {
    let g1 = excess(q);
    let k_max = q.len() - 1;
    let mut out = vec![0.0; k_max * k_max + 1];
    fn walk(left: usize, sum: usize, prob: f64, g1: &[f64], out: &mut [f64]) {
        if left == 0 {
            out[sum] += prob;
            return;
        }
        for (j, &p) in g1.iter().enumerate() {
            if p > 0.0 {
                walk(left - 1, sum + j, prob * p, g1, out);
            }
        }
    }
    for (k, &p) in q.iter().enumerate() {
        if p > 0.0 {
            walk(k, 0, p, &g1, &mut out);
        }
    }
    out
}

fn arb_support() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::btree_map(0usize..7, 1u32..100, 1..=4).prop_filter_map("needs edges", |m| {
        let total: u32 = m.values().sum();
        let support: Vec<(usize, f64)> = m.iter().map(|(&k, &w)| (k, w as f64 / total as f64)).collect();
        let p = pmf(&support);
        let mean: f64 = p.iter().enumerate().map(|(k, q)| k as f64 * q).sum();
        (mean > 0.0).then_some(p)
    })
}

#[test]
fn poisson_six_reference_values() {
    let m = poisson_model(6.0).unwrap();
    let f = {
        let (mut lo, mut hi) = (0.0f64, 0.5f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (6.0 * (mid - 1.0)).exp() > mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    assert!((m.f_inf() - f).abs() < 1e-12);
    assert!((m.f_inf() - 0.002516462266234263).abs() < 1e-12);
    assert!((m.r_inf() - f).abs() < 1e-12);
    let delta = delta_exponent(&m).unwrap().finite().unwrap();
    assert!((delta - (-(6.0 * f).ln() / 6f64.ln())).abs() < 1e-9);
    assert!((delta - 2.340237).abs() < 1e-6);
    let mu = mu_exponent(&m).unwrap().finite().unwrap();
    assert!((mu - (delta - 1.0)).abs() < 1e-12);
}

#[test]
fn truncated_poisson_has_equal_g0_and_g1() {
    let m = gf_from_degree_dist(&DegreeDistribution::poisson(6.0, 60).unwrap()).unwrap();
    assert!(m.g0_g1_max_gap() < 1e-10);
}

#[test]
fn poisson_recursion_matches_closed_form_each_step() {
    let m = poisson_model(6.0).unwrap();
    for start in [0.9, 0.5, 0.1, 0.01] {
        let r = iterate_r(&m, start, 8).unwrap();
        for w in r.windows(2) {
            assert!((w[1] - (6.0 * (w[0] - 1.0)).exp()).abs() < 1e-12, "{w:?}");
        }
    }
}

#[test]
fn recursion_converges_to_non_giant_fraction() {
    for support in [vec![(1, 0.5), (3, 0.5)], vec![(0, 0.1), (2, 0.4), (4, 0.5)]] {
        let m = gf_from_degree_dist(&DegreeDistribution::from_pmf(pmf(&support)).unwrap()).unwrap();
        let r = iterate_r(&m, 0.999, 400).unwrap();
        assert!((r.last().unwrap() - m.r_inf()).abs() < 1e-9, "{support:?}");
        assert!(r.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }
}

proptest! {
    #[test]
    fn g1_coefficients_follow_the_excess_transform(q in arb_support()) {
        let m = gf_from_degree_dist(&DegreeDistribution::from_pmf(q.clone()).unwrap()).unwrap();
        let want = excess(&q);
        let got = m.g1_coeffs();
        for j in 0..want.len().max(got.len()) {
            let a = got.get(j).copied().unwrap_or(0.0);
            let b = want.get(j).copied().unwrap_or(0.0);
            prop_assert!((a - b).abs() < 1e-15, "j={} {} vs {}", j, a, b);
        }
    }

    #[test]
    fn second_shell_pdf_matches_enumeration(q in arb_support()) {
        let m = gf_from_degree_dist(&DegreeDistribution::from_pmf(q.clone()).unwrap()).unwrap();
        let oracle = enumerate_b2(&q);
        let pdf = shell_size_pdf(&m, 2, oracle.len() - 1).unwrap();
        // different summation order, so agreement to a few ulps
        for (b, (a, o)) in pdf.probs.iter().zip(&oracle).enumerate() {
            prop_assert!((a - o).abs() < 1e-14, "b={} {} vs {}", b, a, o);
        }
        prop_assert!(pdf.deficit < 1e-12);
        let first = shell_size_pdf(&m, 1, q.len() - 1).unwrap();
        prop_assert_eq!(&first.probs[..], &q[..]);
    }

    #[test]
    fn fixed_point_matches_bisection(q in arb_support()) {
        let dd = DegreeDistribution::from_pmf(q.clone()).unwrap();
        let m = gf_from_degree_dist(&dd).unwrap();
        prop_assume!(m.ktilde() > 1.5);
        let fp = fixed_point_f_inf(&m, FIXED_POINT_TOL).unwrap();
        prop_assert!(!fp.subcritical);
        prop_assert!((fp.value - bisect_f_inf(&q)).abs() < 1e-9);
        prop_assert!((m.r_inf() - eval(&q, fp.value)).abs() < 1e-9);
    }
}
