use netboundary::seeded_rng;
use netboundary::stats::{
    bin_points, collapse_metric, empirical_ccdf, fit_discrete_power_law, fit_fractal_dimension, fit_loglog,
    log_binned_pdf, power_law_vs_exponential, LrVerdict,
};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, Geometric, Normal};

/// Inverse-transform sampler for `p(x) ∝ x^-alpha` on `[x_min, x_max]`.
struct DiscretePowerLaw {
    x_min: usize,
    cdf: Vec<f64>,
}

impl DiscretePowerLaw {
    fn new(alpha: f64, x_min: usize, x_max: usize) -> Self {
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (x_min..=x_max)
            .map(|x| {
                acc += (x as f64).powf(-alpha);
                acc
            })
            .collect();
        for c in &mut cdf {
            *c /= acc;
        }
        DiscretePowerLaw { x_min, cdf }
    }

    fn samples(&self, count: usize, seed: u64) -> Vec<usize> {
        let mut rng = seeded_rng(seed);
        (0..count)
            .map(|_| {
                let u: f64 = rng.random();
                self.x_min + self.cdf.partition_point(|&c| c < u).min(self.cdf.len() - 1)
            })
            .collect()
    }
}

#[test]
fn mle_recovers_planted_exponents() {
    for (i, alpha) in [1.5, 2.0, 2.5, 3.0].into_iter().enumerate() {
        let law = DiscretePowerLaw::new(alpha, 5, 100_000);
        let s = law.samples(50_000, 100 + i as u64);
        let fit = fit_discrete_power_law(&s, 5, Some(100_000)).unwrap();
        assert!(
            (fit.exponent + alpha).abs() <= 3.0 * fit.stderr,
            "alpha {alpha}: {} +- {}",
            fit.exponent,
            fit.stderr
        );
    }
}

#[test]
fn unbounded_mle_ccdf_and_pdf_slopes_for_exponent_two() {
    let law = DiscretePowerLaw::new(2.0, 10, 1_000_000);
    let s = law.samples(100_000, 7);

    let mle = fit_discrete_power_law(&s, 10, None).unwrap();
    assert!((mle.exponent + 2.0).abs() <= 0.05, "{mle:?}");

    let ccdf: Vec<(f64, f64)> = empirical_ccdf(&s)
        .unwrap()
        .into_iter()
        .map(|(x, p)| (x as f64, p))
        .collect();
    let slope = fit_loglog(&ccdf, 10.0, 1000.0).unwrap();
    assert!((slope.exponent + 1.0).abs() <= 0.05, "{slope:?}");

    let pdf = bin_points(&log_binned_pdf(&s, 10));
    let slope = fit_loglog(&pdf, 10.0, 1000.0).unwrap();
    assert!((slope.exponent + 2.0).abs() <= 0.1, "{slope:?}");
}

#[test]
fn geometric_samples_prefer_the_exponential() {
    let geo = Geometric::new(0.1).unwrap();
    let mut rng = seeded_rng(3);
    let s: Vec<usize> = (0..20_000).map(|_| 1 + geo.sample(&mut rng) as usize).collect();
    let lr = power_law_vs_exponential(&s, 1).unwrap();
    assert_eq!(lr.verdict, LrVerdict::Exponential, "{lr:?}");
    assert!(lr.power_law_rejected());

    let law = DiscretePowerLaw::new(2.0, 1, 100_000);
    let lr = power_law_vs_exponential(&law.samples(20_000, 4), 1).unwrap();
    assert_eq!(lr.verdict, LrVerdict::PowerLaw, "{lr:?}");
}

#[test]
fn uniform_samples_give_flat_density() {
    let mut rng = seeded_rng(5);
    let s: Vec<usize> = (0..200_000).map(|_| rng.random_range(1..=9)).collect();
    for bin in log_binned_pdf(&s, 4) {
        assert!((bin.density - 1.0 / 9.0).abs() < 0.01, "{bin:?}");
    }
}

#[test]
fn fractal_dimension_with_multiplicative_noise() {
    let mut rng = seeded_rng(6);
    let noise = Normal::new(0.0, 0.1).unwrap();
    let pairs: Vec<(f64, f64)> = (0..2000)
        .map(|_| {
            let d: f64 = rng.random_range(2.0..50.0);
            (d * d * (1.0 + noise.sample(&mut rng)), d)
        })
        .collect();
    let fit = fit_fractal_dimension(&pairs, 0.0, f64::INFINITY).unwrap();
    assert!((fit.exponent - 2.0).abs() <= 0.1, "{fit:?}");
}

proptest! {
    #[test]
    fn ccdf_is_non_increasing_and_ends_at_zero(s in prop::collection::vec(1usize..1000, 1..300)) {
        let c = empirical_ccdf(&s).unwrap();
        prop_assert!(c.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 <= w[0].1));
        prop_assert_eq!(c.last().unwrap().1, 0.0);
        let first = c[0];
        let below = s.iter().filter(|&&x| x > first.0).count() as f64 / s.len() as f64;
        prop_assert!((first.1 - below).abs() < 1e-12);
    }

    #[test]
    fn log_bins_integrate_to_one(s in prop::collection::vec(1usize..100_000, 1..300), bpd in 1usize..20) {
        let total: f64 = log_binned_pdf(&s, bpd).iter().map(|b| b.density * b.width() as f64).sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collapse_of_shifted_copies(
        ys in prop::collection::vec(-5.0f64..5.0, 2..30),
        c in 0.0f64..3.0,
    ) {
        let a: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect();
        let b: Vec<(f64, f64)> = a.iter().map(|&(x, y)| (x, y + c)).collect();
        prop_assert!(collapse_metric(&[a.clone(), a.clone()]).unwrap().abs() < 1e-12);
        prop_assert!((collapse_metric(&[a, b]).unwrap() - c).abs() < 1e-9);
    }
}
