mod common;

use common::{mean_and_se, simpson};
use majorant_gap::analytic::GFunction;
use majorant_gap::excursion_max::f3_cdf;
use majorant_gap::mc_sampler::{MSampleConfig, MSampler};
use majorant_gap::rng::stream;
use majorant_gap::stick_breaking::StickSequence;
use proptest::prelude::*;

fn samples(seed: u64) -> Vec<f64> {
    MSampler::new(MSampleConfig { seed, ..MSampleConfig::default() })
        .unwrap()
        .par_sample()
}

#[test]
fn sample_moments_match_analytic() {
    let xs = samples(50);
    assert_eq!(xs.len(), 20_000);
    let g = GFunction::default();
    for r in [1, 2] {
        let powers: Vec<f64> = xs.iter().map(|x| x.powi(r)).collect();
        let (m, se) = mean_and_se(&powers);
        let exact = g.moment(r as f64).unwrap();
        assert!((m - exact).abs() < 3.0 * se, "r = {r}: {m} ± {se} vs {exact}");
    }
}

#[test]
fn cdf_tails() {
    let sampler = MSampler::default();
    let mut rng = stream(51, 0);
    assert!(sampler.mc_cdf(10.0, 1_000, &mut rng).unwrap().mean >= 1.0 - 1e-6);
    assert!(sampler.mc_cdf(0.2, 1_000, &mut rng).unwrap().mean < 1e-6);
    assert!(sampler.mc_pdf(10.0, 1_000, &mut rng).unwrap().mean < 1e-6);
    assert!(sampler.mc_cdf(0.0, 10, &mut rng).is_err());
    assert!(sampler.mc_cdf(1.0, 0, &mut rng).is_err());
}

#[test]
fn conditional_estimator_agrees_with_empirical_cdf() {
    let sampler = MSampler::default();
    let est = sampler.mc_cdf(1.0, 10_000, &mut stream(52, 0)).unwrap();
    let hits: Vec<f64> = samples(53).iter().map(|&m| if m <= 1.0 { 1.0 } else { 0.0 }).collect();
    let (p, se) = mean_and_se(&hits);
    let combined = (est.std_error.powi(2) + se * se).sqrt();
    assert!((est.mean - p).abs() < 3.0 * combined, "{} vs {p}", est.mean);
}

#[test]
fn density_integrates_to_one() {
    let sampler = MSampler::default();
    let xs: Vec<f64> = (0..=76).map(|i| 0.2 + 0.05 * i as f64).collect();
    let est = sampler.mc_pdf_grid(&xs, 10_000, &mut stream(54, 0)).unwrap();
    let ys: Vec<f64> = est.iter().map(|e| e.mean).collect();
    let total: f64 = ys.windows(2).map(|w| 0.025 * (w[0] + w[1])).sum();
    assert!((total - 1.0).abs() < 0.01, "{total}");
}

#[test]
fn density_is_derivative_of_cdf() {
    // Common random numbers make the difference quotient low-variance.
    let sampler = MSampler::default();
    let h = 0.01;
    let xs = [1.0 - h, 1.0, 1.0 + h];
    let c = sampler.mc_cdf_grid(&xs, 5_000, &mut stream(55, 0)).unwrap();
    let d = sampler.mc_pdf_grid(&xs[1..2], 5_000, &mut stream(55, 0)).unwrap()[0];
    let fd = (c[2].mean - c[0].mean) / (2.0 * h);
    assert!((fd - d.mean).abs() < 0.01, "{fd} vs {}", d.mean);
}

#[test]
fn cdf_grid_is_monotone() {
    let sampler = MSampler::default();
    let xs: Vec<f64> = (1..=60).map(|i| 0.05 * i as f64).collect();
    let est = sampler.mc_cdf_grid(&xs, 500, &mut stream(56, 0)).unwrap();
    assert!(est.windows(2).all(|w| w[1].mean >= w[0].mean));
}

#[test]
fn integrands_on_fixed_sticks() {
    let sampler = MSampler::default();
    let sticks = StickSequence { lengths: vec![0.6, 0.4], residual: 0.0 };
    let x = 0.9;
    let expected = f3_cdf(x / 0.6f64.sqrt()) * f3_cdf(x / 0.4f64.sqrt());
    assert!((sampler.cdf_integrand(&sticks, x) - expected).abs() < 1e-15);
    let h = 1e-5;
    let fd = (sampler.cdf_integrand(&sticks, x + h) - sampler.cdf_integrand(&sticks, x - h)) / (2.0 * h);
    assert!((fd - sampler.pdf_integrand(&sticks, x)).abs() < 1e-7);
}

#[test]
fn residual_bracket_is_midpoint() {
    let sampler = MSampler::default();
    let sticks = StickSequence { lengths: vec![0.5], residual: 0.5 };
    let x = 1.1;
    let r = f3_cdf(x / 0.5f64.sqrt());
    let expected = r * 0.5 * (1.0 + r);
    assert!((sampler.cdf_integrand(&sticks, x) - expected).abs() < 1e-15);
}

#[test]
fn deterministic_for_fixed_seed() {
    let a = samples(57);
    let b = samples(57);
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    let sampler = MSampler::default();
    let c1 = sampler.mc_cdf(1.0, 200, &mut stream(58, 0)).unwrap();
    let c2 = sampler.mc_cdf(1.0, 200, &mut stream(58, 0)).unwrap();
    assert_eq!(c1.mean.to_bits(), c2.mean.to_bits());
}

#[test]
fn configuration_is_validated() {
    assert!(MSampleConfig::new(0.0, 6.0, 0, 10).is_err());
    assert!(MSampleConfig::new(1e-12, 3.0, 0, 10).is_err());
    assert!(MSampleConfig::new(1e-12, 6.0, 0, 0).is_err());
    assert!(MSampleConfig::new(1e-12, 6.0, 0, 10).is_ok());
}

#[test]
fn mean_matches_survival_integral_of_sample() {
    // E M = ∫ P(M > x) dx with the empirical survival function.
    let mut xs = samples(59);
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let survival = |x: f64| 1.0 - xs.partition_point(|&m| m <= x) as f64 / n;
    let integral = simpson(&survival, 0.0, 6.0, 1e-6);
    let (mean, _) = mean_and_se(&xs);
    assert!((integral - mean).abs() < 1e-3, "{integral} vs {mean}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn draws_are_positive(seed in any::<u64>()) {
        let m = MSampler::default().sample_m(&mut stream(seed, 0));
        prop_assert!(m > 0.0 && m.is_finite());
    }

    #[test]
    fn integrand_in_unit_interval(seed in any::<u64>(), x in 0.05f64..5.0) {
        let sticks = StickSequence::sample(
            &mut stream(seed, 0),
            majorant_gap::stick_breaking::StopRule::ResidualBelow(1e-12),
        );
        let sampler = MSampler::default();
        let c = sampler.cdf_integrand(&sticks, x);
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(sampler.pdf_integrand(&sticks, x) >= 0.0);
    }
}
