mod common;

use std::f64::consts::PI;

use common::{half_line, mean_and_se};
use majorant_gap::identities::{
    monte_carlo_estimates, positive_part_product_mean, quadrant_prob, scaled_positive_part_mean,
    scaled_positive_part_mean_via_correlation, BivariateNormalCorr,
};
use majorant_gap::path_lab::straddle::{straddle_density_motion, straddle_density_motion_via_expectation};
use majorant_gap::rng::stream;
use majorant_gap::special_fns::{std_normal_cdf, std_normal_pdf};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

/// `E(m + σW)₊` for standard normal `W`.
fn normal_positive_part(m: f64, sigma: f64) -> f64 {
    m * std_normal_cdf(m / sigma) + sigma * std_normal_pdf(m / sigma)
}

/// `E(X₊Y₊) = ∫_0^∞ x φ(x) E(ρx + √(1-ρ²)W)₊ dx`.
fn product_oracle(rho: f64) -> f64 {
    let c = (1.0 - rho * rho).sqrt();
    half_line(&|x: f64| x * std_normal_pdf(x) * normal_positive_part(rho * x, c), 0.0, 1e-15)
}

/// `E[Z₊(W/a - Z/b)₊] = ∫_0^∞ z φ(z) E(-z/b + W/a)₊ dz`.
fn scaled_oracle(a: f64, b: f64) -> f64 {
    half_line(&|z: f64| z * std_normal_pdf(z) * normal_positive_part(-z / b, 1.0 / a), 0.0, 1e-15)
}

#[test]
fn quadrant_matches_sheppard() {
    for rho in [-0.99f64, -0.5, -0.01, 0.0, 0.3, 0.9] {
        let sheppard = 0.25 + rho.asin() / (2.0 * PI);
        assert!((quadrant_prob(rho).unwrap() - sheppard).abs() < 1e-14, "rho = {rho}");
    }
}

#[test]
fn reflected_form_agrees() {
    for rho in [-0.99, -0.7, -0.3, -0.01] {
        let pair = BivariateNormalCorr::new(rho).unwrap();
        let d = (pair.quadrant_prob() - pair.quadrant_prob_reflected().unwrap()).abs();
        assert!(d < 1e-14, "rho = {rho}: {d:e}");
    }
    assert!(BivariateNormalCorr::new(0.4).unwrap().quadrant_prob_reflected().is_none());
}

#[test]
fn product_mean_matches_quadrature() {
    for rho in [-0.9, -0.5, 0.0, 0.5, 0.9] {
        let v = positive_part_product_mean(rho).unwrap();
        assert!((v - product_oracle(rho)).abs() < 1e-10, "rho = {rho}");
    }
}

#[test]
fn scaled_mean_two_routes_and_quadrature() {
    for (a, b) in [(1.0, 1.0), (0.6, 1.1), (2.0, 0.3), (0.05, 3.0)] {
        let direct = scaled_positive_part_mean(a, b).unwrap();
        let via = scaled_positive_part_mean_via_correlation(a, b).unwrap();
        assert!((direct - via).abs() < 1e-8 * direct.max(1.0));
        assert!((direct - scaled_oracle(a, b)).abs() < 1e-10, "({a}, {b})");
    }
}

#[test]
fn straddle_density_through_scaled_mean() {
    for v1 in [0.1, 0.4, 0.8] {
        for v2 in [1.2, 2.0, 7.5] {
            let direct = straddle_density_motion(v1, v2, 1.0);
            let via = straddle_density_motion_via_expectation(v1, v2, 1.0).unwrap();
            assert!((direct - via).abs() < 1e-10, "({v1}, {v2})");
        }
    }
}

#[test]
fn monte_carlo_at_negative_correlation() {
    let est = monte_carlo_estimates(-0.5, 1.0, 1.0, 1_000_000, 70).unwrap();
    let checks = [
        (est.quadrant, quadrant_prob(-0.5).unwrap()),
        (est.product, positive_part_product_mean(-0.5).unwrap()),
        (est.scaled, scaled_positive_part_mean(1.0, 1.0).unwrap()),
    ];
    for (e, exact) in checks {
        assert!((e.mean - exact).abs() < 3.0 * e.std_error, "{} ± {} vs {exact}", e.mean, e.std_error);
    }
}

#[test]
fn independent_monte_carlo() {
    // Y built as a different linear combination from the crate's sampler.
    let rho: f64 = -0.5;
    let (cp, cm) = (((1.0 + rho) / 2.0).sqrt(), ((1.0 - rho) / 2.0).sqrt());
    let mut rng = stream(71, 0);
    let (hits, prods): (Vec<f64>, Vec<f64>) = (0..1_000_000)
        .map(|_| {
            let u: f64 = rng.sample(StandardNormal);
            let v: f64 = rng.sample(StandardNormal);
            let (x, y) = (cp * u + cm * v, cp * u - cm * v);
            (if x > 0.0 && y > 0.0 { 1.0 } else { 0.0 }, x.max(0.0) * y.max(0.0))
        })
        .unzip();
    let (p, se) = mean_and_se(&hits);
    assert!((p - quadrant_prob(rho).unwrap()).abs() < 3.0 * se);
    let (m, se) = mean_and_se(&prods);
    assert!((m - positive_part_product_mean(rho).unwrap()).abs() < 3.0 * se);
}

#[test]
fn limits_and_domain() {
    let near_one = quadrant_prob(0.9999).unwrap();
    assert!(near_one > 0.49 && near_one < 0.5);
    let near_one = positive_part_product_mean(0.9999).unwrap();
    assert!(near_one > 0.49 && near_one < 0.5);
    assert!(quadrant_prob(-0.9999).unwrap() < 1e-2);
    assert!(positive_part_product_mean(-0.9999).unwrap() < 1e-5);
    assert!((positive_part_product_mean(0.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-16);
    for rho in [1.0, -1.0, f64::NAN] {
        assert!(quadrant_prob(rho).is_err());
    }
    assert!(scaled_positive_part_mean(0.0, 1.0).is_err());
    assert!(scaled_positive_part_mean(1.0, -1.0).is_err());
    assert!(monte_carlo_estimates(0.0, 1.0, 1.0, 1, 0).is_err());
}

proptest! {
    #[test]
    fn quadrant_symmetry(rho in -0.999f64..0.999) {
        let s = quadrant_prob(rho).unwrap() + quadrant_prob(-rho).unwrap();
        prop_assert!((s - 0.5).abs() < 1e-14);
    }

    #[test]
    fn reflection_everywhere(rho in -0.9999f64..-1e-6) {
        let pair = BivariateNormalCorr::new(rho).unwrap();
        prop_assert!((pair.quadrant_prob() - pair.quadrant_prob_reflected().unwrap()).abs() < 1e-14);
    }

    #[test]
    fn product_mean_increasing(rho in -0.99f64..0.98, d in 0.001f64..0.01) {
        prop_assert!(positive_part_product_mean(rho + d).unwrap() > positive_part_product_mean(rho).unwrap());
    }

    #[test]
    fn scaled_routes_agree(a in 0.01f64..10.0, b in 0.01f64..10.0) {
        let direct = scaled_positive_part_mean(a, b).unwrap();
        let via = scaled_positive_part_mean_via_correlation(a, b).unwrap();
        prop_assert!((direct - via).abs() < 1e-8 * direct.max(1.0));
    }
}
