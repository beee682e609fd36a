mod common;

use common::trapezoid;
use majorant_gap::analytic::GFunction;
use majorant_gap::double_double::DoubleDouble;
use majorant_gap::laplace_inv::{invert, Extended, InversionConfig, MLaw, DEFAULT_EXTENDED_ORDER};
use majorant_gap::mc_sampler::MSampler;
use majorant_gap::rng::stream;
use majorant_gap::Error;
use proptest::prelude::*;

/// `(x, F_M(x), f_M(x))` from a 60-digit Gaver–Stehfest inversion of order 50.
const REFERENCE: [(f64, f64, f64); 9] = [
    (0.5, 6.30745e-4, 0.0277606),
    (0.6, 0.01529287, 0.3457698),
    (0.7, 0.08373296, 1.0513317),
    (0.8, 0.2206439, 1.6228417),
    (1.0, 0.560961512571, 1.559397621),
    (1.2, 0.806054783851, 0.887496174),
    (1.5, 0.959711184, 0.23698341),
    (2.0, 0.998733481, 0.01006388),
    (3.0, 0.9999999407, 7.107e-7),
];

fn extended() -> MLaw {
    MLaw::new(GFunction::default(), InversionConfig::extended(DEFAULT_EXTENDED_ORDER)).unwrap()
}

#[test]
fn known_transform_pairs() {
    let one = |s: DoubleDouble| DoubleDouble::ONE / s;
    let shifted = |s: DoubleDouble| DoubleDouble::ONE / (s + 1.0);
    let ramp = |s: DoubleDouble| DoubleDouble::ONE / s.sqr();
    let cases = [
        (InversionConfig::machine(14), 1e-4),
        (InversionConfig::extended(DEFAULT_EXTENDED_ORDER), 1e-7),
    ];
    for (cfg, tol) in cases {
        assert!((invert(&Extended(one), 0.7, &cfg).unwrap() - 1.0).abs() < tol);
        assert!((invert(&Extended(shifted), 1.0, &cfg).unwrap() - (-1f64).exp()).abs() < tol);
        assert!((invert(&Extended(ramp), 2.5, &cfg).unwrap() - 2.5).abs() < tol);
    }
}

#[test]
fn matches_high_precision_reference() {
    let law = extended();
    for (x, f, p) in REFERENCE {
        let c = law.cdf(x).unwrap();
        let d = law.pdf(x).unwrap();
        assert!((c - f).abs() < 2e-6, "cdf({x}) = {c}");
        assert!((d - p).abs() < 2e-4, "pdf({x}) = {d}");
    }
}

#[test]
fn machine_order_is_a_few_digits() {
    let law = MLaw::default();
    for (x, f, _) in REFERENCE {
        assert!((law.cdf(x).unwrap() - f).abs() < 2e-3, "x = {x}");
    }
}

#[test]
fn tails() {
    let law = extended();
    assert!(law.cdf(6.0).unwrap() >= 1.0 - 1e-9);
    assert!(law.pdf(6.0).unwrap() < 1e-6);
    assert!(law.cdf(0.3).unwrap() < 1e-9);
    assert!(law.cdf(0.0).is_err());
    assert!(law.pdf(-1.0).is_err());
}

#[test]
fn survival_integrates_to_mean() {
    let law = extended();
    let survival = |x: f64| 1.0 - law.cdf(x).unwrap();
    let mean = 0.2 + trapezoid(&survival, 0.2, 6.0, 580);
    let exact = law.g.moment(1.0).unwrap();
    assert!((mean - exact).abs() < 2e-3, "{mean} vs {exact}");
}

#[test]
fn density_is_derivative_and_normalized() {
    let law = extended();
    let h = 1e-3;
    let fd = (law.cdf(1.2 + h).unwrap() - law.cdf(1.2 - h).unwrap()) / (2.0 * h);
    assert!((fd - law.pdf(1.2).unwrap()).abs() < 1e-3);
    let total = trapezoid(&|x: f64| law.pdf(x).unwrap(), 0.2, 5.0, 480);
    assert!((total - 1.0).abs() < 5e-3, "{total}");
}

#[test]
fn monotone_on_grid() {
    let law = extended();
    let values: Vec<f64> = (0..=94).map(|i| law.cdf(0.3 + 0.05 * i as f64).unwrap()).collect();
    assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-7));
}

#[test]
fn quantiles() {
    let law = extended();
    let ps = [0.1, 0.5, 0.9, 0.99];
    let qs: Vec<f64> = ps.iter().map(|&p| law.quantile(p).unwrap()).collect();
    assert!(qs.windows(2).all(|w| w[0] < w[1]));
    for (p, q) in ps.iter().zip(&qs) {
        assert!((law.cdf(*q).unwrap() - p).abs() < 1e-4);
    }
    for p in [0.0, 1.0, f64::NAN] {
        assert!(law.quantile(p).is_err());
    }
    let sampler = MSampler::default();
    let mut rng = stream(40, 0);
    let mut xs: Vec<f64> = (0..20_000).map(|_| sampler.sample_m(&mut rng)).collect();
    xs.sort_by(f64::total_cmp);
    let median = 0.5 * (xs[9_999] + xs[10_000]);
    assert!((median - qs[1]).abs() < 0.01, "{median} vs {}", qs[1]);
}

#[test]
fn tabulated_cdf_tracks_direct_evaluation() {
    let law = extended();
    let table = law.tabulate_cdf(0.2, 4.2, 0.01).unwrap();
    for x in [0.55, 0.987, 1.333, 2.5] {
        assert!((table.eval(x) - law.cdf(x).unwrap()).abs() < 1e-4);
    }
    assert_eq!(table.eval(0.01), table.eval(0.2));
    assert_eq!(table.eval(10.0), table.eval(4.2));
}

#[test]
fn order_limits() {
    assert!(InversionConfig::machine(18).validate().is_ok());
    assert!(matches!(InversionConfig::machine(20).validate(), Err(Error::Overflow { .. })));
    assert!(matches!(InversionConfig::machine(13).validate(), Err(Error::Config(_))));
    assert!(matches!(InversionConfig::extended(0).validate(), Err(Error::Config(_))));
    assert!(InversionConfig::extended(40).validate().is_ok());
    assert!(matches!(InversionConfig::euler().validate(), Err(Error::Unsupported(_))));
    let plain = |s: f64| 1.0 / s;
    assert!(matches!(
        invert(&plain, 1.0, &InversionConfig::extended(DEFAULT_EXTENDED_ORDER)),
        Err(Error::Unsupported(_))
    ));
    assert!(invert(&plain, 0.0, &InversionConfig::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cdf_in_unit_interval(x in 0.05f64..8.0) {
        let law = extended();
        let c = law.cdf(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(law.pdf(x).unwrap() >= 0.0);
    }
}
