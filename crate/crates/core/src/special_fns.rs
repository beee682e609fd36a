//! Modified Bessel functions of the second kind (orders 0 and 1), standard
//! normal utilities and the truncation policy shared by every series in the
//! crate.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::erfc;

use crate::double_double::{DoubleDouble, DD_EULER_GAMMA, DD_PI};
use crate::error::{domain, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments above this value return exactly zero (`K_0(700) ~ 4.6e-306`).
pub const BESSEL_UNDERFLOW: f64 = 700.0;

/// Power series below this argument, Steed's continued fraction above.
const SERIES_CROSSOVER: f64 = 2.0;

/// Truncation policy for infinite series and products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    /// Stop once a term falls below this magnitude.
    pub abs_tol: f64,
    /// Hard cap on the number of terms.
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_terms: 10_000,
        }
    }
}

impl SeriesControl {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::Config(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

/// `K_0(z)` for `z > 0`. Returns 0 for `z > 700`.
pub fn bessel_k0(z: f64) -> Result<f64> {
    bessel_k0_k1(z).map(|(k0, _)| k0)
}

/// `K_1(z)` for `z > 0`. Returns 0 for `z > 700`.
pub fn bessel_k1(z: f64) -> Result<f64> {
    bessel_k0_k1(z).map(|(_, k1)| k1)
}

/// `(K_0(z), K_1(z))` evaluated together; both routes produce the pair at no
/// extra cost.
pub fn bessel_k0_k1(z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0) {
        return Err(domain("z", z, "z > 0"));
    }
    Ok(k0_k1(z))
}

pub(crate) fn k0_k1(z: f64) -> (f64, f64) {
    debug_assert!(z > 0.0);
    if z > BESSEL_UNDERFLOW {
        (0.0, 0.0)
    } else if z <= SERIES_CROSSOVER {
        k0_k1_series(z)
    } else {
        k0_k1_steed(z)
    }
}

/// Ascending series with the logarithmic term:
///
/// K0 = -(ln(z/2) + γ) I0 + Σ_{k≥1} H_k q^k / (k!)²
/// K1 = 1/z + ln(z/2) I1 - (z/4) Σ_{k≥0} (ψ(k+1) + ψ(k+2)) q^k / (k!(k+1)!)
///
/// with q = z²/4.
fn k0_k1_series(z: f64) -> (f64, f64) {
    let q = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // k = 0 terms.
    let mut c0 = 1.0; // q^k / (k!)^2
    let mut c1 = 1.0; // q^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let mut i0 = 1.0;
    let mut i1_sum = 1.0;
    let mut k0_sum = 0.0;
    let mut k1_sum = -2.0 * EULER_GAMMA + 1.0; // ψ(1) + ψ(2)

    for k in 1..200 {
        let kf = k as f64;
        c0 *= q / (kf * kf);
        c1 *= q / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        let psi_sum = 2.0 * (harmonic - EULER_GAMMA) + 1.0 / (kf + 1.0);

        i0 += c0;
        i1_sum += c1;
        k0_sum += harmonic * c0;
        k1_sum += psi_sum * c1;
        if c0 < 1e-18 * i0 && c1 < 1e-18 * i1_sum {
            break;
        }
    }

    let i1 = 0.5 * z * i1_sum;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / z + log_half * i1 - 0.25 * z * k1_sum;
    (k0, k1)
}

/// Temme's form of Steed's continued fraction for `K_ν` at `ν = 0`.
fn k0_k1_steed(x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-17;
    const MAX_ITER: usize = 10_000;

    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        // c grows and the q's decay; rescale to keep both representable.
        if c.abs() > 1e100 {
            c *= 1e-100;
            q1 *= 1e100;
            q2 *= 1e100;
        }
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// `(K_0(z), K_1(z))` in double-double precision, for the extended
/// inversion path. Same routes as [`bessel_k0_k1`].
pub fn bessel_k0_k1_extended(z: DoubleDouble) -> Result<(DoubleDouble, DoubleDouble)> {
    if !(z.hi > 0.0) {
        return Err(domain("z", z.hi, "z > 0"));
    }
    Ok(k0_k1_dd(z))
}

pub(crate) fn k0_k1_dd(z: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    if z.hi > BESSEL_UNDERFLOW {
        (DoubleDouble::ZERO, DoubleDouble::ZERO)
    } else if z.hi <= SERIES_CROSSOVER {
        k0_k1_series_dd(z)
    } else {
        k0_k1_steed_dd(z)
    }
}

fn k0_k1_series_dd(z: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    type Dd = DoubleDouble;
    let q = z.sqr() * 0.25;
    let log_half = (z * 0.5).ln();

    let mut c0 = Dd::ONE;
    let mut c1 = Dd::ONE;
    let mut harmonic = Dd::ZERO;
    let mut i0 = Dd::ONE;
    let mut i1_sum = Dd::ONE;
    let mut k0_sum = Dd::ZERO;
    let mut k1_sum = Dd::ONE - DD_EULER_GAMMA * 2.0;

    for k in 1..200 {
        let kf = k as f64;
        c0 = c0 * q / (kf * kf);
        c1 = c1 * q / (kf * (kf + 1.0));
        harmonic = harmonic + Dd::ONE / kf;
        let psi_sum = (harmonic - DD_EULER_GAMMA) * 2.0 + Dd::ONE / (kf + 1.0);

        i0 = i0 + c0;
        i1_sum = i1_sum + c1;
        k0_sum = k0_sum + harmonic * c0;
        k1_sum = k1_sum + psi_sum * c1;
        if c0.hi < 1e-34 * i0.hi && c1.hi < 1e-34 * i1_sum.hi {
            break;
        }
    }

    let i1 = z * 0.5 * i1_sum;
    let k0 = k0_sum - (log_half + DD_EULER_GAMMA) * i0;
    let k1 = Dd::ONE / z + log_half * i1 - z * 0.25 * k1_sum;
    (k0, k1)
}

fn k0_k1_steed_dd(x: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    type Dd = DoubleDouble;
    const EPS: f64 = 1e-33;
    const MAX_ITER: usize = 100_000;

    let mut b = (x + 1.0) * 2.0;
    let mut d = Dd::ONE / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = Dd::ZERO;
    let mut q2 = Dd::ONE;
    let a1 = 0.25;
    let mut q = Dd::from_f64(a1);
    let mut c = Dd::from_f64(a1);
    let mut a = -a1;
    let mut s = q * delh + 1.0;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = c * (-a) / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q = q + c * qnew;
        if c.hi.abs() > 1e100 {
            c = c * 1e-100;
            q1 = q1 * 1e100;
            q2 = q2 * 1e100;
        }
        b = b + 2.0;
        d = Dd::ONE / (b + d * a);
        delh = (b * d - 1.0) * delh;
        h = h + delh;
        let dels = q * delh;
        s = s + dels;
        if (dels.hi / s.hi).abs() < EPS {
            break;
        }
    }
    h = h * a1;
    let k0 = (DD_PI / (x * 2.0)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

/// Standard normal distribution function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nonpositive_arguments() {
        assert!(bessel_k0(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k0(f64::NAN).is_err());
    }

    #[test]
    fn underflow_returns_zero() {
        assert!(bessel_k0(700.0).unwrap() < 1e-300);
        assert_eq!(bessel_k0(700.5).unwrap(), 0.0);
        assert_eq!(bessel_k1(1e4).unwrap(), 0.0);
    }

    #[test]
    fn small_argument_law() {
        let z = 1e-6;
        assert!((z * bessel_k1(z).unwrap() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn routes_agree_at_crossover() {
        for &z in &[1.9, 2.0, 2.1, 2.5] {
            let (a0, a1) = k0_k1_series(z);
            let (b0, b1) = k0_k1_steed(z);
            assert!((a0 - b0).abs() < 1e-14, "K0({z}): {a0} vs {b0}");
            assert!((a1 - b1).abs() < 1e-14, "K1({z}): {a1} vs {b1}");
        }
    }

    #[test]
    fn extended_matches_double_precision() {
        for &z in &[1e-6, 0.3, 1.0, 2.0, 2.5, 7.0, 40.0, 300.0] {
            let (a0, a1) = k0_k1(z);
            let (b0, b1) = bessel_k0_k1_extended(DoubleDouble::from_f64(z)).unwrap();
            assert!(((b0.to_f64() - a0) / a0).abs() < 1e-14, "K0({z})");
            assert!(((b1.to_f64() - a1) / a1).abs() < 1e-14, "K1({z})");
        }
    }

    #[test]
    fn extended_routes_agree_at_crossover() {
        for &z in &[1.9, 2.0, 2.2] {
            let z = DoubleDouble::from_f64(z);
            let (a0, a1) = k0_k1_series_dd(z);
            let (b0, b1) = k0_k1_steed_dd(z);
            assert!(((a0 - b0).to_f64() / a0.to_f64()).abs() < 1e-29);
            assert!(((a1 - b1).to_f64() / a1.to_f64()).abs() < 1e-29);
        }
    }

    #[test]
    fn normal_utilities() {
        assert_eq!(std_normal_cdf(0.0), 0.5);
        assert!((std_normal_pdf(0.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-16);
        assert!((std_normal_cdf(-1.7) + std_normal_cdf(1.7) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn series_control_validation() {
        assert!(SeriesControl::new(0.0, 10).is_err());
        assert!(SeriesControl::new(1e-10, 0).is_err());
        assert!(SeriesControl::new(1e-10, 1).is_ok());
    }
}
