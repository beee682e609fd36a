//! Numerical inverse Laplace transforms and the analytic law of `M`:
//!
//! ```text
//! F_M(x) = L^{-1}[G(√s) / s](1/x²)
//! f_M(x) = (2/x³) L^{-1}[1 - G(√s)](1/x²)
//! ```
//!
//! Gaver–Stehfest evaluates `f(t) ≈ (ln 2 / t) Σ_k V_k F(k ln 2 / t)` with
//! alternating weights whose magnitude grows about 21-fold per order step.
//! In f64 that caps the usable order at 18. The extended mode evaluates the
//! weights, the transform and the sum in double-double arithmetic, which
//! supports orders into the 40s.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::analytic::GFunction;
use crate::double_double::{DoubleDouble, DD_EPSILON, DD_LN2};
use crate::error::{domain, Error, Result};
use crate::special_fns::KahanSum;

/// Largest order with a weight table.
pub const MAX_ORDER: usize = 64;

/// Orders whose largest weight times the unit roundoff exceeds this are
/// rejected. In f64 the boundary falls between orders 18 and 20.
const SIGNIFICANCE_FLOOR: f64 = 1e-4;

/// Default order for [`WorkPrecision::ExtendedDouble`].
pub const DEFAULT_EXTENDED_ORDER: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    GaverStehfest,
    /// Needs the transform at complex arguments; declared but unsupported.
    EulerSummation { m: usize, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkPrecision {
    Machine,
    ExtendedDouble,
}

impl WorkPrecision {
    fn unit_roundoff(self) -> f64 {
        match self {
            WorkPrecision::Machine => f64::EPSILON / 2.0,
            WorkPrecision::ExtendedDouble => DD_EPSILON,
        }
    }

    fn name(self) -> &'static str {
        match self {
            WorkPrecision::Machine => "machine",
            WorkPrecision::ExtendedDouble => "extended-double",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InversionConfig {
    pub algorithm: Algorithm,
    /// Number of Gaver–Stehfest terms; even.
    pub order: usize,
    pub work_precision: WorkPrecision,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self::machine(14)
    }
}

impl InversionConfig {
    pub fn machine(order: usize) -> Self {
        Self {
            algorithm: Algorithm::GaverStehfest,
            order,
            work_precision: WorkPrecision::Machine,
        }
    }

    pub fn extended(order: usize) -> Self {
        Self {
            algorithm: Algorithm::GaverStehfest,
            order,
            work_precision: WorkPrecision::ExtendedDouble,
        }
    }

    pub fn euler() -> Self {
        Self {
            algorithm: Algorithm::EulerSummation { m: 11, n: 38 },
            order: 14,
            work_precision: WorkPrecision::Machine,
        }
    }

    /// Checks the configuration and returns the weights it will use.
    pub fn validate(&self) -> Result<&'static [DoubleDouble]> {
        if let Algorithm::EulerSummation { .. } = self.algorithm {
            return Err(Error::Unsupported(
                "Euler summation needs K0/K1 at complex arguments",
            ));
        }
        if self.order < 2 || self.order % 2 == 1 {
            return Err(Error::Config(format!(
                "Gaver-Stehfest order must be even and at least 2, got {}",
                self.order
            )));
        }
        let overflow = Error::Overflow {
            order: self.order,
            precision: self.work_precision.name(),
        };
        if self.order > MAX_ORDER {
            return Err(overflow);
        }
        let weights = stehfest_weights(self.order);
        let largest = weights.iter().map(|v| v.hi.abs()).fold(0.0, f64::max);
        if largest * self.work_precision.unit_roundoff() > SIGNIFICANCE_FLOOR {
            return Err(overflow);
        }
        Ok(weights)
    }
}

fn factorials() -> &'static [DoubleDouble] {
    static TABLE: OnceLock<Vec<DoubleDouble>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = vec![DoubleDouble::ONE];
        for i in 1..=MAX_ORDER {
            let next = out[i - 1] * i as f64;
            out.push(next);
        }
        out
    })
}

/// Gaver–Stehfest weights `V_1 … V_N` in double-double precision, computed
/// once per order. Every term of the inner sum has the same sign, so the
/// table is accurate to the format's precision.
pub fn stehfest_weights(order: usize) -> &'static [DoubleDouble] {
    assert!(order >= 2 && order.is_multiple_of(2) && order <= MAX_ORDER);
    static CACHE: [OnceLock<Vec<DoubleDouble>>; MAX_ORDER / 2] =
        [const { OnceLock::new() }; MAX_ORDER / 2];
    CACHE[order / 2 - 1].get_or_init(|| {
        let f = factorials();
        let half = order / 2;
        (1..=order)
            .map(|k| {
                let mut sum = DoubleDouble::ZERO;
                for j in k.div_ceil(2)..=k.min(half) {
                    let num = DoubleDouble::from_f64(j as f64).powi(half as u32) * f[2 * j];
                    let den = f[half - j] * f[j] * f[j - 1] * f[k - j] * f[2 * j - k];
                    sum = sum + num / den;
                }
                if (k + half) % 2 == 1 {
                    -sum
                } else {
                    sum
                }
            })
            .collect()
    })
}

/// A Laplace transform evaluable on the positive real axis.
pub trait Transform {
    fn eval(&self, s: f64) -> f64;

    /// Double-double evaluation, when the transform supports it.
    fn eval_extended(&self, _s: DoubleDouble) -> Option<DoubleDouble> {
        None
    }
}

impl<F: Fn(f64) -> f64> Transform for F {
    fn eval(&self, s: f64) -> f64 {
        self(s)
    }
}

/// Wraps a double-double closure so it serves both precisions.
pub struct Extended<F>(pub F);

impl<F: Fn(DoubleDouble) -> DoubleDouble> Transform for Extended<F> {
    fn eval(&self, s: f64) -> f64 {
        (self.0)(s.into()).to_f64()
    }

    fn eval_extended(&self, s: DoubleDouble) -> Option<DoubleDouble> {
        Some((self.0)(s))
    }
}

/// Approximates `L^{-1}[transform](t)`.
pub fn invert<T: Transform + ?Sized>(transform: &T, t: f64, cfg: &InversionConfig) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(domain("t", t, "0 < t < inf"));
    }
    let weights = cfg.validate()?;
    let value = match cfg.work_precision {
        WorkPrecision::Machine => {
            let a = std::f64::consts::LN_2 / t;
            let mut sum = KahanSum::default();
            for (k, v) in weights.iter().enumerate() {
                sum.add(v.to_f64() * transform.eval(a * (k + 1) as f64));
            }
            a * sum.value()
        }
        WorkPrecision::ExtendedDouble => {
            let a = DD_LN2 / t;
            let mut sum = DoubleDouble::ZERO;
            for (k, &v) in weights.iter().enumerate() {
                let f = transform
                    .eval_extended(a * (k + 1) as f64)
                    .ok_or(Error::Unsupported(
                        "transform has no extended-precision evaluation",
                    ))?;
                sum = sum + v * f;
            }
            (a * sum).to_f64()
        }
    };
    if !value.is_finite() {
        return Err(Error::NonConvergence("Laplace inversion (non-finite sum)"));
    }
    Ok(value)
}

/// `s ↦ G(√s) / s`.
struct CdfTransform<'a>(&'a GFunction);

impl Transform for CdfTransform<'_> {
    fn eval(&self, s: f64) -> f64 {
        self.0.g_eval(s.sqrt()).map_or(f64::NAN, |g| g / s)
    }

    fn eval_extended(&self, s: DoubleDouble) -> Option<DoubleDouble> {
        Some(self.0.g_eval_extended(s.sqrt()).ok()? / s)
    }
}

/// `s ↦ 1 - G(√s)`.
struct PdfTransform<'a>(&'a GFunction);

impl Transform for PdfTransform<'_> {
    fn eval(&self, s: f64) -> f64 {
        self.0.one_minus_g(s.sqrt()).unwrap_or(f64::NAN)
    }

    fn eval_extended(&self, s: DoubleDouble) -> Option<DoubleDouble> {
        self.0.one_minus_g_extended(s.sqrt()).ok()
    }
}

/// Analytic distribution function, density and quantiles of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MLaw {
    pub g: GFunction,
    pub cfg: InversionConfig,
}

impl MLaw {
    pub fn new(g: GFunction, cfg: InversionConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { g, cfg })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain("x", x, "x > 0"));
        }
        let v = invert(&CdfTransform(&self.g), 1.0 / (x * x), &self.cfg)?;
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain("x", x, "x > 0"));
        }
        let v = invert(&PdfTransform(&self.g), 1.0 / (x * x), &self.cfg)?;
        Ok((2.0 / (x * x * x) * v).max(0.0))
    }

    /// Root of `cdf(x) = p` by bracketing, bisection and Illinois-modified
    /// secant steps, to `|cdf(x) - p| < 1e-6`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "0 < p < 1"));
        }
        let mut lo = 0.5;
        let mut f_lo = self.cdf(lo)? - p;
        while f_lo >= 0.0 {
            lo *= 0.5;
            if lo < 0.05 {
                return Err(Error::NonConvergence("M quantile lower bracket"));
            }
            f_lo = self.cdf(lo)? - p;
        }
        let mut hi = 1.5;
        let mut f_hi = self.cdf(hi)? - p;
        while f_hi <= 0.0 {
            hi *= 2.0;
            if hi > 64.0 {
                return Err(Error::NonConvergence("M quantile upper bracket"));
            }
            f_hi = self.cdf(hi)? - p;
        }
        while hi - lo > 0.05 {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.cdf(mid)? - p;
            if f_mid.abs() < 1e-6 {
                return Ok(mid);
            }
            if f_mid < 0.0 {
                (lo, f_lo) = (mid, f_mid);
            } else {
                (hi, f_hi) = (mid, f_mid);
            }
        }
        // Illinois: halve the retained end's residual when the same end
        // survives twice, so the secant cannot stall against it.
        let mut side = 0i8;
        for _ in 0..200 {
            let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
            let fx = self.cdf(x)? - p;
            if fx.abs() < 1e-6 {
                return Ok(x);
            }
            if fx < 0.0 {
                (lo, f_lo) = (x, fx);
                if side == -1 {
                    f_hi *= 0.5;
                }
                side = -1;
            } else {
                (hi, f_hi) = (x, fx);
                if side == 1 {
                    f_lo *= 0.5;
                }
                side = 1;
            }
            if hi - lo < 1e-14 {
                break;
            }
        }
        Err(Error::NonConvergence("M quantile"))
    }
}

impl MLaw {
    /// `cdf` on the grid `lo, lo + step, ..` up to `hi`, for repeated
    /// evaluation by linear interpolation.
    pub fn tabulate_cdf(&self, lo: f64, hi: f64, step: f64) -> Result<TabulatedCdf> {
        if !(lo > 0.0 && hi > lo && step > 0.0) {
            return Err(Error::Config(format!(
                "tabulation needs 0 < lo < hi and step > 0, got {lo}, {hi}, {step}"
            )));
        }
        let points = ((hi - lo) / step).ceil() as usize + 1;
        let values = (0..points)
            .into_par_iter()
            .map(|i| self.cdf(lo + i as f64 * step))
            .collect::<Result<Vec<_>>>()?;
        Ok(TabulatedCdf { lo, step, values })
    }
}

/// Piecewise-linear `F_M` on a uniform grid, held at its end values
/// outside the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCdf {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl TabulatedCdf {
    pub fn eval(&self, x: f64) -> f64 {
        let pos = (x - self.lo) / self.step;
        let last = self.values.len() - 1;
        if !(pos > 0.0) {
            return self.values[0];
        }
        if pos >= last as f64 {
            return self.values[last];
        }
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        self.values[i] + frac * (self.values[i + 1] - self.values[i])
    }
}

/// `F_M(x)` with the default `G` evaluation.
pub fn cdf(x: f64, cfg: &InversionConfig) -> Result<f64> {
    MLaw::new(GFunction::default(), *cfg)?.cdf(x)
}

/// `f_M(x)` with the default `G` evaluation.
pub fn pdf(x: f64, cfg: &InversionConfig) -> Result<f64> {
    MLaw::new(GFunction::default(), *cfg)?.pdf(x)
}

pub fn quantile(p: f64, cfg: &InversionConfig) -> Result<f64> {
    MLaw::new(GFunction::default(), *cfg)?.quantile(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_cdf_interpolates() {
        let law = MLaw::default();
        let table = law.tabulate_cdf(0.5, 1.5, 0.01).unwrap();
        for x in [0.73, 1.005, 1.333] {
            assert!((table.eval(x) - law.cdf(x).unwrap()).abs() < 1e-4);
        }
        assert_eq!(table.eval(0.1), law.cdf(0.5).unwrap());
        assert_eq!(table.eval(3.0), law.cdf(1.5).unwrap());
    }

    #[test]
    fn weight_moments() {
        // Σ V_k = 0, and Σ V_k / k = 1 makes the inverse of 1/s exactly 1.
        for order in [2, 8, 14, 32] {
            let w = stehfest_weights(order);
            let s = w.iter().fold(DoubleDouble::ZERO, |acc, &v| acc + v);
            let r = w
                .iter()
                .enumerate()
                .fold(DoubleDouble::ZERO, |acc, (k, &v)| acc + v / (k + 1) as f64);
            let scale = w[order / 2].hi.abs();
            assert!(s.to_f64().abs() < 1e-28 * scale, "{order}");
            assert!((r.to_f64() - 1.0).abs() < 1e-28 * scale, "{order}");
        }
    }

    #[test]
    fn order_two_weights() {
        // N = 2: V_1 = 2, V_2 = -2.
        let w = stehfest_weights(2);
        assert_eq!(w[0].to_f64(), 2.0);
        assert_eq!(w[1].to_f64(), -2.0);
    }

    #[test]
    fn config_limits() {
        assert!(InversionConfig::machine(14).validate().is_ok());
        assert!(InversionConfig::machine(18).validate().is_ok());
        assert!(matches!(
            InversionConfig::machine(20).validate(),
            Err(Error::Overflow { order: 20, .. })
        ));
        assert!(InversionConfig::machine(15).validate().is_err());
        assert!(InversionConfig::extended(40).validate().is_ok());
        assert!(matches!(
            InversionConfig::extended(80).validate(),
            Err(Error::Overflow { .. })
        ));
        assert!(matches!(
            InversionConfig::euler().validate(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn plain_closure_rejected_in_extended_mode() {
        let r = invert(&|s: f64| 1.0 / s, 1.0, &InversionConfig::extended(24));
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn domain_errors() {
        let cfg = InversionConfig::default();
        assert!(invert(&|s: f64| 1.0 / s, 0.0, &cfg).is_err());
        assert!(cdf(0.0, &cfg).is_err());
        assert!(pdf(-1.0, &cfg).is_err());
        assert!(quantile(1.0, &cfg).is_err());
    }
}
