//! Law of `M3`, the maximum of a standard Brownian excursion (equivalently
//! the range of a standard Brownian bridge).
//!
//! ```text
//! F3(y) = 1 - 2 Σ_{n≥1} (4n²y² - 1) exp(-2n²y²)
//! f3(y) = 8 Σ_{n≥1} n² y (4n²y² - 3) exp(-2n²y²)
//! ```
//!
//! Both series cancel badly as `y → 0`, so values below `small_y_cutoff`
//! are clamped to zero. The true `F3(0.2)` is below `1e-50`.

use rand::Rng;

use crate::double_double::{DoubleDouble, DD_EPSILON};
use crate::error::{domain, Error, Result};
use crate::special_fns::{KahanSum, SeriesControl};

/// Largest value of the raw series allowed at the clamp point.
const CUTOFF_CEILING: f64 = 1e-15;

/// Below this `y` the f64 series is mostly rounding error, so `cdf` sums
/// in double-double instead.
const EXTENDED_BELOW: f64 = 0.5;

/// Double-double rounding noise in the series is near `1e-32`; smaller
/// results are reported as 0 so the distribution function stays monotone.
const EXTENDED_FLOOR: f64 = 1e-28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct M3Law {
    control: SeriesControl,
    small_y_cutoff: f64,
}

impl Default for M3Law {
    fn default() -> Self {
        Self {
            control: SeriesControl::default(),
            small_y_cutoff: 0.2,
        }
    }
}

impl M3Law {
    /// Builds the law, checking that the series is already negligible at
    /// the clamp point.
    pub fn new(control: SeriesControl, small_y_cutoff: f64) -> Result<Self> {
        if !(small_y_cutoff > 0.0) {
            return Err(Error::Config(format!(
                "small_y_cutoff must be positive, got {small_y_cutoff}"
            )));
        }
        let law = Self {
            control,
            small_y_cutoff,
        };
        let at_cutoff = law.raw_cdf_series_extended(small_y_cutoff);
        if at_cutoff.abs() >= CUTOFF_CEILING {
            return Err(Error::Config(format!(
                "F3({small_y_cutoff}) = {at_cutoff:e} is not negligible; lower bound too large"
            )));
        }
        Ok(law)
    }

    pub fn control(&self) -> SeriesControl {
        self.control
    }

    pub fn small_y_cutoff(&self) -> f64 {
        self.small_y_cutoff
    }

    /// Unclamped, compensated evaluation of the distribution series.
    pub fn raw_cdf_series(&self, y: f64) -> f64 {
        let y2 = y * y;
        let mut sum = KahanSum::default();
        sum.add(1.0);
        for n in 1..=self.control.max_terms {
            let nf = n as f64;
            let a = 2.0 * nf * nf * y2;
            let term = 2.0 * (2.0 * a - 1.0) * (-a).exp();
            sum.add(-term);
            if term.abs() < self.control.abs_tol && nf * y >= 2.0 {
                break;
            }
        }
        sum.value()
    }

    /// The raw series in double-double arithmetic. At small `y` the f64
    /// sum is dominated by rounding (about `1e-15` at `y = 0.2`).
    pub fn raw_cdf_series_extended(&self, y: f64) -> f64 {
        let y2 = DoubleDouble::from_f64(y) * y;
        let mut sum = DoubleDouble::ONE;
        for n in 1..=self.control.max_terms {
            let nf = n as f64;
            let a = y2 * (2.0 * nf * nf);
            let term = (a * 2.0 - 1.0) * (-a).exp() * 2.0;
            sum = sum - term;
            if term.hi.abs() < self.control.abs_tol * DD_EPSILON && nf * y >= 2.0 {
                break;
            }
        }
        sum.to_f64()
    }

    /// Distribution function `F3(y)`.
    pub fn cdf(&self, y: f64) -> f64 {
        if !(y > self.small_y_cutoff) {
            return 0.0;
        }
        if y < EXTENDED_BELOW {
            let v = self.raw_cdf_series_extended(y);
            return if v < EXTENDED_FLOOR { 0.0 } else { v };
        }
        self.raw_cdf_series(y).clamp(0.0, 1.0)
    }

    /// Density `f3(y)`.
    pub fn pdf(&self, y: f64) -> f64 {
        if !(y > self.small_y_cutoff) {
            return 0.0;
        }
        let y2 = y * y;
        let mut sum = KahanSum::default();
        for n in 1..=self.control.max_terms {
            let nf = n as f64;
            let a = 2.0 * nf * nf * y2;
            let term = 8.0 * nf * nf * y * (2.0 * a - 3.0) * (-a).exp();
            sum.add(term);
            if term.abs() < self.control.abs_tol && nf * y >= 2.0 {
                break;
            }
        }
        sum.value().max(0.0)
    }

    /// Quantile function: bracketed bisection to width `1e-6`, then guarded
    /// Newton steps until `|F3(y) - p| < 1e-12`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain("p", p, "0 < p < 1"));
        }
        let mut lo = self.small_y_cutoff;
        let mut hi = 1.0f64.max(2.0 * lo);
        while self.cdf(hi) < p {
            lo = hi;
            hi *= 2.0;
            if hi > 1e3 {
                return Err(Error::NonConvergence("M3 quantile bracket"));
            }
        }
        while hi - lo > 1e-6 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut y = 0.5 * (lo + hi);
        for _ in 0..30 {
            let resid = self.cdf(y) - p;
            if resid.abs() < 1e-12 {
                break;
            }
            if resid < 0.0 {
                lo = y;
            } else {
                hi = y;
            }
            let slope = self.pdf(y);
            let step = if slope > 0.0 { y - resid / slope } else { f64::NAN };
            let next = if step > lo && step < hi { step } else { 0.5 * (lo + hi) };
            if next == y {
                break;
            }
            y = next;
        }
        Ok(y)
    }

    /// Exact-inversion draw of `M3`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                return self.quantile(u).expect("u lies in (0, 1)");
            }
        }
    }
}

/// `F3(y)` under the default truncation policy.
pub fn f3_cdf(y: f64) -> f64 {
    M3Law::default().cdf(y)
}

/// `f3(y)` under the default truncation policy.
pub fn f3_pdf(y: f64) -> f64 {
    M3Law::default().pdf(y)
}

pub fn f3_quantile(p: f64) -> Result<f64> {
    M3Law::default().quantile(p)
}

pub fn sample_m3<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    M3Law::default().sample(rng)
}
