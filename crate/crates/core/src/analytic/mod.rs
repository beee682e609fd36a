//! The Bessel-product route: `ν(x, ∞)`, `G(t) = exp(-ν(t, ∞))` and the
//! moment integral
//!
//! ```text
//! E(M^r) = 2 / Γ(r/2) ∫_0^∞ t^{r-1} (1 - G(t)) dt.
//! ```
//!
//! `ν` has two evaluations that must agree: the Bessel series
//! `ν(x) = 4 Σ_n [z K1(z) - K0(z)]`, `z = 2√2 n x`, and direct quadrature of
//! `∫_0^∞ y^{-1} e^{-y} (1 - F3(x/√y)) dy`.

pub mod quadrature;

use std::f64::consts::SQRT_2;

use libm::lgamma;

pub use quadrature::{Integral, QuadratureSpec};

use crate::double_double::{DoubleDouble, DD_SQRT2};
use crate::error::{domain, Result};
use crate::excursion_max::M3Law;
use crate::special_fns::{k0_k1, k0_k1_dd, KahanSum, SeriesControl};

/// Below this argument `ν` is evaluated by quadrature; the Bessel series
/// needs too many terms with mixed signs there.
pub const NU_SERIES_FLOOR: f64 = 0.05;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("x", x, "x > 0"));
    }
    Ok(lgamma(x))
}

/// Home of `G(t)`, `ν(x, ∞)` and the moment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunction {
    pub control: SeriesControl,
    pub quad: QuadratureSpec,
    m3: M3Law,
}

impl Default for GFunction {
    fn default() -> Self {
        Self::new(SeriesControl::default(), QuadratureSpec::default())
    }
}

impl GFunction {
    pub fn new(control: SeriesControl, quad: QuadratureSpec) -> Self {
        Self {
            control,
            quad,
            m3: M3Law::default(),
        }
    }

    /// `A_n(x) = 2√2 n x K1(2√2 n x)`, the Laplace transform of
    /// `t^{-2} e^{-1/t}` at `2n²x²`.
    pub fn a_n(n: usize, x: f64) -> f64 {
        let z = 2.0 * SQRT_2 * n as f64 * x;
        z * k0_k1(z).1
    }

    /// `B_n(x) = 2 K0(2√2 n x)`, the Laplace transform of `t^{-1} e^{-1/t}`
    /// at `2n²x²`.
    pub fn b_n(n: usize, x: f64) -> f64 {
        2.0 * k0_k1(2.0 * SQRT_2 * n as f64 * x).0
    }

    /// `ν(x, ∞)`: Bessel series for `x ≥ 0.05`, quadrature below.
    pub fn nu_tail(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain("x", x, "x > 0"));
        }
        if x < NU_SERIES_FLOOR {
            return self.nu_tail_integral(x);
        }
        Ok(self.nu_tail_series(x))
    }

    /// `2 Σ_n (2 A_n(x) - B_n(x))`, stopped once a term past the sign
    /// change drops below `abs_tol`.
    pub fn nu_tail_series(&self, x: f64) -> f64 {
        let step = 2.0 * SQRT_2 * x;
        let mut sum = KahanSum::default();
        for n in 1..=self.control.max_terms {
            let z = step * n as f64;
            let (k0, k1) = k0_k1(z);
            let term = 4.0 * (z * k1 - k0);
            sum.add(term);
            if z > 1.0 && term.abs() < self.control.abs_tol {
                break;
            }
        }
        sum.value()
    }

    /// Quadrature of `∫_0^∞ y^{-1} e^{-y} (1 - F3(x/√y)) dy` after the
    /// substitution `y = e^s`.
    pub fn nu_tail_integral(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain("x", x, "x > 0"));
        }
        let law = self.m3;
        let integrand = |s: f64| {
            let y = s.exp();
            let arg = x / y.sqrt();
            (-y).exp() * (1.0 - law.cdf(arg))
        };
        // 1 - F3 < 1e-17 once x/√y > 4.6; e^{-y} < 1e-19 once y > 44.
        let lo = 2.0 * (x / 4.6).ln();
        let hi = 44f64.ln();
        // F3 is clamped to 0 below the cutoff: y = (x / cutoff)^2.
        let kink = 2.0 * (x / law.small_y_cutoff()).ln();
        let mut total = 0.0;
        let mut edges = vec![lo];
        if kink > lo && kink < hi {
            edges.push(kink);
        }
        edges.push(hi);
        for w in edges.windows(2) {
            total += self.quad.integrate(integrand, w[0], w[1])?.value;
        }
        Ok(total)
    }

    /// `G(t) = exp(-ν(t, ∞))`.
    pub fn g_eval(&self, t: f64) -> Result<f64> {
        Ok((-self.nu_tail(t)?).exp())
    }

    /// `1 - G(t)` without cancellation in the right tail.
    pub fn one_minus_g(&self, t: f64) -> Result<f64> {
        Ok(-(-self.nu_tail(t)?).exp_m1())
    }

    /// `ν(x, ∞)` in double-double arithmetic. The extra digits absorb the
    /// cancellation that forces the f64 path onto quadrature below `0.05`,
    /// so the series is used whenever it fits in `max_terms`; otherwise the
    /// f64 quadrature value is returned.
    pub fn nu_tail_extended(&self, x: DoubleDouble) -> Result<DoubleDouble> {
        if !(x.hi > 0.0) {
            return Err(domain("x", x.hi, "x > 0"));
        }
        let step = DD_SQRT2 * x * 2.0;
        // Terms are below 1e-33 of the sum well before z = 90.
        if 90.0 / step.hi > self.control.max_terms as f64 {
            return Ok(self.nu_tail_integral(x.hi)?.into());
        }
        let mut sum = DoubleDouble::ZERO;
        for n in 1..=self.control.max_terms {
            let z = step * n as f64;
            let (k0, k1) = k0_k1_dd(z);
            let term = (z * k1 - k0) * 4.0;
            sum = sum + term;
            if z.hi > 1.0 && term.hi.abs() <= 1e-33 * sum.hi.abs() {
                break;
            }
        }
        Ok(sum)
    }

    /// `G(t)` in double-double arithmetic.
    pub fn g_eval_extended(&self, t: DoubleDouble) -> Result<DoubleDouble> {
        Ok((-self.nu_tail_extended(t)?).exp())
    }

    /// `1 - G(t)` in double-double arithmetic.
    pub fn one_minus_g_extended(&self, t: DoubleDouble) -> Result<DoubleDouble> {
        let nu = self.nu_tail_extended(t)?;
        if nu.hi < 1e-9 {
            // ν - ν²/2 + ν³/6 - ν⁴/24 is exact to far below the format's epsilon.
            let nu2 = nu.sqr();
            return Ok(nu - nu2 * 0.5 + nu2 * nu / 6.0 - nu2.sqr() / 24.0);
        }
        Ok(DoubleDouble::ONE - (-nu).exp())
    }

    /// `E(M^r)` by quadrature of the moment identity.
    pub fn moment(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(domain("r", r, "r > 0"));
        }
        // On (0, 1] substitute t = u^{1/r}: t^{r-1} dt = du / r.
        let head = self.quad.integrate(
            |u: f64| {
                if u <= 0.0 {
                    return 1.0;
                }
                self.one_minus_g(u.powf(1.0 / r)).unwrap_or(1.0)
            },
            0.0,
            1.0,
        )?;
        let head = head.value / r;
        // On [1, ∞) the integrand is bounded by t^{r-1} ν(t, ∞).
        let integrand = |t: f64| t.powf(r - 1.0) * self.one_minus_g(t).unwrap_or(0.0);
        let envelope = |t: f64| t.powf(r) * self.nu_tail(t).unwrap_or(0.0);
        let tail = self.quad.integrate_tail(integrand, 1.0, envelope)?;
        let log_factor = std::f64::consts::LN_2 - log_gamma(0.5 * r)?;
        Ok(log_factor.exp() * (head + tail.value))
    }

    /// Rigorous bound `P(M > x) ≤ min_c e^c (1 - G(x√c))`, from
    /// `P(√γ M > y) ≥ P(γ ≥ c) P(M > y/√c)` with `γ` standard exponential.
    pub fn tail_bound(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(domain("x", x, "x > 0"));
        }
        let mut best = 1.0f64;
        for i in 1..=200 {
            let c = 0.05 * i as f64;
            best = best.min(c.exp() * self.one_minus_g(x * c.sqrt())?);
        }
        Ok(best)
    }
}
