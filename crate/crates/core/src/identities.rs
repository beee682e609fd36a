//! Positive-part identities for a standard bivariate normal pair `(X, Y)`
//! with correlation `ρ`, and the scaled form that feeds the straddle
//! density of the concave majorant.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{domain, Error, Result};
use crate::rng::{par_replicate, StreamRng, DEFAULT_CHUNK};
use crate::stats::{mean_estimate, MeanEstimate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BivariateNormalCorr {
    rho: f64,
}

impl BivariateNormalCorr {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho.abs() < 1.0) {
            return Err(domain("rho", rho, "|rho| < 1"));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `P(X > 0, Y > 0) = (π/2 + arctan(ρ/√(1-ρ²))) / 2π`.
    pub fn quadrant_prob(&self) -> f64 {
        let r = self.rho;
        (FRAC_PI_2 + (r / (1.0 - r * r).sqrt()).atan()) / (2.0 * PI)
    }

    /// The same probability as `-arctan(√(1-ρ²)/ρ) / 2π`, valid for `ρ < 0`.
    pub fn quadrant_prob_reflected(&self) -> Option<f64> {
        let r = self.rho;
        (r < 0.0).then(|| -((1.0 - r * r).sqrt() / r).atan() / (2.0 * PI))
    }

    /// `E(X₊ Y₊) = √(1-ρ²)/2π + ρ P(X > 0, Y > 0)`.
    pub fn positive_part_product_mean(&self) -> f64 {
        let r = self.rho;
        (1.0 - r * r).sqrt() / (2.0 * PI) + r * self.quadrant_prob()
    }
}

/// `P(X > 0, Y > 0)`. For `ρ < 0` the reflected arctangent form is
/// evaluated as well and must agree.
pub fn quadrant_prob(rho: f64) -> Result<f64> {
    let pair = BivariateNormalCorr::new(rho)?;
    let p = pair.quadrant_prob();
    if let Some(q) = pair.quadrant_prob_reflected() {
        debug_assert!((p - q).abs() < 1e-14, "rho = {rho}: {p} vs {q}");
    }
    Ok(p)
}

pub fn positive_part_product_mean(rho: f64) -> Result<f64> {
    Ok(BivariateNormalCorr::new(rho)?.positive_part_product_mean())
}

/// `E[Z₊ (W/a - Z/b)₊] = (b/a - arctan(b/a)) / 2bπ` for independent
/// standard normals `Z`, `W`.
pub fn scaled_positive_part_mean(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(domain("a", a, "a > 0"));
    }
    if !(b > 0.0) {
        return Err(domain("b", b, "b > 0"));
    }
    Ok(t_minus_arctan(b / a) / (2.0 * b * PI))
}

/// `t - arctan t`, by its Taylor series where the difference cancels.
pub(crate) fn t_minus_arctan(t: f64) -> f64 {
    if t.abs() < 1e-3 {
        let t2 = t * t;
        t * t2 * (1.0 / 3.0 - t2 / 5.0 + t2 * t2 / 7.0)
    } else {
        t - t.atan()
    }
}

/// The same mean through the correlated pair `X = Z`,
/// `Y = (tW - Z)/√(1+t²)`, `t = b/a`, which has `ρ = -1/√(1+t²)`.
pub fn scaled_positive_part_mean_via_correlation(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(domain("b/a", b / a, "a > 0 and b > 0"));
    }
    let t = b / a;
    let norm = (1.0 + t * t).sqrt();
    Ok(norm / b * positive_part_product_mean(-1.0 / norm)?)
}

/// Monte Carlo estimates of the three identities from `draws` samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityEstimates {
    /// `P(X > 0, Y > 0)`.
    pub quadrant: MeanEstimate,
    /// `E(X₊ Y₊)`.
    pub product: MeanEstimate,
    /// `E[Z₊ (W/a - Z/b)₊]`.
    pub scaled: MeanEstimate,
}

/// Draws `(X, Y)` with correlation `rho` as `Y = ρX + √(1-ρ²)W`, and the
/// scaled pair from its own normals, over chunked streams of `seed`.
pub fn monte_carlo_estimates(rho: f64, a: f64, b: f64, draws: usize, seed: u64) -> Result<IdentityEstimates> {
    BivariateNormalCorr::new(rho)?;
    scaled_positive_part_mean(a, b)?;
    if draws < 2 {
        return Err(Error::Config(format!("need at least 2 draws, got {draws}")));
    }
    let c = (1.0 - rho * rho).sqrt();
    let rows = par_replicate(draws, seed, DEFAULT_CHUNK, |rng: &mut StreamRng| {
        let [x, w, z, v]: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let y = rho * x + c * w;
        let hit = if x > 0.0 && y > 0.0 { 1.0 } else { 0.0 };
        [hit, x.max(0.0) * y.max(0.0), z.max(0.0) * (v / a - z / b).max(0.0)]
    });
    let column = |k: usize| mean_estimate(rows.iter().map(|r| r[k]));
    Ok(IdentityEstimates {
        quadrant: column(0),
        product: column(1),
        scaled: column(2),
    })
}
