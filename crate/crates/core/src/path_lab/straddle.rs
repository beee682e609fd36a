//! Joint densities of the last majorant vertex before and the first after
//! a fixed time, for Brownian motion on `[0, ∞)` and for the standard
//! bridge on `[0, 1]`, with the integrals that check them.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::analytic::QuadratureSpec;
use crate::error::{domain, Error, Result};
use crate::identities::{scaled_positive_part_mean, t_minus_arctan};

/// `(r - arctan r) / (π d²)` with `r = √(d / w)`.
fn kernel(d: f64, w: f64) -> f64 {
    t_minus_arctan((d / w).sqrt()) / (PI * d * d)
}

/// Density of `(V⁻_t, V⁺_t)` for Brownian motion on `[0, ∞)`.
pub fn straddle_density_motion(v1: f64, v2: f64, t: f64) -> f64 {
    if !(0.0 < v1 && v1 < t && t < v2) {
        return 0.0;
    }
    kernel(v2 - v1, v1)
}

/// The motion density through `(2/(v₂-v₁)^{3/2}) E[Z₊(X/√v₁ - Z/√(v₂-v₁))₊]`.
pub fn straddle_density_motion_via_expectation(v1: f64, v2: f64, t: f64) -> Result<f64> {
    if !(0.0 < v1 && v1 < t && t < v2) {
        return Ok(0.0);
    }
    let d = v2 - v1;
    Ok(2.0 / d.powf(1.5) * scaled_positive_part_mean(v1.sqrt(), d.sqrt())?)
}

/// Joint density at `(x, y)`, `0 < x < y < 1`, of the last vertex before
/// and the first vertex after `u` for the standard bridge, without the
/// indicator `x < u < y`.
pub fn bridge_kernel(x: f64, y: f64) -> f64 {
    if !(0.0 < x && x < y && y < 1.0) {
        return 0.0;
    }
    kernel(y - x, x * (1.0 - y))
}

/// Density of `(X_u, Y_u)` for the standard bridge.
pub fn straddle_density_bridge(x: f64, y: f64, u: f64) -> f64 {
    if !(0.0 < x && x < u && u < y && y < 1.0) {
        return 0.0;
    }
    bridge_kernel(x, y)
}

fn nested<F: Fn(f64, f64) -> f64>(quad: &QuadratureSpec, f: F) -> Result<f64> {
    let failed = std::cell::Cell::new(false);
    let outer = quad.integrate(
        |s| match quad.integrate(|q| f(s, q), 0.0, 1.0) {
            Ok(i) => i.value,
            Err(_) => {
                failed.set(true);
                0.0
            }
        },
        0.0,
        1.0,
    )?;
    if failed.get() {
        return Err(Error::NonConvergence("inner straddle integral"));
    }
    Ok(outer.value)
}

/// `∫∫_{0<v₁<t<v₂} f(v₁, v₂)` after `v₁ = t s²`, `v₂ = t / q²`, which
/// removes the `v₁^{-1/2}` singularity and maps the infinite range to
/// `(0, 1]`.
pub fn motion_mass(t: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("t", t, "t > 0"));
    }
    nested(quad, |s, q| {
        if s <= 0.0 || q <= 0.0 {
            return 0.0;
        }
        let v1 = t * s * s;
        let v2 = t / (q * q);
        straddle_density_motion(v1, v2, t) * (2.0 * t * s) * (2.0 * t / (q * q * q))
    })
}

/// `∫∫_{0<x<u<y<1} f(x, y)` after `x = u s²`, `y = 1 - (1-u) q²`, which
/// removes the square-root singularities at `x = 0` and `y = 1`.
pub fn bridge_mass(u: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(domain("u", u, "0 < u < 1"));
    }
    nested(quad, |s, q| {
        let x = u * s * s;
        let y = 1.0 - (1.0 - u) * q * q;
        straddle_density_bridge(x, y, u) * (2.0 * u * s) * (2.0 * (1.0 - u) * q)
    })
}

/// Density of the length of the bridge-majorant segment covering an
/// independent uniform time: `l ∫_0^{1-l} f(x, x+l) dx`, which is 1 on
/// `(0, 1)`. The factor `l` is the chance that the uniform time falls in
/// a segment of length `l`. Computed with `x = (1-l) sin²θ`.
pub fn segment_length_density(l: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(l > 0.0 && l < 1.0) {
        return Err(domain("l", l, "0 < l < 1"));
    }
    let w = 1.0 - l;
    let inner = quad.integrate(
        |theta| {
            let (sin, cos) = theta.sin_cos();
            let x = w * sin * sin;
            bridge_kernel(x, x + l) * 2.0 * w * sin * cos
        },
        0.0,
        FRAC_PI_2,
    )?;
    Ok(l * inner.value)
}
