//! Globally adaptive Gauss–Kronrod (7/15) quadrature by interval halving.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and depth limit for [`QuadratureSpec::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of halvings applied to any one subinterval.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_depth: 60,
        }
    }
}

/// Value and error estimate of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

// Kronrod 15-point nodes; the odd-indexed ones are the 7-point Gauss nodes.
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 20_000;

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XK.iter().zip(WK.iter()).take(7).enumerate() {
        let dx = half * x;
        let sum = f(center - dx) + f(center + dx);
        kron += w * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_depth: u32) -> Result<Self> {
        if !(rel_tol > 0.0 && abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if max_depth < 10 {
            return Err(Error::Config(format!(
                "max_depth must be at least 10, got {max_depth}"
            )));
        }
        Ok(Self {
            rel_tol,
            abs_tol,
            max_depth,
        })
    }

    /// Integrates `f` over the finite interval `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<Integral> {
        if a == b {
            return Ok(Integral {
                value: 0.0,
                error: 0.0,
            });
        }
        if b < a {
            return self.integrate(f, b, a).map(|i| Integral {
                value: -i.value,
                error: i.error,
            });
        }
        let (value, error) = kronrod(&f, a, b);
        let mut heap = BinaryHeap::new();
        heap.push(Piece {
            a,
            b,
            value,
            error,
            depth: 0,
        });
        let mut total = value;
        let mut total_err = error;
        loop {
            if total_err <= self.abs_tol.max(self.rel_tol * total.abs()) {
                break;
            }
            if heap.len() >= MAX_INTERVALS {
                return Err(Error::NonConvergence("adaptive quadrature"));
            }
            let worst = heap.pop().expect("heap is never empty");
            if worst.depth >= self.max_depth {
                return Err(Error::NonConvergence("adaptive quadrature"));
            }
            let mid = 0.5 * (worst.a + worst.b);
            let (lv, le) = kronrod(&f, worst.a, mid);
            let (rv, re) = kronrod(&f, mid, worst.b);
            total += lv + rv - worst.value;
            total_err += le + re - worst.error;
            for (a, b, value, error) in [(worst.a, mid, lv, le), (mid, worst.b, rv, re)] {
                heap.push(Piece {
                    a,
                    b,
                    value,
                    error,
                    depth: worst.depth + 1,
                });
            }
        }
        // Re-sum to shed the drift accumulated by the running updates.
        let value = heap.iter().map(|p| p.value).sum();
        let error = heap.iter().map(|p| p.error).sum();
        Ok(Integral { value, error })
    }

    /// Integrates `f` over `[a, ∞)`. The upper limit is the first point
    /// `a + w·2^k` at which `envelope` (a bound on `|f|` beyond that point,
    /// integrated) drops below `abs_tol`.
    pub fn integrate_tail<F, B>(&self, f: F, a: f64, envelope: B) -> Result<Integral>
    where
        F: Fn(f64) -> f64,
        B: Fn(f64) -> f64,
    {
        let mut width = 1.0f64.max(a.abs());
        let mut b = a + width;
        while envelope(b) >= self.abs_tol {
            width *= 2.0;
            b = a + width;
            if !b.is_finite() || width > 1e300 {
                return Err(Error::NonConvergence("tail truncation search"));
            }
        }
        self.integrate(f, a, b)
    }
}
