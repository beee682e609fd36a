//! Discretized Brownian paths on dyadic grids of `[0, 1]`, their least
//! concave majorants, and the simulation checks built on them.

pub mod checks;
pub mod hull;
pub mod straddle;

use std::io::{self, Write};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use hull::{brute_force_majorant, concave_majorant, covering_length, max_gap, MajorantHull};

/// Grid size used by the distributional checks (mesh `2^-15`).
pub const DEFAULT_GRID: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathKind {
    Bridge { end: f64 },
    Motion,
}

/// Path values at `t_i = i/n`, `i = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathGrid {
    pub n: usize,
    pub values: Vec<f64>,
    pub kind: PathKind,
}

fn check_grid_size(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::Config(format!(
            "grid size must be a power of two >= 2, got {n}"
        )));
    }
    Ok(())
}

impl PathGrid {
    pub fn time(&self, i: usize) -> f64 {
        i as f64 / self.n as f64
    }

    pub fn terminal(&self) -> f64 {
        self.values[self.n]
    }

    /// `sup - inf` over the grid.
    pub fn range(&self) -> f64 {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        hi - lo
    }

    /// Draws the value at a time `w` between grid points from the exact
    /// Brownian-bridge conditional law given the two neighbours. Separate
    /// calls are conditionally independent, which is exact when the times
    /// fall in distinct grid cells.
    pub fn sample_between<R: Rng + ?Sized>(&self, w: f64, rng: &mut R) -> f64 {
        let h = 1.0 / self.n as f64;
        let pos = (w.clamp(0.0, 1.0) * self.n as f64).min((self.n - 1) as f64);
        let i = pos.floor() as usize;
        let a = w - self.time(i);
        let b = self.time(i + 1) - w;
        let mean = (self.values[i] * b + self.values[i + 1] * a) / h;
        let sd = (a.max(0.0) * b.max(0.0) / h).sqrt();
        mean + sd * rng.sample::<f64, _>(StandardNormal)
    }

    /// Writes `t,path,majorant` rows, one per grid point.
    pub fn write_csv<W: Write>(&self, hull: &MajorantHull, mut out: W) -> io::Result<()> {
        writeln!(out, "t,path,majorant")?;
        for (i, m) in hull.values().into_iter().enumerate() {
            writeln!(out, "{},{},{}", self.time(i), self.values[i], m)?;
        }
        Ok(())
    }
}

/// Standard Brownian motion sampled on `n + 1` grid points.
pub fn sample_motion<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PathGrid> {
    check_grid_size(n)?;
    let sd = (1.0 / n as f64).sqrt();
    let mut values = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    values.push(acc);
    for _ in 0..n {
        acc += sd * rng.sample::<f64, _>(StandardNormal);
        values.push(acc);
    }
    Ok(PathGrid {
        n,
        values,
        kind: PathKind::Motion,
    })
}

/// Brownian bridge from 0 to `b`: a motion with `t (B(1) - b)` subtracted.
/// Exact in law at the grid points.
pub fn sample_bridge<R: Rng + ?Sized>(n: usize, b: f64, rng: &mut R) -> Result<PathGrid> {
    let mut path = sample_motion(n, rng)?;
    let excess = path.terminal() - b;
    let nf = n as f64;
    for (i, v) in path.values.iter_mut().enumerate() {
        *v -= excess * (i as f64 / nf);
    }
    path.values[n] = b;
    path.kind = PathKind::Bridge { end: b };
    Ok(path)
}

/// Doubles the resolution by Lévy midpoint refinement: each new midpoint
/// is the neighbours' average plus `N(0, h/4)` for old mesh `h`, which
/// keeps the existing points and the law of the path.
pub fn refine_midpoint<R: Rng + ?Sized>(path: &PathGrid, rng: &mut R) -> PathGrid {
    let sd = (0.25 / path.n as f64).sqrt();
    let mut values = Vec::with_capacity(2 * path.n + 1);
    for w in path.values.windows(2) {
        values.push(w[0]);
        values.push(0.5 * (w[0] + w[1]) + sd * rng.sample::<f64, _>(StandardNormal));
    }
    values.push(path.terminal());
    PathGrid {
        n: 2 * path.n,
        values,
        kind: path.kind,
    }
}
