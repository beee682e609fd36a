//! Monte Carlo for `M` through the stick-breaking representation
//! `M = max_j √L_j M3_j`, and Monte Carlo estimators of
//!
//! ```text
//! F_M(x) = E[Π_i F3(x/√L_i)]
//! f_M(x) = Σ_i E[L_i^{-1/2} f3(x/√L_i) Π_{j≠i} F3(x/√L_j)]
//! ```

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::excursion_max::M3Law;
use crate::rng::{par_replicate, StreamRng, DEFAULT_CHUNK};
use crate::stats::{mean_estimate, MeanEstimate};
use crate::stick_breaking::{open_unit, StickSequence, StopRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MSampleConfig {
    /// Stop breaking once the unbroken mass is below this.
    pub residual_eps: f64,
    /// Stop once `√residual · tail_guard` is below the running maximum.
    pub tail_guard: f64,
    pub seed: u64,
    pub n_samples: usize,
}

impl Default for MSampleConfig {
    fn default() -> Self {
        Self {
            residual_eps: 1e-12,
            tail_guard: 6.0,
            seed: 0,
            n_samples: 20_000,
        }
    }
}

impl MSampleConfig {
    pub fn new(residual_eps: f64, tail_guard: f64, seed: u64, n_samples: usize) -> Result<Self> {
        let cfg = Self {
            residual_eps,
            tail_guard,
            seed,
            n_samples,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.residual_eps > 0.0 && self.residual_eps < 0.5) {
            return Err(Error::Config(format!(
                "residual_eps must lie in (0, 0.5), got {}",
                self.residual_eps
            )));
        }
        if !(self.tail_guard >= 4.0) {
            return Err(Error::Config(format!(
                "tail_guard must be at least 4, got {}",
                self.tail_guard
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be positive".into()));
        }
        Ok(())
    }
}

/// Samples `M` and estimates `F_M`, `f_M` by Monte Carlo.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MSampler {
    pub cfg: MSampleConfig,
    pub law: M3Law,
}

impl MSampler {
    pub fn new(cfg: MSampleConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            law: M3Law::default(),
        })
    }

    /// One draw of `M`. The rest of the stick is a scaled copy of the whole
    /// problem, so once `√residual · tail_guard` is below the running
    /// maximum it changes the result only if a fresh `M` exceeds
    /// `tail_guard`.
    pub fn sample_m<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut residual = 1.0f64;
        let mut max = 0.0f64;
        while residual >= self.cfg.residual_eps && residual.sqrt() * self.cfg.tail_guard >= max {
            let piece = residual * open_unit(rng);
            residual -= piece;
            max = max.max(piece.sqrt() * self.law.sample(rng));
        }
        max
    }

    /// `cfg.n_samples` draws, chunked over independent streams of
    /// `cfg.seed`.
    pub fn par_sample(&self) -> Vec<f64> {
        par_replicate(self.cfg.n_samples, self.cfg.seed, DEFAULT_CHUNK, |rng| {
            self.sample_m(rng)
        })
    }

    fn sticks<R: Rng + ?Sized>(&self, rng: &mut R) -> StickSequence {
        StickSequence::sample(rng, StopRule::ResidualBelow(self.cfg.residual_eps))
    }

    /// `Π_i F3(x/√L_i)` for one stick sequence, with the unbroken remainder
    /// replaced by the midpoint of its bracket `[F3(x/√residual), 1]`.
    pub fn cdf_integrand(&self, sticks: &StickSequence, x: f64) -> f64 {
        let mut prod = self.residual_factor(sticks, x);
        for &l in &sticks.lengths {
            prod *= self.law.cdf(x / l.sqrt());
            if prod == 0.0 {
                break;
            }
        }
        prod
    }

    /// `Σ_i L_i^{-1/2} f3(x/√L_i) Π_{j≠i} F3(x/√L_j)` for one stick
    /// sequence, by prefix and suffix products.
    pub fn pdf_integrand(&self, sticks: &StickSequence, x: f64) -> f64 {
        let n = sticks.lengths.len();
        let cdfs: Vec<f64> = sticks
            .lengths
            .iter()
            .map(|&l| self.law.cdf(x / l.sqrt()))
            .collect();
        let mut suffix = vec![self.residual_factor(sticks, x); n + 1];
        for i in (0..n).rev() {
            suffix[i] = suffix[i + 1] * cdfs[i];
        }
        let mut prefix = 1.0;
        let mut total = 0.0;
        for (i, &l) in sticks.lengths.iter().enumerate() {
            let r = l.sqrt();
            let others = prefix * suffix[i + 1];
            if others > 0.0 {
                total += self.law.pdf(x / r) / r * others;
            }
            prefix *= cdfs[i];
        }
        total
    }

    fn residual_factor(&self, sticks: &StickSequence, x: f64) -> f64 {
        if sticks.residual > 0.0 {
            0.5 * (1.0 + self.law.cdf(x / sticks.residual.sqrt()))
        } else {
            1.0
        }
    }

    /// Monte Carlo `F_M(x)` over `n_processes` stick sequences from `rng`.
    pub fn mc_cdf<R: Rng + ?Sized>(&self, x: f64, n_processes: usize, rng: &mut R) -> Result<MeanEstimate> {
        Ok(self.mc_cdf_grid(&[x], n_processes, rng)?[0])
    }

    /// Monte Carlo `f_M(x)` over `n_processes` stick sequences from `rng`.
    pub fn mc_pdf<R: Rng + ?Sized>(&self, x: f64, n_processes: usize, rng: &mut R) -> Result<MeanEstimate> {
        Ok(self.mc_pdf_grid(&[x], n_processes, rng)?[0])
    }

    /// `F_M` on a grid with common random numbers: every `x` sees the same
    /// sticks, so the estimate is nondecreasing in `x`.
    pub fn mc_cdf_grid<R: Rng + ?Sized>(
        &self,
        xs: &[f64],
        n_processes: usize,
        rng: &mut R,
    ) -> Result<Vec<MeanEstimate>> {
        check_grid(xs, n_processes)?;
        let rows: Vec<Vec<f64>> = (0..n_processes)
            .map(|_| {
                let sticks = self.sticks(rng);
                xs.iter().map(|&x| self.cdf_integrand(&sticks, x)).collect()
            })
            .collect();
        Ok(column_means(&rows, xs.len()))
    }

    pub fn mc_pdf_grid<R: Rng + ?Sized>(
        &self,
        xs: &[f64],
        n_processes: usize,
        rng: &mut R,
    ) -> Result<Vec<MeanEstimate>> {
        check_grid(xs, n_processes)?;
        let rows: Vec<Vec<f64>> = (0..n_processes)
            .map(|_| {
                let sticks = self.sticks(rng);
                xs.iter().map(|&x| self.pdf_integrand(&sticks, x)).collect()
            })
            .collect();
        Ok(column_means(&rows, xs.len()))
    }

    /// Parallel [`mc_cdf_grid`](Self::mc_cdf_grid) over chunked streams of
    /// `cfg.seed`.
    pub fn par_mc_cdf_grid(&self, xs: &[f64], n_processes: usize) -> Result<Vec<MeanEstimate>> {
        check_grid(xs, n_processes)?;
        let rows = par_replicate(n_processes, self.cfg.seed, DEFAULT_CHUNK, |rng: &mut StreamRng| {
            let sticks = self.sticks(rng);
            xs.iter().map(|&x| self.cdf_integrand(&sticks, x)).collect::<Vec<_>>()
        });
        Ok(column_means(&rows, xs.len()))
    }

    pub fn par_mc_pdf_grid(&self, xs: &[f64], n_processes: usize) -> Result<Vec<MeanEstimate>> {
        check_grid(xs, n_processes)?;
        let rows = par_replicate(n_processes, self.cfg.seed, DEFAULT_CHUNK, |rng: &mut StreamRng| {
            let sticks = self.sticks(rng);
            xs.iter().map(|&x| self.pdf_integrand(&sticks, x)).collect::<Vec<_>>()
        });
        Ok(column_means(&rows, xs.len()))
    }
}

fn check_grid(xs: &[f64], n_processes: usize) -> Result<()> {
    if n_processes == 0 {
        return Err(Error::Config("n_processes must be positive".into()));
    }
    match xs.iter().find(|&&x| !(x > 0.0)) {
        Some(&x) => Err(domain("x", x, "x > 0")),
        None => Ok(()),
    }
}

fn column_means(rows: &[Vec<f64>], width: usize) -> Vec<MeanEstimate> {
    (0..width)
        .map(|k| mean_estimate(rows.iter().map(|r| r[k])))
        .collect()
}

/// One draw of `M` under the default configuration.
pub fn sample_m<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    MSampler::default().sample_m(rng)
}

pub fn mc_cdf<R: Rng + ?Sized>(x: f64, n_processes: usize, rng: &mut R) -> Result<MeanEstimate> {
    MSampler::default().mc_cdf(x, n_processes, rng)
}

pub fn mc_pdf<R: Rng + ?Sized>(x: f64, n_processes: usize, rng: &mut R) -> Result<MeanEstimate> {
    MSampler::default().mc_pdf(x, n_processes, rng)
}
