//! Uniform stick-breaking: `L_1 = W_1`, `L_j = (1 - W_1)…(1 - W_{j-1}) W_j`
//! with `W_j` i.i.d. uniform on `(0, 1)`.
//!
//! The decreasing rearrangement of the lengths is Poisson–Dirichlet(0, 1);
//! a size-biased permutation of that rearrangement is again a uniform
//! stick-breaking sequence.

use rand::Rng;

use crate::error::{domain, Result};

/// When to stop breaking the stick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopRule {
    /// Stop once the unbroken mass falls below the threshold.
    ResidualBelow(f64),
    /// Stop after exactly this many pieces.
    Count(usize),
}

/// A finite prefix `L_1, …, L_k` together with the mass not yet broken off.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StickSequence {
    pub lengths: Vec<f64>,
    pub residual: f64,
}

impl StickSequence {
    /// Breaks `[0, 1]` until `stop` fires.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, stop: StopRule) -> Self {
        let mut seq = Self {
            lengths: Vec::new(),
            residual: 1.0,
        };
        seq.extend(rng, stop);
        seq
    }

    /// Continues breaking the residual mass.
    pub fn extend<R: Rng + ?Sized>(&mut self, rng: &mut R, stop: StopRule) {
        let target = match stop {
            StopRule::Count(k) => self.lengths.len() + k,
            StopRule::ResidualBelow(_) => usize::MAX,
        };
        while self.lengths.len() < target {
            if let StopRule::ResidualBelow(eps) = stop {
                if self.residual < eps {
                    break;
                }
            }
            self.push_piece(open_unit(rng));
        }
    }

    /// Appends `residual · w` and keeps `residual · (1 - w)` unbroken.
    pub fn push_piece(&mut self, w: f64) -> f64 {
        let piece = self.residual * w;
        self.residual *= 1.0 - w;
        self.lengths.push(piece);
        piece
    }

    pub fn total(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// `L_1, L_2/(1 - L_1), L_3/(1 - L_1 - L_2), …`, which recovers the
    /// underlying uniform fractions.
    pub fn normalized_ratios(&self) -> Vec<f64> {
        let mut remaining = 1.0;
        self.lengths
            .iter()
            .map(|&l| {
                let r = l / remaining;
                remaining -= l;
                r
            })
            .collect()
    }
}

/// Uniform draw on the open interval `(0, 1)`.
pub(crate) fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

pub fn sample_sticks<R: Rng + ?Sized>(rng: &mut R, stop: StopRule) -> StickSequence {
    StickSequence::sample(rng, stop)
}

/// Lengths in decreasing order (stable, so ties keep their input order).
pub fn ranked(sticks: &StickSequence) -> Vec<f64> {
    let mut out = sticks.lengths.clone();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Size-biased random permutation: repeatedly pick an index with
/// probability proportional to its length among those not yet picked.
pub fn size_biased_permutation<R: Rng + ?Sized>(lengths: &[f64], rng: &mut R) -> Result<Vec<f64>> {
    if let Some(&bad) = lengths.iter().find(|&&l| !(l > 0.0)) {
        return Err(domain("length", bad, "all lengths > 0"));
    }
    let mut pool = lengths.to_vec();
    let mut out = Vec::with_capacity(pool.len());
    while !pool.is_empty() {
        let remaining: f64 = pool.iter().sum();
        let target = rng.random::<f64>() * remaining;
        let mut acc = 0.0;
        let mut pick = pool.len() - 1;
        for (i, &l) in pool.iter().enumerate() {
            acc += l;
            if target < acc {
                pick = i;
                break;
            }
        }
        out.push(pool.remove(pick));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ranked_sorts_decreasing() {
        let s = StickSequence {
            lengths: vec![0.2, 0.5, 0.1],
            residual: 0.2,
        };
        assert_eq!(ranked(&s), vec![0.5, 0.2, 0.1]);
    }

    #[test]
    fn residual_stop_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = sample_sticks(&mut rng, StopRule::ResidualBelow(1e-12));
        let total = s.total();
        assert!(total > 1.0 - 1e-12 && total <= 1.0, "{total}");
        assert!((total + s.residual - 1.0).abs() < 1e-12);
        assert!(s.residual < 1e-12);
    }

    #[test]
    fn count_stop_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = sample_sticks(&mut rng, StopRule::Count(5));
        assert_eq!(s.lengths.len(), 5);
        assert!(s.lengths.iter().all(|&l| l > 0.0 && l < 1.0));
    }

    #[test]
    fn size_biased_single_and_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(size_biased_permutation(&[1.0], &mut rng).unwrap(), vec![1.0]);
        assert!(size_biased_permutation(&[0.5, 0.0], &mut rng).is_err());
        assert!(size_biased_permutation(&[0.5, -0.1], &mut rng).is_err());
    }

    #[test]
    fn normalized_ratios_recover_fractions() {
        let mut s = StickSequence {
            lengths: vec![],
            residual: 1.0,
        };
        for w in [0.3, 0.6, 0.25] {
            s.push_piece(w);
        }
        let r = s.normalized_ratios();
        for (a, b) in r.iter().zip([0.3, 0.6, 0.25]) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
