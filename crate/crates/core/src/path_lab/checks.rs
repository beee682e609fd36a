//! Distributional checks on simulated paths. Each check returns a report
//! whose [`Verdict`]s list the statistic, its threshold and the outcome.

use rand::Rng;
use rand_distr::StandardNormal;

use super::hull::{brute_force_majorant, concave_majorant, covering_length, max_gap};
use super::{sample_bridge, sample_motion, PathGrid, DEFAULT_GRID};
use crate::error::Result;
use crate::excursion_max::f3_cdf;
use crate::rng::{derive_seed, par_replicate, StreamRng};
use crate::special_fns::std_normal_cdf;
use crate::stats::{correlation, ks_critical_1pct, ks_one_sample, ks_two_sample, mean_estimate, MeanEstimate};

/// Replications per parallel chunk. Each replication is a full path, so
/// chunks are small.
pub const PATH_CHUNK: usize = 16;

/// KS allowance for discretization bias at `n = 2^15`.
pub const MAX_GAP_ALLOWANCE: f64 = 0.025;
pub const EXCURSION_ALLOWANCE: f64 = 0.03;
pub const BRIDGE_MOTION_ALLOWANCE: f64 = 0.03;

const BRIDGE_STREAM: u64 = 1;
const MOTION_STREAM: u64 = 2;
const DOOB_STREAM: u64 = 3;
const ORACLE_STREAM: u64 = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Verdict {
    /// Passes when `statistic <= threshold`.
    pub fn at_most(name: impl Into<String>, statistic: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            statistic,
            threshold,
            passed: statistic <= threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabConfig {
    /// Grid intervals per path.
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
}

impl Default for LabConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_GRID,
            replications: 5_000,
            seed: 0,
        }
    }
}

/// Per-bridge statistics gathered in one pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeSummary {
    pub max_gap: f64,
    /// Length of the hull segment covering an independent uniform time.
    pub covering_length: f64,
    /// Maximum gap on that segment divided by the square root of its
    /// length; `None` when the segment has no interior grid point.
    pub segment_max: Option<f64>,
    /// `sup - inf` of the bridge.
    pub range: f64,
}

/// Per-motion statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionSummary {
    pub max_gap: f64,
    pub covering_length: f64,
    pub terminal: f64,
}

fn uniform_time<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn summarize_bridge(path: &PathGrid, u: f64) -> BridgeSummary {
    let hull = concave_majorant(path);
    let gaps: Vec<f64> = hull
        .values()
        .iter()
        .zip(&path.values)
        .map(|(m, v)| m - v)
        .collect();
    let k = hull.segment_at(u);
    let (a, c) = (hull.vertex_indices[k], hull.vertex_indices[k + 1]);
    let seg_gap = gaps[a..=c].iter().copied().fold(0.0, f64::max);
    let length = hull.segment_lengths[k];
    BridgeSummary {
        max_gap: gaps.iter().copied().fold(0.0, f64::max),
        covering_length: covering_length(&hull, u),
        segment_max: (c - a >= 2).then(|| seg_gap / length.sqrt()),
        range: path.range(),
    }
}

/// Simulates `replications` standard bridges on `n` intervals.
pub fn simulate_bridges(cfg: &LabConfig) -> Result<Vec<BridgeSummary>> {
    super::check_grid_size(cfg.n)?;
    let seed = derive_seed(cfg.seed, BRIDGE_STREAM);
    Ok(par_replicate(cfg.replications, seed, PATH_CHUNK, |rng: &mut StreamRng| {
        let path = sample_bridge(cfg.n, 0.0, rng).expect("grid size checked");
        summarize_bridge(&path, uniform_time(rng))
    }))
}

/// Simulates `replications` Brownian motions on `n` intervals.
pub fn simulate_motions(cfg: &LabConfig) -> Result<Vec<MotionSummary>> {
    super::check_grid_size(cfg.n)?;
    let seed = derive_seed(cfg.seed, MOTION_STREAM);
    Ok(par_replicate(cfg.replications, seed, PATH_CHUNK, |rng: &mut StreamRng| {
        let path = sample_motion(cfg.n, rng).expect("grid size checked");
        let hull = concave_majorant(&path);
        let u = uniform_time(rng);
        MotionSummary {
            max_gap: max_gap(&path, &hull).0,
            covering_length: covering_length(&hull, u),
            terminal: path.terminal(),
        }
    }))
}

fn column<T, F: Fn(&T) -> f64>(rows: &[T], f: F) -> Vec<f64> {
    rows.iter().map(f).collect()
}

/// The covering segment length is uniform on `(0, 1)`.
pub fn covering_length_check(bridges: &[BridgeSummary]) -> Verdict {
    let ks = ks_one_sample(&column(bridges, |b| b.covering_length), |x| x.clamp(0.0, 1.0));
    Verdict::at_most(
        "covering_length KS vs uniform(0,1)",
        ks.two_sided(),
        ks_critical_1pct(bridges.len()),
    )
}

/// Grid maxima understate the continuum `M`, which pushes the empirical
/// CDF above the analytic one. That side gets the discretization
/// allowance; the other side must stay within the 1% critical value.
pub fn max_gap_check<F: Fn(f64) -> f64>(bridges: &[BridgeSummary], cdf: F) -> Vec<Verdict> {
    let ks = ks_one_sample(&column(bridges, |b| b.max_gap), cdf);
    vec![
        Verdict::at_most("max_gap KS, empirical above analytic", ks.above, MAX_GAP_ALLOWANCE),
        Verdict::at_most(
            "max_gap KS, empirical below analytic",
            ks.below,
            ks_critical_1pct(bridges.len()),
        ),
    ]
}

/// Range of the bridge against the law of `M3`, with the same one-sided
/// allowance as the maximal gap.
pub fn range_check(bridges: &[BridgeSummary]) -> Vec<Verdict> {
    let ks = ks_one_sample(&column(bridges, |b| b.range), f3_cdf);
    vec![
        Verdict::at_most("range KS vs F3, empirical above", ks.above, MAX_GAP_ALLOWANCE),
        Verdict::at_most(
            "range KS vs F3, empirical below",
            ks.below,
            ks_critical_1pct(bridges.len()),
        ),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExcursionReport {
    pub ks: f64,
    pub correlation: f64,
    /// Resolved segments (with interior grid points) whose gap was zero.
    pub zero_gaps: usize,
    /// Covering segments spanning a single grid step, left out.
    pub unresolved: usize,
    pub replications: usize,
}

impl ExcursionReport {
    pub fn verdicts(&self) -> Vec<Verdict> {
        vec![
            Verdict::at_most("rescaled segment maximum KS vs F3", self.ks, EXCURSION_ALLOWANCE),
            Verdict::at_most(
                "|corr(rescaled maximum, segment length)|",
                self.correlation.abs(),
                0.05,
            ),
            Verdict::at_most("resolved segments with zero gap", self.zero_gaps as f64, 0.0),
        ]
    }
}

/// Segments of the majorant carry independent excursions: the gap on the
/// segment covering a uniform time, rescaled by its length, has law `F3`
/// and is independent of the length. Segments one grid step long carry no
/// interior point and are left out; by that independence this does not
/// change the law of the rest.
pub fn excursion_decomposition_check(bridges: &[BridgeSummary]) -> ExcursionReport {
    let (maxima, lengths): (Vec<f64>, Vec<f64>) = bridges
        .iter()
        .filter_map(|b| b.segment_max.map(|m| (m, b.covering_length)))
        .unzip();
    ExcursionReport {
        ks: ks_one_sample(&maxima, f3_cdf).two_sided(),
        correlation: correlation(&maxima, &lengths),
        zero_gaps: maxima.iter().filter(|&&m| m == 0.0).count(),
        unresolved: bridges.len() - maxima.len(),
        replications: bridges.len(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceReport {
    pub corr_gap_terminal: f64,
    pub corr_cover_terminal: f64,
    pub motion_replications: usize,
    pub bridge_motion_ks: f64,
}

impl IndependenceReport {
    pub fn verdicts(&self) -> Vec<Verdict> {
        let bound = 3.0 / (self.motion_replications as f64).sqrt();
        vec![
            Verdict::at_most("|corr(max_gap, B(1))|", self.corr_gap_terminal.abs(), bound),
            Verdict::at_most(
                "|corr(covering_length, B(1))|",
                self.corr_cover_terminal.abs(),
                bound,
            ),
            Verdict::at_most(
                "max_gap KS, bridge vs motion",
                self.bridge_motion_ks,
                BRIDGE_MOTION_ALLOWANCE,
            ),
        ]
    }
}

/// For Brownian motion the majorant's gap and segment structure are
/// independent of `B(1)`, and the gap has the same law as for the bridge.
pub fn endpoint_independence_check(
    motions: &[MotionSummary],
    bridges: &[BridgeSummary],
) -> IndependenceReport {
    let terminal = column(motions, |m| m.terminal);
    let gaps = column(motions, |m| m.max_gap);
    let paired = gaps.len().min(bridges.len());
    IndependenceReport {
        corr_gap_terminal: correlation(&gaps, &terminal),
        corr_cover_terminal: correlation(&column(motions, |m| m.covering_length), &terminal),
        motion_replications: motions.len(),
        bridge_motion_ks: ks_two_sample(&column(&bridges[..paired], |b| b.max_gap), &gaps[..paired]),
    }
}

/// Time argument and scale of the bridge-to-bridge map induced by the
/// space-time transformation `(u, x) ↦ (u/(1-u), x/(1-u))` on the window
/// `[u, û]`: `X*(v) = scale(v) Y*(w(v))` with
/// `w(v) = (1-û) v / (1-u-v(û-u))` and
/// `scale(v) = (1-u-v(û-u)) / √((1-u)(1-û))`.
pub fn doob_map(u: f64, u_hat: f64, v: f64) -> (f64, f64) {
    let p = 1.0 - u - v * (u_hat - u);
    ((1.0 - u_hat) * v / p, p / ((1.0 - u) * (1.0 - u_hat)).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoobReport {
    /// `(v, KS)` for `X*(v)` against `N(0, v(1-v))`.
    pub marginals: Vec<(f64, f64)>,
    pub critical: f64,
    /// Sample covariance of `X*(1/4)` and `X*(3/4)`; the target is `1/16`.
    pub covariance: MeanEstimate,
}

impl DoobReport {
    pub fn verdicts(&self) -> Vec<Verdict> {
        let mut out: Vec<Verdict> = self
            .marginals
            .iter()
            .map(|&(v, ks)| Verdict::at_most(format!("X*({v}) KS vs N(0, v(1-v))"), ks, self.critical))
            .collect();
        out.push(Verdict::at_most(
            "|cov(X*(1/4), X*(3/4)) - 1/16| in standard errors",
            (self.covariance.mean - 0.0625).abs() / self.covariance.std_error,
            3.0,
        ));
        out
    }
}

/// Maps simulated standard bridges `Y*` through [`doob_map`] and compares
/// the resulting `X*` with the standard bridge law.
pub fn doob_transform_check(cfg: &LabConfig, u: f64, u_hat: f64) -> Result<DoobReport> {
    super::check_grid_size(cfg.n)?;
    let vs = [0.25, 0.5, 0.75];
    let seed = derive_seed(cfg.seed, DOOB_STREAM);
    let rows = par_replicate(cfg.replications, seed, PATH_CHUNK, |rng: &mut StreamRng| {
        let y = sample_bridge(cfg.n, 0.0, rng).expect("grid size checked");
        vs.map(|v| {
            let (w, scale) = doob_map(u, u_hat, v);
            scale * y.sample_between(w, rng)
        })
    });
    let marginals = vs
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let sd = (v * (1.0 - v)).sqrt();
            let xs = column(&rows, |r| r[k]);
            (v, ks_one_sample(&xs, |x| std_normal_cdf(x / sd)).two_sided())
        })
        .collect();
    // Both marginals have mean zero, so the product mean estimates the
    // covariance.
    let covariance = mean_estimate(rows.iter().map(|r| r[0] * r[2]));
    Ok(DoobReport {
        marginals,
        critical: ks_critical_1pct(cfg.replications),
        covariance,
    })
}

/// Compares the monotone-chain hull with the `O(n³)` reference on
/// `paths` random walks of random length up to 64. Returns the number of
/// mismatches.
pub fn hull_oracle_check(paths: usize, seed: u64) -> usize {
    let seed = derive_seed(seed, ORACLE_STREAM);
    par_replicate(paths, seed, PATH_CHUNK, |rng: &mut StreamRng| {
        let n = rng.random_range(2..=64usize);
        let mut values = vec![0.0];
        for _ in 0..n {
            let last = *values.last().unwrap();
            values.push(last + rng.sample::<f64, _>(StandardNormal));
        }
        let path = PathGrid {
            n,
            values,
            kind: super::PathKind::Motion,
        };
        let hull = concave_majorant(&path);
        let (vertices, majorant) = brute_force_majorant(&path.values);
        hull.vertex_indices != vertices || hull.values() != majorant
    })
    .into_iter()
    .filter(|&bad| bad)
    .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doob_map_endpoints() {
        let (w0, s0) = doob_map(0.2, 0.7, 0.0);
        assert_eq!(w0, 0.0);
        assert!((s0 - (0.8f64 / 0.3).sqrt()).abs() < 1e-15);
        let (w1, _) = doob_map(0.2, 0.7, 1.0);
        assert!((w1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn doob_map_preserves_bridge_variance() {
        for v in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let (w, s) = doob_map(0.2, 0.7, v);
            assert!((s * s * w * (1.0 - w) - v * (1.0 - v)).abs() < 1e-14);
        }
    }

    #[test]
    fn hull_oracle_small_run() {
        assert_eq!(hull_oracle_check(50, 1), 0);
    }

    #[test]
    fn small_bridge_run_is_deterministic() {
        let cfg = LabConfig {
            n: 256,
            replications: 40,
            seed: 3,
        };
        assert_eq!(simulate_bridges(&cfg).unwrap(), simulate_bridges(&cfg).unwrap());
    }
}
