//! Named verification suites. Each returns one verdict per assertion.

use clap::ValueEnum;
use majorant_gap::analytic::QuadratureSpec;
use majorant_gap::identities::{
    monte_carlo_estimates, positive_part_product_mean, quadrant_prob, scaled_positive_part_mean,
    scaled_positive_part_mean_via_correlation, BivariateNormalCorr,
};
use majorant_gap::laplace_inv::MLaw;
use majorant_gap::path_lab::checks::{
    covering_length_check, doob_transform_check, endpoint_independence_check,
    excursion_decomposition_check, hull_oracle_check, max_gap_check, range_check,
    simulate_bridges, simulate_motions, LabConfig, Verdict,
};
use majorant_gap::path_lab::straddle::{
    bridge_mass, motion_mass, segment_length_density, straddle_density_motion,
    straddle_density_motion_via_expectation,
};
use majorant_gap::stats::MeanEstimate;
use majorant_gap::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    L1Uniform,
    Straddle,
    Identities,
    Doob,
    Excursion,
    Independence,
    HullOracle,
}

impl Suite {
    /// Replications (paths, draws or oracle cases) when `--n` is absent.
    pub fn default_replications(self) -> usize {
        match self {
            Suite::L1Uniform | Suite::Doob | Suite::Excursion => 5_000,
            Suite::Independence => 10_000,
            Suite::Identities => 1_000_000,
            Suite::HullOracle => 200,
            Suite::Straddle => 0,
        }
    }
}

pub struct SuiteOptions {
    pub replications: usize,
    pub grid: usize,
    pub seed: u64,
    pub quad: QuadratureSpec,
    pub law: MLaw,
}

const AGREEMENT_TOL: f64 = 1e-8;
const REFLECTION_TOL: f64 = 1e-14;
const MASS_TOL: f64 = 1e-6;
const MC_SIGMAS: f64 = 3.0;

pub fn run(suite: Suite, opts: &SuiteOptions) -> Result<Vec<Verdict>> {
    let lab = LabConfig {
        n: opts.grid,
        replications: opts.replications,
        seed: opts.seed,
    };
    match suite {
        Suite::L1Uniform => {
            let mut out = segment_length_verdicts(&opts.quad)?;
            out.push(covering_length_check(&simulate_bridges(&lab)?));
            Ok(out)
        }
        Suite::Straddle => straddle(&opts.quad),
        Suite::Identities => identities(opts.replications, opts.seed),
        Suite::Doob => Ok(doob_transform_check(&lab, 0.2, 0.7)?.verdicts()),
        Suite::Excursion => {
            let bridges = simulate_bridges(&lab)?;
            let table = opts.law.tabulate_cdf(0.2, 4.2, 0.01)?;
            let mut out = excursion_decomposition_check(&bridges).verdicts();
            out.extend(max_gap_check(&bridges, |x| table.eval(x)));
            out.extend(range_check(&bridges));
            Ok(out)
        }
        Suite::Independence => {
            let motions = simulate_motions(&lab)?;
            let bridges = simulate_bridges(&lab)?;
            Ok(endpoint_independence_check(&motions, &bridges).verdicts())
        }
        Suite::HullOracle => {
            let bad = hull_oracle_check(opts.replications, opts.seed);
            Ok(vec![Verdict::at_most("hull mismatches vs brute force", bad as f64, 0.0)])
        }
    }
}

fn segment_length_verdicts(quad: &QuadratureSpec) -> Result<Vec<Verdict>> {
    [0.1, 0.5, 0.9]
        .into_iter()
        .map(|l| {
            let d = segment_length_density(l, quad)?;
            Ok(Verdict::at_most(format!("|f_L1({l}) - 1|"), (d - 1.0).abs(), MASS_TOL))
        })
        .collect()
}

fn straddle(quad: &QuadratureSpec) -> Result<Vec<Verdict>> {
    let mut out = vec![
        Verdict::at_most(
            "|motion straddle mass at t = 1 - 1|",
            (motion_mass(1.0, quad)? - 1.0).abs(),
            MASS_TOL,
        ),
        Verdict::at_most(
            "|bridge straddle mass at u = 0.5 - 1|",
            (bridge_mass(0.5, quad)? - 1.0).abs(),
            MASS_TOL,
        ),
    ];
    for (v1, v2) in [(0.3, 1.7), (0.9, 1.1), (0.05, 4.0)] {
        let a = straddle_density_motion(v1, v2, 1.0);
        let b = straddle_density_motion_via_expectation(v1, v2, 1.0)?;
        out.push(Verdict::at_most(
            format!("motion density vs expectation form at ({v1}, {v2}), relative"),
            (a - b).abs() / a,
            AGREEMENT_TOL,
        ));
    }
    out.extend(segment_length_verdicts(quad)?);
    Ok(out)
}

fn sigmas(e: MeanEstimate, target: f64) -> f64 {
    (e.mean - target).abs() / e.std_error
}

fn identities(draws: usize, seed: u64) -> Result<Vec<Verdict>> {
    let mut out = Vec::new();
    for rho in [-0.99, -0.7, -0.3, -0.01] {
        let pair = BivariateNormalCorr::new(rho)?;
        let reflected = pair.quadrant_prob_reflected().expect("rho < 0");
        out.push(Verdict::at_most(
            format!("quadrant probability, direct vs reflected at rho = {rho}"),
            (pair.quadrant_prob() - reflected).abs(),
            REFLECTION_TOL,
        ));
    }
    for (a, b) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.2)] {
        let x = scaled_positive_part_mean(a, b)?;
        let y = scaled_positive_part_mean_via_correlation(a, b)?;
        out.push(Verdict::at_most(
            format!("scaled positive-part mean, two routes at ({a}, {b})"),
            (x - y).abs(),
            AGREEMENT_TOL,
        ));
    }
    let (rho, a, b) = (-0.5, 0.6, 1.1);
    let est = monte_carlo_estimates(rho, a, b, draws, seed)?;
    out.push(Verdict::at_most(
        format!("P(X > 0, Y > 0) at rho = {rho}, MC standard errors"),
        sigmas(est.quadrant, quadrant_prob(rho)?),
        MC_SIGMAS,
    ));
    out.push(Verdict::at_most(
        format!("E(X+ Y+) at rho = {rho}, MC standard errors"),
        sigmas(est.product, positive_part_product_mean(rho)?),
        MC_SIGMAS,
    ));
    out.push(Verdict::at_most(
        format!("E[Z+ (W/a - Z/b)+] at ({a}, {b}), MC standard errors"),
        sigmas(est.scaled, scaled_positive_part_mean(a, b)?),
        MC_SIGMAS,
    ));
    Ok(out)
}
