//! Empirical summaries used by the Monte Carlo checks: Kolmogorov–Smirnov
//! distances, sample moments and correlation.

/// One-sample KS distances against a continuous distribution function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsDistance {
    /// `sup_x (F_n(x) - F(x))`
    pub above: f64,
    /// `sup_x (F(x) - F_n(x))`
    pub below: f64,
}

impl KsDistance {
    pub fn two_sided(&self) -> f64 {
        self.above.max(self.below)
    }
}

/// Asymptotic 1% critical value of the two-sided one-sample KS statistic.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Asymptotic 1% critical value of the two-sample KS statistic.
pub fn ks_two_sample_critical_1pct(n: usize, m: usize) -> f64 {
    1.63 * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> KsDistance {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut above = 0.0f64;
    let mut below = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        above = above.max((i + 1) as f64 / n - f);
        below = below.max(f - i as f64 / n);
    }
    KsDistance { above, below }
}

/// Two-sample KS statistic `sup |F_n - G_m|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
}

pub fn mean_estimate<I: IntoIterator<Item = f64>>(values: I) -> MeanEstimate {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let delta = v - mean;
        mean += delta / n as f64;
        m2 += delta * (v - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    MeanEstimate {
        mean,
        std_error: (var / n.max(1) as f64).sqrt(),
    }
}

/// Empirical `r`-th moment of a sample.
pub fn moment_estimate(sample: &[f64], r: f64) -> MeanEstimate {
    mean_estimate(sample.iter().map(|x| x.powf(r)))
}

/// Pearson sample correlation.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// Fraction of the sample at or below `x`.
pub fn ecdf(sample: &[f64], x: f64) -> f64 {
    sample.iter().filter(|&&v| v <= x).count() as f64 / sample.len() as f64
}

/// Sample median (mean of the middle pair for even sizes).
pub fn median(sample: &[f64]) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}
