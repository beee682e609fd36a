//! Test-local oracles, written independently of the crate's own routines.
#![allow(dead_code)]

/// Adaptive Simpson quadrature with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `∫_a^∞ f` via `x = a + s/(1-s)`. The integrand must vanish at infinity.
pub fn half_line<F: Fn(f64) -> f64>(f: &F, a: f64, tol: f64) -> f64 {
    let g = |s: f64| {
        if s >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - s;
        f(a + s / d) / (d * d)
    };
    simpson(&g, 0.0, 1.0, tol)
}

/// Trapezoid rule on `n` equal steps; exponentially accurate for smooth
/// integrands that decay at both ends.
pub fn trapezoid<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * h)).sum();
    h * (0.5 * (f(a) + f(b)) + inner)
}

/// Two-sided Kolmogorov–Smirnov distance of a sample from `cdf`.
pub fn ks<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

/// 1% critical value `1.63/√n` of the one-sample KS statistic.
pub fn ks_critical(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let (mx, _) = mean_and_se(x);
    let (my, _) = mean_and_se(y);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

/// `F3` by summing 200 terms in compensated arithmetic, without any
/// cutoff or early stop.
pub fn f3_long_sum(y: f64) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for n in 1..=200 {
        let n2y2 = (n * n) as f64 * y * y;
        let term = (4.0 * n2y2 - 1.0) * (-2.0 * n2y2).exp();
        let t = sum + term;
        c += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    1.0 - 2.0 * (sum + c)
}

/// Tanh-sinh quadrature with step `h` on `t ∈ [-4, 4]`. Endpoints are never
/// sampled, so integrable endpoint singularities are harmless.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, h: f64) -> f64 {
    let half = 0.5 * (b - a);
    let steps = (4.0 / h) as i64;
    let mut sum = 0.0;
    for k in -steps..=steps {
        let t = k as f64 * h;
        let s = std::f64::consts::FRAC_PI_2 * t.sinh();
        let c = s.cosh();
        // Distance from the nearer endpoint in units of `half`.
        let gap = (-s.abs()).exp() / c;
        if gap == 0.0 {
            continue;
        }
        let x = if s < 0.0 { a + half * gap } else { b - half * gap };
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (c * c);
        sum += w * f(x);
    }
    h * half * sum
}
