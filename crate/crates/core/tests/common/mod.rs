//! Numerical reference for the small-argument CDF of the cascaded IRS gain.
//!
//! Builds the exact density of one `|G_k||g_k|` product from the modified
//! Bessel function, convolves it `K` times on a uniform grid (and once more
//! with the direct-link Nakagami density when requested), then integrates.
#![allow(dead_code)]

/// Grid step and upper limit of every convolution.
pub const STEP: f64 = 1e-5;
pub const Q_MAX: f64 = 0.05;

fn factorial_gamma(x: f64) -> f64 {
    assert!(
        x >= 1.0 && x.fract() == 0.0,
        "oracle supports integer shape parameters only"
    );
    (1..x as u64).map(|k| k as f64).product()
}

/// `K_nu(z)` as `int_0^inf exp(-z cosh t) cosh(nu t) dt`, trapezoid rule.
pub fn bessel_k(nu: f64, z: f64) -> f64 {
    assert!(z > 0.0);
    let h = 1e-3;
    let f = |t: f64| (-z * t.cosh()).exp() * (nu * t).cosh();
    let mut sum = 0.5 * f(0.0);
    let mut t = h;
    loop {
        let v = f(t);
        sum += v;
        if z * t.cosh() - nu.abs() * t > 750.0 {
            break;
        }
        t += h;
    }
    sum * h
}

/// Density of `X Y` with `X^2 ~ Gamma(m1, 1/m1)`, `Y^2 ~ Gamma(m2, 1/m2)`.
pub fn product_density(m1: f64, m2: f64, q: f64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    let c = 4.0 * (m1 * m2).powf(0.5 * (m1 + m2)) / (factorial_gamma(m1) * factorial_gamma(m2));
    c * q.powf(m1 + m2 - 1.0) * bessel_k(m1 - m2, 2.0 * (m1 * m2).sqrt() * q)
}

/// Nakagami-m magnitude density with unit power.
pub fn nakagami_density(m: f64, x: f64) -> f64 {
    2.0 * m.powf(m) / factorial_gamma(m) * x.powf(2.0 * m - 1.0) * (-m * x * x).exp()
}

fn grid_len() -> usize {
    (Q_MAX / STEP).round() as usize + 1
}

fn sample(f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..grid_len()).map(|i| f(i as f64 * STEP)).collect()
}

/// Trapezoid convolution of two densities sampled on the same grid.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().min(b.len());
    (0..n)
        .map(|j| {
            if j == 0 {
                return 0.0;
            }
            let inner: f64 = (1..j).map(|i| a[i] * b[j - i]).sum();
            (inner + 0.5 * (a[0] * b[j] + a[j] * b[0])) * STEP
        })
        .collect()
}

/// Cumulative trapezoid integral of a sampled density.
pub fn integrate(density: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(density.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in density.windows(2) {
        acc += 0.5 * (w[0] + w[1]) * STEP;
        out.push(acc);
    }
    out
}

/// CDF of `sum_k |G_k||g_k|` (plus `|h|` when `m_h` is given) on the grid.
pub fn cascaded_cdf(m_big_g: f64, m_g: f64, m_h: Option<f64>, elements: usize) -> Vec<f64> {
    assert!(elements >= 1);
    let single = sample(|q| product_density(m_big_g, m_g, q));
    let mut density = single.clone();
    for _ in 1..elements {
        density = convolve(&density, &single);
    }
    if let Some(m) = m_h {
        density = convolve(&density, &sample(|x| nakagami_density(m, x)));
    }
    integrate(&density)
}

/// Value of a grid CDF at `q`.
pub fn cdf_at(cdf: &[f64], q: f64) -> f64 {
    cdf[(q / STEP).round() as usize]
}

/// Least-squares slope of `ln F` against `ln q` for `q` in `[lo, hi]`.
pub fn log_log_exponent(cdf: &[f64], lo: f64, hi: f64) -> f64 {
    let pts: Vec<(f64, f64)> = (0..=40)
        .map(|i| {
            let q = lo * (hi / lo).powf(i as f64 / 40.0);
            (q.ln(), cdf_at(cdf, q).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
