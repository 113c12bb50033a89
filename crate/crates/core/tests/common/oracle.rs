//! Reference values computed without the library: closed-form windows for
//! the two model weight pairs and plain nested Simpson quadrature.

#![allow(dead_code)]

/// `a(t)/t` and `b(t)/t` for `v0 = 1`, `v1 = x`, `p = 2`.
pub fn linear_ratios() -> (f64, f64) {
    let r5 = 5f64.sqrt();
    ((5.0 - r5) / 4.0, (5.0 + r5) / 4.0)
}

/// `η_1 / η_0` for the same pair.
pub fn linear_rho() -> f64 {
    (5.0 + 5f64.sqrt()) / 5.0
}

/// `V1(x)` for `v1 = x`, `p = 2`: `∫_{αx}^{βx} y^{-2} dy`.
pub fn linear_v1(x: f64) -> f64 {
    let (a, b) = linear_ratios();
    (1.0 / a - 1.0 / b) / x
}

/// The window at `t` for `v0 = 1/x`, `v1 = 1`, `p = 2`: half-width `t/√5`.
pub fn reciprocal_window(t: f64) -> (f64, f64) {
    let m = t / 5f64.sqrt();
    (t - m, t + m)
}

pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

/// Composite Simpson on `[a, b]` with `n` (even) intervals.
pub fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    s * h / 3.0
}

/// Simpson over `[a, b]` split at every point of `cuts` inside it.
pub fn split_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, cuts: &[f64], n: usize) -> f64 {
    let mut pts = vec![a];
    pts.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
    pts.push(b);
    pts.sort_by(|x, y| x.total_cmp(y));
    pts.windows(2).map(|w| simpson(f, w[0], w[1], n)).sum()
}

/// `𝖦(g)` for `v0 = 1`, `v1 = x`, `p = 2` by nested Simpson; `g` vanishes
/// outside `[lo, hi]` and is smooth between `kinks`.
pub fn linear_strong(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, kinks: &[f64], n: usize) -> f64 {
    let (alpha, _) = linear_ratios();
    let rho = linear_rho();
    let outer_cuts: Vec<f64> = kinks.iter().flat_map(|k| [*k, k / rho]).collect();
    let outer = |t: f64| {
        let inner = split_simpson(&|x| g(x).abs(), t, t * rho, kinks, n);
        inner * inner / (t * t)
    };
    split_simpson(&outer, alpha * lo, hi, &outer_cuts, n).sqrt()
}

/// `(𝔾(g), 𝒢(g))` for the same pair by nested Simpson.
pub fn linear_weak(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, kinks: &[f64], n: usize) -> (f64, f64) {
    let (alpha, _) = linear_ratios();
    let rho = linear_rho();
    let outer_cuts: Vec<f64> = kinks.iter().flat_map(|k| [*k, k / rho]).collect();
    let frak = |t: f64| {
        let inner = split_simpson(&|x| g(x) / linear_v1(x) * (1.0 / (alpha * x) - 1.0 / t), t, t * rho, kinks, n);
        inner * inner / (t * t)
    };
    let cal = |t: f64| {
        let inner = split_simpson(&|x| g(x) / linear_v1(x), t, t * rho, kinks, n);
        let v = linear_v1(t) * inner;
        v * v / (t * t)
    };
    (
        split_simpson(&frak, alpha * lo, hi, &outer_cuts, n).sqrt(),
        split_simpson(&cal, alpha * lo, hi, &outer_cuts, n).sqrt(),
    )
}

/// Exact `𝖦(χ[1,2])` for the linear pair.
pub fn linear_strong_indicator() -> f64 {
    let rho = linear_rho();
    let alpha = 1.0 / rho;
    let prim = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| f(b) - f(a);
    let left = prim(&|t| rho * rho * t - 2.0 * rho * t.ln() - 1.0 / t, alpha, 1.0);
    let middle = (rho - 1.0).powi(2) * (2.0 * alpha - 1.0);
    let right = prim(&|t| t - 4.0 / t - 4.0 * t.ln(), 2.0 * alpha, 2.0);
    (left + middle + right).sqrt()
}
