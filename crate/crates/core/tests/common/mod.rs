#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// φ from its expanded form, evaluated directly.
pub fn phi_poly(n: u32, beta1: f64, tau: f64) -> f64 {
    let nf = n as f64;
    let c = (beta1 - 2.0 / nf) / 3.0;
    (tau * tau - 1.0) / (nf * tau) + c * (tau * tau * tau - 1.0) / tau
}

/// Upper root of φ by bracketing and bisection.
pub fn upper_root(n: u32, beta1: f64) -> f64 {
    let mut lo = 1.0 + 1e-9;
    let mut hi = 2.0;
    while phi_poly(n, beta1, hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi_poly(n, beta1, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn simpson_step(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn asr<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_step(fa, flm, fm, m - a);
    let right = simpson_step(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    asr(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + asr(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive bisection Simpson rule.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson_step(fa, fm, fb, b - a);
    asr(&f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Composite Simpson rule with `panels` (even) subintervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Full meridian length with `τ = 1 + a(1 − cos t)/2`, which removes both
/// inverse-square-root endpoint singularities.
pub fn meridian_length_oracle(n: u32, beta1: f64) -> f64 {
    let t_root = upper_root(n, beta1);
    let a = t_root - 1.0;
    let nf = n as f64;
    let c = (beta1 - 2.0 / nf) / 3.0;
    // φ = c (τ−1)(τ−T)(τ−α₁)/τ with α₁ = −S/T from Vieta
    let s = (1.0 + nf * beta1) / (2.0 - nf * beta1);
    let alpha1 = -s / t_root;
    let f = |t: f64| {
        let tau = 1.0 + 0.5 * a * (1.0 - t.cos());
        // dτ/√(2φ) with dτ = (a/2) sin t dt and (τ−1)(T−τ) = (a/2)² sin² t
        1.0 / (-2.0 * c * (tau - alpha1) / tau).sqrt()
    };
    simpson(f, 0.0, std::f64::consts::PI, 4000)
}

/// Admissible `(n, β₁)` pairs drawn from a seeded generator.
pub fn sample_profiles(count: usize, seed: u64) -> Vec<(u32, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n: u32 = rng.gen_range(1..=5);
            let b = if n == 1 {
                rng.gen_range(0.02..=1.0)
            } else {
                rng.gen_range(0.02..0.98 * 2.0 / n as f64)
            };
            (n, b)
        })
        .collect()
}
