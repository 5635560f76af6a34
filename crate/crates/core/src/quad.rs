//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Integrands handed to this module are expected to be smooth on the closed
//! interval: callers remove endpoint singularities by substitution first
//! (logarithmic ladders for the `1/φ` poles, square-root maps for the
//! `1/√φ` branch points).

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Relative tolerance on the integral.
    pub tolerance: f64,
    /// Absolute floor below which the error is always accepted.
    pub abs_floor: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            abs_floor: 1e-300,
            max_intervals: 4000,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tolerance(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(crate::error::domain(format!(
                "quadrature tolerance must be positive and finite, got {tolerance}"
            )));
        }
        Ok(Self {
            tolerance,
            ..Self::default()
        })
    }
}

/// Integral value with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > err {
            err = min_err;
        }
    }
    err
}

/// One 15-point Kronrod panel on `[a, b]`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_g = f_center * WG[3];
    let mut res_k = f_center * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let error = rescale_error((res_k - res_g) * half, res_abs, res_asc);
    Estimate { value, error }
}

struct Panel {
    a: f64,
    b: f64,
    est: Estimate,
}

/// Globally adaptive integration of `f` over `[a, b]`.
///
/// Orientation is respected: `integrate(f, b, a) == -integrate(f, a, b)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let first = gk15(&f, a, b);
    let mut panels = vec![Panel { a, b, est: first }];
    let mut value = first.value;
    let mut error = first.error;

    loop {
        let target = (cfg.tolerance * value.abs()).max(cfg.abs_floor);
        if error <= target || error <= 50.0 * f64::EPSILON * value.abs() {
            return Ok(Estimate { value, error });
        }
        if panels.len() >= cfg.max_intervals {
            return Err(Error::Quadrature {
                error,
                tolerance: target,
                intervals: panels.len(),
            });
        }

        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.est.error.total_cmp(&y.1.est.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { a: pa, b: pb, est } = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        if mid == pa || mid == pb {
            // interval can no longer be split in floating point
            return Err(Error::Quadrature {
                error,
                tolerance: target,
                intervals: panels.len() + 1,
            });
        }
        let left = gk15(&f, pa, mid);
        let right = gk15(&f, mid, pb);
        value += left.value + right.value - est.value;
        error += left.error + right.error - est.error;
        panels.push(Panel {
            a: pa,
            b: mid,
            est: left,
        });
        panels.push(Panel {
            a: mid,
            b: pb,
            est: right,
        });
        // keep the running totals from drifting
        if panels.len() % 64 == 0 {
            value = panels.iter().map(|p| p.est.value).sum();
            error = panels.iter().map(|p| p.est.error).sum();
        }
    }
}

/// Trapezoidal sum of `n` equispaced samples of a `period`-periodic integrand.
///
/// Spectrally accurate for smooth periodic functions.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(f: F, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    (0..n).map(|k| f(k as f64 * h)).sum::<f64>() * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact_on_one_panel() {
        let est = gk15(&|x: f64| x.powi(5) - 3.0 * x * x + 1.0, -1.0, 2.0);
        // ∫ = [x^6/6 - x^3 + x] = (64/6 - 8 + 2) - (1/6 + 1 - 1)
        assert_relative_eq!(est.value, 64.0 / 6.0 - 6.0 - 1.0 / 6.0, epsilon = 1e-13);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let cfg = QuadratureConfig::default();
        let est = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, &cfg).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert_relative_eq!(est.value, exact, max_relative = 1e-11);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let cfg = QuadratureConfig::default();
        let fwd = integrate(f64::exp, 0.0, 1.0, &cfg).unwrap().value;
        let bwd = integrate(f64::exp, 1.0, 0.0, &cfg).unwrap().value;
        assert_relative_eq!(fwd, -bwd, epsilon = 1e-15);
        assert_relative_eq!(fwd, std::f64::consts::E - 1.0, epsilon = 1e-14);
    }

    #[test]
    fn budget_exhaustion_reports_error() {
        let cfg = QuadratureConfig {
            tolerance: 1e-14,
            abs_floor: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x: f64| (1.0 / x).sin(), 1e-3, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn trapezoid_on_periodic_is_spectral() {
        let v = periodic_trapezoid(|t| (t.cos()).exp(), std::f64::consts::TAU, 32);
        // 2π I0(1)
        assert_relative_eq!(v, std::f64::consts::TAU * 1.266_065_877_752_008_4, epsilon = 1e-13);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(QuadratureConfig::with_tolerance(0.0).is_err());
        assert!(QuadratureConfig::with_tolerance(f64::NAN).is_err());
    }
}
