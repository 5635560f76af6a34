//! Shape-preserving piecewise cubic Hermite interpolation.

use crate::error::{domain, Result};

/// Monotone piecewise cubic through strictly increasing data.
///
/// Node slopes are supplied by the caller (typically exact derivatives) and
/// then limited with the Fritsch–Carlson conditions so that the interpolant
/// is monotone on every cell.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant. `xs` must be strictly increasing and `ys`
    /// strictly monotone (either direction).
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, mut slopes: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n || slopes.len() != n {
            return Err(domain("monotone cubic needs at least two nodes and matching lengths"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(domain("interpolation abscissae must be strictly increasing"));
        }
        let sign = (ys[1] - ys[0]).signum();
        if sign == 0.0 || ys.windows(2).any(|w| (w[1] - w[0]).signum() != sign) {
            return Err(domain("interpolation ordinates must be strictly monotone"));
        }

        let secants: Vec<f64> = (0..n - 1)
            .map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]))
            .collect();
        for s in slopes.iter_mut() {
            if s.signum() != sign {
                *s = 0.0;
            }
        }
        for (k, &delta) in secants.iter().enumerate() {
            let a = slopes[k] / delta;
            let b = slopes[k + 1] / delta;
            let r2 = a * a + b * b;
            if r2 > 9.0 {
                let t = 3.0 / r2.sqrt();
                slopes[k] = t * a * delta;
                slopes[k + 1] = t * b * delta;
            }
        }
        Ok(Self { xs, ys, slopes })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// Index `k` such that `xs[k] <= x <= xs[k+1]`, clamped to the end cells.
    pub fn cell(&self, x: f64) -> usize {
        let k = self.xs.partition_point(|&v| v <= x);
        k.saturating_sub(1).min(self.xs.len() - 2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.cell(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[k] + h10 * h * self.slopes[k] + h01 * self.ys[k + 1] + h11 * h * self.slopes[k + 1]
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let k = self.cell(x);
        let h = self.xs[k + 1] - self.xs[k];
        let t = (x - self.xs[k]) / h;
        let t2 = t * t;
        let d00 = (6.0 * t2 - 6.0 * t) / h;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = (-6.0 * t2 + 6.0 * t) / h;
        let d11 = 3.0 * t2 - 2.0 * t;
        d00 * self.ys[k] + d10 * self.slopes[k] + d01 * self.ys[k + 1] + d11 * self.slopes[k + 1]
    }
}
