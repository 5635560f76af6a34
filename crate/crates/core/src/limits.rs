//! Small-angle asymptotics as `β₁ → 0`.
//!
//! In this regime `β₂ → β₁`, `T → 1` and `φ = O(β₁²)`; the family collapses
//! onto the base while the fiberwise rescaling by `β₁⁻²` converges to a flat
//! cylinder in the variable `y = (τ − 1 − nβ₁/2)/(nβ₁²/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::geometry::{full_fiber_length, metric_at, ChartPoint};
use crate::legendre::{GaugeChoice, TauSMap};
use crate::parallel;
use crate::profile::{make_profile, EinsteinProfile, SurfaceIndex};
use crate::quad::QuadratureConfig;

/// Which root of the quadratic factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Root {
    Alpha1,
    Alpha2,
}

/// Truncated expansion of `β₂`: order 1 gives `β₁`, order 2 gives `β₁ − nβ₁²/3`.
pub fn beta2_series(n: SurfaceIndex, beta1: f64, order: u8) -> Result<f64> {
    n.check_beta1(beta1)?;
    match order {
        1 => Ok(beta1),
        2 => Ok(beta1 - n.as_f64() * beta1 * beta1 / 3.0),
        _ => Err(domain(format!("beta2 series order must be 1 or 2, got {order}"))),
    }
}

/// Second-order expansions `α₂ ≈ 1 + x + x²/3` and `α₁ ≈ −1/2 − x/4 + x²/24`
/// with `x = nβ₁`.
pub fn alpha_series(n: SurfaceIndex, beta1: f64, which: Root) -> Result<f64> {
    n.check_beta1(beta1)?;
    let x = n.as_f64() * beta1;
    Ok(match which {
        Root::Alpha2 => 1.0 + x + x * x / 3.0,
        Root::Alpha1 => -0.5 - x / 4.0 + x * x / 24.0,
    })
}

/// `β₂ − beta2_series(order)`, computed without cancellation.
pub fn beta2_remainder(n: SurfaceIndex, beta1: f64, order: u8) -> Result<f64> {
    let p = make_profile(n, beta1)?;
    let b2 = p.beta2();
    match order {
        1 => Ok(b2 - beta1),
        2 => Ok((b2 - beta1) + n.as_f64() * beta1 * beta1 / 3.0),
        _ => Err(domain(format!("beta2 series order must be 1 or 2, got {order}"))),
    }
}

/// Exact root minus its second-order expansion, from the root offsets.
pub fn alpha_remainder(n: SurfaceIndex, beta1: f64, which: Root) -> Result<f64> {
    let p = make_profile(n, beta1)?;
    let x = n.as_f64() * beta1;
    Ok(match which {
        Root::Alpha2 => p.alpha2_minus_one() - (x + x * x / 3.0),
        Root::Alpha1 => p.alpha1_plus_half() - (-x / 4.0 + x * x / 24.0),
    })
}

/// Leading small-angle profile in `y`:
/// `((2 − nβ₁)/(2n)) (n²β₁²/4) (1 − β₁²y²)`, defined for `|y| ≤ 1/β₁`.
pub fn rescaled_phi_y(n: SurfaceIndex, beta1: f64, y: f64) -> Result<f64> {
    n.check_beta1(beta1)?;
    let by = beta1 * y;
    if !(by.abs() <= 1.0) {
        return Err(domain(format!("rescaled profile needs |y| <= 1/beta1 = {}, got {y}", 1.0 / beta1)));
    }
    let nf = n.as_f64();
    Ok((2.0 - nf * beta1) / (2.0 * nf) * (nf * nf * beta1 * beta1 / 4.0) * ((1.0 - by) * (1.0 + by)))
}

/// Exact `φ` at `τ(y)`, with the offset `τ − 1 = (nβ₁/2)(1 + β₁y)` formed directly.
fn phi_of_y(p: &EinsteinProfile, y: f64) -> Result<f64> {
    let b = p.beta1();
    if !((b * y).abs() < 1.0) {
        return Err(domain(format!("y must satisfy |y| < 1/beta1 = {}, got {y}", 1.0 / b)));
    }
    let below = 0.5 * p.n().as_f64() * b * (1.0 + b * y);
    Ok(p.phi_at(&p.lower_site(below)))
}

/// Fiber metric multiplied by `β₁⁻²`, in the coordinates `(y, θ)`:
/// `coeff_y = n²β₁²/(8φ)`, `coeff_θ = 2φ/β₁²`. Both tend to `n/2`.
pub fn rescaled_fiber_metric(n: SurfaceIndex, beta1: f64, y: f64) -> Result<(f64, f64)> {
    let p = make_profile(n, beta1)?;
    rescaled_fiber_metric_of(&p, y)
}

pub fn rescaled_fiber_metric_of(p: &EinsteinProfile, y: f64) -> Result<(f64, f64)> {
    let phi = phi_of_y(p, y)?;
    let nf = p.n().as_f64();
    let b2 = p.beta1() * p.beta1();
    Ok((nf * nf * b2 / (8.0 * phi), 2.0 * phi / b2))
}

/// Distance from the metric at `pt` to the pullback of `n·ω_FS`, whose only
/// entry is `g_zz̄ = n/(1 + |z|²)²`.
pub fn tensor_deviation(p: &EinsteinProfile, m: &TauSMap, pt: &ChartPoint) -> Result<f64> {
    let g = metric_at(p, m, pt)?;
    let q = 1.0 + pt.z.norm_sqr();
    let target = p.n().as_f64() / (q * q);
    Ok(g.ww.abs().max(g.wz.norm()).max((g.zz - target).abs()))
}

/// `π√(n/2)`, the small-angle limit of the full meridian length.
pub fn fiber_length_asymptote(n: SurfaceIndex) -> f64 {
    PI * (n.as_f64() / 2.0).sqrt()
}

/// Least-squares slope of `ln|y|` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(domain("log-log fit needs at least two matching samples"));
    }
    if xs.iter().chain(ys).any(|v| *v == 0.0 || !v.is_finite()) || xs.iter().any(|v| *v < 0.0) {
        return Err(domain("log-log fit needs finite nonzero samples and positive abscissae"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

/// One row of a [`CollapseReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseEntry {
    pub beta1: f64,
    pub beta2: f64,
    pub alpha2: f64,
    pub fiber_length: f64,
    /// `fiber_length / β₁`.
    pub rescaled_length: f64,
    /// Rescaled coefficients at `y = 0`.
    pub rescaled_coeff_y: f64,
    pub rescaled_coeff_theta: f64,
    pub tensor_deviation_at_probe: f64,
    pub beta2_series_dev: f64,
    pub alpha1_series_dev: f64,
    pub alpha2_series_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollapseReport {
    pub n: SurfaceIndex,
    pub probe: ChartPoint,
    pub entries: Vec<CollapseEntry>,
}

/// Default probe `(z, w) = (0.5, 1)`.
pub fn default_probe() -> ChartPoint {
    ChartPoint {
        z: Complex64::new(0.5, 0.0),
        w: Complex64::new(1.0, 0.0),
    }
}

fn collapse_entry(n: SurfaceIndex, beta1: f64, probe: &ChartPoint, quad: &QuadratureConfig) -> Result<CollapseEntry> {
    let p = make_profile(n, beta1)?;
    let m = TauSMap::build(&p, GaugeChoice::midpoint(), *quad)?;
    let length = full_fiber_length(&p, quad)?;
    let (cy, ct) = rescaled_fiber_metric_of(&p, 0.0)?;
    Ok(CollapseEntry {
        beta1,
        beta2: p.beta2(),
        alpha2: p.alpha2(),
        fiber_length: length,
        rescaled_length: length / beta1,
        rescaled_coeff_y: cy,
        rescaled_coeff_theta: ct,
        tensor_deviation_at_probe: tensor_deviation(&p, &m, probe)?,
        beta2_series_dev: beta2_remainder(n, beta1, 2)?,
        alpha1_series_dev: alpha_remainder(n, beta1, Root::Alpha1)?,
        alpha2_series_dev: alpha_remainder(n, beta1, Root::Alpha2)?,
    })
}

/// Collapse diagnostics along a strictly decreasing sequence of angles.
/// Entries are computed concurrently and returned in input order.
pub fn collapse_report(n: SurfaceIndex, beta1_list: &[f64], quad: &QuadratureConfig) -> Result<CollapseReport> {
    collapse_report_at(n, beta1_list, &default_probe(), quad)
}

pub fn collapse_report_at(
    n: SurfaceIndex,
    beta1_list: &[f64],
    probe: &ChartPoint,
    quad: &QuadratureConfig,
) -> Result<CollapseReport> {
    if beta1_list.is_empty() {
        return Err(domain("collapse report needs at least one beta1"));
    }
    if beta1_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(domain("beta1 list must be strictly decreasing"));
    }
    for &b in beta1_list {
        n.check_beta1(b)?;
    }
    let entries = parallel::try_map_collect(beta1_list, |_, &b| collapse_entry(n, b, probe, quad))?;
    Ok(CollapseReport {
        n,
        probe: *probe,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: u32) -> SurfaceIndex {
        SurfaceIndex::new(n).unwrap()
    }

    #[test]
    fn beta2_second_order() {
        let v = beta2_series(idx(1), 0.1, 2).unwrap();
        assert!((v - 0.096_666_666_666_666_67).abs() < 1e-15);
        let exact = make_profile(idx(1), 0.1).unwrap().beta2();
        assert!((exact - v).abs() <= 0.2 * 1e-3);
        assert!(beta2_series(idx(1), 0.1, 3).is_err());
    }

    #[test]
    fn alpha2_second_order() {
        let v = alpha_series(idx(1), 0.1, Root::Alpha2).unwrap();
        let exact = make_profile(idx(1), 0.1).unwrap().alpha2();
        assert!((exact - v).abs() <= 0.3 * 1e-3);
        assert!((alpha_series(idx(1), 1e-9, Root::Alpha1).unwrap() + 0.5).abs() < 1e-8);
    }

    #[test]
    fn remainders_match_direct_difference() {
        let p = make_profile(idx(2), 0.2).unwrap();
        let direct = p.alpha1() - alpha_series(idx(2), 0.2, Root::Alpha1).unwrap();
        assert!((alpha_remainder(idx(2), 0.2, Root::Alpha1).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn rescaled_profile_shape() {
        let n = idx(2);
        let b = 0.01;
        assert_eq!(rescaled_phi_y(n, b, 100.0).unwrap(), 0.0);
        assert_eq!(rescaled_phi_y(n, b, 37.0).unwrap(), rescaled_phi_y(n, b, -37.0).unwrap());
        assert!(rescaled_phi_y(n, b, 100.5).is_err());
        let p = make_profile(n, b).unwrap();
        let exact = p.eval_phi(1.0 + b).unwrap();
        assert!((rescaled_phi_y(n, b, 0.0).unwrap() - exact).abs() <= b * b * b);
    }

    #[test]
    fn rescaled_metric_near_flat() {
        let (cy, ct) = rescaled_fiber_metric(idx(2), 1e-3, 0.0).unwrap();
        assert!((cy - 1.0).abs() < 1e-3 && (ct - 1.0).abs() < 1e-3);
        assert!((cy * ct - 1.0).abs() < 1e-14);
        let (cy, ct) = rescaled_fiber_metric(idx(1), 1e-3, 5.0).unwrap();
        assert!((cy - 0.5).abs() < 1e-3 && (ct - 0.5).abs() < 1e-3);
        assert!(rescaled_fiber_metric(idx(1), 0.1, 10.0).is_err());
    }

    #[test]
    fn slope_fit() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| -3.0 * x.powi(3)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn report_order_and_validation() {
        let q = QuadratureConfig::default();
        let r = collapse_report(idx(1), &[0.2, 0.1, 0.05], &q).unwrap();
        let b: Vec<f64> = r.entries.iter().map(|e| e.beta1).collect();
        assert_eq!(b, vec![0.2, 0.1, 0.05]);
        assert!(collapse_report(idx(1), &[0.1, 0.2], &q).is_err());
        assert!(collapse_report(idx(1), &[], &q).is_err());
    }
}
