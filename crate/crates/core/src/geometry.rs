//! Metric tensor in the affine chart, finite-difference Ricci curvature, and
//! fiber integrals.
//!
//! On the chart `Z₂ = 1` with base coordinate `z` and fiber coordinate `w`,
//! the Kähler potential depends only on `s = ln|w|² + n ln(1 + |z|²)`, and
//! with `τ = f′(s)`, `φ = f″(s)`:
//!
//! ```text
//! g_ww̄ = φ/|w|²
//! g_wz̄ = nφz / (w(1 + |z|²))
//! g_zz̄ = (nτ + n²φ|z|²) / (1 + |z|²)²
//! ```

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::legendre::{End, TauSMap};
use crate::parallel;
use crate::profile::{EinsteinProfile, Site};
use crate::quad::{integrate, periodic_trapezoid, QuadratureConfig};

/// Point of the chart `(z, w)` with `w ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub z: Complex64,
    pub w: Complex64,
}

impl ChartPoint {
    pub fn new(z: Complex64, w: Complex64) -> Result<Self> {
        if !(w.norm_sqr() > 0.0) || !z.is_finite() || !w.is_finite() {
            return Err(domain(format!("chart point needs finite z and w != 0, got z = {z}, w = {w}")));
        }
        Ok(Self { z, w })
    }

    /// Point with real positive `w` chosen so that the log-fiber coordinate is `s`.
    pub fn on_level(n: u32, z: Complex64, s: f64) -> Result<Self> {
        let w2 = (s - n as f64 * (1.0 + z.norm_sqr()).ln()).exp();
        Self::new(z, Complex64::new(w2.sqrt(), 0.0))
    }

    pub fn s(&self, n: u32) -> f64 {
        self.w.norm_sqr().ln() + n as f64 * (1.0 + self.z.norm_sqr()).ln()
    }
}

/// 2×2 Hermitian matrix in the coordinates `(w, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianForm2 {
    pub ww: f64,
    pub wz: Complex64,
    pub zz: f64,
}

impl HermitianForm2 {
    pub fn det(&self) -> f64 {
        self.ww * self.zz - self.wz.norm_sqr()
    }

    /// Eigenvalues in increasing order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.ww + self.zz);
        let half = 0.5 * (self.ww - self.zz);
        let r = half.hypot(self.wz.norm());
        let hi = mean + r;
        let lo = if hi != 0.0 { self.det() / hi } else { mean - r };
        (lo, hi)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            ww: k * self.ww,
            wz: self.wz * k,
            zz: k * self.zz,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            ww: self.ww - other.ww,
            wz: self.wz - other.wz,
            zz: self.zz - other.zz,
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.ww.abs().max(self.wz.norm()).max(self.zz.abs())
    }
}

/// Metric restricted to a fiber, `dτ²/(2φ) + 2φ dθ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberMetricSample {
    pub tau: f64,
    pub radial_coeff: f64,
    pub angular_coeff: f64,
}

pub fn fiber_metric_sample(p: &EinsteinProfile, tau: f64) -> Result<FiberMetricSample> {
    let site = p.site(tau)?;
    let phi = p.phi_at(&site);
    if !(phi > 0.0) {
        return Err(domain(format!("fiber metric sample needs tau strictly inside (1, {}), got {tau}", p.alpha2())));
    }
    Ok(FiberMetricSample {
        tau,
        radial_coeff: 0.5 / phi,
        angular_coeff: 2.0 * phi,
    })
}

fn assemble(n: f64, site: &Site, phi: f64, pt: &ChartPoint) -> HermitianForm2 {
    let z2 = pt.z.norm_sqr();
    let q = 1.0 + z2;
    HermitianForm2 {
        ww: phi / pt.w.norm_sqr(),
        wz: pt.z * (n * phi) / (pt.w * q),
        zz: (n * site.tau + n * n * phi * z2) / (q * q),
    }
}

pub fn metric_at(p: &EinsteinProfile, m: &TauSMap, pt: &ChartPoint) -> Result<HermitianForm2> {
    let s = pt.s(p.n().get());
    let site = m.site_at_s(s)?;
    let g = assemble(p.n().as_f64(), &site, p.phi_at(&site), pt);
    let (lo, hi) = g.eigenvalues();
    if !(lo > 0.0) {
        return Err(Error::Positivity { s, lo, hi });
    }
    Ok(g)
}

/// `ln det g` at `w = e^{ρ+iθ}`, `z = x + iy`.
fn log_det(p: &EinsteinProfile, m: &TauSMap, rho: f64, theta: f64, x: f64, y: f64) -> Result<f64> {
    let pt = ChartPoint {
        z: Complex64::new(x, y),
        w: Complex64::from_polar(rho.exp(), theta),
    };
    let site = m.site_at_s(pt.s(p.n().get()))?;
    Ok(assemble(p.n().as_f64(), &site, p.phi_at(&site), &pt).det().ln())
}

/// Complex Hessian `−∂∂̄ ln det g` from central differences with step `h`.
fn ricci_single(p: &EinsteinProfile, m: &TauSMap, pt: &ChartPoint, h: f64) -> Result<HermitianForm2> {
    let base = [pt.w.norm().ln(), pt.w.arg(), pt.z.re, pt.z.im];
    let f = |d: [f64; 4]| {
        log_det(
            p,
            m,
            base[0] + d[0],
            base[1] + d[1],
            base[2] + d[2],
            base[3] + d[3],
        )
    };
    let unit = |i: usize, v: f64| {
        let mut d = [0.0; 4];
        d[i] = v;
        d
    };
    let f0 = f([0.0; 4])?;
    let mut second = [0.0; 4];
    for (i, out) in second.iter_mut().enumerate() {
        *out = (f(unit(i, h))? - 2.0 * f0 + f(unit(i, -h))?) / (h * h);
    }
    let mixed = |i: usize, j: usize| -> Result<f64> {
        let at = |a: f64, b: f64| {
            let mut d = [0.0; 4];
            d[i] = a;
            d[j] = b;
            f(d)
        };
        Ok((at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h))
    };
    let (f_rx, f_ry, f_tx, f_ty) = (mixed(0, 2)?, mixed(0, 3)?, mixed(1, 2)?, mixed(1, 3)?);

    let w = pt.w;
    let ddbar_w = (second[0] + second[1]) / (4.0 * w.norm_sqr());
    let ddbar_z = (second[2] + second[3]) / 4.0;
    let ddbar_wz = Complex64::new(f_rx + f_ty, f_ry - f_tx) / (w * 4.0);
    Ok(HermitianForm2 {
        ww: -ddbar_w,
        wz: -ddbar_wz,
        zz: -ddbar_z,
    })
}

/// Ricci form by second-order central differences at a single step `h`.
pub fn ricci_fd_single_step(p: &EinsteinProfile, m: &TauSMap, pt: &ChartPoint, step: f64) -> Result<HermitianForm2> {
    check_step(step)?;
    ricci_single(p, m, pt, step)
}

/// Ricci form `−i∂∂̄ ln det g` with Richardson extrapolation over `(h, h/2)`.
///
/// Differences are taken in `(ln|w|, arg w, Re z, Im z)`.
pub fn ricci_fd(p: &EinsteinProfile, m: &TauSMap, pt: &ChartPoint, step: f64) -> Result<HermitianForm2> {
    check_step(step)?;
    let coarse = ricci_single(p, m, pt, step)?;
    let fine = ricci_single(p, m, pt, 0.5 * step)?;
    Ok(fine.scale(4.0).sub(&coarse).scale(1.0 / 3.0))
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("finite-difference step must be positive, got {step}")))
    }
}

fn residual_at(p: &EinsteinProfile, m: &TauSMap, pt: &ChartPoint, step: f64, richardson: bool) -> Result<f64> {
    let ric = if richardson {
        ricci_fd(p, m, pt, step)?
    } else {
        ricci_fd_single_step(p, m, pt, step)?
    };
    let g = metric_at(p, m, pt)?;
    Ok(ric.sub(&g.scale(p.lambda())).max_abs())
}

fn residual_over(p: &EinsteinProfile, m: &TauSMap, grid: &[ChartPoint], step: f64, richardson: bool) -> Result<f64> {
    check_step(step)?;
    if grid.is_empty() {
        return Err(domain("einstein residual needs at least one grid point"));
    }
    parallel::try_max(grid, |i, pt| {
        residual_at(p, m, pt, step, richardson).map_err(|e| Error::AtPoint {
            index: i,
            z: pt.z.to_string(),
            w: pt.w.to_string(),
            source: Box::new(e),
        })
    })
}

/// `max ‖Ric − λg‖` over `grid` with `λ = 2/n − β₁`.
pub fn einstein_residual(p: &EinsteinProfile, m: &TauSMap, grid: &[ChartPoint], step: f64) -> Result<f64> {
    residual_over(p, m, grid, step, true)
}

/// Same as [`einstein_residual`] without the Richardson step.
pub fn einstein_residual_single_step(
    p: &EinsteinProfile,
    m: &TauSMap,
    grid: &[ChartPoint],
    step: f64,
) -> Result<f64> {
    residual_over(p, m, grid, step, false)
}

/// `radial × angular × levels` grid: `|z|` evenly spaced in `[0.2, 1.8]`,
/// `arg z = 2πk/angular`, and `w` real with the given `s` levels.
pub fn chart_grid(n: u32, radial: usize, angular: usize, levels: &[f64]) -> Result<Vec<ChartPoint>> {
    if radial == 0 || angular == 0 || levels.is_empty() {
        return Err(domain("grid sizes must be positive"));
    }
    let mut out = Vec::with_capacity(radial * angular * levels.len());
    for i in 0..radial {
        let r = if radial == 1 {
            1.0
        } else {
            0.2 + 1.6 * i as f64 / (radial - 1) as f64
        };
        for k in 0..angular {
            let z = Complex64::from_polar(r, TAU * k as f64 / angular as f64);
            for &s in levels {
                out.push(ChartPoint::on_level(n, z, s)?);
            }
        }
    }
    Ok(out)
}

/// The 5 × 5 × 3 grid with `s ∈ {−2, 0, 2}`.
pub fn standard_grid(n: u32) -> Vec<ChartPoint> {
    chart_grid(n, 5, 5, &[-2.0, 0.0, 2.0]).expect("fixed grid is valid")
}

/// `∫ 2/√(2 r(t²)) dt` over `t ∈ [√lo, √hi]`, where `r = φ/offset` on the
/// half next to `end`. This is `∫ dτ/√(2φ)` between offsets `lo` and `hi`.
fn half_length(p: &EinsteinProfile, end: End, lo: f64, hi: f64, quad: &QuadratureConfig) -> Result<f64> {
    let g = |t: f64| {
        let off = t * t;
        let r = match end {
            End::Lower => p.phi_over_below(off),
            End::Upper => p.phi_over_above(off),
        };
        2.0 / (2.0 * r).sqrt()
    };
    Ok(integrate(g, lo.sqrt(), hi.sqrt(), quad)?.value)
}

/// Length `∫_{τa}^{τb} dτ/√(2φ)` of a fiber meridian segment; both endpoints
/// may sit on the divisors.
pub fn fiber_length(p: &EinsteinProfile, tau_a: f64, tau_b: f64, quad: &QuadratureConfig) -> Result<f64> {
    if !(tau_a <= tau_b) {
        return Err(domain(format!("fiber length needs tau_a <= tau_b, got {tau_a} > {tau_b}")));
    }
    let a = p.site(tau_a)?;
    let b = p.site(tau_b)?;
    fiber_length_between(p, &a, &b, quad)
}

/// [`fiber_length`] between two sites given by their endpoint offsets.
pub fn fiber_length_between(p: &EinsteinProfile, a: &Site, b: &Site, quad: &QuadratureConfig) -> Result<f64> {
    if a.tau == b.tau && a.below == b.below {
        return Ok(0.0);
    }
    let half = 0.5 * p.alpha2_minus_one();
    let lower = |lo: f64, hi: f64| half_length(p, End::Lower, lo, hi, quad);
    let upper = |lo: f64, hi: f64| half_length(p, End::Upper, lo, hi, quad);
    let a_low = a.below <= half;
    let b_low = b.below <= half;
    match (a_low, b_low) {
        (true, true) => lower(a.below, b.below),
        (false, false) => upper(b.above, a.above),
        (true, false) => Ok(lower(a.below, half)? + upper(b.above, half)?),
        (false, true) => Err(domain("fiber length endpoints out of order")),
    }
}

/// Full meridian length from `Zₙ` to `Z₋ₙ`.
pub fn full_fiber_length(p: &EinsteinProfile, quad: &QuadratureConfig) -> Result<f64> {
    let half = 0.5 * p.alpha2_minus_one();
    Ok(half_length(p, End::Lower, 0.0, half, quad)? + half_length(p, End::Upper, 0.0, half, quad)?)
}

/// Circumference over distance-to-divisor, `2π√(2φ(τ)) / ∫_end^τ dt/√(2φ)`.
/// Tends to `2πβ₁` at the lower end and `2πβ₂` at the upper end.
pub fn cone_angle_probe(p: &EinsteinProfile, end: End, tau_probe: f64, quad: &QuadratureConfig) -> Result<f64> {
    let site = p.site(tau_probe)?;
    let offset = match end {
        End::Lower => site.below,
        End::Upper => site.above,
    };
    cone_angle_probe_at_offset(p, end, offset, quad)
}

/// [`cone_angle_probe`] with the probe given by its distance to the end in τ.
pub fn cone_angle_probe_at_offset(p: &EinsteinProfile, end: End, offset: f64, quad: &QuadratureConfig) -> Result<f64> {
    let a = p.alpha2_minus_one();
    if !(offset > 0.0 && offset < a) {
        return Err(domain(format!("cone probe offset must lie in (0, {a}), got {offset}")));
    }
    let site = match end {
        End::Lower => p.lower_site(offset),
        End::Upper => p.upper_site(offset),
    };
    let phi = p.phi_at(&site);
    let radius = half_length(p, end, 0.0, offset, quad)?;
    Ok(TAU * (2.0 * phi).sqrt() / radius)
}

/// Area of a fiber, `2π(T − 1)`.
pub fn fiber_volume(p: &EinsteinProfile) -> f64 {
    TAU * p.alpha2_minus_one()
}

/// Fiber area by quadrature of `√(radial · angular) dτ dθ`.
pub fn fiber_volume_quadrature(p: &EinsteinProfile, quad: &QuadratureConfig) -> Result<f64> {
    let sample_area = |tau: f64| -> f64 {
        match fiber_metric_sample(p, tau) {
            Ok(s) => periodic_trapezoid(|_| (s.radial_coeff * s.angular_coeff).sqrt(), TAU, 16),
            Err(_) => TAU,
        }
    };
    let half = 0.5 * p.alpha2_minus_one();
    let lo = integrate(|xi| sample_area(p.lower_site(xi).tau), 0.0, half, quad)?.value;
    let hi = integrate(|eta| sample_area(p.upper_site(eta).tau), 0.0, half, quad)?.value;
    Ok(lo + hi)
}

/// `∫ ω_FS` over the base, by quadrature in polar coordinates on `[0, ∞)`.
pub fn fubini_study_area(quad: &QuadratureConfig) -> Result<f64> {
    // i dz∧dz̄ = 2 dx dy; r = t/(1 − t)
    let f = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - t;
        let r = t / u;
        let q = 1.0 + r * r;
        2.0 * TAU * r / (q * q) / (u * u)
    };
    Ok(integrate(f, 0.0, 1.0, quad)?.value)
}

/// Total volume `∫ η ∧ η = 2 (∫ω_FS)(2π ∫₁ᵀ nτ dτ)`.
pub fn total_volume(p: &EinsteinProfile, quad: &QuadratureConfig) -> Result<f64> {
    let n = p.n().as_f64();
    let base = fubini_study_area(quad)?;
    let fiber = integrate(|tau| n * tau, 1.0, p.alpha2(), quad)?.value;
    Ok(2.0 * base * TAU * fiber)
}

/// `4π² n (T² − 1)`.
pub fn total_volume_closed_form(p: &EinsteinProfile) -> f64 {
    let a = p.alpha2_minus_one();
    4.0 * PI * PI * p.n().as_f64() * a * (a + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::GaugeChoice;
    use crate::profile::{make_profile, SurfaceIndex};
    use approx::assert_relative_eq;

    fn setup(n: u32, b: f64) -> (EinsteinProfile, TauSMap) {
        let p = make_profile(SurfaceIndex::new(n).unwrap(), b).unwrap();
        let m = TauSMap::build(&p, GaugeChoice::midpoint(), QuadratureConfig::default()).unwrap();
        (p, m)
    }

    #[test]
    fn metric_at_origin_of_base() {
        let (p, m) = setup(2, 0.5);
        let pt = ChartPoint::new(Complex64::new(0.0, 0.0), Complex64::new(0.8, 0.0)).unwrap();
        let g = metric_at(&p, &m, &pt).unwrap();
        let tau = m.tau_of_s(pt.s(2)).unwrap();
        assert_eq!(g.wz, Complex64::new(0.0, 0.0));
        assert_relative_eq!(g.zz, 2.0 * tau, max_relative = 1e-15);
        assert_relative_eq!(g.ww, p.eval_phi(tau).unwrap() / 0.64, max_relative = 1e-12);
    }

    #[test]
    fn determinant_identity() {
        let (p, m) = setup(1, 1.0);
        let pt = ChartPoint::new(Complex64::new(0.3, 0.4), Complex64::new(0.9, 0.0)).unwrap();
        let g = metric_at(&p, &m, &pt).unwrap();
        let site = m.site_at_s(pt.s(1)).unwrap();
        let expected = site.tau * p.phi_at(&site) / (0.81 * 1.25 * 1.25);
        assert_relative_eq!(g.det(), expected, max_relative = 1e-12);
    }

    #[test]
    fn eigenvalues_positive_and_ordered() {
        let (p, m) = setup(3, 0.4);
        for pt in standard_grid(3) {
            let (lo, hi) = metric_at(&p, &m, &pt).unwrap().eigenvalues();
            assert!(lo > 0.0 && lo <= hi);
        }
    }

    #[test]
    fn einstein_at_single_points() {
        let (p, m) = setup(1, 1.0);
        let pt = ChartPoint::new(Complex64::new(0.3, 0.1), Complex64::new(0.7, 0.0)).unwrap();
        let r = ricci_fd(&p, &m, &pt, 1e-3).unwrap();
        let g = metric_at(&p, &m, &pt).unwrap();
        assert!(r.sub(&g.scale(p.lambda())).max_abs() <= 1e-5);

        let (p, m) = setup(2, 0.6);
        let pt = ChartPoint::new(Complex64::new(0.5, 0.0), Complex64::from_polar(1.2, 0.3)).unwrap();
        let r = ricci_fd(&p, &m, &pt, 1e-3).unwrap();
        let g = metric_at(&p, &m, &pt).unwrap();
        assert!(r.sub(&g.scale(p.lambda())).max_abs() <= 1e-5);
    }

    #[test]
    fn stencil_leaving_hull_is_reported() {
        let (p, m) = setup(1, 1.0);
        let (_, hi) = m.s_range();
        let pt = ChartPoint::on_level(1, Complex64::new(0.1, 0.0), hi - 1e-4).unwrap();
        let err = einstein_residual(&p, &m, &[pt], 1e-3).unwrap_err();
        assert!(matches!(err, Error::AtPoint { index: 0, .. }));
    }

    #[test]
    fn fiber_length_edge_cases() {
        let (p, _) = setup(1, 0.7);
        let q = QuadratureConfig::default();
        assert_eq!(fiber_length(&p, 1.4, 1.4, &q).unwrap(), 0.0);
        assert!(fiber_length(&p, 1.5, 1.4, &q).is_err());
        let full = fiber_length(&p, 1.0, p.alpha2(), &q).unwrap();
        assert_relative_eq!(full, full_fiber_length(&p, &q).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn grid_shape() {
        let g = standard_grid(2);
        assert_eq!(g.len(), 75);
        for (k, pt) in g.iter().enumerate() {
            let s = [-2.0, 0.0, 2.0][k % 3];
            assert!((pt.s(2) - s).abs() < 1e-13);
        }
    }

    #[test]
    fn fubini_study_area_is_two_pi() {
        assert_relative_eq!(fubini_study_area(&QuadratureConfig::default()).unwrap(), TAU, max_relative = 1e-12);
    }
}
