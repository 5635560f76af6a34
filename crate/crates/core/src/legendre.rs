//! Legendre correspondence between the momentum τ and the log-fiber coordinate `s`.
//!
//! Since `dτ/ds = φ(τ)`, the coordinate is `s(τ) = ∫_{τ₀}^{τ} dt/φ(t)`, which
//! diverges logarithmically at both roots of φ. Each half of `(1, T)` is
//! therefore parametrized by the log of the distance to its endpoint,
//! `ℓ = ln(τ − 1)` or `ℓ = ln(T − τ)`. In that variable `ds/dℓ` is smooth and
//! tends to `1/β₁` (resp. `−1/β₂`), so the knot ladder with ratio ½ in the
//! offset becomes a uniform grid in `ℓ` and Gauss–Kronrod panels converge
//! to round-off on every rung.

use crate::error::{domain, Error, Result};
use crate::interp::MonotoneCubic;
use crate::profile::{EinsteinProfile, Site};
use crate::quad::{integrate, QuadratureConfig};

/// Default half-width of the covered `s` range.
pub const DEFAULT_S_HULL: f64 = 40.0;

// Offsets are never taken below this; with it the hull reaches |s| = 40
// for every admissible β₁ ≤ 1.
const MIN_LOG_OFFSET: f64 = -640.0;
const MAX_KNOTS_PER_HALF: usize = 5000;

/// Which divisor an asymptotic query refers to: `Lower` is `Zₙ` (τ → 1,
/// s → −∞), `Upper` is `Z₋ₙ` (τ → T, s → +∞).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Lower,
    Upper,
}

/// Base point where `s = 0`. The coordinate `s` is only defined up to a
/// translation (rescaling `w`); the gauge pins it.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GaugeChoice {
    tau0: Option<f64>,
}

impl GaugeChoice {
    /// `τ₀ = (1 + T)/2`.
    pub fn midpoint() -> Self {
        Self { tau0: None }
    }

    pub fn at(tau0: f64) -> Self {
        Self { tau0: Some(tau0) }
    }

    pub fn tau0(&self, p: &EinsteinProfile) -> Result<f64> {
        match self.tau0 {
            None => Ok(p.midpoint()),
            Some(t) if t > 1.0 && t < p.alpha2() => Ok(t),
            Some(t) => Err(domain(format!(
                "gauge base point tau0 = {t} must lie strictly inside (1, {})",
                p.alpha2()
            ))),
        }
    }
}

#[derive(Debug, Clone)]
struct Half {
    end: End,
    /// `ℓ_k = ℓ_0 − k ln 2`, decreasing.
    logs: Vec<f64>,
    /// Raw `s` (zero at the midpoint) at each knot.
    s: Vec<f64>,
    /// `ℓ` as a function of raw `s`, used to seed the inversion.
    inverse: MonotoneCubic,
}

/// Tabulated monotone map `τ ↔ s` for one profile and gauge.
#[derive(Debug, Clone)]
pub struct TauSMap {
    profile: EinsteinProfile,
    tau0: f64,
    /// Raw `s` at τ₀; gauge `s` is raw `s` minus this.
    shift: f64,
    lower: Half,
    upper: Half,
    quad: QuadratureConfig,
}

/// `ds/dℓ` in the half adjacent to `end`.
fn slope(p: &EinsteinProfile, end: End, log_offset: f64) -> f64 {
    let off = log_offset.exp();
    match end {
        End::Lower => 1.0 / p.phi_over_below(off),
        End::Upper => -1.0 / p.phi_over_above(off),
    }
}

/// Raw `s(ℓ_b) − s(ℓ_a)` along one half.
fn s_increment(
    p: &EinsteinProfile,
    end: End,
    from: f64,
    to: f64,
    quad: &QuadratureConfig,
) -> Result<f64> {
    Ok(integrate(|l| slope(p, end, l), from, to, quad)?.value)
}

/// Builds the map with the default hull `|s| ≤ 40`.
pub fn build_map(p: &EinsteinProfile, g: GaugeChoice, quad: QuadratureConfig) -> Result<TauSMap> {
    TauSMap::build(p, g, quad)
}

impl TauSMap {
    pub fn build(p: &EinsteinProfile, g: GaugeChoice, quad: QuadratureConfig) -> Result<Self> {
        Self::build_with_hull(p, g, quad, DEFAULT_S_HULL)
    }

    /// Builds the map so that gauge `s` covers at least `[−s_hull, s_hull]`,
    /// unless the offset floor `e^{-640}` is reached first.
    pub fn build_with_hull(
        p: &EinsteinProfile,
        g: GaugeChoice,
        quad: QuadratureConfig,
        s_hull: f64,
    ) -> Result<Self> {
        if !(s_hull > 0.0 && s_hull.is_finite()) {
            return Err(domain(format!("s hull must be positive, got {s_hull}")));
        }
        if !(quad.tolerance > 0.0) {
            return Err(domain("quadrature tolerance must be positive"));
        }
        let tau0 = g.tau0(p)?;
        let l_mid = (0.5 * p.alpha2_minus_one()).ln();

        let site0 = p.site(tau0)?;
        let shift = if tau0 <= p.midpoint() {
            s_increment(p, End::Lower, l_mid, site0.below.ln(), &quad)?
        } else {
            s_increment(p, End::Upper, l_mid, site0.above.ln(), &quad)?
        };

        let lower = Self::ladder(p, End::Lower, l_mid, shift - s_hull, &quad)?;
        let upper = Self::ladder(p, End::Upper, l_mid, shift + s_hull, &quad)?;
        Ok(Self {
            profile: p.clone(),
            tau0,
            shift,
            lower,
            upper,
            quad,
        })
    }

    fn ladder(
        p: &EinsteinProfile,
        end: End,
        l_mid: f64,
        target: f64,
        quad: &QuadratureConfig,
    ) -> Result<Half> {
        let step = std::f64::consts::LN_2;
        let mut logs = vec![l_mid];
        let mut s = vec![0.0];
        let reached = |v: f64| match end {
            End::Lower => v <= target,
            End::Upper => v >= target,
        };
        while !reached(*s.last().unwrap()) && logs.len() < MAX_KNOTS_PER_HALF {
            let l_prev = *logs.last().unwrap();
            let l_next = (l_prev - step).max(MIN_LOG_OFFSET);
            if l_next >= l_prev {
                break;
            }
            let ds = s_increment(p, end, l_prev, l_next, quad)?;
            logs.push(l_next);
            s.push(s.last().unwrap() + ds);
        }

        // inverse interpolant over ascending s
        let mut pairs: Vec<(f64, f64, f64)> = logs
            .iter()
            .zip(&s)
            .map(|(&l, &sv)| (sv, l, 1.0 / slope(p, end, l)))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let inverse = MonotoneCubic::new(
            pairs.iter().map(|t| t.0).collect(),
            pairs.iter().map(|t| t.1).collect(),
            pairs.iter().map(|t| t.2).collect(),
        )?;
        Ok(Half {
            end,
            logs,
            s,
            inverse,
        })
    }

    pub fn profile(&self) -> &EinsteinProfile {
        &self.profile
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn knot_count(&self) -> usize {
        self.lower.logs.len() + self.upper.logs.len() - 1
    }

    /// Covered gauge-`s` interval.
    pub fn s_range(&self) -> (f64, f64) {
        (
            self.lower.s.last().unwrap() - self.shift,
            self.upper.s.last().unwrap() - self.shift,
        )
    }

    /// Covered τ interval `[1 + ε₁, T − ε₂]`.
    pub fn tau_range(&self) -> (f64, f64) {
        let lo = self.profile.lower_site(self.lower.logs.last().unwrap().exp());
        let hi = self.profile.upper_site(self.upper.logs.last().unwrap().exp());
        (lo.tau, hi.tau)
    }

    /// Raw `s` at log offset `l` inside `half`, integrating from the nearest knot.
    fn raw_s_at_log(&self, half: &Half, l: f64) -> Result<f64> {
        let l_end = *half.logs.last().unwrap();
        if l < l_end || l > half.logs[0] {
            return Err(Error::Range {
                what: "log offset",
                value: l,
                lo: l_end,
                hi: half.logs[0],
            });
        }
        // logs are uniformly spaced except possibly the last rung
        let k = half
            .logs
            .partition_point(|&v| v > l)
            .min(half.logs.len() - 1);
        let (ka, kb) = if k == 0 { (0, 1.min(half.logs.len() - 1)) } else { (k - 1, k) };
        let nearest = if (half.logs[ka] - l).abs() <= (l - half.logs[kb]).abs() {
            ka
        } else {
            kb
        };
        let ds = s_increment(&self.profile, half.end, half.logs[nearest], l, &self.quad)?;
        Ok(half.s[nearest] + ds)
    }

    /// Gauge `s` at a profile site.
    pub fn s_of_site(&self, site: &Site) -> Result<f64> {
        let (lo, hi) = self.tau_range();
        let out_of_range = Error::Range {
            what: "tau",
            value: site.tau,
            lo,
            hi,
        };
        let raw = if site.below <= site.above {
            if site.below <= 0.0 {
                return Err(out_of_range);
            }
            self.raw_s_at_log(&self.lower, site.below.ln())
        } else {
            if site.above <= 0.0 {
                return Err(out_of_range);
            }
            self.raw_s_at_log(&self.upper, site.above.ln())
        }
        .map_err(|_| out_of_range)?;
        Ok(raw - self.shift)
    }

    pub fn s_of_tau(&self, tau: f64) -> Result<f64> {
        let (lo, hi) = self.tau_range();
        let site = self.profile.site(tau).map_err(|_| Error::Range {
            what: "tau",
            value: tau,
            lo,
            hi,
        })?;
        self.s_of_site(&site)
    }

    /// Site (τ with both endpoint offsets) at gauge coordinate `s`.
    pub fn site_at_s(&self, s: f64) -> Result<Site> {
        let (lo, hi) = self.s_range();
        if !(s >= lo && s <= hi) {
            return Err(Error::Range {
                what: "s",
                value: s,
                lo,
                hi,
            });
        }
        let raw = s + self.shift;
        let half = if raw <= 0.0 { &self.lower } else { &self.upper };
        let l = self.invert(half, raw)?;
        let off = l.exp();
        Ok(match half.end {
            End::Lower => self.profile.lower_site(off),
            End::Upper => self.profile.upper_site(off),
        })
    }

    pub fn tau_of_s(&self, s: f64) -> Result<f64> {
        Ok(self.site_at_s(s)?.tau)
    }

    /// Safeguarded Newton for `raw_s(ℓ) = target` within the bracketing rung.
    fn invert(&self, half: &Half, target: f64) -> Result<f64> {
        let sign = match half.end {
            End::Lower => 1.0,
            End::Upper => -1.0,
        };
        // find rung [k, k+1] whose s-values bracket the target
        let m = half.logs.len();
        let k = if m == 1 {
            0
        } else {
            let idx = half.s.partition_point(|&v| sign * v > sign * target);
            idx.clamp(1, m - 1) - 1
        };
        if m == 1 {
            return Ok(half.logs[0]);
        }
        let (mut lo, mut hi) = (half.logs[k + 1], half.logs[k]);
        let mut l = half.inverse.eval(target).clamp(lo, hi);
        for _ in 0..100 {
            let f = self.raw_s_at_log(half, l)? - target;
            if f == 0.0 {
                return Ok(l);
            }
            // raw s increases with ℓ on the lower half, decreases on the upper
            if sign * f > 0.0 {
                hi = l;
            } else {
                lo = l;
            }
            let mut next = l - f / slope(&self.profile, half.end, l);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let step = (next - l).abs();
            l = next;
            if step <= 4.0 * f64::EPSILON * l.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON * l.abs().max(1.0) {
                break;
            }
        }
        Ok(l)
    }

    /// `d log φ(τ(s))/ds = φ'(τ(s))` probed at `s = −|s_probe|` (lower) or
    /// `s = +|s_probe|` (upper). Tends to β₁ and −β₂ respectively.
    pub fn log_slope_at_end(&self, end: End, s_probe: f64) -> Result<f64> {
        if !(s_probe.abs() >= 20.0) {
            return Err(domain(format!(
                "asymptotic slope probe needs |s| >= 20, got {s_probe}"
            )));
        }
        let s = match end {
            End::Lower => -s_probe.abs(),
            End::Upper => s_probe.abs(),
        };
        let site = self.site_at_s(s)?;
        Ok(self.profile.phi_prime_at(&site))
    }
}

/// Free-function form of [`TauSMap::log_slope_at_end`].
pub fn log_slope_at_end(m: &TauSMap, end: End, s_probe: f64) -> Result<f64> {
    m.log_slope_at_end(end, s_probe)
}

/// Small-angle variable `y = (τ − 1 − nβ₁/2)/(nβ₁²/2)`; `y = 0` is the
/// midsection and `y = −1/β₁` is `Zₙ`.
pub fn y_of_tau(p: &EinsteinProfile, tau: f64) -> Result<f64> {
    if !(tau >= 1.0 && tau <= p.alpha2()) {
        return Err(domain(format!(
            "tau = {tau} outside [1, {}] for the y variable",
            p.alpha2()
        )));
    }
    let b = p.beta1();
    if tau == 1.0 {
        return Ok(-1.0 / b);
    }
    let nf = p.n().as_f64();
    Ok(((tau - 1.0) - 0.5 * nf * b) / (0.5 * nf * b * b))
}

/// Upper end of the `y` range, the image of `τ = T`.
pub fn y_max(p: &EinsteinProfile) -> f64 {
    let nf = p.n().as_f64();
    let b = p.beta1();
    (p.alpha2_minus_one() - 0.5 * nf * b) / (0.5 * nf * b * b)
}

/// Inverse of [`y_of_tau`].
pub fn tau_of_y(p: &EinsteinProfile, y: f64) -> Result<f64> {
    let b = p.beta1();
    if !(y >= -1.0 / b && y <= y_max(p)) {
        return Err(domain(format!(
            "y = {y} outside [{}, {}]",
            -1.0 / b,
            y_max(p)
        )));
    }
    let nf = p.n().as_f64();
    Ok(1.0 + 0.5 * nf * b + y * (0.5 * nf * b * b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{make_profile, SurfaceIndex};
    use approx::assert_relative_eq;

    fn setup(n: u32, b: f64) -> (EinsteinProfile, TauSMap) {
        let p = make_profile(SurfaceIndex::new(n).unwrap(), b).unwrap();
        let m = TauSMap::build(&p, GaugeChoice::midpoint(), QuadratureConfig::default()).unwrap();
        (p, m)
    }

    #[test]
    fn gauge_point_maps_to_zero() {
        let (p, m) = setup(1, 1.0);
        assert_eq!(m.s_of_tau(p.midpoint()).unwrap(), 0.0);
        assert_relative_eq!(m.tau_of_s(0.0).unwrap(), p.midpoint(), epsilon = 1e-15);
    }

    #[test]
    fn off_midpoint_gauge() {
        let p = make_profile(SurfaceIndex::new(2).unwrap(), 0.5).unwrap();
        let m = TauSMap::build(&p, GaugeChoice::at(1.2), QuadratureConfig::default()).unwrap();
        assert!(m.s_of_tau(1.2).unwrap().abs() < 1e-13);
        assert_relative_eq!(m.tau_of_s(0.0).unwrap(), 1.2, epsilon = 1e-13);
        assert!(TauSMap::build(&p, GaugeChoice::at(1.0), QuadratureConfig::default()).is_err());
    }

    #[test]
    fn hull_reaches_forty() {
        for (n, b) in [(1, 1.0), (1, 0.8), (2, 0.5), (3, 0.4), (2, 1e-3), (1, 0.05)] {
            let (_, m) = setup(n, b);
            let (lo, hi) = m.s_range();
            assert!(lo <= -40.0 && hi >= 40.0, "{n} {b}: {lo} {hi}");
            assert!(m.knot_count() < 10_000);
        }
    }

    #[test]
    fn round_trip() {
        let (_, m) = setup(1, 0.8);
        for s in [-3.0, -1.0, 0.3, 2.0, 7.3] {
            let back = m.s_of_tau(m.tau_of_s(s).unwrap()).unwrap();
            assert!((back - s).abs() <= 1e-10, "{s} -> {back}");
        }
        for s in [-39.9, -25.0, -12.5, 18.0, 39.9] {
            let back = m.s_of_site(&m.site_at_s(s).unwrap()).unwrap();
            assert!((back - s).abs() <= 1e-10 * s.abs(), "{s} -> {back}");
        }
    }

    #[test]
    fn tau_round_trip_on_hull() {
        let (p, m) = setup(2, 0.5);
        for k in 1..200 {
            let tau = 1.0 + p.alpha2_minus_one() * k as f64 / 200.0;
            let s = m.s_of_tau(tau).unwrap();
            assert!((m.tau_of_s(s).unwrap() - tau).abs() <= 1e-10);
        }
    }

    #[test]
    fn out_of_range_queries() {
        let (p, m) = setup(1, 1.0);
        assert!(matches!(m.tau_of_s(1e3), Err(Error::Range { .. })));
        assert!(matches!(m.s_of_tau(1.0), Err(Error::Range { .. })));
        assert!(matches!(m.s_of_tau(p.alpha2() + 0.1), Err(Error::Range { .. })));
    }

    #[test]
    fn derivative_of_inverse_is_phi() {
        let (p, m) = setup(1, 0.8);
        let h = 1e-4;
        let fd = (m.tau_of_s(h).unwrap() - m.tau_of_s(-h).unwrap()) / (2.0 * h);
        assert!((fd - p.eval_phi(m.tau0()).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn asymptotic_slopes() {
        let (_, m) = setup(1, 0.8);
        assert!((m.log_slope_at_end(End::Lower, 30.0).unwrap() - 0.8).abs() < 1e-4);
        let (_, m) = setup(1, 1.0);
        let slope = m.log_slope_at_end(End::Upper, 30.0).unwrap();
        assert!((slope + (3f64.sqrt() - 1.0)).abs() < 1e-4);
        let (_, m) = setup(2, 0.5);
        assert!((m.log_slope_at_end(End::Lower, -40.0).unwrap() - 0.5).abs() < 1e-5);
        assert!(m.log_slope_at_end(End::Lower, 10.0).is_err());
    }

    #[test]
    fn y_variable() {
        let p = make_profile(SurfaceIndex::new(3).unwrap(), 0.3).unwrap();
        assert_eq!(tau_of_y(&p, 0.0).unwrap(), 1.0 + 3.0 * 0.3 / 2.0);
        assert_eq!(y_of_tau(&p, 1.0).unwrap(), -1.0 / 0.3);
        let y = y_of_tau(&p, 1.2).unwrap();
        assert_relative_eq!(tau_of_y(&p, y).unwrap(), 1.2, epsilon = 1e-15);
        assert!(tau_of_y(&p, -1.0 / 0.3 - 1e-9).is_err());
        assert!(y_of_tau(&p, 0.5).is_err());

        let q = make_profile(SurfaceIndex::new(1).unwrap(), 0.1).unwrap();
        let top = y_of_tau(&q, q.alpha2()).unwrap();
        assert!((top - 10.0).abs() < 1.0, "{top}");
    }
}
