//! Closed-form Einstein momentum profile.
//!
//! For the Calabi ansatz on 𝔽ₙ the Einstein condition reduces, in the
//! momentum variable τ ∈ (1, T), to the linear first-order equation
//!
//! ```text
//! φ' + φ/τ = 2/n + (β₁ − 2/n) τ,    φ(1) = 0,
//! ```
//!
//! whose solution is the cubic-over-τ
//! `φ(τ) = (τ² − 1)/(nτ) + c (τ³ − 1)/τ` with `c = (β₁ − 2/n)/3`, i.e.
//! `φ(τ) = c (τ − 1)(τ − α₁)(τ − α₂)/τ`. The upper root `α₂ = T` closes the
//! fiber, and `−φ'(T)` is the second cone angle β₂.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{domain, Result};

/// Hirzebruch index `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurfaceIndex(u32);

impl SurfaceIndex {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(domain(
                "Hirzebruch index must be n >= 1 (the product case n = 0 is not supported)",
            ));
        }
        Ok(Self(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Supremum `min(1, 2/n)` of admissible β₁. It is attained only for n = 1.
    pub fn beta1_sup(self) -> f64 {
        (2.0 / self.as_f64()).min(1.0)
    }

    /// Checks `β₁ ∈ (0, 2/n) ∩ (0, 1]`.
    pub fn check_beta1(self, beta1: f64) -> Result<()> {
        let n = self.as_f64();
        if beta1.is_finite() && beta1 > 0.0 && beta1 <= 1.0 && n * beta1 < 2.0 {
            Ok(())
        } else {
            Err(domain(format!(
                "beta1 must lie in (0, 2/n) ∩ (0,1]; got beta1 = {beta1} with n = {}",
                self.0
            )))
        }
    }
}

impl std::fmt::Display for SurfaceIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Cone angles (as fractions of 2π) along `Zₙ` and `Z₋ₙ`, and the Einstein constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeAngles {
    pub beta1: f64,
    pub beta2: f64,
    pub lambda: f64,
}

/// β₂ as a function of β₁, evaluated without the `√X − 3` cancellation.
///
/// `β₂ = (nβ₁ − 3 + √X)/(2n)` with `X = 3(3 − nβ₁)(1 + nβ₁) = 9 + 3nβ₁(2 − nβ₁)`.
pub fn beta2_of_beta1(n: SurfaceIndex, beta1: f64) -> f64 {
    let nb = n.as_f64() * beta1;
    let root_x = discriminant_root(nb);
    0.5 * beta1 + 1.5 * beta1 * (2.0 - nb) / (3.0 + root_x)
}

fn discriminant_root(nb: f64) -> f64 {
    (9.0 + 3.0 * nb * (2.0 - nb)).sqrt()
}

/// Roots of `a x² + b x + c` ordered `(lo, hi)`, computed without cancellation.
///
/// Returns `None` when the roots are complex or `a == 0`.
pub fn stable_quadratic(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    if a == 0.0 {
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    let (r1, r2) = (q / a, c / q);
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// A location in `[1, T]` carried together with both endpoint offsets so that
/// `φ` keeps full relative accuracy arbitrarily close to either root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub tau: f64,
    /// `τ − 1`
    pub below: f64,
    /// `T − τ`
    pub above: f64,
}

/// The closed-form Einstein profile for given `(n, β₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinProfile {
    n: SurfaceIndex,
    beta1: f64,
    leading: f64,
    alpha1: f64,
    alpha2: f64,
    alpha2_minus_one: f64,
    alpha1_plus_half: f64,
    angles: ConeAngles,
    consistent: bool,
}

/// Builds the profile for `(n, β₁)`.
pub fn make_profile(n: SurfaceIndex, beta1: f64) -> Result<EinsteinProfile> {
    EinsteinProfile::new(n, beta1)
}

impl EinsteinProfile {
    pub fn new(n: SurfaceIndex, beta1: f64) -> Result<Self> {
        n.check_beta1(beta1)?;
        let nf = n.as_f64();
        let nb = nf * beta1;
        let leading = (beta1 - 2.0 / nf) / 3.0;
        // τ² − Sτ − S = 0
        let sum = (1.0 + nb) / (2.0 - nb);
        let (alpha1, alpha2) =
            stable_quadratic(1.0, -sum, -sum).expect("discriminant S² + 4S is positive");

        let root_x = discriminant_root(nb);
        let q = 1.5 * nb / (3.0 + root_x);
        let alpha1_plus_half = -q;
        let alpha2_minus_one = q + 1.5 * nb / (2.0 - nb);

        let beta2 = beta2_of_beta1(n, beta1);
        Ok(Self {
            n,
            beta1,
            leading,
            alpha1,
            alpha2,
            alpha2_minus_one,
            alpha1_plus_half,
            angles: ConeAngles {
                beta1,
                beta2,
                lambda: 2.0 / nf - beta1,
            },
            consistent: true,
        })
    }

    /// Same cubic with the upper root moved by `delta`; the result no longer
    /// solves the Einstein equation. Used to check that residual detectors fire.
    pub fn with_shifted_alpha2(&self, delta: f64) -> Result<Self> {
        let alpha2 = self.alpha2 + delta;
        if !(alpha2 > 1.0) {
            return Err(domain("shifted upper root must stay above 1"));
        }
        let mut out = self.clone();
        out.alpha2 = alpha2;
        out.alpha2_minus_one = self.alpha2_minus_one + delta;
        out.angles.beta2 = -out.phi_prime_at(&out.upper_site(0.0));
        out.consistent = false;
        Ok(out)
    }

    /// Profile rebuilt from the factored cubic after replacing β₂ by `β₂ + delta`,
    /// with the upper root moved to `(2 + nβ₂')/(2 − nβ₁)`.
    pub fn with_perturbed_beta2(&self, delta: f64) -> Result<Self> {
        let nf = self.n.as_f64();
        let shift = nf * delta / (2.0 - nf * self.beta1);
        self.with_shifted_alpha2(shift)
    }

    #[inline]
    pub fn n(&self) -> SurfaceIndex {
        self.n
    }

    #[inline]
    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    #[inline]
    pub fn beta2(&self) -> f64 {
        self.angles.beta2
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.angles.lambda
    }

    #[inline]
    pub fn angles(&self) -> ConeAngles {
        self.angles
    }

    /// Leading coefficient `c = (β₁ − 2/n)/3` of the cubic numerator.
    #[inline]
    pub fn leading(&self) -> f64 {
        self.leading
    }

    #[inline]
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }

    /// Upper root, the maximum `T` of the momentum variable.
    #[inline]
    pub fn alpha2(&self) -> f64 {
        self.alpha2
    }

    /// `T − 1`, the fiber length in τ, computed without cancellation.
    #[inline]
    pub fn alpha2_minus_one(&self) -> f64 {
        self.alpha2_minus_one
    }

    /// `α₁ + 1/2`, computed without cancellation.
    #[inline]
    pub fn alpha1_plus_half(&self) -> f64 {
        self.alpha1_plus_half
    }

    /// `false` for the deliberately corrupted profiles built by the perturbation helpers.
    #[inline]
    pub fn is_consistent(&self) -> bool {
        self.consistent
    }

    /// Midpoint `(1 + T)/2` of the momentum interval.
    pub fn midpoint(&self) -> f64 {
        1.0 + 0.5 * self.alpha2_minus_one
    }

    pub fn site(&self, tau: f64) -> Result<Site> {
        if !(tau >= 1.0 && tau <= self.alpha2) {
            return Err(domain(format!(
                "tau = {tau} outside profile domain [1, {}]",
                self.alpha2
            )));
        }
        let below = tau - 1.0;
        let above = self.alpha2 - tau;
        // take the larger offset from the complement of the accurate one
        Ok(if below <= above {
            Site {
                tau,
                below,
                above: self.alpha2_minus_one - below,
            }
        } else {
            Site {
                tau,
                below: self.alpha2_minus_one - above,
                above,
            }
        })
    }

    /// Site at distance `offset ≥ 0` above `τ = 1`.
    pub fn lower_site(&self, offset: f64) -> Site {
        Site {
            tau: 1.0 + offset,
            below: offset,
            above: self.alpha2_minus_one - offset,
        }
    }

    /// Site at distance `offset ≥ 0` below `τ = T`.
    pub fn upper_site(&self, offset: f64) -> Site {
        Site {
            tau: self.alpha2 - offset,
            below: self.alpha2_minus_one - offset,
            above: offset,
        }
    }

    /// `φ` at a site, from the factored form.
    pub fn phi_at(&self, site: &Site) -> f64 {
        -self.leading * site.below * site.above * (site.tau - self.alpha1) / site.tau
    }

    /// `φ'` at a site, analytic derivative of the factored form.
    pub fn phi_prime_at(&self, site: &Site) -> f64 {
        let Site { tau, below, above } = *site;
        let gap = tau - self.alpha1;
        let c = self.leading;
        c * (below * gap - above * gap - below * above) / tau + c * below * above * gap / (tau * tau)
    }

    /// `φ(τ)/(τ − 1)` near the lower root; tends to β₁ as τ → 1.
    pub fn phi_over_below(&self, below: f64) -> f64 {
        let tau = 1.0 + below;
        -self.leading * (self.alpha2_minus_one - below) * (tau - self.alpha1) / tau
    }

    /// `φ(τ)/(T − τ)` near the upper root; tends to β₂ as τ → T.
    pub fn phi_over_above(&self, above: f64) -> f64 {
        let tau = self.alpha2 - above;
        -self.leading * (self.alpha2_minus_one - above) * (tau - self.alpha1) / tau
    }

    /// `φ(τ)`, factored form. Errors outside `[1, T]`.
    pub fn eval_phi(&self, tau: f64) -> Result<f64> {
        Ok(self.phi_at(&self.site(tau)?))
    }

    /// `φ(τ) = (τ² − 1)/(nτ) + c(τ³ − 1)/τ`, the expanded form.
    ///
    /// Loses relative accuracy near the roots; kept as an independent route.
    pub fn eval_phi_expanded(&self, tau: f64) -> Result<f64> {
        self.site(tau)?;
        let nf = self.n.as_f64();
        Ok((tau * tau - 1.0) / (nf * tau) + self.leading * (tau * tau * tau - 1.0) / tau)
    }

    /// `φ'(τ)`. At the endpoints this is the one-sided limit, `β₁` and `−β₂`.
    pub fn eval_phi_prime(&self, tau: f64) -> Result<f64> {
        Ok(self.phi_prime_at(&self.site(tau)?))
    }

    /// Residual of `φ' + φ/τ − 2/n − (β₁ − 2/n) τ`.
    pub fn ode_residual(&self, tau: f64) -> Result<f64> {
        let site = self.site(tau)?;
        let nf = self.n.as_f64();
        let phi = self.phi_at(&site);
        let dphi = self.phi_prime_at(&site);
        Ok(dphi + phi / tau - 2.0 / nf - (self.beta1 - 2.0 / nf) * tau)
    }
}

/// Exact evaluation of `φ` at rational `(β₁, τ)`.
///
/// Returns the expanded form and the factored form `c(τ − 1)(τ² − Sτ − S)/τ`
/// with `S = (1 + nβ₁)/(2 − nβ₁)`; the quadratic factor has rational
/// coefficients even though its roots are irrational.
pub fn eval_phi_exact(
    n: SurfaceIndex,
    beta1: &BigRational,
    tau: &BigRational,
) -> Result<(BigRational, BigRational)> {
    if tau.is_zero() {
        return Err(domain("tau must be non-zero"));
    }
    let one = BigRational::one();
    let nr = BigRational::from_integer(BigInt::from(n.get()));
    let two = BigRational::from_integer(BigInt::from(2));
    let three = BigRational::from_integer(BigInt::from(3));
    let nb = &nr * beta1;
    if nb >= two {
        return Err(domain("exact evaluation requires n * beta1 < 2"));
    }
    let c = (beta1 - &two / &nr) / &three;
    let tau2 = tau * tau;
    let tau3 = &tau2 * tau;

    let expanded = (&tau2 - &one) / (&nr * tau) + &c * (&tau3 - &one) / tau;

    let sum = (&one + &nb) / (&two - &nb);
    let quadratic = &tau2 - &sum * tau - &sum;
    let factored = &c * (tau - &one) * quadratic / tau;
    Ok((expanded, factored))
}
