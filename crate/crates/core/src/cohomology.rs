//! Intersection theory on 𝔽ₙ in the basis `(Zₙ, F)`.
//!
//! `Zₙ² = −n`, `Zₙ·F = 1`, `F² = 0`, and the infinity section is
//! `Z₋ₙ = Zₙ + nF`.

use std::ops::{Add, Neg, Sub};

use num_rational::Rational64;
use num_traits::{FromPrimitive, Num, Signed};

use crate::error::{domain, Result};
use crate::profile::{make_profile, SurfaceIndex};

/// Coefficient ring for divisor classes.
pub trait Coefficient: Num + Copy + Signed + PartialOrd + FromPrimitive {}
impl<T: Num + Copy + Signed + PartialOrd + FromPrimitive> Coefficient for T {}

/// The class `a·Zₙ + b·F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorClass<T> {
    pub a: T,
    pub b: T,
}

pub type ExactClass = DivisorClass<Rational64>;

fn int<T: Coefficient>(k: i64) -> T {
    T::from_i64(k).expect("small integers are representable")
}

impl<T: Coefficient> DivisorClass<T> {
    pub fn new(a: T, b: T) -> Self {
        Self { a, b }
    }

    /// `Zₙ`, the negative section.
    pub fn zero_section() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn fiber() -> Self {
        Self::new(T::zero(), T::one())
    }

    /// `Z₋ₙ = Zₙ + nF`.
    pub fn infinity_section(n: SurfaceIndex) -> Self {
        Self::new(T::one(), int(n.get() as i64))
    }

    /// `p·Zₙ + q·Z₋ₙ`.
    pub fn from_sections(n: SurfaceIndex, p: T, q: T) -> Self {
        Self::new(p + q, q * int(n.get() as i64))
    }

    /// Coefficients `(p, q)` with `self = p·Zₙ + q·Z₋ₙ`.
    pub fn to_sections(&self, n: SurfaceIndex) -> (T, T) {
        let q = self.b / int(n.get() as i64);
        (self.a - q, q)
    }

    pub fn scale(&self, k: T) -> Self {
        Self::new(self.a * k, self.b * k)
    }
}

impl ExactClass {
    pub fn to_f64(&self) -> DivisorClass<f64> {
        let f = |r: Rational64| *r.numer() as f64 / *r.denom() as f64;
        DivisorClass::new(f(self.a), f(self.b))
    }
}

impl<T: Coefficient> Add for DivisorClass<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.a + o.a, self.b + o.b)
    }
}

impl<T: Coefficient> Sub for DivisorClass<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.a - o.a, self.b - o.b)
    }
}

impl<T: Coefficient> Neg for DivisorClass<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

/// `(aZ + bF)·(a′Z + b′F) = −n·aa′ + ab′ + a′b`.
pub fn intersect<T: Coefficient>(n: SurfaceIndex, x: &DivisorClass<T>, y: &DivisorClass<T>) -> T {
    -(int::<T>(n.get() as i64) * x.a * y.a) + x.a * y.b + y.a * x.b
}

/// Gram matrix of the form in the `(Zₙ, F)` basis.
pub fn gram_matrix(n: SurfaceIndex) -> [[Rational64; 2]; 2] {
    let z = ExactClass::zero_section();
    let f = ExactClass::fiber();
    [
        [intersect(n, &z, &z), intersect(n, &z, &f)],
        [intersect(n, &f, &z), intersect(n, &f, &f)],
    ]
}

/// `K = −2Zₙ − (n + 2)F`.
pub fn canonical_class(n: SurfaceIndex) -> ExactClass {
    ExactClass::new(Rational64::from_integer(-2), Rational64::from_integer(-(n.get() as i64) - 2))
}

/// Class of the Kähler–Einstein edge form: `a = n(β₁+β₂)/(2−nβ₁)`,
/// `b = n(2+nβ₂)/(2−nβ₁)`.
pub fn kee_class(n: SurfaceIndex, beta1: f64, beta2: f64) -> Result<DivisorClass<f64>> {
    let nf = n.as_f64();
    let den = 2.0 - nf * beta1;
    if !(den > 0.0) {
        return Err(domain(format!("kee class needs 2 - n*beta1 > 0, got {den}")));
    }
    Ok(DivisorClass::new(nf * (beta1 + beta2) / den, nf * (2.0 + nf * beta2) / den))
}

/// Kähler cone membership: `−xZₙ + yZ₋ₙ` with `y > x > 0`.
pub fn is_kahler<T: Coefficient>(n: SurfaceIndex, c: &DivisorClass<T>) -> bool {
    let (p, q) = c.to_sections(n);
    let x = -p;
    q > x && x > T::zero()
}

pub fn class_volume<T: Coefficient>(n: SurfaceIndex, c: &DivisorClass<T>) -> T {
    intersect(n, c, c)
}

/// Largest coefficient gap between `λ[ω]` and `−K − (1−β₁)Zₙ − (1−β₂)Z₋ₙ`.
///
/// `[ω] = T[Z₋ₙ] − [Zₙ]` uses the upper root `T` of the profile with angle
/// `β₁`, so an inconsistent `β₂` shows up as a nonzero gap.
pub fn proportionality_check(n: SurfaceIndex, beta1: f64, beta2: f64) -> Result<f64> {
    let p = make_profile(n, beta1)?;
    let nf = n.as_f64();
    let lambda = p.lambda();
    let omega = DivisorClass::new(p.alpha2_minus_one(), nf * p.alpha2());
    let k = canonical_class(n).to_f64();
    let rhs = -k - DivisorClass::<f64>::zero_section().scale(1.0 - beta1)
        - DivisorClass::<f64>::infinity_section(n).scale(1.0 - beta2);
    let lhs = omega.scale(lambda);
    Ok((lhs.a - rhs.a).abs().max((lhs.b - rhs.b).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(k: i64) -> Rational64 {
        Rational64::from_integer(k)
    }

    fn idx(n: u32) -> SurfaceIndex {
        SurfaceIndex::new(n).unwrap()
    }

    #[test]
    fn basic_intersections() {
        let n = idx(3);
        let z = ExactClass::zero_section();
        let f = ExactClass::fiber();
        assert_eq!(intersect(n, &z, &z), r(-3));
        assert_eq!(intersect(n, &z, &f), r(1));
        assert_eq!(intersect(n, &f, &f), r(0));
        let zi = ExactClass::infinity_section(idx(2));
        assert_eq!(intersect(idx(2), &zi, &zi), r(2));
        assert_eq!(intersect(n, &z, &ExactClass::infinity_section(n)), r(0));
    }

    #[test]
    fn gram_determinant() {
        for n in 1..6 {
            let g = gram_matrix(idx(n));
            assert_eq!(g[0][1], g[1][0]);
            assert_eq!(g[0][0] * g[1][1] - g[0][1] * g[1][0], r(-1));
        }
    }

    #[test]
    fn adjunction() {
        for n in 1..8 {
            let n = idx(n);
            let k = canonical_class(n);
            for c in [ExactClass::zero_section(), ExactClass::infinity_section(n)] {
                assert_eq!(intersect(n, &(k + c), &c), r(-2));
            }
        }
        assert_eq!(-canonical_class(idx(2)), ExactClass::new(r(2), r(4)));
    }

    #[test]
    fn section_basis_round_trip() {
        let n = idx(4);
        let c = ExactClass::new(Rational64::new(7, 3), Rational64::new(-5, 2));
        let (p, q) = c.to_sections(n);
        assert_eq!(ExactClass::from_sections(n, p, q), c);
    }

    #[test]
    fn kahler_cone() {
        let n = idx(1);
        assert!(is_kahler(n, &ExactClass::from_sections(n, r(-1), r(2))));
        assert!(!is_kahler(n, &ExactClass::zero_section()));
        for k in 1..5 {
            assert!(!is_kahler(idx(k), &ExactClass::fiber()));
        }
    }

    #[test]
    fn rigid_kee_class() {
        let s3 = 3f64.sqrt();
        let c = kee_class(idx(1), 1.0, s3 - 1.0).unwrap();
        assert!((c.a - s3).abs() < 1e-15 && (c.b - (1.0 + s3)).abs() < 1e-15);
        assert!((class_volume(idx(1), &c) - (3.0 + 2.0 * s3)).abs() < 1e-14);
        assert!(kee_class(idx(3), 2.0 / 3.0, 0.1).is_err());
    }

    #[test]
    fn proportionality() {
        let s3 = 3f64.sqrt();
        assert!(proportionality_check(idx(1), 1.0, s3 - 1.0).unwrap() < 1e-12);
        let p = make_profile(idx(2), 0.5).unwrap();
        assert!(proportionality_check(idx(2), 0.5, p.beta2()).unwrap() <= 1e-12);
        assert!(proportionality_check(idx(2), 0.5, p.beta2() + 1e-3).unwrap() >= 1e-4);
    }
}
