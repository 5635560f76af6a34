mod common;

use kee_core::{make_profile, SurfaceIndex};
use proptest::prelude::*;

#[test]
fn boundary_slopes_and_upper_root() {
    for (n, b) in common::sample_profiles(20, 1) {
        let p = make_profile(SurfaceIndex::new(n).unwrap(), b).unwrap();
        assert!((p.eval_phi_prime(1.0).unwrap() - b).abs() <= 1e-10);
        assert!((p.eval_phi_prime(p.alpha2()).unwrap() + p.beta2()).abs() <= 1e-10);
        let nf = n as f64;
        assert!((p.alpha2() - (2.0 + nf * p.beta2()) / (2.0 - nf * b)).abs() <= 1e-12 * p.alpha2());
        assert!((p.alpha2() / common::upper_root(n, b) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn ode_holds_on_dense_grids() {
    for (n, b) in common::sample_profiles(20, 2) {
        let p = make_profile(SurfaceIndex::new(n).unwrap(), b).unwrap();
        for k in 0..1000 {
            let tau = (1.0 + p.alpha2_minus_one() * k as f64 / 999.0).min(p.alpha2());
            assert!(p.ode_residual(tau).unwrap().abs() <= 1e-12, "{n} {b} {tau}");
        }
    }
}

proptest! {
    #[test]
    fn positive_inside_and_consistent(n in 1u32..7, frac in 0.01f64..0.99, t in 0.001f64..0.999) {
        let b = (frac * 2.0 / n as f64).min(1.0);
        let p = make_profile(SurfaceIndex::new(n).unwrap(), b).unwrap();
        let tau = 1.0 + t * p.alpha2_minus_one();
        let phi = p.eval_phi(tau).unwrap();
        prop_assert!(phi > 0.0);
        prop_assert!((phi - common::phi_poly(n, b, tau)).abs() <= 1e-12 * tau);
        prop_assert!(p.beta2() < b && p.beta2() > 0.0);
    }
}
