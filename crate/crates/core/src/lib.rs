//! Kähler–Einstein edge metrics on Hirzebruch surfaces 𝔽ₙ built from the
//! Calabi ansatz.
//!
//! The crate constructs the closed-form momentum profile for a cone angle
//! `2πβ₁` along the zero section, tabulates the Legendre correspondence
//! between the momentum τ and the log-fiber coordinate `s`, assembles the
//! metric in the affine chart and checks the Einstein equation by finite
//! differences, and provides the intersection theory and small-angle
//! diagnostics that go with the family.

pub mod cohomology;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod legendre;
pub mod limits;
pub mod parallel;
pub mod profile;
pub mod quad;

pub use error::{Error, Result};
pub use legendre::{build_map, End, GaugeChoice, TauSMap};
pub use profile::{make_profile, ConeAngles, EinsteinProfile, SurfaceIndex};
pub use quad::QuadratureConfig;
