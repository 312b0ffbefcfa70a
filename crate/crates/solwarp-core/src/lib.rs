//! Numerical differential geometry for gradient Ricci soliton warped
//! products.
//!
//! The crate builds warped product metrics g = g_B + f^2 g_F from base
//! data (f, phi, lambda) satisfying the Ricci-Hessian system, and verifies
//! the soliton identities, first integrals, explicit families and
//! obstruction criteria numerically on coordinate charts. All derivatives
//! come from order-2 forward-mode jets; third-order quantities use finite
//! differences of jet-computed tensors.
//!
//! Module map:
//!
//! - [`jets`]: order-2 forward AD arithmetic.
//! - [`chart`]: metric charts, curvature, covariant derivatives, geodesics.
//! - [`warped`]: product assembly and the blockwise Ricci cross-validation.
//! - [`soliton`]: residual evaluators for every soliton-level identity.
//! - [`constructions`]: explicit families and the profile ODE.
//! - [`obstructions`]: rigidity checks (extremum chain, torus integrals,
//!   geodesic probe).
//! - [`report`]: residual aggregation shared by all sweeps.
//!
//! End to end, building and verifying a member of the expanding family:
//!
//! ```
//! use solwarp_core::constructions::{expanding_family, ExpandingParams};
//! use solwarp_core::soliton::{verify_construction, Tolerances};
//! use solwarp_core::SamplePlan;
//!
//! let family = expanding_family(&ExpandingParams {
//!     n: 2, m: 2, lambda: -2.0, c1: 1.0, c2: 1.0,
//!     a: vec![0.0], b: 0.0, rho: 1.0,
//! }).unwrap();
//! let spec = family.to_warped_spec().unwrap();
//! let bundle = verify_construction(
//!     &spec, &SamplePlan::new(20, 0), Tolerances::default(),
//! ).unwrap();
//! assert!(bundle.pass);
//! assert!((bundle.mu_mean - family.mu).abs() < 1e-9);
//! ```

pub mod catalog;
pub mod chart;
pub mod constructions;
pub mod error;
pub mod jets;
pub mod obstructions;
pub mod report;
pub mod soliton;
pub mod warped;

pub use chart::{MetricChart, SamplePlan, ScalarField};
pub use error::{GeomError, Result};
pub use jets::Jet2;
pub use report::{ResidualAccum, ResidualReport};
pub use soliton::{Lambda, Tolerances};
pub use warped::{FiberKind, FiberModel, ProductChart, WarpedSpec};
