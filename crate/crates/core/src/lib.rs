//! Numerical workbench for the ε-scaled SU(2) Yang–Mills–Higgs functional
//! on flat three-dimensional grids.
//!
//! The crate is organised bottom-up:
//!
//! - [`su2`]: the Lie algebra su(2) in the orthonormal basis `T₁, T₂, T₃`.
//! - [`grid`]: grid geometry, field storage and the discrete differential operators.
//! - [`energy`]: energy density, first variation, Euler–Lagrange residuals and
//!   the pointwise identities used as diagnostics.
//! - [`gauge`]: SU(2) gauge transformations, Coulomb projection and the reducible
//!   constant-flux solutions on the twisted torus.
//! - [`flow`]: energy-decreasing relaxation, the explicit sweepout family and the
//!   gap probe.
//! - [`radial`]: the hedgehog reduction and its lift to grids.
//! - [`measures`]: energy/charge measures, magnetic charge, concentration,
//!   rescaling, the local conservation law and the Hodge split.
//! - [`io`]: run configuration files, snapshots and CSV emission.
//! - [`verify`]: the invariant suite behind `ymh verify`.

pub mod energy;
pub mod error;
pub mod flow;
pub mod gauge;
pub mod grid;
pub mod io;
pub mod measures;
pub mod quadrature;
pub mod radial;
pub mod su2;
pub mod verify;

pub use energy::{EnergyParams, EnergyReport};
pub use error::{Error, Result};
pub use grid::{Boundary, Configuration, Grid};
pub use su2::Su2Vec;

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
