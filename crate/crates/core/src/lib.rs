//! Arbitrary-precision three-center nuclear attraction integrals over
//! Slater-type orbitals with integer or noninteger principal quantum number.
//!
//! The integrals are evaluated through the Neumann expansion of the Coulomb
//! operator in prolate spheroidal coordinates centered on the two orbital
//! sites. Each expansion term factorizes into two-dimensional auxiliary
//! integrals that are computed by global-adaptive Gauss-Kronrod quadrature at
//! a working precision chosen by a [`PrecisionContext`].
//!
//! ## Modules
//!
//! - [`precision`]: precision contexts, gamma family, binomial coefficients
//! - [`special`]: Legendre functions, spherical harmonics, coefficient families
//! - [`quadrature`]: Gauss-Kronrod rules and 2D adaptive integration
//! - [`auxiliary`]: reduced and general auxiliary functions
//! - [`three_center`]: geometry, the Neumann summation, convergence studies
//! - [`basic`]: closed-form one-center nuclear attraction integrals

pub mod auxiliary;
pub mod basic;
mod error;
pub mod precision;
pub mod quadrature;
pub mod special;
pub mod three_center;

pub use error::{Error, Result};
pub use precision::{BigReal, PrecisionContext};
pub use rug::Float;

pub use auxiliary::{AuxPair, AuxParams, OrbitalIndices};
pub use quadrature::{QuadOptions, QuadResult, Region2D};
pub use special::{HarmonicConvention, HarmonicKind, HarmonicPhase, LegendreStrategy};
pub use three_center::{ConvergenceStudy, IntegralResult, Orbital, ProlateFrame};
