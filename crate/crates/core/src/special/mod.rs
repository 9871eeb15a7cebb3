//! Legendre functions, spherical harmonics and the coefficient families that
//! enter the Neumann-expansion assembly.

mod coeffs;
mod harmonics;
mod legendre;

pub use coeffs::{
    a_coeff, a_terms, d_coeff, g_coeff, legendre_product_terms, norm_const, LegendreProduct,
    ProductTerm,
};
pub use harmonics::{real_harmonic, spherical_harmonic, HarmonicValue};
pub use legendre::{
    legendre_norm, legendre_p, legendre_p_column, legendre_q, legendre_q_table,
    normalized_legendre, normalized_legendre_recurrence, ExplicitLegendre, QTable,
};
pub(crate) use legendre::{legendre_p_column_with_factor, normalized_legendre_column_with_s};

use std::fmt;
use std::str::FromStr;

/// How `P̄_{lλ}` is evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LegendreStrategy {
    /// Closed polynomial form with cached coefficients.
    Explicit,
    /// Normalized three-term upward recurrence in degree.
    Recurrence,
    /// Picks whichever of the other two is cheaper for the degree at hand.
    #[default]
    Native,
}

impl LegendreStrategy {
    pub const ALL: [LegendreStrategy; 3] = [
        LegendreStrategy::Explicit,
        LegendreStrategy::Recurrence,
        LegendreStrategy::Native,
    ];

    /// Degree above which `Native` switches from the explicit form to the
    /// recurrence; the explicit sum alternates and loses digits as `l` grows.
    pub const NATIVE_EXPLICIT_MAX_L: u32 = 8;

    pub(crate) fn resolve(self, l: u32) -> LegendreStrategy {
        match self {
            LegendreStrategy::Native if l <= Self::NATIVE_EXPLICIT_MAX_L => LegendreStrategy::Explicit,
            LegendreStrategy::Native => LegendreStrategy::Recurrence,
            other => other,
        }
    }
}

impl fmt::Display for LegendreStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LegendreStrategy::Explicit => "explicit",
            LegendreStrategy::Recurrence => "recurrence",
            LegendreStrategy::Native => "native",
        })
    }
}

impl FromStr for LegendreStrategy {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "explicit" | "ef" => Ok(LegendreStrategy::Explicit),
            "recurrence" | "rf" => Ok(LegendreStrategy::Recurrence),
            "native" | "mf" => Ok(LegendreStrategy::Native),
            _ => Err(crate::Error::Parse(format!("unknown Legendre strategy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HarmonicPhase {
    /// No `(-1)^m` factor; all `P̄_{lm}` are nonnegative near `x = 0⁺`.
    #[default]
    NoPhase,
    CondonShortley,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum HarmonicKind {
    /// `cos(mφ)` / `sin(|m|φ)` harmonics, the kind the azimuthal coefficients
    /// are built for.
    #[default]
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct HarmonicConvention {
    pub phase: HarmonicPhase,
    pub kind: HarmonicKind,
}
