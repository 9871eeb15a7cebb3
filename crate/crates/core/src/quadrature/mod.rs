//! Global-adaptive two-dimensional Gauss–Kronrod quadrature at arbitrary
//! precision.
//!
//! The integrator works on a partition of axis-aligned rectangles. Each
//! rectangle is integrated with the tensor product of a `(g, 2g+1)`
//! Gauss–Kronrod pair; the componentwise difference between the Kronrod and
//! Gauss product results is its error estimate. The worst rectangle is
//! bisected until the accumulated estimate meets the tolerance. Semi-infinite
//! ranges in the first variable are truncated using an analytic envelope
//! bound ([`integrate_semi_infinite`]).

mod adaptive;
mod gk;
mod semi_infinite;

pub use adaptive::{integrate_2d, ErrorNorm, Integrand2D, QuadOptions, QuadResult, Region2D, RuleSums};
pub use gk::{gk_rule, GKRule, MappedRule};
pub use semi_infinite::{
    integrate_semi_infinite, integrate_semi_infinite_transformed, tail_bound, truncation_point, DecayHint,
    SemiInfiniteResult,
};
