//! Shared inputs for the benchmarks.

use threecenter_core::three_center::{cartesian, geometry_from_cartesian};
use threecenter_core::{AuxParams, Orbital, PrecisionContext, ProlateFrame};

/// Reduced auxiliary parameters used for the Legendre strategy comparison:
/// `p1 = 2.5`, `p2 = 1.5`, `ξ_C = 2`.
pub fn legendre_params(ctx: &PrecisionContext) -> AuxParams {
    AuxParams::new(ctx.parse("2.5").unwrap(), ctx.parse("1.5").unwrap(), ctx.num(2)).unwrap()
}

/// A 1s/1s pair on a collinear A-B-C arrangement.
pub fn collinear_s_pair(ctx: &PrecisionContext) -> (Orbital, Orbital, ProlateFrame) {
    let a = Orbital::new(ctx.num(1), 0, 0, ctx.parse("1.24").unwrap()).unwrap();
    let b = Orbital::new(ctx.num(1), 0, 0, ctx.parse("5.67").unwrap()).unwrap();
    let frame = geometry_from_cartesian(
        &cartesian("0", "0", "0", ctx).unwrap(),
        &cartesian("0", "0", "-2.0143", ctx).unwrap(),
        &cartesian("0", "0", "-4.1934", ctx).unwrap(),
        ctx,
    )
    .unwrap();
    (a, b, frame)
}

/// A 2s/2s pair with C off the A-B axis.
pub fn bent_s_pair(ctx: &PrecisionContext) -> (Orbital, Orbital, ProlateFrame) {
    let a = Orbital::new(ctx.num(2), 0, 0, ctx.parse("3.6").unwrap()).unwrap();
    let b = Orbital::new(ctx.num(2), 0, 0, ctx.parse("1.6").unwrap()).unwrap();
    let frame = geometry_from_cartesian(
        &cartesian("0", "0", "0", ctx).unwrap(),
        &cartesian("0", "0", "3", ctx).unwrap(),
        &cartesian("3", "0", "3", ctx).unwrap(),
        ctx,
    )
    .unwrap();
    (a, b, frame)
}
