//! One-center nuclear attraction integrals in closed form.

use rug::ops::Pow;
use rug::Float;

use crate::precision::{gamma, incomplete_gamma_upper, PrecisionContext};
use crate::special::real_harmonic;
use crate::{Error, Result};

/// `J_{κλτ}(z, R)`, the attraction between a normalized Slater function
/// `χ_{κλτ}(z)` centered at the origin and a unit point charge at
/// `R = (R, θ, φ)`:
///
/// `2^κ/(2λ+1) √(2/z) Γ(κ+λ+2)/√Γ(2κ+1) (zR)^{-λ-1}
///   [1 - Γ(κ+λ+2, zR)/Γ(κ+λ+2) + (zR)^{2λ+1} Γ(κ-λ+1, zR)/Γ(κ+λ+2)] S_{λτ}(θ, φ)`.
///
/// The closed form equals `(1/4π) ∫ χ_{κλτ}(r) / |r - R| dv`, i.e. one
/// factor `1/√(4π)` more than the customary `(1/√(4π)) ∫ …` definition.
#[allow(clippy::too_many_arguments)]
pub fn basic_nuclear_attraction(
    kappa: &Float,
    lambda: u32,
    tau: i32,
    z: &Float,
    r: &Float,
    theta: &Float,
    phi: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    if !z.is_finite() || *z <= 0 {
        return Err(Error::domain("basic_nuclear_attraction", "z must be positive"));
    }
    if !r.is_finite() || *r <= 0 {
        return Err(Error::domain("basic_nuclear_attraction", "R must be positive"));
    }
    if tau.unsigned_abs() > lambda {
        return Err(Error::domain("basic_nuclear_attraction", "|tau| must not exceed lambda"));
    }
    if !kappa.is_finite() || *kappa < lambda {
        return Err(Error::domain("basic_nuclear_attraction", "kappa must be at least lambda"));
    }
    let x = Float::with_val(ctx.bits(), z * r);
    // 1 - Γ(a, x)/Γ(a) cancels for small x; the lost digits are roughly
    // -log10 of the regularized lower function ≈ a·log10(e·x/a).
    let a_big = Float::with_val(ctx.bits(), kappa + (lambda + 2));
    let loss = {
        let af = a_big.to_f64();
        let xf = x.to_f64();
        if xf < af {
            (af * (af / (std::f64::consts::E * xf)).log10()).max(0.0)
        } else {
            0.0
        }
    };
    let work = ctx.elevated(loss.ceil() as u32 + 5);
    let bits = work.bits();
    let kappa = Float::with_val(bits, kappa);
    let z = Float::with_val(bits, z);
    let x = Float::with_val(bits, z.clone() * Float::with_val(bits, r));
    let a_big = Float::with_val(bits, &kappa + (lambda + 2));
    let a_small = Float::with_val(bits, &kappa - lambda) + 1u32;

    let g_big = gamma(&a_big, &work)?;
    let upper_big = incomplete_gamma_upper(&a_big, &x, &work)?;
    let upper_small = incomplete_gamma_upper(&a_small, &x, &work)?;
    let x_pow = Float::with_val(bits, (&x).pow(2 * lambda + 1));
    let bracket = (Float::with_val(bits, &g_big - &upper_big) + x_pow * upper_small) / &g_big;

    let two_kappa = (Float::with_val(bits, 2u32).ln() * &kappa).exp();
    let g_norm = gamma(&(Float::with_val(bits, &kappa * 2u32) + 1u32), &work)?;
    let root = (Float::with_val(bits, 2u32) / &z).sqrt();
    let x_inv = Float::with_val(bits, (&x).pow(lambda + 1)).recip();
    let value = two_kappa / (2 * lambda + 1) * root * &g_big / g_norm.sqrt() * x_inv * bracket;
    let cos_theta = Float::with_val(bits, theta.cos_ref());
    let harmonic = real_harmonic(lambda, tau, &cos_theta, &Float::with_val(bits, phi), &work)?;
    Ok(Float::with_val(ctx.bits(), value * harmonic))
}
