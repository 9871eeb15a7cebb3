use rug::float::Constant;
use rug::Float;

use super::legendre::normalized_legendre;
use super::{HarmonicConvention, HarmonicKind, HarmonicPhase, LegendreStrategy};
use crate::precision::PrecisionContext;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum HarmonicValue {
    Real(Float),
    Complex { re: Float, im: Float },
}

impl HarmonicValue {
    pub fn real_part(&self) -> &Float {
        match self {
            HarmonicValue::Real(v) => v,
            HarmonicValue::Complex { re, .. } => re,
        }
    }
}

/// Real spherical harmonic `S_{lm}(ν, φ)` with `ν = cos θ`, no Condon–Shortley phase:
/// `P̄_{l|m|}(ν)/√(2π)` for `m = 0`, `P̄_{lm}(ν) cos(mφ)/√π` for `m > 0` and
/// `P̄_{l|m|}(ν) sin(|m|φ)/√π` for `m < 0`.
pub fn real_harmonic(l: u32, m: i32, nu: &Float, phi: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let am = m.unsigned_abs();
    if am > l {
        return Err(Error::domain("spherical_harmonic", format!("|m| = {am} > l = {l}")));
    }
    let bits = ctx.bits();
    let p = normalized_legendre(l, am, nu, LegendreStrategy::Native, ctx)?;
    let pi = Float::with_val(bits, Constant::Pi);
    Ok(match m {
        0 => p / (pi * 2u32).sqrt(),
        _ => {
            let arg = Float::with_val(bits, phi * am);
            let trig = if m > 0 { arg.cos() } else { arg.sin() };
            p * trig / pi.sqrt()
        }
    })
}

/// `Y_{lm}(ν, φ)` in the requested convention.
///
/// The complex kind is `P̄_{l|m|}(ν) e^{imφ}/√(2π)`. Under Condon–Shortley
/// phase the complex harmonic picks up `(-1)^m` for `m > 0` (so that
/// `Y_{l,-m} = (-1)^m Y_{lm}^*`), and the real harmonic picks up `(-1)^{|m|}`.
pub fn spherical_harmonic(
    l: u32,
    m: i32,
    nu: &Float,
    phi: &Float,
    conv: HarmonicConvention,
    ctx: &PrecisionContext,
) -> Result<HarmonicValue> {
    let am = m.unsigned_abs();
    if am > l {
        return Err(Error::domain("spherical_harmonic", format!("|m| = {am} > l = {l}")));
    }
    if !nu.is_finite() || *nu > 1 || *nu < -1 {
        return Err(Error::domain("spherical_harmonic", "requires nu in [-1, 1]"));
    }
    let odd = am % 2 == 1;
    match conv.kind {
        HarmonicKind::Real => {
            let mut v = real_harmonic(l, m, nu, phi, ctx)?;
            if conv.phase == HarmonicPhase::CondonShortley && odd {
                v = -v;
            }
            Ok(HarmonicValue::Real(v))
        }
        HarmonicKind::Complex => {
            let bits = ctx.bits();
            let p = normalized_legendre(l, am, nu, LegendreStrategy::Native, ctx)?;
            let norm = (Float::with_val(bits, Constant::Pi) * 2u32).sqrt();
            let mut amp = p / norm;
            if conv.phase == HarmonicPhase::CondonShortley && m > 0 && odd {
                amp = -amp;
            }
            let arg = Float::with_val(bits, phi * m);
            let (sin, cos) = arg.sin_cos(Float::new(bits));
            Ok(HarmonicValue::Complex {
                re: Float::with_val(bits, &amp * &cos),
                im: amp * sin,
            })
        }
    }
}
