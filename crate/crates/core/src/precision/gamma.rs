use rug::{Assign, Float};

use super::PrecisionContext;
use crate::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

/// `Γ(a)` for real `a`, excluding the poles at non-positive integers.
pub fn gamma(a: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !a.is_finite() {
        return Err(Error::domain("gamma", "argument is not finite"));
    }
    if *a <= 0 && a.is_integer() {
        return Err(Error::domain("gamma", format!("pole at {}", a.to_f64())));
    }
    Ok(Float::with_val(ctx.bits(), a.gamma_ref()))
}

/// `ln Γ(a)` for `a > 0`.
pub fn ln_gamma(a: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !a.is_finite() || *a <= 0 {
        return Err(Error::domain("ln_gamma", "argument must be positive"));
    }
    Ok(Float::with_val(ctx.bits(), a.ln_gamma_ref()))
}

/// Upper incomplete gamma function `Γ(a, x) = ∫_x^∞ t^(a-1) e^-t dt` for
/// `a > 0`, `x ≥ 0`.
///
/// Below the crossover `x < a + 1` the power series for the lower function is
/// summed and subtracted from `Γ(a)`; above it the Legendre continued fraction
/// is evaluated with the modified Lentz algorithm.
pub fn incomplete_gamma_upper(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !a.is_finite() || *a <= 0 {
        return Err(Error::domain("incomplete_gamma_upper", "a must be positive"));
    }
    if !x.is_finite() || *x < 0 {
        return Err(Error::domain("incomplete_gamma_upper", "x must be non-negative"));
    }
    let crossover = Float::with_val(ctx.bits(), a + 1u32);
    if *x < crossover {
        upper_gamma_series(a, x, ctx)
    } else {
        upper_gamma_cf(a, x, ctx)
    }
}

/// `x^a e^-x`, computed through logarithms to survive large arguments.
fn prefactor(a: &Float, x: &Float, bits: u32) -> Float {
    let lnx = Float::with_val(bits, x.ln_ref());
    let e = Float::with_val(bits, a * &lnx) - x;
    e.exp()
}

pub(crate) fn upper_gamma_series(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    // The subtraction Γ(a) − γ(a,x) can cancel; carry extra bits.
    let extra = 64 + (x.to_f64().abs() * std::f64::consts::LOG2_E) as u32;
    let bits = ctx.bits() + extra;
    let g = Float::with_val(bits, a.gamma_ref());
    if x.is_zero() {
        return Ok(Float::with_val(ctx.bits(), g));
    }
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32)));
    let mut term = Float::with_val(bits, 1u32) / a;
    let mut sum = term.clone();
    let mut denom = Float::with_val(bits, a);
    let mut converged = false;
    for _ in 0..MAX_TERMS {
        denom += 1u32;
        term *= x;
        term /= &denom;
        sum += &term;
        if term.clone().abs() < Float::with_val(bits, &sum * &eps).abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            best: sum.to_string(),
            error: term.to_string(),
            regions: 0,
        });
    }
    let lower = sum * prefactor(a, x, bits);
    Ok(Float::with_val(ctx.bits(), g - lower))
}

pub(crate) fn upper_gamma_cf(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if x.is_zero() {
        return Err(Error::domain("upper_gamma_cf", "x must be positive"));
    }
    let bits = ctx.bits() + 32;
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32 - 4)));
    let tiny = Float::with_val(bits, Float::i_exp(1, -(4 * bits as i32)));
    let mut b = Float::with_val(bits, x + 1u32) - a;
    let mut c = Float::with_val(bits, 1u32) / &tiny;
    let mut d = Float::with_val(bits, 1u32) / &b;
    let mut h = d.clone();
    for i in 1..MAX_TERMS {
        let fi = Float::with_val(bits, i as u64);
        // a_i = -i (i - a)
        let an = -(Float::with_val(bits, &fi - a) * &fi);
        b += 2u32;
        d = Float::with_val(bits, &an * &d) + &b;
        if d.clone().abs() < tiny {
            d.assign(&tiny);
        }
        c = Float::with_val(bits, &an / &c) + &b;
        if c.clone().abs() < tiny {
            c.assign(&tiny);
        }
        d.recip_mut();
        let del = Float::with_val(bits, &d * &c);
        h *= &del;
        if (del - 1u32).abs() < eps {
            return Ok(Float::with_val(ctx.bits(), h * prefactor(a, x, bits)));
        }
    }
    Err(Error::Convergence {
        best: h.to_string(),
        error: "continued fraction did not settle".into(),
        regions: 0,
    })
}

/// Relativistic radial exponent `γ = √(κ² − Z²/c²)`, the source of
/// Dirac-motivated noninteger principal quantum numbers.
pub fn dirac_gamma(kappa: i32, z: &Float, c: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if kappa == 0 {
        return Err(Error::domain("dirac_gamma", "kappa must be nonzero"));
    }
    if *z < 0 || *c <= 0 {
        return Err(Error::domain("dirac_gamma", "requires Z >= 0 and c > 0"));
    }
    let bits = ctx.bits();
    let ratio = Float::with_val(bits, z / c);
    let radicand = Float::with_val(bits, kappa * kappa) - ratio.square();
    if radicand <= 0 {
        return Err(Error::domain("dirac_gamma", "supercritical charge: kappa^2 <= Z^2/c^2"));
    }
    Ok(radicand.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    fn rel_close(a: &Float, b: &Float, digits: i32) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        let s = Float::with_val(a.prec(), b.abs_ref());
        d <= s * Float::with_val(a.prec(), 10).pow(-digits)
    }

    /// Stirling series for ln Γ(a) after shifting the argument past 50.
    fn stirling_ln_gamma(a: &Float) -> Float {
        let bits = a.prec() + 32;
        let mut z = Float::with_val(bits, a);
        let mut shift = Float::with_val(bits, 0);
        while z < 60 {
            shift += Float::with_val(bits, z.ln_ref());
            z += 1u32;
        }
        // Bernoulli numbers B_2k / (2k(2k-1)) for k = 1..12
        let coeffs: [(i64, i64); 12] = [
            (1, 12),
            (-1, 360),
            (1, 1260),
            (-1, 1680),
            (1, 1188),
            (-691, 360360),
            (1, 156),
            (-3617, 122400),
            (43867, 244188),
            (-174611, 125400),
            (77683, 5796),
            (-236364091, 1506960),
        ];
        let half = Float::with_val(bits, 0.5);
        let two_pi = Float::with_val(bits, rug::float::Constant::Pi) * 2u32;
        let mut s = Float::with_val(bits, &z - &half) * Float::with_val(bits, z.ln_ref()) - &z
            + Float::with_val(bits, two_pi.ln_ref()) / 2u32;
        let z2 = Float::with_val(bits, &z * &z);
        let mut zp = z.clone();
        for (num, den) in coeffs {
            s += Float::with_val(bits, num) / Float::with_val(bits, den) / &zp;
            zp *= &z2;
        }
        s - shift
    }

    #[test]
    fn gamma_matches_stirling_oracle() {
        let ctx = ctx();
        for a in ["0.5", "1.2", "2.5", "7", "13.75", "30.1", "0.001"] {
            let x = ctx.parse(a).unwrap();
            let g = gamma(&x, &ctx).unwrap();
            let oracle = stirling_ln_gamma(&x).exp();
            assert!(rel_close(&g, &Float::with_val(ctx.bits(), oracle), 40), "a = {a}");
        }
        let half = gamma(&ctx.num(0.5), &ctx).unwrap();
        assert!(rel_close(&half, &ctx.pi().sqrt(), 42));
    }

    #[test]
    fn integer_gamma_is_factorial() {
        let ctx = ctx();
        let mut f = ctx.num(1);
        for n in 1..25u32 {
            assert_eq!(gamma(&ctx.num(n), &ctx).unwrap(), f);
            f *= n;
        }
    }

    #[test]
    fn gamma_poles_rejected() {
        let ctx = ctx();
        assert!(gamma(&ctx.num(0), &ctx).is_err());
        assert!(gamma(&ctx.num(-3), &ctx).is_err());
        assert!(gamma(&ctx.num(-2.5), &ctx).is_ok());
        assert!(ln_gamma(&ctx.num(-1), &ctx).is_err());
    }

    /// γ(a, x) = x^a Σ (−x)^k / (k! (a + k)), summed at doubled precision.
    fn lower_gamma_alternating(a: &Float, x: &Float) -> Float {
        let bits = 2 * a.prec() + 128;
        let mut term = Float::with_val(bits, 1);
        let mut sum = Float::with_val(bits, 0);
        for k in 0..4000u32 {
            sum += Float::with_val(bits, &term / Float::with_val(bits, a + k));
            term *= -Float::with_val(bits, x);
            term /= k + 1;
            if term.is_zero() || term.clone().abs().get_exp().unwrap_or(0) < -(bits as i32) - 100 {
                break;
            }
        }
        sum * Float::with_val(bits, x).pow(a)
    }

    #[test]
    fn incomplete_gamma_against_alternating_series() {
        let ctx = ctx();
        for (a, x) in [("1.5", "0.3"), ("3.2", "2.0"), ("2.5", "4.0"), ("4", "20"), ("10.5", "3")] {
            let a = ctx.parse(a).unwrap();
            let x = ctx.parse(x).unwrap();
            let lower = lower_gamma_alternating(&a, &x);
            let expected = Float::with_val(lower.prec(), a.gamma_ref()) - lower;
            let got = incomplete_gamma_upper(&a, &x, &ctx).unwrap();
            assert!(
                rel_close(&got, &Float::with_val(ctx.bits(), expected), 40),
                "a = {a}, x = {x}"
            );
        }
    }

    #[test]
    fn incomplete_gamma_closed_forms() {
        let ctx = ctx();
        // Γ(1, x) = e^-x; Γ(n, x) = (n-1)! e^-x Σ x^k/k!
        for xs in ["0.01", "0.7", "1.9", "2.1", "35"] {
            let x = ctx.parse(xs).unwrap();
            let e = Float::with_val(ctx.bits(), -&x).exp();
            assert!(rel_close(&incomplete_gamma_upper(&ctx.num(1), &x, &ctx).unwrap(), &e, 42));
            let poly = Float::with_val(ctx.bits(), 1) + &x + Float::with_val(ctx.bits(), x.square_ref()) / 2u32;
            let g3 = Float::with_val(ctx.bits(), &e * &poly) * 2u32;
            assert!(rel_close(&incomplete_gamma_upper(&ctx.num(3), &x, &ctx).unwrap(), &g3, 41), "x={xs}");
        }
    }

    #[test]
    fn branches_agree_at_crossover() {
        let ctx = ctx();
        for (a, x) in [("2.5", "3.5"), ("1.5", "2.5"), ("7.3", "8.3"), ("0.5", "1.5")] {
            let a = ctx.parse(a).unwrap();
            let x = ctx.parse(x).unwrap();
            let s = upper_gamma_series(&a, &x, &ctx).unwrap();
            let c = upper_gamma_cf(&a, &x, &ctx).unwrap();
            assert!(rel_close(&s, &c, 40), "a = {a}");
        }
    }

    #[test]
    fn dirac_gamma_values() {
        let ctx = ctx();
        let c = ctx.parse("137.0359895").unwrap();
        assert_eq!(dirac_gamma(-1, &ctx.zero(), &c, &ctx).unwrap(), 1);
        for (kappa, expected) in [(1, "0.99997337396"), (2, "1.99998668712")] {
            let g = dirac_gamma(kappa, &ctx.num(1), &c, &ctx).unwrap();
            // oracle: kappa·sqrt(1 − (Z/(kappa c))²) via f64 with 1e-11 slack
            let f = (kappa as f64) * (1.0 - (1.0 / (kappa as f64 * 137.0359895)).powi(2)).sqrt();
            assert!((g.to_f64() - f).abs() < 1e-14);
            assert!((g.to_f64() - expected.parse::<f64>().unwrap()).abs() < 1e-11, "{g}");
            let squared = Float::with_val(ctx.bits(), g.square_ref()) + Float::with_val(ctx.bits(), 1u32 / &c).square();
            assert!(rel_close(&squared, &ctx.num(kappa * kappa), 42));
        }
        assert!(dirac_gamma(1, &ctx.num(200), &c, &ctx).is_err());
        assert!(dirac_gamma(0, &ctx.num(1), &c, &ctx).is_err());
    }

    proptest! {
        #[test]
        fn gamma_recurrence(a in 0.05f64..40.0) {
            let ctx = ctx();
            let x = ctx.num(a);
            let lhs = gamma(&Float::with_val(ctx.bits(), &x + 1u32), &ctx).unwrap();
            let rhs = Float::with_val(ctx.bits(), &x * gamma(&x, &ctx).unwrap());
            prop_assert!(rel_close(&lhs, &rhs, 42));
        }

        #[test]
        fn upper_gamma_recurrence(a in 0.1f64..15.0, x in 0.01f64..30.0) {
            // Γ(a+1, x) = a Γ(a, x) + x^a e^-x
            let ctx = ctx();
            let (a, x) = (ctx.num(a), ctx.num(x));
            let lhs = incomplete_gamma_upper(&Float::with_val(ctx.bits(), &a + 1u32), &x, &ctx).unwrap();
            let rhs = Float::with_val(ctx.bits(), &a * incomplete_gamma_upper(&a, &x, &ctx).unwrap())
                + prefactor(&a, &x, ctx.bits());
            prop_assert!(rel_close(&lhs, &rhs, 38));
        }
    }
}
