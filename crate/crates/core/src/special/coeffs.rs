use rug::Float;

use crate::precision::{binomial, gamma, gen_binomial, PrecisionContext};
use crate::{Error, Result};

fn sign(v: i32) -> i32 {
    if v < 0 {
        -1
    } else {
        1
    }
}

/// `η^{m±m'}_{mm'}`: zero if any of `m`, `m'`, `m±m'` vanishes, otherwise the
/// product of their signs.
fn eta(m: i32, mp: i32, combined: i32) -> i32 {
    if m == 0 || mp == 0 || combined == 0 {
        0
    } else {
        sign(m) * sign(mp) * sign(combined)
    }
}

/// Azimuthal coupling coefficient `A^M_{mm'}` for real harmonics.
///
/// `M` is signed: its sign `ε = sign(m)·sign(m')` (zero counted positive)
/// selects between the cosine (`M ≥ 0`) and sine (`M < 0`) harmonic at the
/// third center. The coefficient equals `√(2π) ∫₀^{2π} Φ_m Φ_{m'} Φ_M dφ`
/// with `Φ_0 = 1/√(2π)`, `Φ_{m>0} = cos(mφ)/√π`, `Φ_{m<0} = sin(|m|φ)/√π`.
pub fn a_coeff(m: i32, mp: i32, big_m: i32, ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    let eps = sign(m) * sign(mp);
    let mut acc = Float::new(bits);
    let half = Float::with_val(bits, 0.5f64).sqrt();
    if big_m == eps * (m - mp).abs() {
        let e = eta(m, mp, m - mp).abs();
        acc += Float::with_val(bits, 2 - e).sqrt() * &half;
    }
    if big_m == eps * (m + mp).abs() {
        let e = eta(m, mp, m + mp);
        acc += Float::with_val(bits, &half * e);
    }
    acc
}

/// The nonzero `(M, A^M_{mm'})` pairs, ordered by `|M|` then sign.
pub fn a_terms(m: i32, mp: i32, ctx: &PrecisionContext) -> Vec<(i32, Float)> {
    let eps = sign(m) * sign(mp);
    let mut candidates = vec![eps * (m - mp).abs(), eps * (m + mp).abs()];
    candidates.sort_by_key(|&mm| (mm.abs(), -mm));
    candidates.dedup();
    candidates
        .into_iter()
        .map(|mm| (mm, a_coeff(m, mp, mm, ctx)))
        .filter(|(_, a)| !a.is_zero())
        .collect()
}

/// `D^{lλ}_β`, the coefficient of `x^{β-λ}` in `P̄_{lλ}(x)/(1-x²)^{λ/2}`.
/// Zero unless `λ ≤ β ≤ l` and `l - β` is even.
pub fn d_coeff(l: u32, lambda: u32, beta: i64, ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    if lambda > l || beta < lambda as i64 || beta > l as i64 || (l as i64 - beta) % 2 != 0 {
        return Float::new(bits);
    }
    let beta = beta as u32;
    let n = |v: u32| Float::with_val(bits, v);
    let k = (l - beta) / 2;
    // [(2l+1)/2 · C(l+λ, l)/C(l, λ)]^{1/2}
    let mut pref = n(2 * l + 1) * binomial(&n(l + lambda), l, ctx)
        / (binomial(&n(l), lambda, ctx) * 2u32);
    pref.sqrt_mut();
    pref >>= l;
    let mut c = pref * binomial(&n(l), k, ctx) * binomial(&n(l + beta), beta - lambda, ctx);
    if k % 2 == 1 {
        c = -c;
    }
    c
}

/// `g^q_{αβ}(lλ, l'λ'; Λ)`: coefficients of the expansion
///
/// `[(ξ²-1)(1-ν²)]^{Λ-(λ+λ')/2} P̄_{lλ}(cos θ_A) P̄_{l'λ'}(cos θ_B)
///   = Σ_{αβq} g^q_{αβ} (ξν)^q / ((ξ+ν)^α (ξ-ν)^β)`
///
/// with `cos θ_A = (1+ξν)/(ξ+ν)`, `cos θ_B = (1-ξν)/(ξ-ν)`:
/// `g^q = g^0 · F_q(α+2Λ-λ, β-λ')` and
/// `g^0 = Σ_{s=0}^{Λ} (-1)^s C(Λ,s) D^{lλ}_{α+2Λ-2s} D^{l'λ'}_β`.
/// Indices outside `-(2Λ-λ) ≤ α ≤ l`, `λ' ≤ β ≤ l'`,
/// `0 ≤ q ≤ α+2Λ-λ+β-λ'` give zero.
#[allow(clippy::too_many_arguments)]
pub fn g_coeff(
    l: u32,
    lambda: u32,
    lp: u32,
    lambdap: u32,
    cap_lambda: u32,
    alpha: i64,
    beta: u32,
    q: u32,
    ctx: &PrecisionContext,
) -> Float {
    let bits = ctx.bits();
    let (l_i, lam, cl) = (l as i64, lambda as i64, cap_lambda as i64);
    if alpha < lam - 2 * cl || alpha > l_i || beta < lambdap || beta > lp {
        return Float::new(bits);
    }
    let a_exp = alpha + 2 * cl - lam;
    let b_exp = (beta - lambdap) as i64;
    if a_exp < 0 || (q as i64) > a_exp + b_exp {
        return Float::new(bits);
    }
    let g0 = g0_coeff(l, lambda, lp, lambdap, cap_lambda, alpha, beta, ctx);
    if g0.is_zero() {
        return g0;
    }
    g0 * gen_binomial(&Float::with_val(bits, a_exp), &Float::with_val(bits, b_exp), q, ctx)
}

#[allow(clippy::too_many_arguments)]
fn g0_coeff(
    l: u32,
    lambda: u32,
    lp: u32,
    lambdap: u32,
    cap_lambda: u32,
    alpha: i64,
    beta: u32,
    ctx: &PrecisionContext,
) -> Float {
    let bits = ctx.bits();
    let db = d_coeff(lp, lambdap, beta as i64, ctx);
    if db.is_zero() {
        return db;
    }
    let mut acc = Float::new(bits);
    let cl = Float::with_val(bits, cap_lambda);
    for s in 0..=cap_lambda {
        let da = d_coeff(l, lambda, alpha + 2 * cap_lambda as i64 - 2 * s as i64, ctx);
        if da.is_zero() {
            continue;
        }
        let term = da * binomial(&cl, s, ctx);
        if s % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc * db
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProductTerm {
    pub alpha: i64,
    pub beta: u32,
    pub q: u32,
    pub coeff: Float,
}

/// All nonzero `g^q_{αβ}` for one orbital pair, with `Λ` recorded.
#[derive(Clone, Debug)]
pub struct LegendreProduct {
    pub cap_lambda: u32,
    /// Power `λ+λ'-2Λ` of `√((ξ²-1)(1-ν²))` multiplying the expansion to give
    /// the bare product `P̄_{lλ}(cos θ_A) P̄_{l'λ'}(cos θ_B)`.
    pub s_power: i64,
    pub terms: Vec<ProductTerm>,
}

pub fn legendre_product_terms(
    l: u32,
    lambda: u32,
    lp: u32,
    lambdap: u32,
    cap_lambda: u32,
    ctx: &PrecisionContext,
) -> LegendreProduct {
    let mut terms = Vec::new();
    let (lam, cl) = (lambda as i64, cap_lambda as i64);
    for alpha in (lam - 2 * cl)..=(l as i64) {
        for beta in lambdap..=lp {
            let g0 = g0_coeff(l, lambda, lp, lambdap, cap_lambda, alpha, beta, ctx);
            if g0.is_zero() {
                continue;
            }
            let a_exp = alpha + 2 * cl - lam;
            let b_exp = (beta - lambdap) as i64;
            if a_exp < 0 {
                continue;
            }
            let bits = ctx.bits();
            for q in 0..=(a_exp + b_exp) as u32 {
                let f = gen_binomial(&Float::with_val(bits, a_exp), &Float::with_val(bits, b_exp), q, ctx);
                if f.is_zero() {
                    continue;
                }
                terms.push(ProductTerm {
                    alpha,
                    beta,
                    q,
                    coeff: Float::with_val(bits, &g0 * &f),
                });
            }
        }
    }
    LegendreProduct {
        cap_lambda,
        s_power: lam + lambdap as i64 - 2 * cl,
        terms,
    }
}

/// `N_{nn'}(ζ, ζ', R) = (2ζ)^{n+½} (2ζ')^{n'+½} [Γ(2n+1) Γ(2n'+1)]^{-½} (R/2)^{n+n'+1}`.
pub fn norm_const(
    n: &Float,
    np: &Float,
    zeta: &Float,
    zetap: &Float,
    r: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    for (name, v) in [("n", n), ("n'", np), ("zeta", zeta), ("zeta'", zetap), ("R", r)] {
        if !v.is_finite() || *v <= 0 {
            return Err(Error::domain("norm_const", format!("{name} must be positive")));
        }
    }
    let bits = ctx.bits();
    let half = Float::with_val(bits, 0.5f64);
    let pow = |base: Float, e: Float| -> Float {
        let ln = base.ln();
        (ln * e).exp()
    };
    let a = pow(Float::with_val(bits, zeta * 2u32), Float::with_val(bits, n + &half));
    let b = pow(Float::with_val(bits, zetap * 2u32), Float::with_val(bits, np + &half));
    let g1 = gamma(&Float::with_val(bits, Float::with_val(bits, n * 2u32) + 1u32), ctx)?;
    let g2 = gamma(&Float::with_val(bits, Float::with_val(bits, np * 2u32) + 1u32), ctx)?;
    let e = Float::with_val(bits, n + np) + 1u32;
    let c = pow(Float::with_val(bits, r / 2u32), e);
    Ok(a * b / (g1 * g2).sqrt() * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{normalized_legendre, ExplicitLegendre, LegendreStrategy};
    use proptest::prelude::*;
    use rug::ops::Pow;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    /// √(2π) ∫ Φ_m Φ_m' Φ_M dφ by the trapezoid rule, exact for trigonometric
    /// polynomials of degree < number of nodes.
    fn a_by_phi_integration(m: i32, mp: i32, big_m: i32) -> f64 {
        let phi_fn = |k: i32, p: f64| -> f64 {
            use std::f64::consts::PI;
            match k {
                0 => 1.0 / (2.0 * PI).sqrt(),
                k if k > 0 => (k as f64 * p).cos() / PI.sqrt(),
                k => ((-k) as f64 * p).sin() / PI.sqrt(),
            }
        };
        let n = 64;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let s: f64 = (0..n)
            .map(|i| {
                let p = i as f64 * h;
                phi_fn(m, p) * phi_fn(mp, p) * phi_fn(big_m, p)
            })
            .sum();
        s * h * (2.0 * std::f64::consts::PI).sqrt()
    }

    #[test]
    fn a_coeff_examples() {
        let ctx = ctx();
        assert_eq!(a_coeff(0, 0, 0, &ctx), 1);
        assert!(a_coeff(1, 1, 1, &ctx).is_zero());
        let v = a_coeff(1, 1, 2, &ctx);
        let expected = Float::with_val(ctx.bits(), 0.5f64).sqrt();
        assert!(Float::with_val(ctx.bits(), &v - &expected).abs() < ctx.pow10(-44));
        assert_eq!(a_coeff(1, 1, 0, &ctx), 1);
    }

    #[test]
    fn a_coeff_matches_azimuthal_integral() {
        let ctx = ctx();
        for m in -4..=4 {
            for mp in -4..=4 {
                for big_m in -8..=8 {
                    let a = a_coeff(m, mp, big_m, &ctx).to_f64();
                    let direct = a_by_phi_integration(m, mp, big_m);
                    assert!((a - direct).abs() < 1e-12, "m={m} m'={mp} M={big_m}: {a} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn a_coeff_selection_rule() {
        let ctx = ctx();
        for m in -4i32..=4 {
            for mp in -4i32..=4 {
                for big_m in -9i32..=9 {
                    let allowed = big_m.abs() == (m - mp).abs() || big_m.abs() == (m + mp).abs();
                    if !allowed {
                        assert!(a_coeff(m, mp, big_m, &ctx).is_zero());
                    }
                }
                let terms = a_terms(m, mp, &ctx);
                assert!(terms.len() <= 2);
                for (big_m, _) in terms {
                    assert!(big_m.abs() == (m - mp).abs() || big_m.abs() == (m + mp).abs());
                }
            }
        }
    }

    #[test]
    fn d_coeff_reproduces_legendre() {
        let ctx = ctx();
        let d = d_coeff(0, 0, 0, &ctx);
        assert!((d.to_f64() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(d_coeff(3, 1, 2, &ctx).is_zero());
        assert!(d_coeff(3, 1, 5, &ctx).is_zero());
        let x = ctx.parse("0.43").unwrap();
        let bits = ctx.bits();
        for l in 0..=8u32 {
            for lam in 0..=l {
                let mut poly = Float::new(bits);
                for beta in lam..=l {
                    let term = d_coeff(l, lam, beta as i64, &ctx) * Float::with_val(bits, &x).pow(beta - lam);
                    poly += term;
                }
                let s = Float::with_val(bits, 1u32) - Float::with_val(bits, x.square_ref());
                let value = poly * s.sqrt().pow(lam);
                let reference = normalized_legendre(l, lam, &x, LegendreStrategy::Recurrence, &ctx).unwrap();
                assert!(Float::with_val(bits, &value - &reference).abs() < ctx.pow10(-38), "l={l} lam={lam}");
            }
        }
    }

    #[test]
    fn explicit_coefficients_cross_check() {
        let ctx = ctx();
        // b^k ↔ D_β with β = l - 2k
        for l in 0..=7u32 {
            for lam in 0..=l {
                let e = ExplicitLegendre::new(l, lam, &ctx);
                for (k, b) in e.coefficients().iter().enumerate() {
                    let d = d_coeff(l, lam, (l - 2 * k as u32) as i64, &ctx);
                    assert!(Float::with_val(ctx.bits(), b - &d).abs() < ctx.pow10(-40), "l={l} lam={lam} k={k}");
                }
            }
        }
    }

    /// Both sides of the product expansion at one point.
    #[allow(clippy::too_many_arguments)]
    fn product_sides(l: u32, lam: u32, lp: u32, lamp: u32, cap: u32, xi: &Float, nu: &Float, ctx: &PrecisionContext) -> (Float, Float) {
        let bits = ctx.bits();
        let sum = Float::with_val(bits, xi + nu);
        let dif = Float::with_val(bits, xi - nu);
        let xn = Float::with_val(bits, xi * nu);
        let ca = Float::with_val(bits, &xn + 1u32) / &sum;
        let cb = (Float::with_val(bits, 1u32) - &xn) / &dif;
        let pa = normalized_legendre(l, lam, &ca, LegendreStrategy::Recurrence, ctx).unwrap();
        let pb = normalized_legendre(lp, lamp, &cb, LegendreStrategy::Recurrence, ctx).unwrap();
        let s2 = (Float::with_val(bits, xi.square_ref()) - 1u32) * (Float::with_val(bits, 1u32) - Float::with_val(bits, nu.square_ref()));
        let e = 2 * cap as i64 - lam as i64 - lamp as i64;
        let s = s2.sqrt();
        let lhs = if e >= 0 { s.pow(e as u32) } else { Float::with_val(bits, 1u32) / s.pow((-e) as u32) } * pa * pb;
        let prod = legendre_product_terms(l, lam, lp, lamp, cap, ctx);
        let mut rhs = Float::new(bits);
        for t in &prod.terms {
            let mut v = Float::with_val(bits, &t.coeff) * Float::with_val(bits, &xn).pow(t.q);
            v *= Float::with_val(bits, &sum).pow(-t.alpha as i32);
            v /= Float::with_val(bits, &dif).pow(t.beta);
            rhs += v;
        }
        (lhs, rhs)
    }

    #[test]
    fn product_expansion_spot_check() {
        let ctx = ctx();
        let (lhs, rhs) = product_sides(2, 1, 3, 1, 1, &ctx.parse("1.7").unwrap(), &ctx.parse("0.3").unwrap(), &ctx);
        assert!(Float::with_val(ctx.bits(), &lhs - &rhs).abs() < ctx.pow10(-36) * Float::with_val(ctx.bits(), lhs.abs_ref()));
        // g_coeff agrees with the term list and vanishes outside ranges
        let prod = legendre_product_terms(2, 1, 3, 1, 1, &ctx);
        for t in &prod.terms {
            assert_eq!(g_coeff(2, 1, 3, 1, 1, t.alpha, t.beta, t.q, &ctx), t.coeff);
        }
        assert!(g_coeff(2, 1, 3, 1, 1, 2, 3, 99, &ctx).is_zero());
        assert!(g_coeff(2, 1, 3, 1, 1, -5, 3, 0, &ctx).is_zero());
        assert!(g_coeff(2, 1, 3, 1, 1, 0, 0, 0, &ctx).is_zero());
    }

    #[test]
    fn s_orbitals_collapse_to_single_term() {
        let ctx = ctx();
        let prod = legendre_product_terms(0, 0, 0, 0, 0, &ctx);
        assert_eq!(prod.terms.len(), 1);
        assert_eq!((prod.terms[0].alpha, prod.terms[0].beta, prod.terms[0].q), (0, 0, 0));
        assert!((prod.terms[0].coeff.to_f64() - 0.5).abs() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn product_expansion_all_small_indices(xi in 1.01f64..6.0, nu in -0.99f64..0.99) {
            let ctx = PrecisionContext::new(30).unwrap();
            let (xi, nu) = (ctx.num(xi), ctx.num(nu));
            for l in 0..=4u32 {
                for lam in 0..=l {
                    for lp in 0..=4u32 {
                        for lamp in 0..=lp {
                            let cap = lam.max(lamp);
                            let (lhs, rhs) = product_sides(l, lam, lp, lamp, cap, &xi, &nu, &ctx);
                            let scale = Float::with_val(ctx.bits(), lhs.abs_ref()) + 1e-3;
                            prop_assert!(Float::with_val(ctx.bits(), &lhs - &rhs).abs() < ctx.pow10(-31) * scale,
                                "({l},{lam},{lp},{lamp})");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn norm_const_examples() {
        let ctx = ctx();
        let one = ctx.num(1);
        let v = norm_const(&one, &one, &one, &one, &ctx.num(2), &ctx).unwrap();
        assert!(Float::with_val(ctx.bits(), &v - 4u32).abs() < ctx.pow10(-42));
        let h = ctx.num(1.5);
        let v = norm_const(&h, &h, &one, &one, &ctx.num(2), &ctx).unwrap();
        // (2ζ)^{n+½} = 2² for n = 3/2, so N = 4·4/Γ(4)
        let expected = Float::with_val(ctx.bits(), 16u32) / 6u32;
        assert!(Float::with_val(ctx.bits(), &v - &expected).abs() < ctx.pow10(-40));
        let (n, np, z, zp, r) = (ctx.num(2.3), ctx.num(1.7), ctx.num(0.9), ctx.num(3.1), ctx.num(2.4));
        let a = norm_const(&n, &np, &z, &zp, &r, &ctx).unwrap();
        let b = norm_const(&np, &n, &zp, &z, &r, &ctx).unwrap();
        assert!(Float::with_val(ctx.bits(), &a - &b).abs() < ctx.pow10(-40) * a.clone().abs());
        assert!(norm_const(&ctx.num(-1), &one, &one, &one, &one, &ctx).is_err());
    }
}
