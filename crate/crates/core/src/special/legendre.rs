//! Associated Legendre functions of the first and second kind.
//!
//! Conventions: no Condon–Shortley phase. On `|x| ≤ 1`,
//! `P_l^m(x) = (1-x²)^{m/2} d^m P_l/dx^m`; on `x > 1` the factor is
//! `(x²-1)^{m/2}`, and likewise `Q_l^m(x) = (x²-1)^{m/2} d^m Q_l/dx^m`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use super::LegendreStrategy;
use crate::precision::{binomial, PrecisionContext};
use crate::{Error, Result};

/// `P_l^m(x)` for any real `x` (the `|1-x²|^{m/2}` factor selects the branch).
pub fn legendre_p(l: u32, m: u32, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if m > l {
        return Err(Error::domain("legendre_p", format!("m = {m} > l = {l}")));
    }
    Ok(legendre_p_column(l, m, x, ctx).pop().expect("column has l - m + 1 entries"))
}

/// `[P_m^m(x), P_{m+1}^m(x), …, P_{l_max}^m(x)]`; empty when `m > l_max`.
pub fn legendre_p_column(l_max: u32, m: u32, x: &Float, ctx: &PrecisionContext) -> Vec<Float> {
    if m > l_max {
        return Vec::new();
    }
    let bits = ctx.bits();
    let mut factor = Float::with_val(bits, x.square_ref()) - 1u32;
    factor.abs_mut();
    factor.sqrt_mut();
    legendre_p_column_with_factor(l_max, m, x, &factor, bits)
}

/// As [`legendre_p_column`] with `factor = √|x²-1|` supplied by the caller,
/// who can often form it without cancellation near `|x| = 1`.
pub(crate) fn legendre_p_column_with_factor(l_max: u32, m: u32, x: &Float, factor: &Float, bits: u32) -> Vec<Float> {
    if m > l_max {
        return Vec::new();
    }
    // d^m P_m / dx^m = (2m-1)!!
    let mut diag = Float::with_val(bits, 1u32);
    for k in 1..=m {
        diag *= factor;
        diag *= 2 * k - 1;
    }
    legendre_column_from_diag(l_max, m, x, diag, bits)
}

/// Upward three-term recurrence in degree starting from `P_m^m`.
fn legendre_column_from_diag(l_max: u32, m: u32, x: &Float, diag: Float, bits: u32) -> Vec<Float> {
    let mut out = Vec::with_capacity((l_max - m + 1) as usize);
    out.push(diag);
    if l_max > m {
        let next = Float::with_val(bits, x * &out[0]) * (2 * m + 1);
        out.push(next);
    }
    for l in (m + 1)..l_max {
        let i = (l - m) as usize;
        let a = Float::with_val(bits, x * &out[i]) * (2 * l + 1);
        let b = Float::with_val(bits, &out[i - 1] * (l + m));
        out.push((a - b) / (l - m + 1));
    }
    out
}

/// `Q_l^m(ξ)` for `ξ > 1`.
pub fn legendre_q(l: u32, m: u32, xi: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if m > l {
        return Err(Error::domain("legendre_q", format!("m = {m} > l = {l}")));
    }
    let table = legendre_q_table(l, m, xi, ctx)?;
    Ok(table.get(m, l).clone())
}

/// Table of `Q_L^M(ξ)` for `0 ≤ M ≤ m_max`, `M ≤ L ≤ l_max`.
#[derive(Clone, Debug)]
pub struct QTable {
    l_max: u32,
    rows: Vec<Vec<Float>>,
}

impl QTable {
    /// `Q_l^m`; panics if `(l, m)` is outside the computed range or `m > l`.
    pub fn get(&self, m: u32, l: u32) -> &Float {
        assert!(l <= self.l_max && m <= l, "Q_{l}^{m} outside table");
        &self.rows[m as usize][(l - m) as usize]
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn m_max(&self) -> u32 {
        self.rows.len() as u32 - 1
    }
}

/// Computes `Q_L^M(ξ)` for all `L ≤ l_max`, `M ≤ min(m_max, L)`.
///
/// `Q_L` is the minimal solution of the Legendre recurrence on `ξ > 1`, so
/// upward recurrence in `L` amplifies rounding by about `ρ^{2L}` with
/// `ρ = ξ + √(ξ²-1)`. When that loss stays within half the guard digits the
/// upward recurrence from the closed forms is used; otherwise the ratios
/// `Q_L/Q_{L-1}` come from a backward (Miller) continued-fraction sweep
/// normalised by `Q_0 = ½ ln((ξ+1)/(ξ-1))`. Orders `M > 0` follow from
/// `(ξ²-1)^{1/2} Q_L^{M+1} = (L-M) ξ Q_L^M - (L+M) Q_{L-1}^M`.
pub fn legendre_q_table(l_max: u32, m_max: u32, xi: &Float, ctx: &PrecisionContext) -> Result<QTable> {
    if !xi.is_finite() || *xi <= 1 {
        return Err(Error::domain("legendre_q", "requires xi > 1"));
    }
    let m_max = m_max.min(l_max);
    let bits = ctx.bits();
    let q0 = legendre_q0_column(l_max, xi, ctx);
    let mut rows = vec![q0];
    if m_max > 0 {
        let mut s = Float::with_val(bits, xi.square_ref()) - 1u32;
        s.sqrt_mut();
        for m in 0..m_max {
            let prev = &rows[m as usize];
            let mut next = Vec::with_capacity((l_max - m) as usize);
            for l in (m + 1)..=l_max {
                let ql = &prev[(l - m) as usize];
                let qlm1 = &prev[(l - 1 - m) as usize];
                let a = Float::with_val(bits, xi * ql) * (l - m);
                let b = Float::with_val(bits, qlm1 * (l + m));
                next.push((a - b) / &s);
            }
            rows.push(next);
        }
    }
    Ok(QTable { l_max, rows })
}

fn legendre_q0_column(l_max: u32, xi: &Float, ctx: &PrecisionContext) -> Vec<Float> {
    let bits = ctx.bits();
    let xm1 = Float::with_val(bits, xi - 1u32);
    let q0 = (Float::with_val(bits, 2u32) / &xm1).ln_1p() / 2u32;
    let mut out = Vec::with_capacity(l_max as usize + 1);
    if l_max == 0 {
        out.push(q0);
        return out;
    }
    let rho = xi.to_f64() + (xi.to_f64().powi(2) - 1.0).max(0.0).sqrt();
    let ln_rho = rho.ln().max(1e-300);
    let allowed_loss = ctx.guard_digits() as f64 / 2.0 * std::f64::consts::LN_10;
    if 2.0 * l_max as f64 * ln_rho <= allowed_loss {
        // Q_1 = ξ Q_0 - 1, then upward.
        let q1 = Float::with_val(bits, xi * &q0) - 1u32;
        out.push(q0);
        out.push(q1);
        for l in 1..l_max {
            let i = l as usize;
            let a = Float::with_val(bits, xi * &out[i]) * (2 * l + 1);
            let b = Float::with_val(bits, &out[i - 1] * l);
            out.push((a - b) / (l + 1));
        }
        return out;
    }
    let needed = (ctx.working_digits() as f64 + 2.0) * std::f64::consts::LN_10 / (2.0 * ln_rho);
    let start = l_max + needed.ceil() as u32 + 2;
    // r_L = Q_L / Q_{L-1} = L / ((2L+1) ξ - (L+1) r_{L+1})
    let mut ratios = vec![Float::new(bits); l_max as usize + 1];
    let mut r = Float::with_val(bits, 0u32);
    for l in (1..=start).rev() {
        let denom = Float::with_val(bits, xi * (2 * l + 1)) - Float::with_val(bits, &r * (l + 1));
        r = Float::with_val(bits, l) / denom;
        if l <= l_max {
            ratios[l as usize] = r.clone();
        }
    }
    out.push(q0);
    for l in 1..=l_max as usize {
        let next = Float::with_val(bits, &out[l - 1] * &ratios[l]);
        out.push(next);
    }
    out
}

/// Normalization `√((2l+1)/2 · (l-λ)!/(l+λ)!)` turning `P_l^λ` into `P̄_{lλ}`.
pub fn legendre_norm(l: u32, lambda: u32, ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    let mut ratio = Float::with_val(bits, 2 * l + 1) / 2u32;
    for k in (l - lambda + 1)..=(l + lambda) {
        ratio /= k;
    }
    ratio.sqrt()
}

/// Normalized associated Legendre function `P̄_{lλ}(x)` on `[-1, 1]`, with
/// `∫_{-1}^{1} P̄_{lλ}² dx = 1`.
pub fn normalized_legendre(
    l: u32,
    lambda: u32,
    x: &Float,
    strategy: LegendreStrategy,
    ctx: &PrecisionContext,
) -> Result<Float> {
    if lambda > l {
        return Err(Error::domain("normalized_legendre", format!("lambda = {lambda} > l = {l}")));
    }
    if !x.is_finite() || *x > 1 || *x < -1 {
        return Err(Error::domain("normalized_legendre", "requires x in [-1, 1]"));
    }
    Ok(match strategy.resolve(l) {
        LegendreStrategy::Explicit => ExplicitLegendre::new(l, lambda, ctx).eval(x),
        _ => normalized_legendre_recurrence(l, lambda, x, ctx)
            .pop()
            .expect("non-empty column"),
    })
}

/// `[P̄_{λλ}(x), …, P̄_{l_max λ}(x)]` via the normalized upward recurrence.
pub fn normalized_legendre_recurrence(
    l_max: u32,
    lambda: u32,
    x: &Float,
    ctx: &PrecisionContext,
) -> Vec<Float> {
    if lambda > l_max {
        return Vec::new();
    }
    let bits = ctx.bits();
    let mut s = Float::with_val(bits, 1u32) - Float::with_val(bits, x.square_ref());
    if s < 0 {
        s = Float::with_val(bits, 0u32);
    }
    s.sqrt_mut();
    normalized_legendre_column_with_s(l_max, lambda, x, &s, bits)
}

/// As [`normalized_legendre_recurrence`] with `s = √(1-x²)` supplied.
pub(crate) fn normalized_legendre_column_with_s(
    l_max: u32,
    lambda: u32,
    x: &Float,
    s: &Float,
    bits: u32,
) -> Vec<Float> {
    if lambda > l_max {
        return Vec::new();
    }
    let mut diag = Float::with_val(bits, 0.5f64).sqrt();
    for m in 1..=lambda {
        let f = Float::with_val(bits, 2 * m + 1) / (2 * m);
        diag *= f.sqrt();
        diag *= s;
    }
    let mut out = Vec::with_capacity((l_max - lambda + 1) as usize);
    out.push(diag);
    let lam2 = (lambda as u64) * (lambda as u64);
    for l in lambda..l_max {
        let lp1 = l as u64 + 1;
        let i = (l - lambda) as usize;
        let a = Float::with_val(bits, 4 * lp1 * lp1 - 1) / Float::with_val(bits, lp1 * lp1 - lam2);
        let mut next = Float::with_val(bits, x * &out[i]) * a.sqrt();
        if i > 0 {
            let l = l as u64;
            let b = Float::with_val(bits, (2 * l + 3) * (l * l - lam2))
                / Float::with_val(bits, (2 * l - 1) * (lp1 * lp1 - lam2));
            next -= Float::with_val(bits, &out[i - 1] * b.sqrt());
        }
        out.push(next);
    }
    out
}

/// Explicit polynomial form `P̄_{lλ}(x) = (1-x²)^{λ/2} Σ_k b^k x^{l-λ-2k}`
/// with coefficients
/// `b^k = 2^{-l} [(2l+1) / (2 C(l,λ) C(l+λ,λ))]^{1/2} (-1)^k C(λ+k,k) C(2l-2k,l-k) C(l-k,l-λ-2k)`.
#[derive(Clone, Debug)]
pub struct ExplicitLegendre {
    l: u32,
    lambda: u32,
    coeffs: Arc<Vec<Float>>,
}

type CoeffCache = Mutex<HashMap<(u32, u32, u32), Arc<Vec<Float>>>>;

fn explicit_cache() -> &'static CoeffCache {
    static CACHE: OnceLock<CoeffCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl ExplicitLegendre {
    pub fn new(l: u32, lambda: u32, ctx: &PrecisionContext) -> Self {
        assert!(lambda <= l, "lambda > l");
        let key = (l, lambda, ctx.bits());
        let cached = explicit_cache().lock().unwrap().get(&key).cloned();
        let coeffs = match cached {
            Some(c) => c,
            None => {
                let c = Arc::new(explicit_coefficients(l, lambda, ctx));
                explicit_cache().lock().unwrap().insert(key, c.clone());
                c
            }
        };
        ExplicitLegendre { l, lambda, coeffs }
    }

    /// `b^k` for `k = 0..=⌊(l-λ)/2⌋`.
    pub fn coefficients(&self) -> &[Float] {
        &self.coeffs
    }

    /// Polynomial part `Σ_k b^k x^{l-λ-2k}` (Horner in `x²`).
    pub fn eval_poly(&self, x: &Float) -> Float {
        let bits = x.prec().max(self.coeffs[0].prec());
        let x2 = Float::with_val(bits, x.square_ref());
        // highest power carries k = 0
        let mut acc = Float::with_val(bits, 0u32);
        for b in self.coeffs.iter() {
            acc *= &x2;
            acc += b;
        }
        if (self.l - self.lambda) % 2 == 1 {
            acc *= x;
        }
        acc
    }

    pub fn eval(&self, x: &Float) -> Float {
        let mut v = self.eval_poly(x);
        if self.lambda > 0 {
            let bits = v.prec();
            let mut s = Float::with_val(bits, 1u32) - Float::with_val(bits, x.square_ref());
            if s < 0 {
                s = Float::with_val(bits, 0u32);
            }
            if self.lambda % 2 == 1 {
                v *= Float::with_val(bits, s.sqrt_ref());
            }
            for _ in 0..self.lambda / 2 {
                v *= &s;
            }
        }
        v
    }
}

fn explicit_coefficients(l: u32, lambda: u32, ctx: &PrecisionContext) -> Vec<Float> {
    let bits = ctx.bits();
    let n = |v: u32| Float::with_val(bits, v);
    let mut pref = Float::with_val(bits, 2 * l + 1)
        / (binomial(&n(l), lambda, ctx) * binomial(&n(l + lambda), lambda, ctx) * 2u32);
    pref.sqrt_mut();
    pref >>= l;
    (0..=(l - lambda) / 2)
        .map(|k| {
            let mut c = Float::with_val(bits, &pref)
                * binomial(&n(lambda + k), k, ctx)
                * binomial(&n(2 * l - 2 * k), l - k, ctx)
                * binomial(&n(l - k), l - lambda - 2 * k, ctx);
            if k % 2 == 1 {
                c = -c;
            }
            c
        })
        .collect()
}
