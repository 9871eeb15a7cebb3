//! Auxiliary functions `J` and `K`: the two-dimensional integrals over
//! `[1, ξ_C] × [-1, 1]` and `[ξ_C, ∞) × [-1, 1]` into which every Neumann
//! term of a three-center integral factorizes.
//!
//! Three routes are provided:
//!
//! - [`aux_reduced`]: the reduced functions with a monomial integrand
//!   `(ξν)^q (ξ+ν)^{N1} (ξ-ν)^{N2}`;
//! - [`aux_general_direct`]: the general functions, evaluating the two
//!   orbital Legendre factors `P̄_{lλ}(cos θ_A) P̄_{l'λ'}(cos θ_B)` pointwise;
//! - [`aux_general_expanded`]: the general functions as a finite sum of
//!   reduced functions through the Legendre-product coefficients.
//!
//! All three share one batched integrand, so a whole column of `L` values
//! (as needed by the three-center summation) costs little more than one.

use rug::ops::Pow;
use rug::Float;

use crate::precision::PrecisionContext;
use crate::quadrature::{
    integrate_2d, integrate_semi_infinite, DecayHint, ErrorNorm, Integrand2D, MappedRule,
    QuadOptions, QuadResult, Region2D, RuleSums, SemiInfiniteResult,
};
use crate::special::{
    legendre_p_column_with_factor, legendre_product_terms, legendre_q_table,
    normalized_legendre_column_with_s, ExplicitLegendre, LegendreStrategy,
};
use crate::{Error, Result};

/// Dimensionless parameters shared by a `(J, K)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct AuxParams {
    /// `½(ζ+ζ')R`
    pub p1: Float,
    /// `½(ζ-ζ')R`
    pub p2: Float,
    /// Boundary between the `J` and `K` ranges; there is no default.
    pub xi_c: Float,
}

impl AuxParams {
    pub fn new(p1: Float, p2: Float, xi_c: Float) -> Result<Self> {
        if !p1.is_finite() || p1 <= 0 {
            return Err(Error::domain("aux", "p1 must be positive"));
        }
        if !p2.is_finite() {
            return Err(Error::domain("aux", "p2 must be finite"));
        }
        if !xi_c.is_finite() || xi_c <= 1 {
            return Err(Error::domain("aux", "xi_C must exceed 1"));
        }
        Ok(AuxParams { p1, p2, xi_c })
    }

    /// `p1`, `p2` for orbital exponents `ζ, ζ'` at separation `R`.
    pub fn from_exponents(zeta: &Float, zetap: &Float, r: &Float, xi_c: Float) -> Result<Self> {
        let bits = r.prec().max(zeta.prec());
        let p1 = Float::with_val(bits, zeta + zetap) * r / 2u32;
        let p2 = Float::with_val(bits, zeta - zetap) * r / 2u32;
        AuxParams::new(p1, p2, xi_c)
    }
}

/// Values of `J` and `K` with their error estimates. The `K` error includes
/// the bound on the truncated tail.
#[derive(Clone, Debug)]
pub struct AuxPair {
    pub j_value: Float,
    pub k_value: Float,
    pub j_error: Float,
    pub k_error: Float,
}

/// Quantum numbers `(n, l, m)` of one orbital.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitalIndices {
    pub n: Float,
    pub l: u32,
    pub m: i32,
}

impl OrbitalIndices {
    pub fn new(n: Float, l: u32, m: i32) -> Result<Self> {
        if !n.is_finite() || n <= 0 {
            return Err(Error::InvalidOrbital(format!("principal quantum number {n} must be positive")));
        }
        if Float::with_val(n.prec(), n.floor_ref()) < l {
            return Err(Error::InvalidOrbital(format!("l = {l} exceeds the integer part of n = {}", n.to_f64())));
        }
        if m.unsigned_abs() > l {
            return Err(Error::InvalidOrbital(format!("|m| = {} exceeds l = {l}", m.unsigned_abs())));
        }
        Ok(OrbitalIndices { n, l, m })
    }

    /// `λ = |m|`.
    pub fn lambda(&self) -> u32 {
        self.m.unsigned_abs()
    }
}

/// Which Legendre function of `ξ` multiplies the integrand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Radial {
    P,
    Q,
}

/// `coeff · (ξν)^q (ξ+ν)^{da} (ξ-ν)^{db}` on top of the base powers.
#[derive(Clone, Debug)]
struct Monomial {
    coeff: Float,
    q: u32,
    da: i32,
    db: i32,
}

#[derive(Clone, Debug)]
enum Angular {
    /// Sum of monomials times `[(ξ²-1)(1-ν²)]^{s_power/2}`.
    Monomials { s_power: u32, terms: Vec<Monomial> },
    /// `P̄_{la,λa}(cos θ_A) P̄_{lb,λb}(cos θ_B)`.
    Orbitals {
        la: u32,
        lambda_a: u32,
        lb: u32,
        lambda_b: u32,
        poly_a: ExplicitLegendre,
        poly_b: ExplicitLegendre,
    },
}

impl Angular {
    fn len(&self) -> usize {
        match self {
            Angular::Monomials { terms, .. } => terms.len(),
            Angular::Orbitals { .. } => 1,
        }
    }
}

/// Batched integrand. Component `(L, t)` (stored at `(L - l_lo)·T + t`) is
///
/// `w_L · (ξ+ν)^{N1} (ξ-ν)^{N2} A_t(ξ, ν) e^{-p1 ξ - p2 ν} X_L^M(ξ) P̄_{LM}(ν)`
///
/// with `X = P` on the `J` range and `X = Q` on the `K` range.
///
/// When the combined power of `√(ξ²-1)` and `√(1-ν²)` is odd the integrand is
/// not smooth along the edges `ξ = 1` and `ν = ±1`, which defeats 2D
/// bisection. In that case the kernel integrates over `ξ = cosh t` (on the
/// `J` range only; the `K` range stays clear of `ξ = 1`) and `ν = -cos θ`,
/// where the square roots become `sinh t` and `sin θ`.
pub(crate) struct AuxKernel {
    ctx: PrecisionContext,
    p1: Float,
    p2: Float,
    n1: Float,
    n2: Float,
    n1_int: Option<i32>,
    n2_int: Option<i32>,
    order: u32,
    l_lo: u32,
    l_hi: u32,
    weights: Vec<Float>,
    radial: Radial,
    strategy: LegendreStrategy,
    explicit: Vec<Option<ExplicitLegendre>>,
    angular: Angular,
    odd_parity: bool,
}

struct XiPoint {
    xi: Float,
    u: Float,
    /// `√(ξ²-1)`
    f: Float,
    /// `e^{-p1 ξ}` times the Jacobian of the node variable.
    e: Float,
    x: Vec<Float>,
}

struct NuPoint {
    v: Float,
    w: Float,
    /// `√(1-ν²)`
    s: Float,
    e: Float,
    y: Vec<Float>,
}

fn as_small_int(x: &Float) -> Option<i32> {
    if x.is_integer() && Float::with_val(64, x.abs_ref()) <= 1u32 << 20 {
        x.to_i32_saturating()
    } else {
        None
    }
}

/// `x^n` for `x > 0`, through `exp(n ln x)` unless `n` is a small integer.
fn real_power(x: &Float, n: &Float, small: Option<i32>, bits: u32) -> Float {
    match small {
        Some(k) => Float::with_val(bits, x.pow(k)),
        None if x.is_zero() => Float::new(bits),
        None => (Float::with_val(bits, x.ln_ref()) * n).exp(),
    }
}

fn clamp_unit(x: &mut Float) {
    if *x > 1 {
        *x = Float::with_val(x.prec(), 1u32);
    } else if *x < -1 {
        *x = Float::with_val(x.prec(), -1i32);
    }
}

impl AuxKernel {
    #[allow(clippy::too_many_arguments)]
    fn new(
        ctx: &PrecisionContext,
        params: &AuxParams,
        n1: &Float,
        n2: &Float,
        order: u32,
        l_range: (u32, u32),
        weights: Vec<Float>,
        radial: Radial,
        strategy: LegendreStrategy,
        angular: Angular,
    ) -> Self {
        let (l_lo, l_hi) = l_range;
        debug_assert!(order <= l_lo && l_lo <= l_hi);
        debug_assert_eq!(weights.len(), (l_hi - l_lo + 1) as usize);
        let bits = ctx.bits();
        let explicit = (l_lo..=l_hi)
            .map(|l| match strategy.resolve(l) {
                LegendreStrategy::Explicit => Some(ExplicitLegendre::new(l, order, ctx)),
                _ => None,
            })
            .collect();
        let root_power = match &angular {
            Angular::Monomials { s_power, .. } => order + s_power,
            Angular::Orbitals { lambda_a, lambda_b, .. } => order + lambda_a + lambda_b,
        };
        AuxKernel {
            ctx: *ctx,
            p1: Float::with_val(bits, &params.p1),
            p2: Float::with_val(bits, &params.p2),
            n1: Float::with_val(bits, n1),
            n2: Float::with_val(bits, n2),
            n1_int: as_small_int(n1),
            n2_int: as_small_int(n2),
            order,
            l_lo,
            l_hi,
            weights,
            radial,
            strategy,
            explicit,
            angular,
            odd_parity: root_power % 2 == 1,
        }
    }

    fn with_radial(&self, radial: Radial, weights: Vec<Float>) -> Self {
        AuxKernel {
            ctx: self.ctx,
            p1: self.p1.clone(),
            p2: self.p2.clone(),
            n1: self.n1.clone(),
            n2: self.n2.clone(),
            n1_int: self.n1_int,
            n2_int: self.n2_int,
            order: self.order,
            l_lo: self.l_lo,
            l_hi: self.l_hi,
            weights,
            radial,
            strategy: self.strategy,
            explicit: self.explicit.clone(),
            angular: self.angular.clone(),
            odd_parity: self.odd_parity,
        }
    }

    fn bits(&self) -> u32 {
        self.ctx.bits()
    }

    fn n_l(&self) -> usize {
        (self.l_hi - self.l_lo + 1) as usize
    }

    fn xi_trig(&self) -> bool {
        self.odd_parity && self.radial == Radial::P
    }

    fn nu_trig(&self) -> bool {
        self.odd_parity
    }

    /// Range of the `ν` node variable.
    fn nu_range(&self) -> (Float, Float) {
        if self.nu_trig() {
            (self.ctx.zero(), self.ctx.pi())
        } else {
            (self.ctx.num(-1), self.ctx.num(1))
        }
    }

    /// Integration region for `ξ ∈ [lo, hi]` (on the `J` side).
    fn region(&self, lo: &Float, hi: &Float) -> Region2D {
        let bits = self.bits();
        let (a, b) = if self.xi_trig() {
            (Float::with_val(bits, lo.acosh_ref()), Float::with_val(bits, hi.acosh_ref()))
        } else {
            (Float::with_val(bits, lo), Float::with_val(bits, hi))
        };
        let (c, d) = self.nu_range();
        Region2D::new(a, b, c, d)
    }

    fn xi_point(&self, node: &Float) -> XiPoint {
        let bits = self.bits();
        let (xi, u, f, jac) = if self.xi_trig() {
            let h = Float::with_val(bits, node / 2u32).sinh();
            let u = Float::with_val(bits, h.square_ref()) * 2u32;
            let f = Float::with_val(bits, node.sinh_ref());
            (Float::with_val(bits, &u + 1u32), u, f.clone(), Some(f))
        } else {
            let u = Float::with_val(bits, node - 1u32);
            let f = (Float::with_val(bits, &u + 2u32) * &u).sqrt();
            (Float::with_val(bits, node), u, f, None)
        };
        let mut e = Float::with_val(bits, -Float::with_val(bits, &self.p1 * &xi)).exp();
        if let Some(j) = jac {
            e *= j;
        }
        let skip = (self.l_lo - self.order) as usize;
        let x = match self.radial {
            Radial::P => {
                let mut col = legendre_p_column_with_factor(self.l_hi, self.order, &xi, &f, bits);
                col.drain(..skip);
                col
            }
            Radial::Q => {
                let table = legendre_q_table(self.l_hi, self.order, &xi, &self.ctx)
                    .expect("xi > 1 on the K range");
                (self.l_lo..=self.l_hi).map(|l| table.get(self.order, l).clone()).collect()
            }
        };
        XiPoint { xi, u, f, e, x }
    }

    fn nu_point(&self, node: &Float) -> NuPoint {
        let bits = self.bits();
        let (nu, v, w, s, jac) = if self.nu_trig() {
            let half = Float::with_val(bits, node / 2u32);
            let (sh, ch) = half.sin_cos(Float::new(bits));
            let v = Float::with_val(bits, sh.square_ref()) * 2u32;
            let w = Float::with_val(bits, ch.square_ref()) * 2u32;
            let nu = -Float::with_val(bits, node.cos_ref());
            let s = Float::with_val(bits, node.sin_ref());
            (nu, v, w, s.clone(), Some(s))
        } else {
            let v = Float::with_val(bits, node + 1u32);
            let w = Float::with_val(bits, 1u32 - Float::with_val(bits, node));
            let s = Float::with_val(bits, &v * &w).sqrt();
            (Float::with_val(bits, node), v, w, s, None)
        };
        let mut e = Float::with_val(bits, -Float::with_val(bits, &self.p2 * &nu)).exp();
        if let Some(j) = jac {
            e *= j;
        }
        let needs_column = self.explicit.iter().any(Option::is_none);
        let column = if needs_column {
            normalized_legendre_column_with_s(self.l_hi, self.order, &nu, &s, bits)
        } else {
            Vec::new()
        };
        let s_pow = Float::with_val(bits, (&s).pow(self.order));
        let y = (self.l_lo..=self.l_hi)
            .zip(&self.explicit)
            .map(|(l, ex)| match ex {
                Some(ex) => ex.eval_poly(&nu) * &s_pow,
                None => column[(l - self.order) as usize].clone(),
            })
            .collect();
        NuPoint { v, w, s, e, y }
    }

    /// Angular-and-power factors `(ξ+ν)^{N1}(ξ-ν)^{N2} A_t` at one node pair.
    fn terms(&self, xp: &XiPoint, np: &NuPoint, out: &mut [Float]) {
        let bits = self.bits();
        let sum = Float::with_val(bits, &xp.u + &np.v);
        let dif = Float::with_val(bits, &xp.u + &np.w);
        let mut base = real_power(&sum, &self.n1, self.n1_int, bits);
        base *= real_power(&dif, &self.n2, self.n2_int, bits);
        // √((ξ²-1)(1-ν²))
        let root = || Float::with_val(bits, &xp.f * &np.s);
        match &self.angular {
            Angular::Orbitals {
                lambda_a,
                lambda_b,
                poly_a,
                poly_b,
                ..
            } => {
                // cos θ_A = (1+ξν)/(ξ+ν) and cos θ_B = (1-ξν)/(ξ-ν), formed
                // from u = ξ-1, v = 1+ν, w = 1-ν to avoid cancellation at
                // the nuclei.
                let uv = Float::with_val(bits, &xp.u * &np.v);
                let uw = Float::with_val(bits, &xp.u * &np.w);
                let mut ca = (Float::with_val(bits, &np.v - &xp.u) + uv) / &sum;
                let mut cb = (Float::with_val(bits, &np.w - &xp.u) + uw) / &dif;
                clamp_unit(&mut ca);
                clamp_unit(&mut cb);
                let mut pa = poly_a.eval_poly(&ca);
                let mut pb = poly_b.eval_poly(&cb);
                if *lambda_a > 0 || *lambda_b > 0 {
                    let s = root();
                    if *lambda_a > 0 {
                        pa *= Float::with_val(bits, &s / &sum).pow(*lambda_a);
                    }
                    if *lambda_b > 0 {
                        pb *= Float::with_val(bits, &s / &dif).pow(*lambda_b);
                    }
                }
                base *= pa;
                base *= pb;
                out[0] = base;
            }
            Angular::Monomials { s_power, terms } => {
                if *s_power > 0 {
                    base *= root().pow(*s_power);
                }
                let xn = Float::with_val(bits, &xp.xi * (Float::with_val(bits, &np.v) - 1u32));
                for (slot, t) in out.iter_mut().zip(terms) {
                    let mut v = Float::with_val(bits, &base * &t.coeff);
                    if t.q > 0 {
                        v *= Float::with_val(bits, (&xn).pow(t.q));
                    }
                    if t.da != 0 {
                        v *= Float::with_val(bits, (&sum).pow(t.da));
                    }
                    if t.db != 0 {
                        v *= Float::with_val(bits, (&dif).pow(t.db));
                    }
                    *slot = v;
                }
            }
        }
    }

    /// Envelope `∫|f| dν ≤ scale · ξ^power · e^{-p1 ξ}` for `ξ ≥ ξ_C`, summed
    /// over components. Uses `|P̄_{lλ}| ≤ √((2l+1)/2)`, `ξ ± ν ≤ 2ξ`,
    /// `|ξν| ≤ ξ`, `(ξ²-1)(1-ν²) ≤ ξ²` and the decrease of `|Q_L^M|` on
    /// `(1, ∞)`.
    fn envelope(&self, xi_c: &Float) -> Result<DecayHint> {
        let bits = self.bits();
        let pbar_bound = |l: u32| (Float::with_val(bits, 2 * l + 1) / 2u32).sqrt();
        let two_pow = |e: &Float| (Float::with_val(bits, 2u32).ln() * e).exp();
        let base_power = Float::with_val(bits, &self.n1 + &self.n2);
        let mut per_term: Vec<(Float, Float)> = Vec::new();
        match &self.angular {
            Angular::Orbitals { la, lb, .. } => {
                per_term.push((pbar_bound(*la) * pbar_bound(*lb) * two_pow(&base_power), base_power.clone()));
            }
            Angular::Monomials { s_power, terms } => {
                for t in terms {
                    let radial = Float::with_val(bits, &base_power + (t.da + t.db));
                    let scale = Float::with_val(bits, t.coeff.abs_ref()) * two_pow(&radial);
                    per_term.push((scale, radial + t.q + *s_power));
                }
            }
        }
        let mut power = Float::new(bits);
        let mut term_scale = Float::new(bits);
        for (s, p) in &per_term {
            term_scale += s;
            if *p > power {
                power.clone_from(p);
            }
        }
        let q = legendre_q_table(self.l_hi, self.order, xi_c, &self.ctx)?;
        let mut l_scale = Float::new(bits);
        for (i, l) in (self.l_lo..=self.l_hi).enumerate() {
            let qv = Float::with_val(bits, q.get(self.order, l).abs_ref());
            l_scale += Float::with_val(bits, self.weights[i].abs_ref()) * pbar_bound(l) * qv;
        }
        let e_p2 = Float::with_val(bits, self.p2.abs_ref()).exp();
        let scale = term_scale * l_scale * e_p2 * 2u32;
        Ok(DecayHint::new(self.p1.clone(), power, scale))
    }
}

impl Integrand2D for AuxKernel {
    fn dim(&self) -> usize {
        self.n_l() * self.angular.len()
    }

    fn eval(&self, xi: &Float, nu: &Float, out: &mut [Float]) {
        let bits = self.bits();
        let xp = self.xi_point(xi);
        let np = self.nu_point(nu);
        let nt = self.angular.len();
        let mut t = vec![Float::new(bits); nt];
        self.terms(&xp, &np, &mut t);
        let e = Float::with_val(bits, &xp.e * &np.e);
        for li in 0..self.n_l() {
            let f = Float::with_val(bits, &xp.x[li] * &np.y[li]) * &e * &self.weights[li];
            for (ti, tv) in t.iter().enumerate() {
                out[li * nt + ti] = Float::with_val(bits, &f * tv);
            }
        }
    }

    /// Tensor sums with the `ξ`- and `ν`-only factors hoisted: for each `ξ`
    /// node the `ν` sums are accumulated per `(L, t)` first.
    fn eval_rule(&self, xi: &MappedRule, nu: &MappedRule, bits: u32, magnitude: bool) -> RuleSums {
        let nl = self.n_l();
        let nt = self.angular.len();
        let dim = nl * nt;
        let zeros = || vec![Float::new(bits); dim];
        let xs: Vec<XiPoint> = xi.nodes.iter().map(|x| self.xi_point(x)).collect();
        let ns: Vec<NuPoint> = nu.nodes.iter().map(|y| self.nu_point(y)).collect();
        let mut kronrod = zeros();
        let mut gauss = zeros();
        let mut mag = zeros();
        let mut inner_k = zeros();
        let mut inner_g = zeros();
        let mut inner_m = zeros();
        let mut t = vec![Float::new(bits); nt];
        for (i, xp) in xs.iter().enumerate() {
            let gx = xi.gauss_weight_at(i);
            for v in inner_k.iter_mut().chain(inner_g.iter_mut()).chain(inner_m.iter_mut()) {
                *v = Float::new(bits);
            }
            for (j, np) in ns.iter().enumerate() {
                self.terms(xp, np, &mut t);
                let wk = Float::with_val(bits, &nu.kronrod[j] * &np.e);
                let wg = match (gx, nu.gauss_weight_at(j)) {
                    (Some(_), Some(w)) => Some(Float::with_val(bits, w * &np.e)),
                    _ => None,
                };
                for (ti, tv) in t.iter().enumerate() {
                    let tk = Float::with_val(bits, tv * &wk);
                    let tg = wg.as_ref().map(|w| Float::with_val(bits, tv * w));
                    for (li, y) in np.y.iter().enumerate() {
                        let c = li * nt + ti;
                        inner_k[c] += y * &tk;
                        if magnitude {
                            inner_m[c] += Float::with_val(bits, y * &tk).abs();
                        }
                        if let Some(tg) = &tg {
                            inner_g[c] += y * tg;
                        }
                    }
                }
            }
            let fk = Float::with_val(bits, &xi.kronrod[i] * &xp.e);
            let fg = gx.map(|w| Float::with_val(bits, w * &xp.e));
            for (li, x) in xp.x.iter().enumerate() {
                let xk = Float::with_val(bits, x * &fk);
                let xg = fg.as_ref().map(|f| Float::with_val(bits, x * f));
                for ti in 0..nt {
                    let c = li * nt + ti;
                    kronrod[c] += &inner_k[c] * &xk;
                    if magnitude {
                        mag[c] += Float::with_val(bits, &inner_m[c] * &xk).abs();
                    }
                    if let Some(xg) = &xg {
                        gauss[c] += &inner_g[c] * xg;
                    }
                }
            }
        }
        for li in 0..nl {
            for ti in 0..nt {
                let c = li * nt + ti;
                kronrod[c] *= &self.weights[li];
                gauss[c] *= &self.weights[li];
                if magnitude {
                    mag[c] *= Float::with_val(bits, self.weights[li].abs_ref());
                }
            }
        }
        RuleSums {
            kronrod,
            gauss,
            magnitude: magnitude.then_some(mag),
        }
    }
}

fn options(tol: &Float, ctx: &PrecisionContext) -> Result<QuadOptions> {
    if !tol.is_finite() || *tol <= 0 {
        return Err(Error::domain("aux", "tolerance must be positive"));
    }
    Ok(QuadOptions::new(ctx).relative(tol.clone()).norm(ErrorNorm::Sum))
}

fn integrate_j(kernel: &AuxKernel, params: &AuxParams, opts: &QuadOptions, ctx: &PrecisionContext) -> Result<QuadResult> {
    let region = kernel.region(&ctx.num(1), &params.xi_c);
    integrate_2d(kernel, &[region], opts, ctx)
}

fn integrate_k(
    kernel: &AuxKernel,
    params: &AuxParams,
    opts: &QuadOptions,
    ctx: &PrecisionContext,
) -> Result<SemiInfiniteResult> {
    let hint = kernel.envelope(&params.xi_c)?;
    let (lo, hi) = kernel.nu_range();
    integrate_semi_infinite(kernel, &params.xi_c, (&lo, &hi), &hint, opts, ctx)
}

/// Both ranges for a kernel that was built for `J` (`Radial::P`).
fn integrate_pair(
    kernel: &AuxKernel,
    k_weights: Vec<Float>,
    params: &AuxParams,
    opts: &QuadOptions,
    ctx: &PrecisionContext,
) -> Result<(QuadResult, SemiInfiniteResult)> {
    let k_kernel = kernel.with_radial(Radial::Q, k_weights);
    let (j, k) = rayon::join(
        || integrate_j(kernel, params, opts, ctx),
        || integrate_k(&k_kernel, params, opts, ctx),
    );
    Ok((j?, k?))
}

fn summed_pair(j: QuadResult, k: SemiInfiniteResult, ctx: &PrecisionContext) -> AuxPair {
    let bits = ctx.bits();
    AuxPair {
        j_value: Float::with_val(bits, j.total()),
        j_error: Float::with_val(bits, j.total_error()),
        k_value: Float::with_val(bits, k.quad.total()),
        k_error: Float::with_val(bits, k.quad.total_error() + &k.tail_bound),
    }
}

fn unit_weights(n: usize, ctx: &PrecisionContext) -> Vec<Float> {
    vec![ctx.num(1); n]
}

fn check_powers(n1: &Float, n2: &Float) -> Result<()> {
    for (name, v) in [("N1", n1), ("N2", n2)] {
        if !v.is_finite() || *v < 0 {
            return Err(Error::domain("aux", format!("{name} must be finite and nonnegative")));
        }
    }
    Ok(())
}

/// Reduced auxiliary functions
///
/// `J = ∫₁^{ξ_C} ∫₋₁¹ (ξν)^q (ξ+ν)^{N1} (ξ-ν)^{N2} e^{-p1ξ-p2ν} P_L^Λ(ξ) P̄_{LΛ}(ν) dν dξ`
///
/// and `K`, the same over `ξ ≥ ξ_C` with `Q_L^Λ(ξ)` in place of `P_L^Λ(ξ)`.
/// Each of `J` and `K` is computed to relative tolerance `tol`.
#[allow(clippy::too_many_arguments)]
pub fn aux_reduced(
    l: u32,
    cap_lambda: u32,
    q: u32,
    n1: &Float,
    n2: &Float,
    params: &AuxParams,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<AuxPair> {
    aux_reduced_with_strategy(l, cap_lambda, q, n1, n2, params, tol, LegendreStrategy::Native, ctx)
}

/// [`aux_reduced`] with an explicit choice of how `P̄_{LΛ}(ν)` is evaluated.
#[allow(clippy::too_many_arguments)]
pub fn aux_reduced_with_strategy(
    l: u32,
    cap_lambda: u32,
    q: u32,
    n1: &Float,
    n2: &Float,
    params: &AuxParams,
    tol: &Float,
    strategy: LegendreStrategy,
    ctx: &PrecisionContext,
) -> Result<AuxPair> {
    if cap_lambda > l {
        return Err(Error::domain("aux_reduced", format!("Lambda = {cap_lambda} > L = {l}")));
    }
    check_powers(n1, n2)?;
    let opts = options(tol, ctx)?;
    let angular = Angular::Monomials {
        s_power: 0,
        terms: vec![Monomial {
            coeff: ctx.num(1),
            q,
            da: 0,
            db: 0,
        }],
    };
    let kernel = AuxKernel::new(
        ctx,
        params,
        n1,
        n2,
        cap_lambda,
        (l, l),
        unit_weights(1, ctx),
        Radial::P,
        strategy,
        angular,
    );
    let (j, k) = integrate_pair(&kernel, unit_weights(1, ctx), params, &opts, ctx)?;
    Ok(summed_pair(j, k, ctx))
}

fn direct_kernel(
    order: u32,
    l_range: (u32, u32),
    weights: Vec<Float>,
    a: &OrbitalIndices,
    b: &OrbitalIndices,
    params: &AuxParams,
    ctx: &PrecisionContext,
) -> AuxKernel {
    let angular = Angular::Orbitals {
        la: a.l,
        lambda_a: a.lambda(),
        lb: b.l,
        lambda_b: b.lambda(),
        poly_a: ExplicitLegendre::new(a.l, a.lambda(), ctx),
        poly_b: ExplicitLegendre::new(b.l, b.lambda(), ctx),
    };
    AuxKernel::new(
        ctx,
        params,
        &a.n,
        &b.n,
        order,
        l_range,
        weights,
        Radial::P,
        LegendreStrategy::Native,
        angular,
    )
}

/// General auxiliary functions for the orbital pair `a`, `b`:
///
/// `J^{LM} = ∫₁^{ξ_C} ∫₋₁¹ (ξ+ν)^n (ξ-ν)^{n'} e^{-p1ξ-p2ν}
///   P̄_{l|m|}(cos θ_A) P̄_{l'|m'|}(cos θ_B) P_L^{|M|}(ξ) P̄_{L|M|}(ν) dν dξ`
///
/// with `cos θ_A = (1+ξν)/(ξ+ν)`, `cos θ_B = (1-ξν)/(ξ-ν)`, and `K^{LM}`
/// likewise over `ξ ≥ ξ_C` with `Q_L^{|M|}`. The orbital factors are
/// evaluated pointwise. Only `|M|` enters.
pub fn aux_general_direct(
    l: u32,
    m: i32,
    a: &OrbitalIndices,
    b: &OrbitalIndices,
    params: &AuxParams,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<AuxPair> {
    let order = m.unsigned_abs();
    if order > l {
        return Err(Error::domain("aux_general", format!("|M| = {order} > L = {l}")));
    }
    let opts = options(tol, ctx)?;
    let kernel = direct_kernel(order, (l, l), unit_weights(1, ctx), a, b, params, ctx);
    let (j, k) = integrate_pair(&kernel, unit_weights(1, ctx), params, &opts, ctx)?;
    Ok(summed_pair(j, k, ctx))
}

/// The same functions as [`aux_general_direct`], assembled from reduced
/// functions: the orbital Legendre product is expanded as
/// `Σ g^q_{αβ} (ξν)^q (ξ+ν)^{-α} (ξ-ν)^{-β}` times
/// `[(ξ²-1)(1-ν²)]^{|λ-λ'|/2}`, so each term is a reduced integrand with
/// powers `n-α`, `n'-β` (carrying that extra weight when `λ ≠ λ'`).
///
/// The expansion is built with `Λ = min(λ, λ')`, which keeps the weight a
/// nonnegative power; any `Λ ≥ 0` gives the same sum.
pub fn aux_general_expanded(
    l: u32,
    m: i32,
    a: &OrbitalIndices,
    b: &OrbitalIndices,
    params: &AuxParams,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<AuxPair> {
    let order = m.unsigned_abs();
    if order > l {
        return Err(Error::domain("aux_general", format!("|M| = {order} > L = {l}")));
    }
    let opts = options(tol, ctx)?;
    let cap = a.lambda().min(b.lambda());
    let product = legendre_product_terms(a.l, a.lambda(), b.l, b.lambda(), cap, ctx);
    let terms: Vec<Monomial> = product
        .terms
        .into_iter()
        .map(|t| Monomial {
            coeff: t.coeff,
            q: t.q,
            da: -(t.alpha as i32),
            db: -(t.beta as i32),
        })
        .collect();
    if terms.is_empty() {
        let zero = ctx.zero();
        return Ok(AuxPair {
            j_value: zero.clone(),
            k_value: zero.clone(),
            j_error: zero.clone(),
            k_error: zero,
        });
    }
    let angular = Angular::Monomials {
        s_power: product.s_power as u32,
        terms,
    };
    let kernel = AuxKernel::new(
        ctx,
        params,
        &a.n,
        &b.n,
        order,
        (l, l),
        unit_weights(1, ctx),
        Radial::P,
        LegendreStrategy::Native,
        angular,
    );
    let (j, k) = integrate_pair(&kernel, unit_weights(1, ctx), params, &opts, ctx)?;
    Ok(summed_pair(j, k, ctx))
}

/// Weighted column `Σ_L w_L J^{LM}` and `Σ_L w'_L K^{LM}` for
/// `L = |M|..=l_max`, each component returned separately. The summed error
/// of each column meets `tol` relative to the column sum.
#[allow(clippy::too_many_arguments)]
pub(crate) fn general_column(
    order: u32,
    l_max: u32,
    j_weights: Vec<Float>,
    k_weights: Vec<Float>,
    a: &OrbitalIndices,
    b: &OrbitalIndices,
    params: &AuxParams,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<(QuadResult, SemiInfiniteResult)> {
    let opts = options(tol, ctx)?;
    let kernel = direct_kernel(order, (order, l_max), j_weights, a, b, params, ctx);
    integrate_pair(&kernel, k_weights, params, &opts, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gk_rule;
    use crate::special::{legendre_p, legendre_q, normalized_legendre};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(20).unwrap()
    }

    fn params(ctx: &PrecisionContext, p1: &str, p2: &str, xi_c: &str) -> AuxParams {
        AuxParams::new(ctx.parse(p1).unwrap(), ctx.parse(p2).unwrap(), ctx.parse(xi_c).unwrap()).unwrap()
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b);
        if b.is_zero() {
            return d.to_f64().abs();
        }
        (d / b).to_f64().abs()
    }

    fn orb(ctx: &PrecisionContext, n: &str, l: u32, m: i32) -> OrbitalIndices {
        OrbitalIndices::new(ctx.parse(n).unwrap(), l, m).unwrap()
    }

    /// Fixed-order Gauss product rule over `[lo, hi] × [-1, 1]` with
    /// `panels` equal ξ-panels, at the oracle context's precision.
    fn product_rule(
        f: &dyn Fn(&Float, &Float) -> Float,
        lo: &Float,
        hi: &Float,
        panels: u32,
        order: u32,
        ctx: &PrecisionContext,
    ) -> Float {
        let bits = ctx.bits();
        let rule = gk_rule(order, ctx).unwrap();
        let nodes: Vec<Float> = rule.gauss_nodes().cloned().collect();
        let weights = rule.gauss_weights().to_vec();
        let width = Float::with_val(bits, hi - lo) / panels;
        let mut acc = Float::new(bits);
        for p in 0..panels {
            let a = Float::with_val(bits, &width * p) + lo;
            let half = Float::with_val(bits, &width / 2u32);
            let mid = Float::with_val(bits, &a + &half);
            for (x, wx) in nodes.iter().zip(&weights) {
                let xi = Float::with_val(bits, x * &half) + &mid;
                for (y, wy) in nodes.iter().zip(&weights) {
                    let v = f(&xi, y);
                    acc += v * wx * wy * &half;
                }
            }
        }
        acc
    }

    /// Reduced integrand at the oracle precision, built from the public
    /// special functions.
    #[allow(clippy::too_many_arguments)]
    fn reduced_point(
        l: u32,
        lam: u32,
        q: u32,
        n1: &Float,
        n2: &Float,
        p: &AuxParams,
        k_range: bool,
        xi: &Float,
        nu: &Float,
        ctx: &PrecisionContext,
    ) -> Float {
        let bits = ctx.bits();
        let s = Float::with_val(bits, xi + nu);
        let d = Float::with_val(bits, xi - nu);
        let mut v = (Float::with_val(bits, s.ln_ref()) * n1).exp() * (Float::with_val(bits, d.ln_ref()) * n2).exp();
        v *= Float::with_val(bits, xi * nu).pow(q);
        v *= (-(Float::with_val(bits, &p.p1 * xi) + Float::with_val(bits, &p.p2 * nu))).exp();
        let x = if k_range { legendre_q(l, lam, xi, ctx).unwrap() } else { legendre_p(l, lam, xi, ctx).unwrap() };
        v * x * normalized_legendre(l, lam, nu, LegendreStrategy::Recurrence, ctx).unwrap()
    }

    #[test]
    fn separable_closed_form() {
        let ctx = ctx();
        let zero = ctx.zero();
        let p = params(&ctx, "1.7", "0", "2.5");
        let r = aux_reduced(0, 0, 0, &zero, &zero, &p, &ctx.default_tolerance(), &ctx).unwrap();
        let bits = ctx.bits();
        let e1 = Float::with_val(bits, -&p.p1).exp();
        let e2 = Float::with_val(bits, -Float::with_val(bits, &p.p1 * &p.xi_c)).exp();
        let expected = Float::with_val(bits, 2u32).sqrt() * (e1 - e2) / &p.p1;
        assert!(rel(&r.j_value, &expected) < 1e-20, "{} vs {}", r.j_value, expected);
        assert!(r.j_error < Float::with_val(bits, &expected * 1e-19));
    }

    #[test]
    fn reduced_matches_product_rule_oracle() {
        let ctx = ctx();
        let oracle = ctx.elevated(20);
        let one = oracle.num(1);
        let p = params(&ctx, "1.5", "1.5", "2");
        let po = params(&oracle, "1.5", "1.5", "2");
        let r = aux_reduced(0, 0, 0, &ctx.num(1), &ctx.num(1), &p, &ctx.default_tolerance(), &ctx).unwrap();
        let fj = |x: &Float, y: &Float| reduced_point(0, 0, 0, &one, &one, &po, false, x, y, &oracle);
        let fk = |x: &Float, y: &Float| reduced_point(0, 0, 0, &one, &one, &po, true, x, y, &oracle);
        let j = product_rule(&fj, &oracle.num(1), &oracle.num(2), 1, 40, &oracle);
        let k = product_rule(&fk, &oracle.num(2), &oracle.num(62), 30, 40, &oracle);
        assert!(rel(&r.j_value, &j) < 1e-20, "J {} vs {}", r.j_value, j);
        assert!(rel(&r.k_value, &k) < 1e-20, "K {} vs {}", r.k_value, k);
        // same case as the first row of the published reduced-function table,
        // whose boundary is not stated; ξ_C = 2 reproduces it
        let j_ref = ctx.parse("3.62319 79582 17897 45490 E-01").unwrap();
        let k_ref = ctx.parse("1.75859 65139 47296 72718 E-01").unwrap();
        assert!(rel(&r.j_value, &j_ref) < 1e-19);
        assert!(rel(&r.k_value, &k_ref) < 1e-19);
    }

    #[test]
    fn odd_q_vanishes_by_parity() {
        let ctx = ctx();
        let n = ctx.parse("1.5").unwrap();
        let p = params(&ctx, "2", "0", "3");
        for (l, lam, q) in [(0, 0, 1), (2, 0, 3), (1, 1, 1), (3, 1, 1)] {
            let r = aux_reduced(l, lam, q, &n, &n, &p, &ctx.default_tolerance(), &ctx).unwrap();
            assert!(r.j_value.clone().abs() < 1e-30, "L={l} Λ={lam} q={q}: {}", r.j_value);
            assert!(r.k_value.clone().abs() < 1e-30, "L={l} Λ={lam} q={q}: {}", r.k_value);
        }
    }

    #[test]
    fn swap_symmetry() {
        let ctx = ctx();
        let n1 = ctx.parse("2.3").unwrap();
        let n2 = ctx.parse("1.1").unwrap();
        let p = params(&ctx, "2.5", "0.7", "1.8");
        let pm = params(&ctx, "2.5", "-0.7", "1.8");
        let tol = ctx.default_tolerance();
        for (l, lam, q) in [(0, 0, 0), (1, 0, 1), (2, 1, 0), (3, 2, 2)] {
            let r = aux_reduced(l, lam, q, &n1, &n2, &p, &tol, &ctx).unwrap();
            let s = aux_reduced(l, lam, q, &n2, &n1, &pm, &tol, &ctx).unwrap();
            let sign = if (l + lam + q) % 2 == 0 { 1 } else { -1 };
            assert!(rel(&r.j_value, &(s.j_value.clone() * sign)) < 1e-19, "J L={l}");
            assert!(rel(&r.k_value, &(s.k_value.clone() * sign)) < 1e-19, "K L={l}");
        }
    }

    #[test]
    fn positivity() {
        let ctx = ctx();
        let tol = ctx.default_tolerance();
        for (n1, n2, p1, xc) in [("0", "0", "0.5", "1.1"), ("1.3", "2", "3", "4"), ("4", "0.5", "10", "1.5")] {
            let p = params(&ctx, p1, "0", xc);
            let r = aux_reduced(0, 0, 0, &ctx.parse(n1).unwrap(), &ctx.parse(n2).unwrap(), &p, &tol, &ctx).unwrap();
            assert!(r.j_value > 0 && r.k_value > 0);
        }
    }

    #[test]
    fn additivity_over_xi() {
        let ctx = ctx();
        let tol = ctx.default_tolerance();
        let n1 = ctx.parse("2.2").unwrap();
        let n2 = ctx.num(1);
        let p_lo = params(&ctx, "1.5", "0.5", "1.6");
        let p_hi = params(&ctx, "1.5", "0.5", "2.9");
        let lo = aux_reduced(2, 1, 1, &n1, &n2, &p_lo, &tol, &ctx).unwrap();
        let hi = aux_reduced(2, 1, 1, &n1, &n2, &p_hi, &tol, &ctx).unwrap();
        let angular = Angular::Monomials {
            s_power: 0,
            terms: vec![Monomial { coeff: ctx.num(1), q: 1, da: 0, db: 0 }],
        };
        let kernel = AuxKernel::new(&ctx, &p_lo, &n1, &n2, 1, (2, 2), unit_weights(1, &ctx), Radial::P, LegendreStrategy::Native, angular);
        let region = kernel.region(&p_lo.xi_c, &p_hi.xi_c);
        let middle = integrate_2d(&kernel, &[region], &options(&tol, &ctx).unwrap(), &ctx).unwrap();
        let sum = Float::with_val(ctx.bits(), &lo.j_value + middle.value());
        assert!(rel(&sum, &hi.j_value) < 1e-19, "{sum} vs {}", hi.j_value);
    }

    #[test]
    fn s_orbitals_reduce_to_half_the_reduced_function() {
        let ctx = ctx();
        let tol = ctx.default_tolerance();
        let a = orb(&ctx, "1.4", 0, 0);
        let b = orb(&ctx, "2", 0, 0);
        let p = params(&ctx, "2.1", "-0.6", "1.7");
        for (l, m) in [(0, 0), (2, 1), (3, -3)] {
            let g = aux_general_direct(l, m, &a, &b, &p, &tol, &ctx).unwrap();
            let r = aux_reduced(l, m.unsigned_abs(), 0, &a.n, &b.n, &p, &tol, &ctx).unwrap();
            assert!(rel(&g.j_value, &(r.j_value.clone() / 2u32)) < 1e-19);
            assert!(rel(&g.k_value, &(r.k_value.clone() / 2u32)) < 1e-19);
            let e = aux_general_expanded(l, m, &a, &b, &p, &tol, &ctx).unwrap();
            assert!(rel(&e.j_value, &g.j_value) < 1e-19);
        }
    }

    #[test]
    fn routes_agree_for_p_orbitals() {
        let ctx = ctx();
        let tol = ctx.default_tolerance();
        let p = params(&ctx, "1.5", "0.5", "2");
        for (na, nb) in [("2", "2"), ("2.3", "1.7")] {
            let a = orb(&ctx, na, 1, 0);
            let b = orb(&ctx, nb, 1, 0);
            let d = aux_general_direct(1, 0, &a, &b, &p, &tol, &ctx).unwrap();
            let e = aux_general_expanded(1, 0, &a, &b, &p, &tol, &ctx).unwrap();
            assert!(rel(&d.j_value, &e.j_value) < 1e-19, "{na} {nb}: {} vs {}", d.j_value, e.j_value);
            assert!(rel(&d.k_value, &e.k_value) < 1e-19, "{na} {nb}: {} vs {}", d.k_value, e.k_value);
        }
    }

    #[test]
    fn general_matches_product_rule_oracle() {
        let ctx = ctx();
        let oracle = ctx.elevated(20);
        let bits = oracle.bits();
        let a = orb(&ctx, "2", 1, 0);
        let b = orb(&ctx, "2", 1, 0);
        let p = params(&ctx, "2.3", "4.5", "2");
        let po = params(&oracle, "2.3", "4.5", "2");
        let r = aux_general_direct(1, 0, &a, &b, &p, &ctx.default_tolerance(), &ctx).unwrap();
        let point = |xi: &Float, nu: &Float, k_range: bool| -> Float {
            let s = Float::with_val(bits, xi + nu);
            let d = Float::with_val(bits, xi - nu);
            let xn = Float::with_val(bits, xi * nu);
            let ca = Float::with_val(bits, &xn + 1u32) / &s;
            let cb = (Float::with_val(bits, 1u32) - &xn) / &d;
            let orbitals = normalized_legendre(1, 0, &ca, LegendreStrategy::Recurrence, &oracle).unwrap()
                * normalized_legendre(1, 0, &cb, LegendreStrategy::Recurrence, &oracle).unwrap();
            let two = oracle.num(2);
            reduced_point(1, 0, 0, &two, &two, &po, k_range, xi, nu, &oracle) * orbitals
        };
        let j = product_rule(&|x, y| point(x, y, false), &oracle.num(1), &oracle.num(2), 2, 40, &oracle);
        let k = product_rule(&|x, y| point(x, y, true), &oracle.num(2), &oracle.num(52), 50, 40, &oracle);
        assert!(rel(&r.j_value, &j) < 1e-20, "J {} vs {}", r.j_value, j);
        assert!(rel(&r.k_value, &k) < 1e-20, "K {} vs {}", r.k_value, k);
    }

    #[test]
    fn truncation_and_transform_routes_agree() {
        let ctx = ctx();
        let tol = ctx.default_tolerance();
        let a = orb(&ctx, "2.1", 1, 0);
        let b = orb(&ctx, "3", 2, 1);
        let p = params(&ctx, "0.8", "-0.3", "1.4");
        let kernel = direct_kernel(1, (1, 1), unit_weights(1, &ctx), &a, &b, &p, &ctx)
            .with_radial(Radial::Q, unit_weights(1, &ctx));
        let opts = options(&tol, &ctx).unwrap();
        let trunc = integrate_k(&kernel, &p, &opts, &ctx).unwrap();
        let (lo, hi) = kernel.nu_range();
        let other = crate::quadrature::integrate_semi_infinite_transformed(
            &kernel,
            &p.xi_c,
            (&lo, &hi),
            &p.p1,
            &opts,
            &ctx,
        )
        .unwrap();
        assert!(rel(trunc.quad.value(), other.value()) < 1e-19);
    }

    #[test]
    fn strategies_agree() {
        let ctx = ctx();
        let tol = ctx.default_tolerance();
        let p = params(&ctx, "2.5", "1.5", "2");
        let (n1, n2) = (ctx.num(3), ctx.num(2));
        let results: Vec<AuxPair> = LegendreStrategy::ALL
            .iter()
            .map(|s| aux_reduced_with_strategy(3, 1, 0, &n1, &n2, &p, &tol, *s, &ctx).unwrap())
            .collect();
        for r in &results[1..] {
            assert!(rel(&r.j_value, &results[0].j_value) < 1e-19);
            assert!(rel(&r.k_value, &results[0].k_value) < 1e-19);
        }
    }

    #[test]
    fn no_nan_near_the_nuclei() {
        let ctx = PrecisionContext::new(10).unwrap();
        let a = orb(&ctx, "2.5", 2, 1);
        let b = orb(&ctx, "1.5", 1, -1);
        let p = params(&ctx, "1", "0.5", "3");
        let kernel = direct_kernel(2, (2, 4), unit_weights(3, &ctx), &a, &b, &p, &ctx);
        let bits = ctx.bits();
        let mut out = vec![Float::new(bits); 3];
        let n = 1000u32;
        for i in 0..n {
            // clustered towards ξ = 1 and ν = ±1, never on them
            let t = Float::with_val(bits, (i as f64 + 0.5) / n as f64);
            let xi = Float::with_val(bits, t.clone().square()) * 2u32 + 1u32;
            for j in 0..n {
                let s = (j as f64 + 0.5) / n as f64 * 2.0 - 1.0;
                let nu = Float::with_val(bits, s.signum() * (1.0 - (1.0 - s.abs()).powi(3)));
                kernel.eval(&xi, &nu, &mut out);
                assert!(out.iter().all(|v| v.is_finite()), "non-finite at ({xi}, {nu})");
            }
        }
    }

    #[test]
    fn invalid_inputs() {
        let ctx = ctx();
        assert!(AuxParams::new(ctx.num(1), ctx.num(0), ctx.num(1)).is_err());
        assert!(AuxParams::new(ctx.num(0), ctx.num(0), ctx.num(2)).is_err());
        assert!(OrbitalIndices::new(ctx.parse("1.9").unwrap(), 2, 0).is_err());
        assert!(OrbitalIndices::new(ctx.num(3), 1, 2).is_err());
        assert!(OrbitalIndices::new(ctx.parse("2.1").unwrap(), 2, -2).is_ok());
        let p = params(&ctx, "1", "0", "2");
        let tol = ctx.default_tolerance();
        assert!(aux_reduced(1, 2, 0, &ctx.num(1), &ctx.num(1), &p, &tol, &ctx).is_err());
        assert!(aux_reduced(1, 0, 0, &ctx.num(-1), &ctx.num(1), &p, &tol, &ctx).is_err());
        let s = orb(&ctx, "1", 0, 0);
        assert!(aux_general_direct(1, 2, &s, &s, &p, &tol, &ctx).is_err());
    }
}
