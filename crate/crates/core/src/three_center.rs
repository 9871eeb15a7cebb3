//! Three-center nuclear attraction integrals `⟨χ_a(A)| 1/r_C |χ_b(B)⟩`.
//!
//! The Coulomb operator is expanded in prolate spheroidal harmonics about the
//! foci `A`, `B`; each term of the expansion is a pair of auxiliary integrals
//! weighted by the Legendre functions and a real spherical harmonic evaluated
//! at `C`:
//!
//! `I = (4√(2π)/R) N_{nn'} Σ_L Σ_M (-1)^{|M|} (L-|M|)!/(L+|M|)! A^M_{mm'} S_{LM}(ν_C, φ_C)
//!      × [Q_L^{|M|}(ξ_C) J^{LM} + P_L^{|M|}(ξ_C) K^{LM}]`.
//!
//! Orbital conventions: `χ = N r^{n-1} e^{-ζr} P̄_{l|m|}(cos θ) Φ_m(φ)` with
//! `Φ_0 = 1/√(2π)`, `Φ_{m>0} = cos(mφ)/√π`, `Φ_{m<0} = sin(|m|φ)/√π` and no
//! Condon–Shortley phase. Both orbitals share the azimuth `φ` about the
//! `A→B` axis. The polar angle of the orbital on `A` is measured from the
//! `A→B` direction and that of the orbital on `B` from the `B→A` direction,
//! so `cos θ_A = (1+ξν)/(ξ+ν)` and `cos θ_B = (1-ξν)/(ξ-ν)`.

use std::time::{Duration, Instant};

use rug::Float;

use crate::auxiliary::{general_column, AuxParams, OrbitalIndices};
use crate::precision::{matching_digits, PrecisionContext};
use crate::special::{a_terms, legendre_p_column, legendre_q_table, norm_const, real_harmonic};
use crate::{Error, Result};

/// Default truncation of the Neumann expansion; 25 digits are reached well
/// before it on every benchmark geometry.
pub const DEFAULT_L_MAX: u32 = 30;

/// A Slater-type orbital `(n, l, m, ζ)` with real `n > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Orbital {
    pub n: Float,
    pub l: u32,
    pub m: i32,
    pub zeta: Float,
}

impl Orbital {
    pub fn new(n: Float, l: u32, m: i32, zeta: Float) -> Result<Self> {
        OrbitalIndices::new(n.clone(), l, m)?;
        if !zeta.is_finite() || zeta <= 0 {
            return Err(Error::InvalidOrbital(format!("exponent {} must be positive", zeta.to_f64())));
        }
        Ok(Orbital { n, l, m, zeta })
    }

    pub fn indices(&self) -> OrbitalIndices {
        OrbitalIndices {
            n: self.n.clone(),
            l: self.l,
            m: self.m,
        }
    }
}

/// Position of the third center in prolate spheroidal coordinates about
/// `A`, `B`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProlateFrame {
    pub r_ab: Float,
    pub xi_c: Float,
    pub nu_c: Float,
    /// Azimuth in `[0, 2π)`.
    pub phi_c: Float,
    /// Whether the local frame coincides with the lab frame (`A→B` along
    /// `+z`), which is required for orbitals with `m ≠ 0`.
    pub axis_aligned: bool,
}

impl ProlateFrame {
    /// A frame given directly in local coordinates.
    pub fn new(r_ab: Float, xi_c: Float, nu_c: Float, phi_c: Float) -> Result<Self> {
        if !r_ab.is_finite() || r_ab <= 0 {
            return Err(Error::DegenerateGeometry("R_AB must be positive".into()));
        }
        if !xi_c.is_finite() || xi_c < 1 {
            return Err(Error::domain("ProlateFrame", "xi_C must be at least 1"));
        }
        if !nu_c.is_finite() || !(-1..=1).contains(&nu_c) {
            return Err(Error::domain("ProlateFrame", "nu_C must lie in [-1, 1]"));
        }
        if !phi_c.is_finite() {
            return Err(Error::domain("ProlateFrame", "phi_C must be finite"));
        }
        Ok(ProlateFrame {
            r_ab,
            xi_c,
            nu_c,
            phi_c,
            axis_aligned: true,
        })
    }

    /// `R_AC = R(ξ_C + ν_C)/2`.
    pub fn r_ac(&self) -> Float {
        Float::with_val(self.r_ab.prec(), &self.xi_c + &self.nu_c) * &self.r_ab / 2u32
    }

    /// `R_BC = R(ξ_C - ν_C)/2`.
    pub fn r_bc(&self) -> Float {
        Float::with_val(self.r_ab.prec(), &self.xi_c - &self.nu_c) * &self.r_ab / 2u32
    }

    /// The frame seen with the roles of `A` and `B` exchanged.
    pub fn swapped(&self) -> Self {
        ProlateFrame {
            nu_c: -self.nu_c.clone(),
            ..self.clone()
        }
    }
}

type Vec3 = [Float; 3];

fn sub(a: &Vec3, b: &Vec3, bits: u32) -> Vec3 {
    [0, 1, 2].map(|i| Float::with_val(bits, &a[i] - &b[i]))
}

fn dot(a: &Vec3, b: &Vec3, bits: u32) -> Float {
    let mut s = Float::new(bits);
    for i in 0..3 {
        s += &a[i] * &b[i];
    }
    s
}

fn norm(a: &Vec3, bits: u32) -> Float {
    dot(a, a, bits).sqrt()
}

fn scaled(a: &Vec3, k: &Float, bits: u32) -> Vec3 {
    [0, 1, 2].map(|i| Float::with_val(bits, &a[i] * k))
}

fn cross(a: &Vec3, b: &Vec3, bits: u32) -> Vec3 {
    let c = |i: usize, j: usize| Float::with_val(bits, &a[i] * &b[j]) - Float::with_val(bits, &a[j] * &b[i]);
    [c(1, 2), c(2, 0), c(0, 1)]
}

/// Prolate coordinates of `C` about the foci `A`, `B` (Cartesian, bohr).
///
/// `φ_C` is measured from the lab `x` axis projected onto the plane
/// transverse to `A→B` (the lab `y` axis when `x` is parallel to `A→B`).
/// When `C` lies on the line through `A` and `B` but outside the segment,
/// `ν_C` is set to exactly `±1` and `φ_C` to 0.
pub fn geometry_from_cartesian(a: &Vec3, b: &Vec3, c: &Vec3, ctx: &PrecisionContext) -> Result<ProlateFrame> {
    let bits = ctx.bits();
    let d = sub(b, a, bits);
    let r_ab = norm(&d, bits);
    if r_ab.is_zero() {
        return Err(Error::DegenerateGeometry("centers A and B coincide".into()));
    }
    let z = scaled(&d, &Float::with_val(bits, r_ab.recip_ref()), bits);
    let rc = sub(c, a, bits);
    let r_ac = norm(&rc, bits);
    let r_bc = norm(&sub(c, b, bits), bits);
    let along = dot(&rc, &z, bits);
    let transverse = sub(&rc, &scaled(&z, &along, bits), bits);
    let t_norm = norm(&transverse, bits);
    // relative size of rounding in the inputs
    let eps = Float::with_val(bits, Float::i_exp(1, 16 - bits as i32));
    let scale = Float::with_val(bits, r_ab.max_ref(&r_ac));
    let collinear = t_norm <= Float::with_val(bits, &scale * &eps);

    let axis_aligned = d[0].is_zero() && d[1].is_zero() && d[2] > 0;
    let mut xi_c = Float::with_val(bits, &r_ac + &r_bc) / &r_ab;
    let (nu_c, phi_c) = if collinear {
        if along >= 0 && along <= r_ab {
            return Err(Error::SingularGeometry(
                "C lies on the segment AB (xi_C = 1), where the Neumann expansion diverges; use a two-center routine"
                    .into(),
            ));
        }
        let nu = if along > 0 { ctx.num(1) } else { ctx.num(-1) };
        // |along| - or |along - R| - is the only nonzero distance
        xi_c = Float::with_val(bits, Float::with_val(bits, &along * 2u32) - &r_ab).abs() / &r_ab;
        (nu, ctx.zero())
    } else {
        let mut nu = Float::with_val(bits, &r_ac - &r_bc) / &r_ab;
        if nu > 1 {
            nu = ctx.num(1);
        } else if nu < -1 {
            nu = ctx.num(-1);
        }
        let lab = |i: usize| -> Vec3 { [0, 1, 2].map(|k| ctx.num(u32::from(k == i))) };
        let mut x = ctx.zero();
        let mut x_axis = lab(0);
        for axis in [0usize, 1] {
            let e = lab(axis);
            let p = sub(&e, &scaled(&z, &dot(&e, &z, bits), bits), bits);
            let pn = norm(&p, bits);
            if pn > Float::with_val(bits, &eps * 1024u32) {
                x_axis = scaled(&p, &Float::with_val(bits, pn.recip_ref()), bits);
                x = pn;
                break;
            }
        }
        debug_assert!(!x.is_zero());
        let y_axis = cross(&z, &x_axis, bits);
        let cx = dot(&transverse, &x_axis, bits);
        let cy = dot(&transverse, &y_axis, bits);
        let mut phi = cy.atan2(&cx);
        if phi < 0 {
            phi += Float::with_val(bits, ctx.pi() * 2u32);
        }
        (nu, phi)
    };
    if xi_c < 1 {
        xi_c = ctx.num(1);
    }
    Ok(ProlateFrame {
        r_ab,
        xi_c,
        nu_c,
        phi_c,
        axis_aligned,
    })
}

/// Result of a truncated Neumann summation.
#[derive(Clone, Debug)]
pub struct IntegralResult {
    pub value: Float,
    /// Running value after each `L = 0..=l_max_used`.
    pub partial_sums: Vec<(u32, Float)>,
    pub l_max_used: u32,
    /// `|partial(l_max) - partial(l_max - 1)|`.
    pub est_truncation_error: Float,
    /// Summed quadrature error estimates (including tail bounds), scaled by
    /// the prefactor.
    pub quad_error: Float,
    pub wall_time: Duration,
}

impl IntegralResult {
    /// The same summation stopped at `l_max ≤ l_max_used`.
    pub fn truncated(&self, l_max: u32) -> IntegralResult {
        let l_max = l_max.min(self.l_max_used);
        let partial_sums: Vec<(u32, Float)> = self.partial_sums[..=l_max as usize].to_vec();
        IntegralResult {
            value: partial_sums[l_max as usize].1.clone(),
            est_truncation_error: truncation_estimate(&partial_sums),
            partial_sums,
            l_max_used: l_max,
            quad_error: self.quad_error.clone(),
            wall_time: self.wall_time,
        }
    }
}

fn truncation_estimate(partial: &[(u32, Float)]) -> Float {
    let last = &partial[partial.len() - 1].1;
    match partial.len() {
        1 => Float::with_val(last.prec(), last.abs_ref()),
        n => Float::with_val(last.prec(), last - &partial[n - 2].1).abs(),
    }
}

/// `(L-M)!/(L+M)!`.
fn factorial_ratio(l: u32, m: u32, bits: u32) -> Float {
    let mut d = Float::with_val(bits, 1u32);
    for k in (l - m + 1)..=(l + m) {
        d *= k;
    }
    d.recip()
}

/// Harmonic weights `w_L = Σ_{M: |M| = order} (-1)^{order} (L-|M|)!/(L+|M|)! A^M S_{LM}(ν_C, φ_C)`
/// for `L = order..=l_max`.
fn column_weights(
    order: u32,
    couplings: &[(i32, Float)],
    l_max: u32,
    frame: &ProlateFrame,
    ctx: &PrecisionContext,
) -> Result<Vec<Float>> {
    let bits = ctx.bits();
    let mut out = Vec::with_capacity((l_max - order + 1) as usize);
    for l in order..=l_max {
        let mut w = Float::new(bits);
        for (m, a) in couplings.iter().filter(|(m, _)| m.unsigned_abs() == order) {
            w += real_harmonic(l, *m, &frame.nu_c, &frame.phi_c, ctx)? * a;
        }
        w *= factorial_ratio(l, order, bits);
        if order % 2 == 1 {
            w = -w;
        }
        out.push(w);
    }
    Ok(out)
}

/// Three-center nuclear attraction integral, with the Neumann expansion
/// truncated after `L = l_max`.
///
/// `tol` is the relative quadrature tolerance for each batch of auxiliary
/// integrals sharing one `|M|`.
pub fn three_center_integral(
    a: &Orbital,
    b: &Orbital,
    frame: &ProlateFrame,
    l_max: u32,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<IntegralResult> {
    let start = Instant::now();
    let bits = ctx.bits();
    if frame.xi_c <= 1 {
        return Err(Error::SingularGeometry(
            "xi_C = 1: C lies on the segment AB, where the Neumann expansion diverges; use a two-center routine".into(),
        ));
    }
    if (a.m != 0 || b.m != 0) && !frame.axis_aligned {
        return Err(Error::UnsupportedOrientation(
            "orbitals with m != 0 need the A->B axis along the lab +z axis".into(),
        ));
    }
    let params = AuxParams::from_exponents(&a.zeta, &b.zeta, &frame.r_ab, frame.xi_c.clone())?;
    let couplings = a_terms(a.m, b.m, ctx);
    let two_pi = Float::with_val(bits, ctx.pi() * 2u32);
    let prefactor = two_pi.sqrt() * 4u32 / &frame.r_ab * norm_const(&a.n, &b.n, &a.zeta, &b.zeta, &frame.r_ab, ctx)?;

    let mut orders: Vec<u32> = couplings.iter().map(|(m, _)| m.unsigned_abs()).filter(|&m| m <= l_max).collect();
    orders.dedup();
    let mut per_l = vec![Float::new(bits); l_max as usize + 1];
    let mut quad_error = Float::new(bits);
    let (ia, ib) = (a.indices(), b.indices());
    for order in orders {
        let weights = column_weights(order, &couplings, l_max, frame, ctx)?;
        if weights.iter().all(Float::is_zero) {
            continue;
        }
        let p = legendre_p_column(l_max, order, &frame.xi_c, ctx);
        let q = legendre_q_table(l_max, order, &frame.xi_c, ctx)?;
        let j_weights: Vec<Float> = (order..=l_max)
            .zip(&weights)
            .map(|(l, w)| Float::with_val(bits, w * q.get(order, l)))
            .collect();
        let k_weights: Vec<Float> = weights.iter().zip(&p).map(|(w, p)| Float::with_val(bits, w * p)).collect();
        let (j, k) = general_column(order, l_max, j_weights, k_weights, &ia, &ib, &params, tol, ctx)?;
        for (i, slot) in per_l[order as usize..].iter_mut().enumerate() {
            *slot += &j.values[i];
            *slot += &k.quad.values[i];
        }
        quad_error += j.total_error();
        quad_error += k.quad.total_error();
        quad_error += &k.tail_bound;
    }

    let mut running = Float::new(bits);
    let partial_sums: Vec<(u32, Float)> = per_l
        .iter()
        .enumerate()
        .map(|(l, v)| {
            running += Float::with_val(bits, v * &prefactor);
            (l as u32, running.clone())
        })
        .collect();
    Ok(IntegralResult {
        value: running,
        est_truncation_error: truncation_estimate(&partial_sums),
        partial_sums,
        l_max_used: l_max,
        quad_error: quad_error * Float::with_val(bits, prefactor.abs_ref()),
        wall_time: start.elapsed(),
    })
}

/// Results at several truncation levels, from one summation at the largest.
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub results: Vec<IntegralResult>,
    /// Agreeing significant digits between consecutive entries of `results`.
    pub matching_digits: Vec<u32>,
}

pub fn convergence_study(
    a: &Orbital,
    b: &Orbital,
    frame: &ProlateFrame,
    l_max_list: &[u32],
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<ConvergenceStudy> {
    let Some(&top) = l_max_list.last() else {
        return Err(Error::domain("convergence_study", "l_max list is empty"));
    };
    if l_max_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("convergence_study", "l_max list must be strictly ascending"));
    }
    let full = three_center_integral(a, b, frame, top, tol, ctx)?;
    let results: Vec<IntegralResult> = l_max_list.iter().map(|&l| full.truncated(l)).collect();
    let matching = results
        .windows(2)
        .map(|w| matching_digits(&w[0].value, &w[1].value, ctx.working_digits()))
        .collect();
    Ok(ConvergenceStudy {
        results,
        matching_digits: matching,
    })
}

/// A Cartesian point parsed from decimal strings at working precision.
pub fn cartesian(x: &str, y: &str, z: &str, ctx: &PrecisionContext) -> Result<Vec3> {
    Ok([ctx.parse(x)?, ctx.parse(y)?, ctx.parse(z)?])
}
