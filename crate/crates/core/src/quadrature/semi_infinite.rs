use rug::Float;

use super::adaptive::{integrate_2d, Integrand2D, QuadOptions, QuadResult, Region2D};
use crate::precision::{incomplete_gamma_upper, PrecisionContext};
use crate::{Error, Result};

/// Envelope `∫ |f(ξ, ν)| dν ≤ scale · ξ^power · e^{-p1 ξ}` valid for all `ξ`
/// at or beyond the lower limit of a semi-infinite integration.
#[derive(Clone, Debug)]
pub struct DecayHint {
    pub p1: Float,
    pub power: Float,
    pub scale: Float,
}

impl DecayHint {
    pub fn new(p1: Float, power: Float, scale: Float) -> Self {
        DecayHint { p1, power, scale }
    }

    fn validate(&self) -> Result<()> {
        if !self.p1.is_finite() || self.p1 <= 0 {
            return Err(Error::domain("integrate_semi_infinite", "decay rate p1 must be positive"));
        }
        if !self.power.is_finite() || self.power < 0 || !self.scale.is_finite() || self.scale < 0 {
            return Err(Error::domain("integrate_semi_infinite", "envelope power and scale must be nonnegative"));
        }
        Ok(())
    }
}

/// `∫_X^∞ scale · ξ^N e^{-p1 ξ} dξ = scale · Γ(N+1, p1 X) / p1^{N+1}`.
pub fn tail_bound(hint: &DecayHint, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    hint.validate()?;
    let bits = ctx.bits();
    let a = Float::with_val(bits, &hint.power + 1u32);
    let arg = Float::with_val(bits, &hint.p1 * x);
    if arg < 0 {
        return Err(Error::domain("tail_bound", "requires X >= 0"));
    }
    let g = incomplete_gamma_upper(&a, &arg, ctx)?;
    let denom = (Float::with_val(bits, hint.p1.ln_ref()) * &a).exp();
    Ok(g / denom * &hint.scale)
}

/// Smallest (to about 1e-6 relative) `X ≥ lo` with `tail_bound(X) ≤ target`.
pub fn truncation_point(hint: &DecayHint, lo: &Float, target: &Float, ctx: &PrecisionContext) -> Result<Float> {
    hint.validate()?;
    if *target <= 0 {
        return Err(Error::domain("truncation_point", "target must be positive"));
    }
    let bits = ctx.bits();
    if tail_bound(hint, lo, ctx)? <= *target {
        return Ok(lo.clone());
    }
    let mut step = Float::with_val(bits, 1u32) / &hint.p1;
    let mut below = lo.clone();
    let mut above;
    loop {
        above = Float::with_val(bits, lo + &step);
        if tail_bound(hint, &above, ctx)? <= *target {
            break;
        }
        below = above.clone();
        step *= 2u32;
        if !step.is_finite() || step.get_exp().unwrap_or(0) > 200 {
            return Err(Error::domain("truncation_point", "envelope does not reach the target"));
        }
    }
    for _ in 0..64 {
        let width = Float::with_val(bits, &above - &below);
        if width <= Float::with_val(bits, above.abs_ref()) * 1e-6f64 {
            break;
        }
        let mid = Float::with_val(bits, &above + &below) / 2u32;
        if tail_bound(hint, &mid, ctx)? <= *target {
            above = mid;
        } else {
            below = mid;
        }
    }
    Ok(above)
}

#[derive(Clone, Debug)]
pub struct SemiInfiniteResult {
    pub quad: QuadResult,
    /// Upper limit the `ξ` integration was truncated at.
    pub xi_max: Float,
    /// Envelope bound on the neglected tail (all components combined).
    pub tail_bound: Float,
}

/// `∫_{xi_lo}^∞ ∫_{nu_lo}^{nu_hi} f dν dξ` by truncation at `ξ_max`.
///
/// `ξ_max` is first chosen so that the envelope tail is ≤ `rel_tol/10` of the
/// envelope total; once the integral is known the condition
/// `tail ≤ max(rel_tol·|I|, abs_tol)/10` is rechecked and the range extended
/// if a strongly cancelling integrand made `|I|` much smaller than the
/// envelope.
pub fn integrate_semi_infinite<F: Integrand2D + ?Sized>(
    f: &F,
    xi_lo: &Float,
    nu: (&Float, &Float),
    hint: &DecayHint,
    opts: &QuadOptions,
    ctx: &PrecisionContext,
) -> Result<SemiInfiniteResult> {
    hint.validate()?;
    let bits = ctx.bits();
    let total_env = tail_bound(hint, xi_lo, ctx)?;
    let floor = Float::with_val(bits, &total_env * ctx.epsilon());
    let tenth = |v: Float| -> Float {
        let mut t = v / 10u32;
        if t < floor {
            t.clone_from(&floor);
        }
        t
    };
    let provisional = tenth(Float::with_val(bits, &total_env * &opts.rel_tol));
    let mut xi_max = truncation_point(hint, xi_lo, &provisional, ctx)?;
    if xi_max <= *xi_lo {
        // Whole range is negligible under the envelope; integrate one unit
        // of decay length anyway so the result is meaningful.
        xi_max = Float::with_val(bits, xi_lo + Float::with_val(bits, 1u32) / &hint.p1);
    }
    let region = Region2D::new(xi_lo.clone(), xi_max.clone(), nu.0.clone(), nu.1.clone());
    let mut quad = integrate_2d(f, &[region], opts, ctx)?;
    loop {
        let tail = tail_bound(hint, &xi_max, ctx)?;
        let mut allowed = Float::with_val(bits, quad.total().abs_ref()) * &opts.rel_tol;
        if let Some(a) = &opts.abs_tol {
            if *a > allowed {
                allowed.clone_from(a);
            }
        }
        let allowed = tenth(allowed);
        if tail <= allowed {
            return Ok(SemiInfiniteResult { quad, xi_max, tail_bound: tail });
        }
        let next = truncation_point(hint, &xi_max, &Float::with_val(bits, &allowed / 2u32), ctx)?;
        let ext = Region2D::new(xi_max.clone(), next.clone(), nu.0.clone(), nu.1.clone());
        let extra = integrate_2d(f, &[ext], opts, ctx)?;
        for k in 0..quad.values.len() {
            quad.values[k] += &extra.values[k];
            quad.errors[k] += &extra.errors[k];
        }
        quad.regions_used += extra.regions_used;
        quad.evaluations += extra.evaluations;
        xi_max = next;
    }
}

/// `ξ = lo + c·s/(1-s)` with `c = 1/p1`, mapping `s ∈ [0, 1)` onto `[lo, ∞)`.
struct Transformed<'a, F: ?Sized> {
    inner: &'a F,
    lo: Float,
    c: Float,
}

impl<F: Integrand2D + ?Sized> Integrand2D for Transformed<'_, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, s: &Float, nu: &Float, out: &mut [Float]) {
        let bits = s.prec();
        let one_minus = Float::with_val(bits, 1u32) - s;
        let xi = Float::with_val(bits, &self.c * s) / &one_minus + &self.lo;
        self.inner.eval(&xi, nu, out);
        let jac = Float::with_val(bits, &self.c / one_minus.square());
        for v in out.iter_mut() {
            *v *= &jac;
        }
    }
}

/// Variable-transform route to the same integral; used to cross-check the
/// truncation route.
pub fn integrate_semi_infinite_transformed<F: Integrand2D + ?Sized>(
    f: &F,
    xi_lo: &Float,
    nu: (&Float, &Float),
    p1: &Float,
    opts: &QuadOptions,
    ctx: &PrecisionContext,
) -> Result<QuadResult> {
    if !p1.is_finite() || *p1 <= 0 {
        return Err(Error::domain("integrate_semi_infinite", "decay rate p1 must be positive"));
    }
    let bits = ctx.bits();
    let t = Transformed {
        inner: f,
        lo: xi_lo.clone(),
        c: Float::with_val(bits, 1u32) / p1,
    };
    let region = Region2D::new(ctx.zero(), ctx.num(1), nu.0.clone(), nu.1.clone());
    integrate_2d(&t, &[region], opts, ctx)
}
