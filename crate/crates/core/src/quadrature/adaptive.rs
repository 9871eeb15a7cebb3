use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;
use rug::Float;

use super::gk::{gk_rule, MappedRule};
use crate::precision::PrecisionContext;
use crate::{Error, Result};

/// Axis-aligned rectangle `[xi_lo, xi_hi] × [nu_lo, nu_hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Region2D {
    pub xi_lo: Float,
    pub xi_hi: Float,
    pub nu_lo: Float,
    pub nu_hi: Float,
}

impl Region2D {
    pub fn new(xi_lo: Float, xi_hi: Float, nu_lo: Float, nu_hi: Float) -> Self {
        Region2D {
            xi_lo,
            xi_hi,
            nu_lo,
            nu_hi,
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = [&self.xi_lo, &self.xi_hi, &self.nu_lo, &self.nu_hi]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.xi_lo >= self.xi_hi || self.nu_lo >= self.nu_hi {
            return Err(Error::domain("integrate_2d", "region must be a nonempty finite rectangle"));
        }
        Ok(())
    }

    fn canonical_cmp(&self, other: &Region2D) -> Ordering {
        self.xi_lo
            .partial_cmp(&other.xi_lo)
            .unwrap()
            .then_with(|| self.nu_lo.partial_cmp(&other.nu_lo).unwrap())
    }
}

/// Kronrod and embedded Gauss product-rule sums for one rectangle.
#[derive(Clone, Debug)]
pub struct RuleSums {
    pub kronrod: Vec<Float>,
    pub gauss: Vec<Float>,
    /// Kronrod estimate of `∫|f_k|`, when requested.
    pub magnitude: Option<Vec<Float>>,
}

/// Vector-valued integrand `f: (ξ, ν) → ℝ^dim`.
pub trait Integrand2D: Sync {
    fn dim(&self) -> usize;

    /// Writes `f(ξ, ν)` into `out` (length [`dim`](Self::dim)).
    fn eval(&self, xi: &Float, nu: &Float, out: &mut [Float]);

    /// Tensor-product sums over the mapped rules. Integrands with separable
    /// factors override this to avoid redundant work per node pair.
    ///
    /// `magnitude` asks for the Kronrod estimate of `∫|f_k|` as well; it is
    /// only requested on the initial partition, where it sets the error floor.
    fn eval_rule(&self, xi: &MappedRule, nu: &MappedRule, bits: u32, magnitude: bool) -> RuleSums {
        let dim = self.dim();
        let zeros = || vec![Float::new(bits); dim];
        let mut kronrod = zeros();
        let mut gauss = zeros();
        let mut mag = zeros();
        let mut buf = zeros();
        for (i, x) in xi.nodes.iter().enumerate() {
            let mut row_k = zeros();
            let mut row_g = zeros();
            let mut row_m = zeros();
            let gx = xi.gauss_weight_at(i);
            for (j, y) in nu.nodes.iter().enumerate() {
                self.eval(x, y, &mut buf);
                let wk = &nu.kronrod[j];
                let wg = if gx.is_some() { nu.gauss_weight_at(j) } else { None };
                for k in 0..dim {
                    row_k[k] += Float::with_val(bits, &buf[k] * wk);
                    if magnitude {
                        row_m[k] += Float::with_val(bits, &buf[k] * wk).abs();
                    }
                    if let Some(wg) = wg {
                        row_g[k] += Float::with_val(bits, &buf[k] * wg);
                    }
                }
            }
            for k in 0..dim {
                kronrod[k] += Float::with_val(bits, &row_k[k] * &xi.kronrod[i]);
                if magnitude {
                    mag[k] += Float::with_val(bits, &row_m[k] * &xi.kronrod[i]);
                }
                if let Some(gx) = gx {
                    gauss[k] += Float::with_val(bits, &row_g[k] * gx);
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

/// How per-component errors are combined into the stopping test.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ErrorNorm {
    /// Every component meets the tolerance relative to its own value.
    #[default]
    Componentwise,
    /// The summed error of all components meets the tolerance relative to
    /// the sum of all components; for integrands whose components are the
    /// terms of a single series.
    Sum,
}

#[derive(Clone, Debug)]
pub struct QuadOptions {
    /// Gauss order `g` of the `(g, 2g+1)` pair.
    pub order: u32,
    pub rel_tol: Float,
    pub abs_tol: Option<Float>,
    pub norm: ErrorNorm,
    pub max_regions: usize,
}

impl QuadOptions {
    pub const DEFAULT_ORDER: u32 = 15;
    pub const DEFAULT_MAX_REGIONS: usize = 200_000;

    /// Defaults: K31, relative tolerance `10^-target_digits`, 200 000 regions.
    pub fn new(ctx: &PrecisionContext) -> Self {
        QuadOptions {
            order: Self::DEFAULT_ORDER,
            rel_tol: ctx.default_tolerance(),
            abs_tol: None,
            norm: ErrorNorm::Componentwise,
            max_regions: Self::DEFAULT_MAX_REGIONS,
        }
    }

    pub fn with_order(mut self, g: u32) -> Self {
        self.order = g;
        self
    }

    pub fn relative(mut self, tol: Float) -> Self {
        self.rel_tol = tol;
        self
    }

    pub fn absolute(mut self, tol: Float) -> Self {
        self.abs_tol = Some(tol);
        self
    }

    pub fn norm(mut self, norm: ErrorNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn max_regions(mut self, n: usize) -> Self {
        self.max_regions = n;
        self
    }
}

#[derive(Clone, Debug)]
pub struct QuadResult {
    pub values: Vec<Float>,
    /// Accumulated `|Kronrod − Gauss|` per component.
    pub errors: Vec<Float>,
    pub regions_used: usize,
    pub evaluations: u64,
}

impl QuadResult {
    /// First component.
    pub fn value(&self) -> &Float {
        &self.values[0]
    }

    pub fn error_estimate(&self) -> &Float {
        &self.errors[0]
    }

    /// Sum over components.
    pub fn total(&self) -> Float {
        let bits = self.values[0].prec();
        let mut s = Float::new(bits);
        for v in &self.values {
            s += v;
        }
        s
    }

    pub fn total_error(&self) -> Float {
        let bits = self.errors[0].prec();
        let mut s = Float::new(bits);
        for v in &self.errors {
            s += v;
        }
        s
    }
}

struct Cell {
    region: Region2D,
    values: Vec<Float>,
    magnitude: Option<Vec<Float>>,
    errors: Vec<Float>,
    depth_xi: u32,
    depth_nu: u32,
}

#[derive(PartialEq)]
struct Priority(f64);

impl Eq for Priority {}

impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Priority {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn evaluate<F: Integrand2D + ?Sized>(
    f: &F,
    region: Region2D,
    depth_xi: u32,
    depth_nu: u32,
    g: u32,
    magnitude: bool,
    ctx: &PrecisionContext,
) -> Result<Cell> {
    let rule = gk_rule(g, ctx)?;
    let xi = rule.map(&region.xi_lo, &region.xi_hi);
    let nu = rule.map(&region.nu_lo, &region.nu_hi);
    let sums = f.eval_rule(&xi, &nu, ctx.bits(), magnitude);
    let errors = sums
        .kronrod
        .iter()
        .zip(&sums.gauss)
        .map(|(k, g)| {
            let mut e = Float::with_val(ctx.bits(), k - g);
            e.abs_mut();
            e
        })
        .collect();
    Ok(Cell {
        region,
        values: sums.kronrod,
        magnitude: sums.magnitude,
        errors,
        depth_xi,
        depth_nu,
    })
}

fn split(cell: &Cell, bits: u32) -> [(Region2D, u32, u32); 2] {
    let r = &cell.region;
    if cell.depth_xi <= cell.depth_nu {
        let mid = Float::with_val(bits, &r.xi_lo + &r.xi_hi) / 2u32;
        [
            (Region2D::new(r.xi_lo.clone(), mid.clone(), r.nu_lo.clone(), r.nu_hi.clone()), cell.depth_xi + 1, cell.depth_nu),
            (Region2D::new(mid, r.xi_hi.clone(), r.nu_lo.clone(), r.nu_hi.clone()), cell.depth_xi + 1, cell.depth_nu),
        ]
    } else {
        let mid = Float::with_val(bits, &r.nu_lo + &r.nu_hi) / 2u32;
        [
            (Region2D::new(r.xi_lo.clone(), r.xi_hi.clone(), r.nu_lo.clone(), mid.clone()), cell.depth_xi, cell.depth_nu + 1),
            (Region2D::new(r.xi_lo.clone(), r.xi_hi.clone(), mid, r.nu_hi.clone()), cell.depth_xi, cell.depth_nu + 1),
        ]
    }
}

/// Integrates `f` over the union of `partition` (rectangles must not
/// overlap).
///
/// Refinement is worst-first: the rectangle with the largest scaled error is
/// bisected along the axis it has been split least often along (ties: `ξ`).
/// Stops once the accumulated error satisfies
/// `err ≤ max(rel_tol·|value|, floor, abs_tol)`, where `floor` is
/// `10^-working_digits` times the first-pass estimate of `∫|f|`.
/// Region results are summed in canonical coordinate order, so the output
/// is bit-identical across runs regardless of scheduling.
pub fn integrate_2d<F: Integrand2D + ?Sized>(
    f: &F,
    partition: &[Region2D],
    opts: &QuadOptions,
    ctx: &PrecisionContext,
) -> Result<QuadResult> {
    if partition.is_empty() {
        return Err(Error::domain("integrate_2d", "empty partition"));
    }
    if opts.rel_tol <= 0 && opts.abs_tol.as_ref().is_none_or(|a| *a <= 0) {
        return Err(Error::domain("integrate_2d", "tolerance must be positive"));
    }
    for r in partition {
        r.validate()?;
    }
    let dim = f.dim();
    let bits = ctx.bits();
    let acc_bits = bits + 64;
    let g = opts.order;
    gk_rule(g, ctx)?;
    let per_region = (2 * g as u64 + 1).pow(2);

    let first: Vec<Cell> = partition
        .par_iter()
        .map(|r| evaluate(f, r.clone(), 0, 0, g, true, ctx))
        .collect::<Result<_>>()?;
    let mut evaluated = first.len() as u64;

    // Scales for the floor and for ranking regions.
    let mut first_abs = vec![Float::new(acc_bits); dim];
    for c in &first {
        for k in 0..dim {
            match &c.magnitude {
                Some(m) => first_abs[k] += &m[k],
                None => first_abs[k] += Float::with_val(acc_bits, c.values[k].abs_ref()),
            }
        }
    }
    let eps = ctx.epsilon();
    let mut abs_all = Float::new(acc_bits);
    for a in &first_abs {
        abs_all += a;
    }
    let fallback = if abs_all.is_zero() { Float::with_val(acc_bits, 1u32) } else { abs_all.clone() };
    let rank_scale: Vec<Float> = match opts.norm {
        ErrorNorm::Componentwise => first_abs
            .iter()
            .map(|a| if a.is_zero() { fallback.clone() } else { a.clone() })
            .collect(),
        ErrorNorm::Sum => vec![fallback.clone(); dim],
    };
    let floors: Vec<Float> = match opts.norm {
        ErrorNorm::Componentwise => first_abs.iter().map(|a| Float::with_val(bits, a * &eps)).collect(),
        ErrorNorm::Sum => vec![Float::with_val(bits, &abs_all * &eps)],
    };
    let priority = |c: &Cell| -> Priority {
        let p = match opts.norm {
            ErrorNorm::Componentwise => c
                .errors
                .iter()
                .zip(&rank_scale)
                .map(|(e, s)| Float::with_val(53, e / s).to_f64())
                .fold(0.0, f64::max),
            ErrorNorm::Sum => {
                let mut s = Float::new(acc_bits);
                for e in &c.errors {
                    s += e;
                }
                Float::with_val(53, s / &rank_scale[0]).to_f64()
            }
        };
        Priority(p)
    };

    let mut cells: Vec<Option<Cell>> = Vec::new();
    let mut heap = BinaryHeap::new();
    let mut tot_val = vec![Float::new(acc_bits); dim];
    let mut tot_err = vec![Float::new(acc_bits); dim];
    for c in first {
        for k in 0..dim {
            tot_val[k] += &c.values[k];
            tot_err[k] += &c.errors[k];
        }
        heap.push((priority(&c), Reverse(cells.len())));
        cells.push(Some(c));
    }
    let mut live = cells.len();

    let converged = |tot_val: &[Float], tot_err: &[Float]| -> bool {
        let bound = |value: &Float, floor: &Float| -> Float {
            let mut b = Float::with_val(bits, value.abs_ref()) * &opts.rel_tol;
            if *floor > b {
                b = floor.clone();
            }
            if let Some(a) = &opts.abs_tol {
                if *a > b {
                    b = a.clone();
                }
            }
            b
        };
        match opts.norm {
            ErrorNorm::Componentwise => (0..dim).all(|k| tot_err[k] <= bound(&tot_val[k], &floors[k])),
            ErrorNorm::Sum => {
                let mut v = Float::new(acc_bits);
                let mut e = Float::new(acc_bits);
                for k in 0..dim {
                    v += &tot_val[k];
                    e += &tot_err[k];
                }
                e <= bound(&v, &floors[0])
            }
        }
    };

    while !converged(&tot_val, &tot_err) {
        let best_estimate = || {
            let mut v = Float::new(bits);
            let mut e = Float::new(bits);
            for k in 0..dim {
                v += &tot_val[k];
                e += &tot_err[k];
            }
            (v.to_string(), e.to_string())
        };
        if live + 1 > opts.max_regions {
            let (best, error) = best_estimate();
            return Err(Error::Convergence { best, error, regions: live });
        }
        let (Priority(p), Reverse(id)) = heap.pop().expect("heap holds every live region");
        let cell = cells[id].take().expect("live region");
        if p == 0.0 || cell.depth_xi.max(cell.depth_nu) > bits {
            // No region carries error any more, or refinement has run out of
            // representable midpoints: the tolerance is unattainable.
            let (best, error) = best_estimate();
            return Err(Error::Convergence { best, error, regions: live });
        }
        let [(ra, ax, an), (rb, bx, bn)] = split(&cell, bits);
        let (ca, cb) = rayon::join(
            || evaluate(f, ra, ax, an, g, false, ctx),
            || evaluate(f, rb, bx, bn, g, false, ctx),
        );
        let (ca, cb) = (ca?, cb?);
        evaluated += 2;
        for k in 0..dim {
            tot_val[k] -= &cell.values[k];
            tot_err[k] -= &cell.errors[k];
            tot_val[k] += &ca.values[k];
            tot_val[k] += &cb.values[k];
            tot_err[k] += &ca.errors[k];
            tot_err[k] += &cb.errors[k];
            if tot_err[k] < 0 {
                tot_err[k] = Float::new(acc_bits);
            }
        }
        for c in [ca, cb] {
            heap.push((priority(&c), Reverse(cells.len())));
            cells.push(Some(c));
        }
        live += 1;
    }

    let mut finals: Vec<Cell> = cells.into_iter().flatten().collect();
    finals.sort_by(|a, b| a.region.canonical_cmp(&b.region));
    let mut values = vec![Float::new(acc_bits); dim];
    let mut errors = vec![Float::new(acc_bits); dim];
    for c in &finals {
        for k in 0..dim {
            values[k] += &c.values[k];
            errors[k] += &c.errors[k];
        }
    }
    let round = |v: Vec<Float>| v.into_iter().map(|x| Float::with_val(bits, x)).collect();
    Ok(QuadResult {
        values: round(values),
        errors: round(errors),
        regions_used: finals.len(),
        evaluations: evaluated * per_region,
    })
}
