use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Float;

use crate::precision::PrecisionContext;
use crate::{Error, Result};

/// Gauss–Kronrod rule on `[-1, 1]`: `g` Gauss nodes embedded in `2g+1`
/// Kronrod nodes.
#[derive(Clone, Debug)]
pub struct GKRule {
    order: u32,
    nodes: Vec<Float>,
    kronrod_weights: Vec<Float>,
    /// Indices into `nodes` of the Gauss points, ascending.
    gauss_index: Vec<usize>,
    gauss_weights: Vec<Float>,
}

type RuleCache = Mutex<HashMap<(u32, u32), Arc<GKRule>>>;

fn cache() -> &'static RuleCache {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized [`GKRule::new`], keyed by order and mantissa bits.
pub fn gk_rule(g: u32, ctx: &PrecisionContext) -> Result<Arc<GKRule>> {
    let key = (g, ctx.bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(GKRule::new(g, ctx)?);
    cache().lock().unwrap().entry(key).or_insert_with(|| rule.clone());
    Ok(rule)
}

impl GKRule {
    pub const MIN_ORDER: u32 = 7;

    /// Builds the rule at the working precision of `ctx`.
    ///
    /// Gauss nodes are Newton-refined roots of `P_g`. The `g+1` extra Kronrod
    /// nodes are the roots of the Stieltjes polynomial `E_{g+1}`, found in the
    /// Legendre basis from the orthogonality conditions `∫ E P_g P_k = 0`,
    /// `k ≤ g`. Kronrod weights then follow from interpolatory moment
    /// conditions on all `2g+1` nodes.
    pub fn new(g: u32, ctx: &PrecisionContext) -> Result<Self> {
        if g < Self::MIN_ORDER {
            return Err(Error::NodeConvergence {
                rule: format!("G{g}K{}", 2 * g + 1),
                reason: format!("order must be at least {}", Self::MIN_ORDER),
            });
        }
        // Extra bits so that node/weight rounding stays below working precision.
        let bits = ctx.bits() + 32;
        let gauss = gauss_nodes(g, bits)?;
        let stieltjes = stieltjes_coefficients(g, bits)?;
        let extra = stieltjes_roots(&stieltjes, &gauss, bits, g)?;

        let mut all: Vec<(Float, bool)> = gauss.iter().map(|x| (x.clone(), true)).collect();
        all.extend(extra.into_iter().map(|x| (x, false)));
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
        for w in all.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::NodeConvergence {
                    rule: format!("G{g}K{}", 2 * g + 1),
                    reason: "Kronrod nodes not strictly increasing".into(),
                });
            }
        }
        let nodes_hp: Vec<Float> = all.iter().map(|(x, _)| x.clone()).collect();
        let kw = kronrod_weights(&nodes_hp, bits, g)?;

        let out_bits = ctx.bits();
        let round = |v: &Float| Float::with_val(out_bits, v);
        let mut gauss_index = Vec::new();
        let mut gauss_weights = Vec::new();
        for (i, (x, is_gauss)) in all.iter().enumerate() {
            if *is_gauss {
                gauss_index.push(i);
                let (_, dp) = legendre_and_derivative(g, x, bits);
                let one_minus = Float::with_val(bits, 1u32) - Float::with_val(bits, x.square_ref());
                let w = Float::with_val(bits, 2u32) / (one_minus * dp.square());
                gauss_weights.push(round(&w));
            }
        }
        Ok(GKRule {
            order: g,
            nodes: nodes_hp.iter().map(round).collect(),
            kronrod_weights: kw.iter().map(round).collect(),
            gauss_index,
            gauss_weights,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn nodes(&self) -> &[Float] {
        &self.nodes
    }

    pub fn kronrod_weights(&self) -> &[Float] {
        &self.kronrod_weights
    }

    pub fn gauss_index(&self) -> &[usize] {
        &self.gauss_index
    }

    pub fn gauss_weights(&self) -> &[Float] {
        &self.gauss_weights
    }

    pub fn gauss_nodes(&self) -> impl Iterator<Item = &Float> {
        self.gauss_index.iter().map(|&i| &self.nodes[i])
    }

    /// Nodes and weights affinely mapped onto `[lo, hi]`.
    pub fn map(&self, lo: &Float, hi: &Float) -> MappedRule {
        let bits = self.nodes[0].prec().max(lo.prec());
        let half = Float::with_val(bits, hi - lo) / 2u32;
        let mid = Float::with_val(bits, hi + lo) / 2u32;
        let nodes = self
            .nodes
            .iter()
            .map(|t| Float::with_val(bits, t * &half) + &mid)
            .collect();
        let kronrod = self
            .kronrod_weights
            .iter()
            .map(|w| Float::with_val(bits, w * &half))
            .collect();
        let gauss = self
            .gauss_weights
            .iter()
            .map(|w| Float::with_val(bits, w * &half))
            .collect();
        MappedRule {
            nodes,
            kronrod,
            gauss,
            gauss_index: self.gauss_index.clone(),
        }
    }
}

/// A [`GKRule`] mapped onto a finite interval.
#[derive(Clone, Debug)]
pub struct MappedRule {
    pub nodes: Vec<Float>,
    pub kronrod: Vec<Float>,
    /// Aligned with `gauss_index`.
    pub gauss: Vec<Float>,
    pub gauss_index: Vec<usize>,
}

impl MappedRule {
    /// Gauss weight of node `i`, if it is a Gauss node.
    pub fn gauss_weight_at(&self, i: usize) -> Option<&Float> {
        self.gauss_index.binary_search(&i).ok().map(|k| &self.gauss[k])
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub(crate) fn legendre_and_derivative(n: u32, x: &Float, bits: u32) -> (Float, Float) {
    let mut p0 = Float::with_val(bits, 1u32);
    if n == 0 {
        return (p0, Float::new(bits));
    }
    let mut p1 = Float::with_val(bits, x);
    for k in 1..n {
        let p2 = (Float::with_val(bits, x * &p1) * (2 * k + 1) - Float::with_val(bits, &p0 * k)) / (k + 1);
        p0 = p1;
        p1 = p2;
    }
    // (x²-1) P_n' = n (x P_n - P_{n-1})
    let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
    let dp = (Float::with_val(bits, x * &p1) - &p0) * n / x2m1;
    (p1, dp)
}

fn legendre_all(n: u32, x: &Float, bits: u32) -> Vec<Float> {
    let mut out = vec![Float::with_val(bits, 1u32)];
    if n == 0 {
        return out;
    }
    out.push(Float::with_val(bits, x));
    for k in 1..n {
        let k_us = k as usize;
        let next = (Float::with_val(bits, x * &out[k_us]) * (2 * k + 1)
            - Float::with_val(bits, &out[k_us - 1] * k))
            / (k + 1);
        out.push(next);
    }
    out
}

fn newton_limit(bits: u32) -> Float {
    Float::with_val(bits, Float::i_exp(1, -(bits as i32) + 6))
}

fn gauss_nodes(g: u32, bits: u32) -> Result<Vec<Float>> {
    let tol = newton_limit(bits);
    let mut nodes = Vec::with_capacity(g as usize);
    for i in 1..=g {
        let guess = -(std::f64::consts::PI * (i as f64 - 0.25) / (g as f64 + 0.5)).cos();
        let mut x = Float::with_val(bits, guess);
        let mut converged = false;
        for _ in 0..200 {
            let (p, dp) = legendre_and_derivative(g, &x, bits);
            let dx = p / dp;
            x -= &dx;
            if dx.abs() < tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NodeConvergence {
                rule: format!("G{g}"),
                reason: format!("Newton iteration for Gauss node {i} did not converge"),
            });
        }
        nodes.push(x);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(nodes)
}

/// `∫_{-1}^{1} P_a P_b P_c dx = 2 (a b c; 0 0 0)²`.
fn triple_legendre_integral(a: u32, b: u32, c: u32, bits: u32) -> Float {
    let sum = a + b + c;
    if sum % 2 == 1 || a > b + c || b > a + c || c > a + b {
        return Float::new(bits);
    }
    let s = sum / 2;
    let fact = |n: u32| -> Float {
        let mut f = Float::with_val(bits, 1u32);
        for k in 2..=n {
            f *= k;
        }
        f
    };
    let ratio = fact(s) / (fact(s - a) * fact(s - b) * fact(s - c));
    let num = fact(2 * s - 2 * a) * fact(2 * s - 2 * b) * fact(2 * s - 2 * c);
    let den = fact(2 * s + 1);
    ratio.square() * num / den * 2u32
}

/// Legendre-basis coefficients `c_0..c_{g+1}` of the monic-in-`P_{g+1}`
/// Stieltjes polynomial.
fn stieltjes_coefficients(g: u32, bits: u32) -> Result<Vec<Float>> {
    let n = g + 1;
    // E has the parity of P_n, so only c_j with j ≡ n (mod 2) are unknown.
    // ∫ P_j P_g P_k vanishes unless j + g + k is even, leaving the odd k ≤ g
    // as conditions; there are exactly as many as unknowns.
    let unknowns: Vec<u32> = (0..n).filter(|j| (n - j).is_multiple_of(2)).collect();
    let rows: Vec<u32> = (0..=g).filter(|k| (n + g + k).is_multiple_of(2)).collect();
    debug_assert_eq!(rows.len(), unknowns.len());
    let size = unknowns.len();
    let mut mat: Vec<Vec<Float>> = Vec::with_capacity(size);
    for &k in &rows {
        let mut row: Vec<Float> = unknowns.iter().map(|&j| triple_legendre_integral(j, g, k, bits)).collect();
        row.push(-triple_legendre_integral(n, g, k, bits));
        mat.push(row);
    }
    let sol = solve_dense(mat, bits).ok_or_else(|| Error::NodeConvergence {
        rule: format!("G{g}K{}", 2 * g + 1),
        reason: "singular Stieltjes system".into(),
    })?;
    let mut coeffs = vec![Float::new(bits); n as usize + 1];
    for (idx, &j) in unknowns.iter().enumerate() {
        coeffs[j as usize] = sol[idx].clone();
    }
    coeffs[n as usize] = Float::with_val(bits, 1u32);
    // Verify all orthogonality conditions, including ones not used above.
    let scale = Float::with_val(bits, Float::i_exp(1, -(bits as i32) / 2));
    for k in 0..=g {
        let mut r = Float::new(bits);
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                r += Float::with_val(bits, c * triple_legendre_integral(j as u32, g, k, bits));
            }
        }
        if r.abs() > scale {
            return Err(Error::NodeConvergence {
                rule: format!("G{g}K{}", 2 * g + 1),
                reason: format!("Stieltjes orthogonality violated at k = {k}"),
            });
        }
    }
    Ok(coeffs)
}

fn stieltjes_eval(coeffs: &[Float], x: &Float, bits: u32) -> (Float, Float) {
    let n = coeffs.len() as u32 - 1;
    let p = legendre_all(n, x, bits);
    let x2m1 = Float::with_val(bits, x.square_ref()) - 1u32;
    let mut value = Float::new(bits);
    let mut deriv = Float::new(bits);
    for (j, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        value += Float::with_val(bits, c * &p[j]);
        if j > 0 {
            let dj = (Float::with_val(bits, x * &p[j]) - &p[j - 1]) * j as u32 / &x2m1;
            deriv += dj * c;
        }
    }
    (value, deriv)
}

/// One root of `E_{g+1}` in each gap of `[-1, x_1, …, x_g, 1]`.
fn stieltjes_roots(coeffs: &[Float], gauss: &[Float], bits: u32, g: u32) -> Result<Vec<Float>> {
    let mut brackets = Vec::with_capacity(gauss.len() + 1);
    let mut prev = Float::with_val(bits, -1i32);
    for x in gauss {
        brackets.push((prev, x.clone()));
        prev = x.clone();
    }
    brackets.push((prev, Float::with_val(bits, 1u32)));
    let tol = newton_limit(bits);
    let fail = |reason: String| Error::NodeConvergence {
        rule: format!("G{g}K{}", 2 * g + 1),
        reason,
    };
    let mut roots = Vec::with_capacity(brackets.len());
    for (lo, hi) in brackets {
        // Bisection (in 64-bit sign tests at full precision) down to a
        // narrow bracket, then Newton.
        let mut a = lo;
        let mut b = hi;
        let fa_sign = stieltjes_eval(coeffs, &a, bits).0.is_sign_negative();
        let fb_sign = stieltjes_eval(coeffs, &b, bits).0.is_sign_negative();
        if fa_sign == fb_sign {
            return Err(fail("Stieltjes polynomial does not interlace Gauss nodes".into()));
        }
        for _ in 0..60 {
            let mid = Float::with_val(bits, &a + &b) / 2u32;
            let fm = stieltjes_eval(coeffs, &mid, bits).0;
            if fm.is_zero() {
                a = mid.clone();
                b = mid;
                break;
            }
            if fm.is_sign_negative() == fa_sign {
                a = mid;
            } else {
                b = mid;
            }
        }
        let mut x = Float::with_val(bits, &a + &b) / 2u32;
        let mut converged = false;
        for _ in 0..100 {
            let (f, df) = stieltjes_eval(coeffs, &x, bits);
            if f.is_zero() {
                converged = true;
                break;
            }
            let dx = f / df;
            x -= &dx;
            if dx.abs() < tol {
                converged = true;
                break;
            }
        }
        if !converged || x <= a.clone() - 1e-10 || x >= b.clone() + 1e-10 {
            return Err(fail("Newton iteration for Kronrod node failed".into()));
        }
        roots.push(x);
    }
    Ok(roots)
}

/// Interpolatory weights: `Σ_i w_i P_k(x_i) = 2 δ_{k0}` for `k ≤ 2g`.
fn kronrod_weights(nodes: &[Float], bits: u32, g: u32) -> Result<Vec<Float>> {
    let n = nodes.len();
    let p: Vec<Vec<Float>> = nodes.iter().map(|x| legendre_all(n as u32 - 1, x, bits)).collect();
    let mut mat = Vec::with_capacity(n);
    for k in 0..n {
        let mut row: Vec<Float> = p.iter().map(|pi| pi[k].clone()).collect();
        row.push(Float::with_val(bits, if k == 0 { 2u32 } else { 0u32 }));
        mat.push(row);
    }
    solve_dense(mat, bits).ok_or_else(|| Error::NodeConvergence {
        rule: format!("G{g}K{}", 2 * g + 1),
        reason: "singular Kronrod moment system".into(),
    })
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut a: Vec<Vec<Float>>, bits: u32) -> Option<Vec<Float>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            Float::with_val(bits, a[i][col].abs_ref())
                .partial_cmp(&Float::with_val(bits, a[j][col].abs_ref()))
                .unwrap()
        })?;
        if a[pivot][col].is_zero() {
            return None;
        }
        a.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = Float::with_val(bits, &a[row][col] / &a[col][col]);
            if factor.is_zero() {
                continue;
            }
            let (upper, lower) = a.split_at_mut(row);
            for (target, source) in lower[0][col..=n].iter_mut().zip(&upper[col][col..=n]) {
                *target -= Float::with_val(bits, &factor * source);
            }
        }
    }
    let mut x = vec![Float::new(bits); n];
    for row in (0..n).rev() {
        let mut s = a[row][n].clone();
        for k in (row + 1)..n {
            s -= Float::with_val(bits, &a[row][k] * &x[k]);
        }
        x[row] = s / &a[row][row];
    }
    Some(x)
}
