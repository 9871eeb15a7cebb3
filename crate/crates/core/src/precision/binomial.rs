use rug::Float;

use super::PrecisionContext;

/// `C(n, s)` for real `n` and integer `s ≥ 0`, as the falling factorial
/// `n (n-1) … (n-s+1) / s!`.
///
/// For integer `n ≥ 0` every intermediate value is itself an integer
/// binomial coefficient, so the result is exact while it fits the mantissa.
/// `C(n, s) = 0` for integer `0 ≤ n < s` falls out of the product.
pub fn binomial(n: &Float, s: u32, ctx: &PrecisionContext) -> Float {
    let bits = ctx.bits();
    let mut c = Float::with_val(bits, 1u32);
    for i in 0..s {
        c *= Float::with_val(bits, n - i);
        c /= i + 1;
    }
    c
}

/// Generalized binomial coefficient `Σ_{s'=0}^{s} (-1)^{s'} C(n1, s-s') C(n2, s')`,
/// i.e. the coefficient of `x^(n1+n2-s) a^s` in `(x+a)^n1 (x-a)^n2`.
pub fn gen_binomial(n1: &Float, n2: &Float, s: u32, ctx: &PrecisionContext) -> Float {
    let mut acc = ctx.zero();
    for sp in 0..=s {
        let term = binomial(n1, s - sp, ctx) * binomial(n2, sp, ctx);
        if sp % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(30).unwrap()
    }

    #[test]
    fn pascal_triangle() {
        let ctx = ctx();
        let mut row: Vec<u128> = vec![1];
        for n in 0..60u32 {
            for (s, &expected) in row.iter().enumerate() {
                assert_eq!(binomial(&ctx.num(n), s as u32, &ctx), expected, "C({n},{s})");
            }
            assert_eq!(binomial(&ctx.num(n), n + 1, &ctx), 0);
            let mut next = vec![1u128; row.len() + 1];
            for k in 1..row.len() {
                next[k] = row[k - 1] + row[k];
            }
            row = next;
        }
    }

    #[test]
    fn half_integer_binomial() {
        let ctx = ctx();
        // C(1/2, 2) = -1/8, C(-1/2, 3) = -5/16
        assert_eq!(binomial(&ctx.num(0.5), 2, &ctx), -0.125);
        assert_eq!(binomial(&ctx.num(-0.5), 3, &ctx), -0.3125);
    }

    /// Coefficients of (x + 1)^n1 (x - 1)^n2 by explicit polynomial products.
    fn poly_coeffs(n1: usize, n2: usize) -> Vec<i128> {
        let mut p = vec![1i128];
        for _ in 0..n1 {
            let mut q = vec![0i128; p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i] += c; // times a
                q[i + 1] += c; // times x
            }
            p = q;
        }
        for _ in 0..n2 {
            let mut q = vec![0i128; p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i] -= c;
                q[i + 1] += c;
            }
            p = q;
        }
        // p[k] is the coefficient of x^k a^(n-k); return indexed by power of a
        p.reverse();
        p
    }

    #[test]
    fn gen_binomial_is_polynomial_coefficient() {
        let ctx = ctx();
        for n1 in 0..9usize {
            for n2 in 0..9usize {
                let coeffs = poly_coeffs(n1, n2);
                for (s, &c) in coeffs.iter().enumerate() {
                    let got = gen_binomial(&ctx.num(n1 as u32), &ctx.num(n2 as u32), s as u32, &ctx);
                    assert_eq!(got, c as f64, "n1={n1} n2={n2} s={s}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pascal_rule_real(n in -20.0f64..20.0, s in 1u32..15) {
            let ctx = ctx();
            let x = ctx.num(n);
            let lhs = binomial(&Float::with_val(ctx.bits(), &x + 1u32), s, &ctx);
            let rhs = binomial(&x, s, &ctx) + binomial(&x, s - 1, &ctx);
            let diff = Float::with_val(ctx.bits(), &lhs - &rhs).abs();
            let scale = Float::with_val(ctx.bits(), lhs.abs_ref()) + 1u32;
            prop_assert!(diff < scale * ctx.pow10(-40));
        }
    }
}
