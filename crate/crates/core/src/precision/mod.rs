//! Working-precision contract shared by every numerical routine.
//!
//! A [`PrecisionContext`] fixes the number of decimal digits the caller wants
//! (`target_digits`) plus a block of guard digits that absorb cancellation in
//! quadrature sums. All values are MPFR floats carrying
//! [`PrecisionContext::bits`] bits of mantissa.

mod binomial;
mod gamma;

pub use binomial::{binomial, gen_binomial};
pub use gamma::{dirac_gamma, gamma, incomplete_gamma_upper, ln_gamma};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Assign, Float};

use crate::{Error, Result};

/// Real number at the working precision of some [`PrecisionContext`].
pub type BigReal = Float;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    target_digits: u32,
    guard_digits: u32,
}

impl PrecisionContext {
    pub const DEFAULT_GUARD_DIGITS: u32 = 15;
    pub const MIN_GUARD_DIGITS: u32 = 10;

    pub fn new(target_digits: u32) -> Result<Self> {
        Self::with_guard_digits(target_digits, Self::DEFAULT_GUARD_DIGITS)
    }

    pub fn with_guard_digits(target_digits: u32, guard_digits: u32) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::Precision("target_digits must be positive".into()));
        }
        if guard_digits < Self::MIN_GUARD_DIGITS {
            return Err(Error::Precision(format!(
                "guard_digits must be at least {}, got {guard_digits}",
                Self::MIN_GUARD_DIGITS
            )));
        }
        if target_digits + guard_digits > 100_000 {
            return Err(Error::Precision("precision too large".into()));
        }
        Ok(PrecisionContext {
            target_digits,
            guard_digits,
        })
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn working_digits(&self) -> u32 {
        self.target_digits + self.guard_digits
    }

    /// Mantissa bits used for every value created under this context.
    pub fn bits(&self) -> u32 {
        (self.working_digits() as f64 * LOG2_10).ceil() as u32 + 4
    }

    /// Same target, `extra` more guard digits. Used for internal steps that
    /// lose a known number of digits.
    pub fn elevated(&self, extra: u32) -> PrecisionContext {
        PrecisionContext {
            target_digits: self.target_digits,
            guard_digits: self.guard_digits + extra,
        }
    }

    pub fn num<T>(&self, value: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits(), value)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits())
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    /// `10^exp` at working precision.
    pub fn pow10(&self, exp: i32) -> Float {
        let ten = self.num(10);
        ten.pow(exp)
    }

    /// `10^-working_digits`.
    pub fn epsilon(&self) -> Float {
        self.pow10(-(self.working_digits() as i32))
    }

    /// `10^-target_digits`, the default relative quadrature tolerance.
    pub fn default_tolerance(&self) -> Float {
        self.pow10(-(self.target_digits as i32))
    }

    /// Parses a decimal string such as `-2.0143`, `2.94549 60536E-02` or
    /// `1.5e3`. Embedded spaces and underscores are ignored.
    pub fn parse(&self, text: &str) -> Result<Float> {
        let cleaned: String = text
            .trim()
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| if c == '\u{2212}' { '-' } else { c })
            .collect();
        if cleaned.is_empty() {
            return Err(Error::Parse(text.to_string()));
        }
        let parsed = Float::parse(&cleaned).map_err(|_| Error::Parse(text.to_string()))?;
        let value = Float::with_val(self.bits(), parsed);
        if !value.is_finite() {
            return Err(Error::Parse(text.to_string()));
        }
        Ok(value)
    }

    /// Scientific notation with exactly `target_digits` significant digits.
    pub fn format(&self, x: &Float) -> String {
        format_sci(x, self.target_digits as usize)
    }

    /// Scientific notation with enough digits to round-trip the full mantissa.
    pub fn serialize(&self, x: &Float) -> String {
        let digits = (x.prec() as f64 / LOG2_10).ceil() as usize + 2;
        format_sci(x, digits)
    }
}

/// Formats `x` as `d.ddd…E±XX` with `digits` significant digits, rounding to
/// nearest.
pub fn format_sci(x: &Float, digits: usize) -> String {
    let digits = digits.max(1);
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.into();
    }
    if x.is_zero() {
        return format!("{}E+00", pad_mantissa("0", digits));
    }
    let raw = x.to_string_radix_round(10, Some(digits), Round::Nearest);
    let (mantissa, exponent) = match raw.find(['e', '@']) {
        Some(pos) => (&raw[..pos], raw[pos + 1..].parse::<i64>().unwrap_or(0)),
        None => (raw.as_str(), 0),
    };
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    // Normalise to one digit before the point.
    let point = mantissa.find('.').unwrap_or(mantissa.len());
    let all_digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let lead_zeros = all_digits.chars().take_while(|&c| c == '0').count();
    let exponent = exponent + point as i64 - 1 - lead_zeros as i64;
    let significant: String = all_digits.chars().skip(lead_zeros).take(digits).collect();
    let body = pad_mantissa(&significant, digits);
    let exp_sign = if exponent < 0 { '-' } else { '+' };
    format!("{sign}{body}E{exp_sign}{:02}", exponent.abs())
}

fn pad_mantissa(significant: &str, digits: usize) -> String {
    let mut s: String = significant.to_string();
    while s.len() < digits {
        s.push('0');
    }
    if digits == 1 {
        s
    } else {
        format!("{}.{}", &s[..1], &s[1..])
    }
}

/// Groups the mantissa of a [`format_sci`] string in blocks of five digits:
/// `2.94549 60536 73751E-02`.
pub fn group_digits(formatted: &str) -> String {
    let Some(epos) = formatted.find('E') else {
        return formatted.to_string();
    };
    let (mantissa, exp) = formatted.split_at(epos);
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => ("-", rest),
        None => ("", mantissa),
    };
    let digits: Vec<char> = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::from(sign);
    for (i, d) in digits.iter().enumerate() {
        if i == 1 {
            out.push('.');
        }
        if i > 1 && (i - 1) % 5 == 0 {
            out.push(' ');
        }
        out.push(*d);
    }
    out.push(' ');
    out.push_str(exp);
    out
}

/// Number of significant decimal digits on which `a` agrees with the
/// reference `b`: `floor(-log10(|a - b| / |b|))`, clamped to `0..=max`.
pub fn matching_digits(a: &Float, b: &Float, max: u32) -> u32 {
    if a.is_zero() && b.is_zero() {
        return max;
    }
    if a.is_zero() || b.is_zero() || a.is_sign_negative() != b.is_sign_negative() {
        return 0;
    }
    let prec = a.prec().max(b.prec()) + 16;
    let diff = Float::with_val(prec, a - b).abs();
    if diff.is_zero() {
        return max;
    }
    let rel = diff / Float::with_val(prec, b.abs_ref());
    let digits = -rel.log10().to_f64();
    if digits <= 0.0 {
        0
    } else {
        (digits.floor() as u32).min(max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_digits_enforced() {
        assert!(PrecisionContext::with_guard_digits(30, 9).is_err());
        assert!(PrecisionContext::new(0).is_err());
        let ctx = PrecisionContext::new(30).unwrap();
        assert_eq!(ctx.working_digits(), 45);
        assert!(ctx.working_digits() >= ctx.target_digits() + 10);
        assert!(ctx.bits() as f64 >= 45.0 * LOG2_10);
    }

    #[test]
    fn values_carry_working_precision() {
        let ctx = PrecisionContext::new(30).unwrap();
        assert_eq!(ctx.num(1.5).prec(), ctx.bits());
        assert_eq!(ctx.parse("2.0143").unwrap().prec(), ctx.bits());
    }

    #[test]
    fn format_examples() {
        let ctx = PrecisionContext::new(5).unwrap();
        assert_eq!(ctx.format(&ctx.parse("0.029454960536").unwrap()), "2.9455E-02");
        assert_eq!(ctx.format(&ctx.num(24)), "2.4000E+01");
        assert_eq!(ctx.format(&ctx.num(-1.5)), "-1.5000E+00");
        assert_eq!(ctx.format(&ctx.zero()), "0.0000E+00");
        assert_eq!(ctx.format(&ctx.parse("9.99996").unwrap()), "1.0000E+01");
        assert_eq!(format_sci(&ctx.num(7), 1), "7E+00");
    }

    #[test]
    fn parse_grouped_typography() {
        let ctx = PrecisionContext::new(30).unwrap();
        let v = ctx.parse("2.94549 60536 73751 14101 41604 E-02").unwrap();
        let w = ctx.parse("2.9454960536737511410141604e-2").unwrap();
        assert_eq!(v, w);
        assert!(ctx.parse("abc").is_err());
        assert!(ctx.parse("").is_err());
        assert_eq!(ctx.parse("\u{2212}3").unwrap(), -3);
    }

    #[test]
    fn grouping() {
        assert_eq!(
            group_digits("2.94549605367375114101E-02"),
            "2.94549 60536 73751 14101 E-02"
        );
        assert_eq!(group_digits("-1.5E+00"), "-1.5 E+00");
    }

    #[test]
    fn matching_digit_counts() {
        let ctx = PrecisionContext::new(30).unwrap();
        let a = ctx.parse("2.9454960536737511410141604E-02").unwrap();
        let b = ctx.parse("2.9454960540E-02").unwrap();
        assert_eq!(matching_digits(&a, &b, 30), 9);
        assert_eq!(matching_digits(&a, &a, 30), 30);
        let c = ctx.parse("1.0000000000000000000001").unwrap();
        let d = ctx.parse("0.9999999999999999999999").unwrap();
        assert!(matching_digits(&c, &d, 30) >= 21);
        assert_eq!(matching_digits(&a, &ctx.parse("-2.94549E-02").unwrap(), 30), 0);
        let wrong_exp = ctx.parse("2.9454960536737511410141604E-03").unwrap();
        assert_eq!(matching_digits(&a, &wrong_exp, 30), 0);
    }
}
