//! Working precision shared by every computation.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{Error, Result};

const BITS_PER_DIGIT: f64 = std::f64::consts::LOG2_10;

/// Decimal working precision, default truncation order and tail threshold.
///
/// Computations run at `digits + guard_digits` decimal digits; results are
/// claimed to `digits`. `tail_tol` is the level below which a series or sum
/// tail is treated as negligible.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    digits: u32,
    guard_digits: u32,
    series_order: usize,
    tail_tol: Float,
}

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 20;
    pub const MIN_GUARD: u32 = 5;
    pub const DEFAULT_GUARD: u32 = 10;
    pub const DEFAULT_SERIES_ORDER: usize = 64;

    /// Context with default guard digits, series order 64 and `tail_tol = 10^-digits`.
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_params(digits, Self::DEFAULT_GUARD, Self::DEFAULT_SERIES_ORDER, None)
    }

    /// `tail_tol_exp10 = Some(k)` sets `tail_tol = 10^-k`; `None` uses `10^-digits`.
    pub fn with_params(
        digits: u32,
        guard_digits: u32,
        series_order: usize,
        tail_tol_exp10: Option<u32>,
    ) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(Error::InvalidContext(format!(
                "digits must be >= {}, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        if guard_digits < Self::MIN_GUARD {
            return Err(Error::InvalidContext(format!(
                "guard digits must be >= {}, got {guard_digits}",
                Self::MIN_GUARD
            )));
        }
        if series_order == 0 {
            return Err(Error::InvalidContext("series order must be positive".into()));
        }
        let k = tail_tol_exp10.unwrap_or(digits);
        if k > digits {
            return Err(Error::InvalidContext(format!(
                "tail_tol 1e-{k} is below 1e-{digits}"
            )));
        }
        let prec = digits_to_bits(digits + guard_digits);
        let tail_tol = Float::with_val(prec, 10u32).pow(-(k as i32));
        Ok(Self {
            digits,
            guard_digits,
            series_order,
            tail_tol,
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn series_order(&self) -> usize {
        self.series_order
    }

    pub fn tail_tol(&self) -> &Float {
        &self.tail_tol
    }

    /// `tail_tol` as f64 (underflows to 0 beyond ~300 digits).
    pub fn tail_tol_f64(&self) -> f64 {
        self.tail_tol.to_f64()
    }

    /// MPFR precision in bits for `digits + guard_digits` decimal digits.
    pub fn prec(&self) -> u32 {
        digits_to_bits(self.digits + self.guard_digits)
    }

    /// Relative rounding unit at working precision.
    pub fn eps(&self) -> Float {
        Float::with_val(self.prec(), 1u32) >> (self.prec() as i32 - 1)
    }

    /// Same context with `extra` more working digits and a tail tolerance
    /// tightened accordingly.
    pub fn with_extra_digits(&self, extra: u32) -> Self {
        let digits = self.digits + extra;
        let prec = digits_to_bits(digits + self.guard_digits);
        let tail_tol = Float::with_val(prec, &self.tail_tol) / Float::with_val(prec, 10u32).pow(extra);
        Self {
            digits,
            guard_digits: self.guard_digits,
            series_order: self.series_order,
            tail_tol,
        }
    }

    pub fn float<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.prec(), v)
    }

    pub fn complex<T>(&self, v: T) -> Complex
    where
        Complex: rug::Assign<T>,
    {
        Complex::with_val(self.prec(), v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.prec())
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.prec(), Constant::Pi)
    }

    pub fn euler_gamma(&self) -> Float {
        Float::with_val(self.prec(), Constant::Euler)
    }

    /// Parse a decimal string at working precision.
    pub fn parse(&self, s: &str) -> Result<Float> {
        parse_float(s, self.prec())
    }
}

pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * BITS_PER_DIGIT).ceil() as u32 + 8
}

pub fn parse_float(s: &str, prec: u32) -> Result<Float> {
    Float::parse(s.trim())
        .map(|p| Float::with_val(prec, p))
        .map_err(|e| Error::CacheFormat(format!("bad decimal {s:?}: {e}")))
}

/// Scientific decimal string with `digits` significant digits, e.g. `4.97e-1`.
/// Independent of locale and deterministic for a given value.
pub fn format_decimal(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits as usize))
}

/// log10 of |x| as f64, usable far outside the f64 exponent range.
pub fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
}

/// Natural log of |x| as f64.
pub fn ln_abs(x: &Float) -> f64 {
    log10_abs(x) * std::f64::consts::LN_10
}

/// |z| as a Float.
pub fn cabs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

/// Relative difference |a - b| / max(|a|, |b|), 0 when both vanish.
pub fn rel_diff(a: &Float, b: &Float) -> Float {
    let prec = a.prec().max(b.prec());
    let d = Float::with_val(prec, a - b).abs();
    let scale = Float::with_val(prec, a.abs_ref()).max(&Float::with_val(prec, b.abs_ref()));
    if scale.is_zero() {
        Float::new(prec)
    } else {
        d / scale
    }
}

/// Compares `value` with a printed decimal, in units of the printed last
/// digit. A printed `0.0230957` has unit `1e-7`; `1.72e-6` has unit `1e-8`.
pub fn printed_ulps(value: &Float, printed: &str) -> f64 {
    let reference = parse_float(printed, value.prec().max(256)).expect("printed literal");
    let unit = printed_unit_exp10(printed);
    let diff = Float::with_val(value.prec().max(256), value - &reference).abs();
    if diff.is_zero() {
        return 0.0;
    }
    10f64.powf(log10_abs(&diff) - unit as f64)
}

/// Decimal exponent of the last printed digit of a literal such as
/// `-1.43018671152521547e-7` or `0.023077158647902301379`.
pub fn printed_unit_exp10(printed: &str) -> i32 {
    let s = printed.trim().trim_start_matches(['-', '+']);
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().expect("exponent")),
        None => (s, 0),
    };
    let decimals = mant.find('.').map_or(0, |i| mant.len() - i - 1) as i32;
    exp - decimals
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_validation() {
        assert!(PrecisionContext::new(19).is_err());
        assert!(PrecisionContext::with_params(30, 4, 10, None).is_err());
        assert!(PrecisionContext::with_params(30, 10, 0, None).is_err());
        assert!(PrecisionContext::with_params(30, 10, 10, Some(31)).is_err());
        let ctx = PrecisionContext::with_params(30, 10, 10, Some(25)).unwrap();
        assert!((ctx.tail_tol_f64() - 1e-25).abs() < 1e-38);
        assert!(ctx.prec() >= 133);
    }

    #[test]
    fn eps_matches_precision() {
        let ctx = PrecisionContext::new(40).unwrap();
        let one = ctx.float(1);
        let bumped = Float::with_val(ctx.prec(), &one + &ctx.eps());
        assert!(bumped > one);
        let half = Float::with_val(ctx.prec(), ctx.eps() >> 2);
        assert_eq!(Float::with_val(ctx.prec(), &one + &half), one);
    }

    #[test]
    fn printed_units() {
        assert_eq!(printed_unit_exp10("0.023077158647902301379"), -21);
        assert_eq!(printed_unit_exp10("-1.43018671152521547e-7"), -24);
        assert_eq!(printed_unit_exp10("231.6146084"), -7);
        assert_eq!(printed_unit_exp10("126"), 0);
    }

    #[test]
    fn ulps_against_printed() {
        let ctx = PrecisionContext::new(30).unwrap();
        let x = ctx.parse("0.0230957089661210338143").unwrap();
        assert!(printed_ulps(&x, "0.023095708966121033814") < 0.5);
        assert!(printed_ulps(&x, "0.023095708966121033815") > 0.5);
    }

    #[test]
    fn decimal_round_trip() {
        let ctx = PrecisionContext::new(50).unwrap();
        let x = ctx.pi() / 7u32;
        let s = format_decimal(&x, 50);
        let y = ctx.parse(&s).unwrap();
        assert!(rel_diff(&x, &y) < 1e-49);
        assert_eq!(format_decimal(&ctx.zero(), 10), "0");
    }

    #[test]
    fn wide_range_logs() {
        let ctx = PrecisionContext::new(30).unwrap();
        let tiny = ctx.float(10u32).pow(-5000i32);
        assert!((log10_abs(&tiny) + 5000.0).abs() < 1e-9);
    }
}
