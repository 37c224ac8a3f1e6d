//! Exact rational literals: parsing of probability strings and decimal rendering.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Parses `"p/q"`, an integer, or a plain decimal such as `"0.25"` into an exact rational.
///
/// Decimals are read digit by digit, so `"0.1"` is exactly `1/10`.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num)?;
        let d = parse_decimal(den)?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(n / d);
    }
    parse_decimal(s)
}

fn parse_decimal(text: &str) -> Result<BigRational, String> {
    let s = text.trim();
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("not a number: {text:?}"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("not a number: {text:?}"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| format!("not a number: {text:?}"))?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

/// Shorthand for building small rationals in code and tests.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Renders `value` with 12 significant digits, dropping trailing zeros.
pub fn format_decimal(value: f64) -> String {
    if value == 0.0 || !value.is_finite() {
        return format!("{value}");
    }
    let magnitude = value.abs().log10().floor() as i32;
    if !(-5..=15).contains(&magnitude) {
        return format!("{value:.11e}");
    }
    let decimals = (11 - magnitude).max(0) as usize;
    let mut s = format!("{value:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

pub fn is_probability(value: &BigRational) -> bool {
    !value.is_negative() && *value <= BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational(" 1 ").unwrap(), int(1));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("2/0.5").unwrap(), int(4));
        assert_eq!(parse_rational("-1/3").unwrap(), ratio(-1, 3));
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "abc", "1/0", "1e-3", "0..1", "."] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_decimal(127.0 / 15.0), "8.46666666667");
        assert_eq!(format_decimal(0.1), "0.1");
        assert_eq!(format_decimal(1.0), "1");
        assert_eq!(format_decimal(0.0), "0");
    }
}
