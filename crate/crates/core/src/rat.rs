//! Exact rational arithmetic helpers.
//!
//! Attribute values, variable valuations, and transition weights are kept as
//! exact rationals so that constraint checks like `price(Machine) <= 10` are
//! crisp. Conversion to `f64` happens only at the statistics boundary.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Parses a non-negative decimal literal (`5`, `2.0`, `0.4`) into an exact
/// rational. The caller handles any leading sign.
pub fn parse_decimal(text: &str) -> Option<Rat> {
    let (int_part, frac_part) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        return None;
    } else {
        digits.parse().ok()?
    };
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(BigRational::new(numer, denom))
}

/// Canonical text rendering: integers print without a decimal point, dyadic /
/// decimal denominators print as exact decimals with no trailing zeros, and
/// anything else falls back to `numer/denom`.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        return r.numer().to_string();
    }
    // Try to express denom as 2^a * 5^b, which has an exact decimal form.
    let mut d = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let mut a = 0u32;
    let mut b = 0u32;
    while (&d % &two).is_zero() {
        d /= &two;
        a += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        b += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let digits = a.max(b);
    // Scale numerator to 10^digits denominator.
    let scale = BigInt::from(10u32).pow(digits) / r.denom();
    let scaled = (r.numer() * scale).abs();
    let sign = if r.is_negative() { "-" } else { "" };
    let s = scaled.to_string();
    let s = if s.len() <= digits as usize {
        format!("{}{}", "0".repeat(digits as usize + 1 - s.len()), s)
    } else {
        s
    };
    let (int_digits, frac_digits) = s.split_at(s.len() - digits as usize);
    let frac_digits = frac_digits.trim_end_matches('0');
    if frac_digits.is_empty() {
        format!("{sign}{int_digits}")
    } else {
        format!("{sign}{int_digits}.{frac_digits}")
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses either a decimal literal, an optional leading minus, or the
/// `numer/denom` fallback produced by [`format_rat`].
pub fn parse_rat(text: &str) -> Option<Rat> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let val = if let Some((n, d)) = body.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        BigRational::new(n, d)
    } else {
        parse_decimal(body)?
    };
    Some(if neg { -val } else { val })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip() {
        for s in ["0", "5", "2", "0.4", "12.25", "100"] {
            let r = parse_decimal(s).unwrap();
            assert_eq!(parse_rat(&format_rat(&r)), Some(r));
        }
    }

    #[test]
    fn trailing_zeros_dropped() {
        let r = parse_decimal("2.0").unwrap();
        assert_eq!(format_rat(&r), "2");
        let r = parse_decimal("2.50").unwrap();
        assert_eq!(format_rat(&r), "2.5");
    }

    #[test]
    fn non_decimal_denominator() {
        let r = rat_int(1) / rat_int(3);
        assert_eq!(format_rat(&r), "1/3");
        assert_eq!(parse_rat("1/3"), Some(r));
    }

    #[test]
    fn negative() {
        let r = -parse_decimal("0.5").unwrap();
        assert_eq!(format_rat(&r), "-0.5");
        assert_eq!(parse_rat("-0.5"), Some(r));
    }
}
