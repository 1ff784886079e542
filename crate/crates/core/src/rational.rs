//! Exact decimal handling for arbitrary-precision rationals.
//!
//! Published step values are decimal strings with up to 18 fractional digits.
//! They are parsed into `BigRational` without passing through binary floats, and
//! rendered back either exactly (terminating decimals) or rounded to a fixed
//! number of digits.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

fn pow10(digits: u32) -> BigInt {
    num_traits::pow(BigInt::from(10u32), digits as usize)
}

/// Parses `[+-]digits[.digits]` into the exact rational it denotes.
pub fn parse_decimal(s: &str) -> Result<Rational> {
    let fail = |position: usize, reason: &'static str| Error::Parse {
        input: s.to_string(),
        position,
        reason,
    };
    if s.is_empty() {
        return Err(fail(0, "empty string"));
    }

    let bytes = s.as_bytes();
    let mut pos = 0;
    let negative = match bytes[0] {
        b'-' => {
            pos = 1;
            true
        }
        b'+' => {
            pos = 1;
            false
        }
        _ => false,
    };

    let int_start = pos;
    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
        pos += 1;
    }
    if pos == int_start {
        return Err(fail(pos, "expected a digit"));
    }
    let int_part = &s[int_start..pos];

    let mut frac_part = "";
    if pos < bytes.len() {
        if bytes[pos] != b'.' {
            return Err(fail(pos, "unexpected character"));
        }
        pos += 1;
        let frac_start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == frac_start {
            return Err(fail(pos, "expected a digit after the decimal point"));
        }
        if pos < bytes.len() {
            return Err(fail(pos, "unexpected character"));
        }
        frac_part = &s[frac_start..pos];
    }

    let digits: String = [int_part, frac_part].concat();
    // all ASCII digits by construction
    let mut numer: BigInt = digits.parse().expect("digit string");
    if negative {
        numer = -numer;
    }
    Ok(BigRational::new(numer, pow10(frac_part.len() as u32)))
}

fn render_scaled(scaled: &BigInt, digits: u32, negative: bool) -> String {
    let mut body = scaled.magnitude().to_string();
    let width = digits as usize + 1;
    if body.len() < width {
        body = format!("{}{}", "0".repeat(width - body.len()), body);
    }
    let split = body.len() - digits as usize;
    let mut out = String::with_capacity(body.len() + 2);
    if negative && !scaled.is_zero() {
        out.push('-');
    }
    out.push_str(&body[..split]);
    if digits > 0 {
        out.push('.');
        out.push_str(&body[split..]);
    }
    out
}

/// Renders `r` with exactly `digits` fractional digits, rounding half away from zero.
pub fn to_decimal(r: &Rational, digits: u32) -> String {
    let scaled = (r * BigRational::from_integer(pow10(digits))).round();
    render_scaled(scaled.numer(), digits, r.is_negative())
}

/// Renders `r` exactly if its decimal expansion terminates.
///
/// Trailing zeros are not emitted; integers render without a decimal point.
pub fn to_exact_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let two = BigInt::from(2u32);
    let five = BigInt::from(5u32);
    let (mut twos, mut fives) = (0u32, 0u32);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    Some(to_decimal(r, twos.max(fives)))
}

/// Nearest `f64` to `r`.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// The exact value of a finite `f64`, rounded to `digits` decimal places.
pub fn from_f64_rounded(x: f64, digits: u32) -> Option<Rational> {
    let exact = BigRational::from_float(x)?;
    let scale = BigRational::from_integer(pow10(digits));
    Some((exact * &scale).round() / scale)
}

/// `numerator/denominator` with the sign on the numerator.
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Small helper for `a/b` literals.
pub fn ratio(a: i64, b: i64) -> Rational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

pub(crate) fn is_in_unit_interval(r: &Rational) -> bool {
    !r.is_negative() && r <= &Rational::one()
}
