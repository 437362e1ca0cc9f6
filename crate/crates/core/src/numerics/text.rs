//! Decimal and rational string encodings used by every file format.

use rug::{Complex, Float, Integer, Rational};

use crate::error::{MopError, Result};

/// `"numerator/denominator"`, always with an explicit denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Accepts `"p/q"` or a bare integer `"p"`; decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || MopError::Parse(format!("not an exact rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Integer = n.parse().map_err(|_| bad())?;
    let d: Integer = d.parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(MopError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::from((n, d)))
}

/// Shortest decimal string that reads back to the same value at the value's
/// own precision.
pub fn format_float(x: &Float) -> String {
    x.to_string_radix(10, None)
}

pub fn parse_float(s: &str, prec: u32) -> Result<Float> {
    let parsed = Float::parse(s.trim()).map_err(|e| MopError::Parse(format!("{s:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

pub fn format_complex(z: &Complex) -> [String; 2] {
    [format_float(z.real()), format_float(z.imag())]
}

pub fn parse_complex(re: &str, im: &str, prec: u32) -> Result<Complex> {
    Ok(Complex::with_val(prec, (parse_float(re, prec)?, parse_float(im, prec)?)))
}

/// Bits needed to carry `digits` decimal digits plus a small guard.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 16
}
