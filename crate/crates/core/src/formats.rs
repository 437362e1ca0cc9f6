//! JSON forms of polynomials and series. Rationals are `"p/q"` strings,
//! floats are decimal strings, complex numbers are `["re", "im"]` pairs.

use rug::{Complex, Float, Rational};
use serde_json::{json, Value};

use crate::error::{MopError, Result};
use crate::numerics::text::{
    format_complex, format_float, format_rational, parse_complex, parse_float, parse_rational,
};
use crate::numerics::{Polynomial, Scalar};
use crate::series::LaurentSeries;

/// Scalars with a JSON form.
pub trait JsonScalar: Scalar {
    const DOMAIN: &'static str;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value, prec: u32) -> Result<Self>;
}

fn expect_str(v: &Value) -> Result<&str> {
    v.as_str().ok_or_else(|| MopError::Parse(format!("expected a string, got {v}")))
}

impl JsonScalar for Rational {
    const DOMAIN: &'static str = "rational";
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn from_json(v: &Value, _prec: u32) -> Result<Self> {
        parse_rational(expect_str(v)?)
    }
}

impl JsonScalar for Float {
    const DOMAIN: &'static str = "real";
    fn to_json(&self) -> Value {
        Value::String(format_float(self))
    }
    fn from_json(v: &Value, prec: u32) -> Result<Self> {
        parse_float(expect_str(v)?, prec)
    }
}

impl JsonScalar for Complex {
    const DOMAIN: &'static str = "complex";
    fn to_json(&self) -> Value {
        json!(format_complex(self))
    }
    fn from_json(v: &Value, prec: u32) -> Result<Self> {
        match v.as_array().map(Vec::as_slice) {
            Some([re, im]) => parse_complex(expect_str(re)?, expect_str(im)?, prec),
            _ => Err(MopError::Parse(format!("expected [re, im], got {v}"))),
        }
    }
}

fn array<T: JsonScalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(JsonScalar::to_json).collect())
}

fn parse_array<T: JsonScalar>(v: &Value, prec: u32) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| MopError::Parse(format!("expected an array, got {v}")))?
        .iter()
        .map(|x| T::from_json(x, prec))
        .collect()
}

fn check_domain<T: JsonScalar>(v: &Value) -> Result<()> {
    match v.get("domain").and_then(Value::as_str) {
        Some(d) if d == T::DOMAIN => Ok(()),
        Some(d) => Err(MopError::Parse(format!("domain {d:?} where {:?} was expected", T::DOMAIN))),
        None => Err(MopError::Parse("missing \"domain\"".into())),
    }
}

pub fn polynomial_to_json<T: JsonScalar>(p: &Polynomial<T>) -> Value {
    json!({ "domain": T::DOMAIN, "coeffs": array(p.coeffs()) })
}

pub fn polynomial_from_json<T: JsonScalar>(v: &Value, prec: u32) -> Result<Polynomial<T>> {
    check_domain::<T>(v)?;
    Ok(Polynomial::new(parse_array(&v["coeffs"], prec)?))
}

pub fn series_to_json<T: JsonScalar>(s: &LaurentSeries<T>) -> Value {
    json!({ "domain": T::DOMAIN, "poly_part": array(s.poly_part.coeffs()), "tail": array(&s.tail) })
}

pub fn series_from_json<T: JsonScalar>(v: &Value, prec: u32) -> Result<LaurentSeries<T>> {
    check_domain::<T>(v)?;
    let poly = match v.get("poly_part") {
        Some(p) => Polynomial::new(parse_array(p, prec)?),
        None => Polynomial::zero(),
    };
    Ok(LaurentSeries::new(poly, parse_array(&v["tail"], prec)?))
}

/// The `"domain"` field of a polynomial or series document.
pub fn domain_of(v: &Value) -> Option<&str> {
    v.get("domain").and_then(Value::as_str)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_round_trip() {
        let p = Polynomial::new(vec![Rational::from((1, 6)), Rational::from(-1), Rational::from(1)]);
        let v = polynomial_to_json(&p);
        assert_eq!(v["coeffs"][0], "1/6");
        assert_eq!(v["domain"], "rational");
        assert_eq!(polynomial_from_json::<Rational>(&v, 0).unwrap(), p);
        assert!(polynomial_from_json::<Float>(&v, 64).is_err());
    }

    #[test]
    fn complex_series_round_trip() {
        let s = LaurentSeries::new(
            Polynomial::new(vec![Complex::with_val(128, (1, 2))]),
            vec![Complex::with_val(128, (0.5, -0.25)); 3],
        );
        let back: LaurentSeries<Complex> = series_from_json(&series_to_json(&s), 128).unwrap();
        assert_eq!(back, s);
    }
}
