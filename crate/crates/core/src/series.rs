//! Truncated Laurent series at infinity.
//!
//! A series is a polynomial part plus tail coefficients `c_k` standing for
//! `Σ c_k z^(-k-1)`. The tail length is the truncation order: coefficients
//! past it are unknown, and every operation shortens the tail to what its
//! inputs actually determine.

use crate::error::{MopError, Result};
use crate::numerics::{Polynomial, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries<T> {
    pub poly_part: Polynomial<T>,
    pub tail: Vec<T>,
}

impl<T: Scalar> LaurentSeries<T> {
    pub fn new(poly_part: Polynomial<T>, tail: Vec<T>) -> Self {
        LaurentSeries { poly_part, tail }
    }

    /// A series that is `O(1/z)`.
    pub fn from_tail(tail: Vec<T>) -> Self {
        LaurentSeries { poly_part: Polynomial::zero(), tail }
    }

    /// Number of known tail coefficients.
    pub fn terms(&self) -> usize {
        self.tail.len()
    }

    fn prec(&self) -> u32 {
        self.tail.first().or_else(|| self.poly_part.coeffs().first()).map_or(0, Scalar::precision)
    }

    /// Highest exponent that may carry a nonzero coefficient.
    pub fn top_exponent(&self) -> i64 {
        self.poly_part.degree().map_or(-1, |d| d as i64)
    }

    /// Coefficient of `z^e`, `None` below the truncation order.
    pub fn coeff(&self, e: i64) -> Option<T> {
        if e >= 0 {
            Some(self.poly_part.coeff(e as usize).cloned().unwrap_or_else(|| T::zero(self.prec())))
        } else {
            self.tail.get((-e - 1) as usize).cloned()
        }
    }

    pub fn truncated(&self, terms: usize) -> Self {
        LaurentSeries { poly_part: self.poly_part.clone(), tail: self.tail.iter().take(terms).cloned().collect() }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LaurentSeries<U> {
        LaurentSeries { poly_part: self.poly_part.map(&f), tail: self.tail.iter().map(f).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.tail.len().min(rhs.tail.len());
        LaurentSeries {
            poly_part: self.poly_part.add(&rhs.poly_part),
            tail: self.tail[..n].iter().zip(&rhs.tail[..n]).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&T::from_i64(-1, rhs.prec())))
    }

    pub fn scale(&self, c: &T) -> Self {
        LaurentSeries { poly_part: self.poly_part.scale(c), tail: self.tail.iter().map(|a| a.mul(c)).collect() }
    }

    /// Product of two truncated series. Known exponents of the product are
    /// those at or above `max(deg b − terms a, deg a − terms b)`.
    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        let (da, db) = (self.top_exponent(), rhs.top_exponent());
        let (ta, tb) = (self.tail.len() as i64, rhs.tail.len() as i64);
        let lowest = (db - ta).max(da - tb);
        if lowest > 0 {
            return Err(MopError::InsufficientTerms(format!(
                "product only determined down to z^{lowest}; more tail terms needed"
            )));
        }
        let prec = self.prec().max(rhs.prec());
        let coeff_at = |e: i64| -> T {
            let mut acc = T::zero(prec);
            let lo = (-ta).max(e - db);
            let hi = da.min(e + tb);
            for e1 in lo..=hi {
                if let (Some(a), Some(b)) = (self.coeff(e1), rhs.coeff(e - e1)) {
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(&b));
                    }
                }
            }
            acc
        };
        let top = da + db;
        let poly = if top >= 0 { (0..=top).map(coeff_at).collect() } else { Vec::new() };
        let tail = (lowest..=-1).rev().map(coeff_at).collect();
        Ok(LaurentSeries { poly_part: Polynomial::new(poly), tail })
    }

    /// Product with an exact polynomial; the tail shortens by its degree.
    pub fn mul_poly(&self, p: &Polynomial<T>) -> Self {
        let dp = p.degree().map_or(0, |d| d);
        let prec = self.prec();
        let poly = p.mul(&self.poly_part).add(&polynomial_part_of_product(p, &self.tail));
        let terms = self.tail.len().saturating_sub(dp);
        let tail = (0..terms)
            .map(|m| {
                p.coeffs().iter().enumerate().fold(T::zero(prec), |acc, (i, a)| acc.add(&a.mul(&self.tail[m + i])))
            })
            .collect();
        LaurentSeries { poly_part: poly, tail }
    }
}

/// Polynomial part of `A(z) · Σ c_k z^(-k-1)`: the coefficient of `z^e` is
/// `Σ_{i>e} a_i c_{i-e-1}`.
pub fn polynomial_part_of_product<T: Scalar>(a: &Polynomial<T>, tail: &[T]) -> Polynomial<T> {
    let Some(d) = a.degree() else { return Polynomial::zero() };
    if d == 0 {
        return Polynomial::zero();
    }
    let prec = tail.first().map_or(0, Scalar::precision);
    Polynomial::new(
        (0..d)
            .map(|e| {
                (e + 1..=d).fold(T::zero(prec), |acc, i| match tail.get(i - e - 1) {
                    Some(c) => acc.add(&a.coeffs()[i].mul(c)),
                    None => acc,
                })
            })
            .collect(),
    )
}
