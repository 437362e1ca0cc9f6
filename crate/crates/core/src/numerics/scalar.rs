//! Scalar domains: exact rationals, multiprecision reals and complexes.
//!
//! All coefficient arithmetic goes through the [`Scalar`] trait so that the
//! same assembly and elimination code runs in every domain. Floating values
//! carry their own precision; binary operations produce a result at the
//! larger of the two operand precisions.

use std::fmt;

use rug::{Complex, Float, Rational};

use crate::error::{MopError, Result};
use crate::numerics::matrix::{self, DenseMatrix};

/// Lowest precision accepted for the floating domains.
pub const MIN_PRECISION: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarDomain {
    ExactRational,
    BigReal { precision: u32 },
    BigComplex { precision: u32 },
}

impl ScalarDomain {
    pub fn real(precision: u32) -> Result<Self> {
        check_precision(precision)?;
        Ok(ScalarDomain::BigReal { precision })
    }

    pub fn complex(precision: u32) -> Result<Self> {
        check_precision(precision)?;
        Ok(ScalarDomain::BigComplex { precision })
    }

    /// Working precision in bits, `None` for the exact domain.
    pub fn precision(&self) -> Option<u32> {
        match *self {
            ScalarDomain::ExactRational => None,
            ScalarDomain::BigReal { precision } | ScalarDomain::BigComplex { precision } => Some(precision),
        }
    }
}

impl std::str::FromStr for ScalarDomain {
    type Err = MopError;

    /// `exact`, `real:BITS` or `complex:BITS`.
    fn from_str(s: &str) -> Result<Self> {
        let bits = |b: &str| {
            b.parse::<u32>().map_err(|_| MopError::InvalidInput(format!("bad precision {b:?} in domain {s:?}")))
        };
        match s.split_once(':') {
            None if s == "exact" => Ok(ScalarDomain::ExactRational),
            Some(("real", b)) => ScalarDomain::real(bits(b)?),
            Some(("complex", b)) => ScalarDomain::complex(bits(b)?),
            _ => Err(MopError::InvalidInput(format!("unknown domain {s:?}; use exact, real:BITS or complex:BITS"))),
        }
    }
}

impl fmt::Display for ScalarDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarDomain::ExactRational => write!(f, "exact"),
            ScalarDomain::BigReal { precision } => write!(f, "real:{precision}"),
            ScalarDomain::BigComplex { precision } => write!(f, "complex:{precision}"),
        }
    }
}

pub fn check_precision(precision: u32) -> Result<()> {
    if precision < MIN_PRECISION {
        return Err(MopError::InvalidInput(format!(
            "precision must be at least {MIN_PRECISION} bits, got {precision}"
        )));
    }
    if precision > rug::float::prec_max() {
        return Err(MopError::InvalidInput(format!("precision {precision} too large")));
    }
    Ok(())
}

/// Field operations shared by every coefficient domain.
pub trait Scalar: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    /// `true` for error-free arithmetic.
    const EXACT: bool;

    fn zero(prec: u32) -> Self;
    fn from_rational(q: &Rational, prec: u32) -> Self;
    /// Precision in bits; 0 for exact values.
    fn precision(&self) -> u32;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;

    /// Absolute value as a real float of the given precision.
    fn magnitude(&self, prec: u32) -> Float;
    fn to_complex(&self, prec: u32) -> Complex;

    /// Solves the square system `a x = b`.
    fn solve_system(a: &DenseMatrix<Self>, b: &[Self]) -> Result<Vec<Self>>;
    fn determinant(a: &DenseMatrix<Self>) -> Self;

    fn one(prec: u32) -> Self {
        Self::from_rational(&Rational::from(1), prec)
    }

    fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_rational(&Rational::from(v), prec)
    }
}

/// Precision used when comparing a value of precision `p` (0 means exact).
pub(crate) fn working_prec(p: u32) -> u32 {
    if p == 0 {
        128
    } else {
        p
    }
}

/// Zero test used by residual checks: exact zero in the exact domain,
/// `|value| <= 2^(-prec/2) * scale` otherwise.
pub fn negligible<T: Scalar>(value: &T, scale: &Float) -> bool {
    if T::EXACT {
        return value.is_zero();
    }
    let prec = working_prec(value.precision());
    let mag = value.magnitude(prec);
    let mut bound = Float::with_val(prec, scale);
    bound >>= prec / 2;
    mag <= bound
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero(_prec: u32) -> Self {
        Rational::new()
    }
    fn from_rational(q: &Rational, _prec: u32) -> Self {
        q.clone()
    }
    fn precision(&self) -> u32 {
        0
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn div(&self, rhs: &Self) -> Self {
        Rational::from(self / rhs)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn is_zero(&self) -> bool {
        self.cmp0() == std::cmp::Ordering::Equal
    }
    fn magnitude(&self, prec: u32) -> Float {
        Float::with_val(prec, self).abs()
    }
    fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, (self, 0))
    }
    fn solve_system(a: &DenseMatrix<Self>, b: &[Self]) -> Result<Vec<Self>> {
        matrix::bareiss_solve(a, b)
    }
    fn determinant(a: &DenseMatrix<Self>) -> Self {
        matrix::bareiss_det(a)
    }
}

impl Scalar for Float {
    const EXACT: bool = false;

    fn zero(prec: u32) -> Self {
        Float::new(working_prec(prec))
    }
    fn from_rational(q: &Rational, prec: u32) -> Self {
        Float::with_val(working_prec(prec), q)
    }
    fn precision(&self) -> u32 {
        self.prec()
    }
    fn add(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self * rhs)
    }
    fn div(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec().max(rhs.prec()), self / rhs)
    }
    fn neg(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn magnitude(&self, prec: u32) -> Float {
        Float::with_val(prec, self.abs_ref())
    }
    fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, (self, 0))
    }
    fn solve_system(a: &DenseMatrix<Self>, b: &[Self]) -> Result<Vec<Self>> {
        matrix::pivoted_solve(a, b)
    }
    fn determinant(a: &DenseMatrix<Self>) -> Self {
        matrix::pivoted_det(a)
    }
}

impl Scalar for Complex {
    const EXACT: bool = false;

    fn zero(prec: u32) -> Self {
        Complex::new(working_prec(prec))
    }
    fn from_rational(q: &Rational, prec: u32) -> Self {
        Complex::with_val(working_prec(prec), (q, 0))
    }
    fn precision(&self) -> u32 {
        self.prec().0
    }
    fn add(&self, rhs: &Self) -> Self {
        Complex::with_val(self.precision().max(rhs.precision()), self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Complex::with_val(self.precision().max(rhs.precision()), self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Complex::with_val(self.precision().max(rhs.precision()), self * rhs)
    }
    fn div(&self, rhs: &Self) -> Self {
        Complex::with_val(self.precision().max(rhs.precision()), self / rhs)
    }
    fn neg(&self) -> Self {
        Complex::with_val(self.precision(), -self)
    }
    fn is_zero(&self) -> bool {
        self.real().is_zero() && self.imag().is_zero()
    }
    fn magnitude(&self, prec: u32) -> Float {
        Float::with_val(prec, self.abs_ref())
    }
    fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, self)
    }
    fn solve_system(a: &DenseMatrix<Self>, b: &[Self]) -> Result<Vec<Self>> {
        matrix::pivoted_solve(a, b)
    }
    fn determinant(a: &DenseMatrix<Self>) -> Self {
        matrix::pivoted_det(a)
    }
}
