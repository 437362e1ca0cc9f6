//! Dense univariate polynomials over any [`Scalar`] domain.

use std::fmt;

use rug::{Complex, Float, Integer, Rational};

use crate::numerics::scalar::{working_prec, Scalar};

/// Coefficients are stored low to high with no trailing exact zeros; the zero
/// polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(Scalar::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x(prec: u32) -> Self {
        Self::new(vec![T::zero(prec), T::one(prec)])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `x^k`, `None` above the degree.
    pub fn coeff(&self, k: usize) -> Option<&T> {
        self.coeffs.get(k)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    fn prec(&self) -> u32 {
        self.coeffs.first().map_or(0, Scalar::precision)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero(x.precision().max(self.prec()));
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let prec = self.prec().max(rhs.prec());
        let z = T::zero(prec);
        Self::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&z).add(rhs.coeffs.get(k).unwrap_or(&z))).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        Polynomial { coeffs: self.coeffs.iter().map(Scalar::neg).collect() }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let prec = self.prec().max(rhs.prec());
        let mut out = vec![T::zero(prec); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    /// Multiplies by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let prec = self.prec();
        let mut coeffs = vec![T::zero(prec); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.mul(&T::from_i64(k as i64, c.precision()))).collect(),
        )
    }

    /// Divides by the leading coefficient.
    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => {
                let l = l.clone();
                let mut p = Self::new(self.coeffs.iter().map(|c| c.div(&l)).collect());
                if let Some(last) = p.coeffs.last_mut() {
                    *last = T::one(l.precision());
                }
                p
            }
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_complex(&self, prec: u32) -> Polynomial<Complex> {
        self.map(|c| c.to_complex(prec))
    }

    /// `Σ |a_k| |x|^k`, the scale against which a computed `|p(x)|` is judged.
    pub fn abs_eval(&self, x_abs: &Float) -> Float {
        let prec = working_prec(x_abs.prec().max(self.prec()));
        let mut acc = Float::new(prec);
        for c in self.coeffs.iter().rev() {
            acc *= x_abs;
            acc += c.magnitude(prec);
        }
        acc
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self, prec: u32) -> Float {
        self.coeffs.iter().map(|c| c.magnitude(prec)).fold(Float::new(prec), |m, v| if v > m { v } else { m })
    }
}

impl Polynomial<Rational> {
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect())
    }

    /// Scales to integer coefficients with content 1 and positive leading
    /// coefficient.
    pub fn primitive_part(&self) -> Self {
        let Some(lead) = self.leading() else { return Self::zero() };
        let mut l = Integer::from(1);
        for c in &self.coeffs {
            l.lcm_mut(c.denom());
        }
        let mut g = Integer::new();
        for c in &self.coeffs {
            g.gcd_mut(&(c.numer() * Integer::from(&l / c.denom())));
        }
        let mut factor = Rational::from((l, g));
        if lead.cmp0() == std::cmp::Ordering::Less {
            factor = -factor;
        }
        self.scale(&factor)
    }

    /// Horner evaluation at a real float.
    pub fn eval_float(&self, x: &Float) -> Float {
        let mut acc = Float::new(x.prec());
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }
}

fn fmt_terms(f: &mut fmt::Formatter<'_>, terms: impl DoubleEndedIterator<Item = (usize, String, bool)>) -> fmt::Result {
    let mut first = true;
    for (k, mag, negative) in terms.rev() {
        let sign = match (first, negative) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        let body = match (k, mag.as_str()) {
            (0, m) => m.to_string(),
            (1, "1") => "x".to_string(),
            (1, m) => format!("{m}*x"),
            (_, "1") => format!("x^{k}"),
            (_, m) => format!("{m}*x^{k}"),
        };
        write!(f, "{sign}{body}")?;
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Polynomial<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (k, Rational::from(c.abs_ref()).to_string(), c.cmp0() == std::cmp::Ordering::Less)),
        )
    }
}

impl fmt::Display for Polynomial<Float> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        fmt_terms(
            f,
            self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| {
                (k, Float::with_val(c.prec(), c.abs_ref()).to_string_radix(10, Some(digits)), c.is_sign_negative())
            }),
        )
    }
}

impl fmt::Display for Polynomial<Complex> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        fmt_terms(
            f,
            self.coeffs.iter().enumerate().filter(|(_, c)| !Scalar::is_zero(*c)).map(|(k, c)| {
                let re = c.real().to_string_radix(10, Some(digits));
                let im = c.imag().to_string_radix(10, Some(digits));
                (k, format!("({re} + {im}i)"), false)
            }),
        )
    }
}
