//! Laurent expansion at infinity of a branch of an algebraic function
//! `Σ_m c_m(z) w^m = 0`.
//!
//! With `w = z^d u(t)`, `t = 1/z`, multiplying through by `t^D` (`D` the
//! largest `deg c_m + d m`) gives `G(t, u) = Σ_m g_m(t) u^m` with polynomial
//! `g_m`. `u(0)` is a root of the dominant balance `G(0, ·)`; the remaining
//! coefficients follow from power-series Newton iteration with doubling order.

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{MopError, Result};
use crate::numerics::scalar::check_precision;
use crate::numerics::text::{format_complex, format_rational, parse_complex, parse_rational};
use crate::numerics::Polynomial;
use crate::series::LaurentSeries;

/// A complex number with rational real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: impl Into<Rational>, im: impl Into<Rational>) -> Self {
        GaussianRational { re: re.into(), im: im.into() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.cmp0().is_eq() && self.im.cmp0().is_eq()
    }

    pub fn to_complex(&self, prec: u32) -> Complex {
        Complex::with_val(prec, (&self.re, &self.im))
    }
}

/// Which branch to expand: `w ~ leading · z^exponent` as `z → ∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchSeed {
    pub exponent: i64,
    /// Starting point for Newton iteration on the dominant balance.
    pub leading: Complex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicCurveSpec {
    /// `coefficients[m]` holds `c_m(z)`, low to high.
    pub coefficients: Vec<Vec<GaussianRational>>,
    pub seed: BranchSeed,
}

fn degree(c: &[GaussianRational]) -> Option<usize> {
    c.iter().rposition(|g| !g.is_zero())
}

impl AlgebraicCurveSpec {
    pub fn new(coefficients: Vec<Vec<GaussianRational>>, seed: BranchSeed) -> Result<Self> {
        let spec = AlgebraicCurveSpec { coefficients, seed };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        match self.coefficients.last() {
            Some(c) if degree(c).is_some() && self.coefficients.len() >= 2 => Ok(()),
            _ => Err(MopError::InvalidInput("curve needs degree >= 1 in w and a nonzero leading coefficient".into())),
        }
    }

    /// Degree in `w`.
    pub fn degree_in_w(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `g_m(t)` as coefficient vectors, and `D`.
    fn reversed(&self, prec: u32) -> (Vec<Vec<Complex>>, i64) {
        let d = self.seed.exponent;
        let big_d = self
            .coefficients
            .iter()
            .enumerate()
            .filter_map(|(m, c)| degree(c).map(|deg| deg as i64 + d * m as i64))
            .max()
            .expect("validated");
        let g = self
            .coefficients
            .iter()
            .enumerate()
            .map(|(m, c)| {
                let Some(deg) = degree(c) else { return Vec::new() };
                let base = big_d - d * m as i64;
                let len = (base + 1) as usize;
                let mut out = vec![Complex::new(prec); len];
                for (i, ci) in c.iter().enumerate().take(deg + 1) {
                    out[(base - i as i64) as usize] = ci.to_complex(prec);
                }
                out
            })
            .collect();
        (g, big_d)
    }

    /// The dominant-balance polynomial `G(0, u)`.
    pub fn dominant_balance(&self, prec: u32) -> Polynomial<Complex> {
        let (g, _) = self.reversed(prec);
        Polynomial::new(g.iter().map(|gm| gm.first().cloned().unwrap_or_else(|| Complex::new(prec))).collect())
    }
}

/// `w³ + 3(z−3)² w − 2i(3z−1)³ = 0`.
pub fn figure1_curve() -> AlgebraicCurveSpec {
    let g = |re: i64, im: i64| GaussianRational::new(re, im);
    AlgebraicCurveSpec {
        coefficients: vec![
            vec![g(0, 2), g(0, -18), g(0, 54), g(0, -54)],
            vec![g(27, 0), g(-18, 0), g(3, 0)],
            vec![],
            vec![g(1, 0)],
        ],
        seed: figure1_default_seed(),
    }
}

/// Root of `c³ + 3c = 54i` in the first quadrant.
pub fn figure1_default_seed() -> BranchSeed {
    BranchSeed { exponent: 1, leading: Complex::with_val(64, (3.0438, 2.0220)) }
}

#[derive(Debug, Clone)]
pub struct AlgebraicExpansion {
    pub series: LaurentSeries<Complex>,
    /// `u(0)`, the refined leading coefficient.
    pub leading: Complex,
    /// First coefficients of `G(t, u(t))`.
    pub residual: Vec<Complex>,
    pub residual_max: Float,
    pub newton_steps: usize,
}

fn ser_mul(a: &[Complex], b: &[Complex], n: usize, prec: u32) -> Vec<Complex> {
    let mut out = vec![Complex::new(prec); n];
    for (i, ai) in a.iter().enumerate().take(n) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += Complex::with_val(prec, ai * bj);
        }
    }
    out
}

fn ser_inv(a: &[Complex], n: usize, prec: u32) -> Vec<Complex> {
    let inv0 = Complex::with_val(prec, a[0].recip_ref());
    let mut out = vec![Complex::new(prec); n];
    out[0] = inv0.clone();
    for k in 1..n {
        let mut acc = Complex::new(prec);
        for i in 1..=k.min(a.len() - 1) {
            acc += Complex::with_val(prec, &a[i] * &out[k - i]);
        }
        out[k] = -Complex::with_val(prec, &acc * &inv0);
    }
    out
}

/// `G(t, u)` and `∂G/∂u (t, u)` modulo `t^n`.
fn eval_g(g: &[Vec<Complex>], u: &[Complex], n: usize, prec: u32) -> (Vec<Complex>, Vec<Complex>) {
    let mut val = vec![Complex::new(prec); n];
    let mut der = vec![Complex::new(prec); n];
    for gm in g.iter().rev() {
        der = ser_mul(&der, u, n, prec);
        for (d, v) in der.iter_mut().zip(&val) {
            *d += v;
        }
        val = ser_mul(&val, u, n, prec);
        for (v, c) in val.iter_mut().zip(gm) {
            *v += c;
        }
    }
    (val, der)
}

/// `Σ |g_m(t)| |u(t)|^m` coefficient-wise, the scale for residual checks.
fn scale_g(g: &[Vec<Complex>], u: &[Complex], n: usize, prec: u32) -> Vec<Float> {
    let abs_u: Vec<Complex> = u.iter().map(|c| Complex::with_val(prec, c.abs_ref())).collect();
    let abs_g: Vec<Vec<Complex>> =
        g.iter().map(|gm| gm.iter().map(|c| Complex::with_val(prec, c.abs_ref())).collect()).collect();
    eval_g(&abs_g, &abs_u, n, prec).0.into_iter().map(|c| c.real().clone()).collect()
}

fn small(v: &Complex, scale: &Float, shift: u32, prec: u32) -> bool {
    let mut bound = Float::with_val(prec, scale);
    bound >>= shift;
    Float::with_val(prec, v.abs_ref()) <= bound
}

const SCALAR_NEWTON_STEPS: usize = 400;

fn refine_leading(h: &Polynomial<Complex>, seed: &Complex, prec: u32) -> Result<Complex> {
    if h.degree().unwrap_or(0) == 0 {
        return Err(MopError::NewtonDivergence("dominant balance has no root for this exponent".into()));
    }
    let dh = h.derivative();
    let one = Float::with_val(prec, 1);
    let ambiguous = |u: &Complex| {
        let mut r = Float::with_val(prec, u.abs_ref());
        if r < one {
            r = one.clone();
        }
        small(&dh.eval(u), &dh.abs_eval(&r), prec / 4, prec)
    };
    let mut u = Complex::with_val(prec, seed);
    for _ in 0..SCALAR_NEWTON_STEPS {
        if ambiguous(&u) {
            return Err(MopError::BranchAmbiguity(format!(
                "∂G/∂u vanishes near u = {}; two branches meet",
                u.to_string_radix(10, Some(12))
            )));
        }
        let step = Complex::with_val(prec, h.eval(&u) / dh.eval(&u));
        u -= &step;
        if !(u.real().is_finite() && u.imag().is_finite()) {
            return Err(MopError::NewtonDivergence("leading coefficient iteration left the finite range".into()));
        }
        let mut size = Float::with_val(prec, u.abs_ref());
        if size < one {
            size = one.clone();
        }
        if small(&step, &size, prec - 8, prec) {
            if ambiguous(&u) {
                return Err(MopError::BranchAmbiguity("leading coefficient is a multiple root".into()));
            }
            return Ok(u);
        }
    }
    Err(MopError::NewtonDivergence(format!("no convergence in {SCALAR_NEWTON_STEPS} steps")))
}

/// Laurent series of the seeded branch with `terms` tail coefficients.
pub fn algebraic_series(curve: &AlgebraicCurveSpec, terms: usize, prec: u32) -> Result<AlgebraicExpansion> {
    check_precision(prec)?;
    curve.validate()?;
    let d = curve.seed.exponent;
    let total = d + terms as i64 + 1;
    if terms == 0 || total <= 0 {
        return Err(MopError::InvalidInput(format!("{terms} terms do not reach the branch's leading term")));
    }
    let total = total as usize;
    let (g, _) = curve.reversed(prec);
    let u0 = refine_leading(&curve.dominant_balance(prec), &curve.seed.leading, prec)?;

    let mut u = vec![u0.clone()];
    let mut len = 1;
    let mut steps = 0;
    let mut extra = 0;
    loop {
        let next = if len < total { (2 * len).min(total) } else { total };
        u.resize(next, Complex::new(prec));
        let (val, der) = eval_g(&g, &u, next, prec);
        let correction = ser_mul(&val, &ser_inv(&der, next, prec), next, prec);
        for (ui, ci) in u.iter_mut().zip(&correction) {
            *ui -= ci;
        }
        steps += 1;
        len = next;
        if len == total {
            extra += 1;
            if extra == 2 {
                break;
            }
        }
    }

    let (residual, _) = eval_g(&g, &u, total, prec);
    let scale = scale_g(&g, &u, total, prec);
    let one = Float::with_val(prec, 1);
    let mut residual_max = Float::new(prec);
    for (r, s) in residual.iter().zip(&scale) {
        let bound = if *s > one { s.clone() } else { one.clone() };
        if !small(r, &bound, prec / 2, prec) {
            return Err(MopError::NewtonDivergence(format!(
                "series residual {} exceeds tolerance",
                Float::with_val(53, r.abs_ref()).to_f64()
            )));
        }
        let m = Float::with_val(prec, r.abs_ref());
        if m > residual_max {
            residual_max = m;
        }
    }

    let coeff = |i: i64| if i >= 0 { u[i as usize].clone() } else { Complex::new(prec) };
    let poly = if d >= 0 { (0..=d).map(|e| coeff(d - e)).collect() } else { Vec::new() };
    let tail = (0..terms as i64).map(|k| coeff(d + k + 1)).collect();
    Ok(AlgebraicExpansion {
        series: LaurentSeries::new(Polynomial::new(poly), tail),
        leading: u0,
        residual,
        residual_max,
        newton_steps: steps,
    })
}

#[derive(Serialize, Deserialize)]
struct SeedRecord {
    exponent: i64,
    leading: [String; 2],
}

#[derive(Serialize, Deserialize)]
struct CurveRecord {
    coefficients: Vec<Vec<[String; 2]>>,
    seed: SeedRecord,
}

impl AlgebraicCurveSpec {
    pub fn to_json(&self) -> serde_json::Value {
        let rec = CurveRecord {
            coefficients: self
                .coefficients
                .iter()
                .map(|c| c.iter().map(|g| [format_rational(&g.re), format_rational(&g.im)]).collect())
                .collect(),
            seed: SeedRecord { exponent: self.seed.exponent, leading: format_complex(&self.seed.leading) },
        };
        serde_json::to_value(rec).expect("plain record")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let rec: CurveRecord = serde_json::from_str(text)?;
        let coefficients = rec
            .coefficients
            .iter()
            .map(|c| {
                c.iter()
                    .map(|[re, im]| Ok(GaussianRational { re: parse_rational(re)?, im: parse_rational(im)? }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let [re, im] = &rec.seed.leading;
        let seed = BranchSeed { exponent: rec.seed.exponent, leading: parse_complex(re, im, 64)? };
        AlgebraicCurveSpec::new(coefficients, seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(z: &Complex, re: f64, im: f64, tol: f64) -> bool {
        (z.real().to_f64() - re).abs() < tol && (z.imag().to_f64() - im).abs() < tol
    }

    #[test]
    fn hyperbola_branch() {
        // w² − z² + 1 = 0, w ~ z
        let g = |re: i64| GaussianRational::new(re, 0);
        let curve = AlgebraicCurveSpec::new(
            vec![vec![g(1), g(0), g(-1)], vec![], vec![g(1)]],
            BranchSeed { exponent: 1, leading: Complex::with_val(64, (0.9, 0.1)) },
        )
        .unwrap();
        let e = algebraic_series(&curve, 8, 128).unwrap();
        assert_eq!(e.series.poly_part.degree(), Some(1));
        assert!(close(&e.series.poly_part.coeffs()[1], 1.0, 0.0, 1e-30));
        assert!(close(&e.series.poly_part.coeffs()[0], 0.0, 0.0, 1e-30));
        let expected = [-0.5, 0.0, -0.125, 0.0, -0.0625, 0.0, -0.0390625, 0.0];
        for (c, x) in e.series.tail.iter().zip(expected) {
            assert!(close(c, x, 0.0, 1e-30));
        }
    }

    #[test]
    fn geometric_branch() {
        // (z − 1) w − 1 = 0
        let g = |re: i64| GaussianRational::new(re, 0);
        let curve = AlgebraicCurveSpec::new(
            vec![vec![g(-1)], vec![g(-1), g(1)]],
            BranchSeed { exponent: -1, leading: Complex::with_val(64, (1.2, 0.0)) },
        )
        .unwrap();
        let e = algebraic_series(&curve, 10, 128).unwrap();
        assert!(e.series.poly_part.is_zero());
        assert!(e.series.tail.iter().all(|c| close(c, 1.0, 0.0, 1e-30)));
    }

    #[test]
    fn polynomial_identity_curve() {
        // w − (z² + 1) = 0
        let g = |re: i64| GaussianRational::new(re, 0);
        let curve = AlgebraicCurveSpec::new(
            vec![vec![g(-1), g(0), g(-1)], vec![g(1)]],
            BranchSeed { exponent: 2, leading: Complex::with_val(64, (1.0, 0.0)) },
        )
        .unwrap();
        let e = algebraic_series(&curve, 6, 128).unwrap();
        assert!(close(&e.series.poly_part.coeffs()[0], 1.0, 0.0, 1e-30));
        assert!(close(&e.series.poly_part.coeffs()[2], 1.0, 0.0, 1e-30));
        assert!(e.series.tail.iter().all(|c| close(c, 0.0, 0.0, 1e-30)));
    }

    #[test]
    fn figure1_dominant_balance() {
        let e = algebraic_series(&figure1_curve(), 20, 256).unwrap();
        let c = &e.leading;
        let lhs = Complex::with_val(256, c * c) * c + Complex::with_val(256, c * 3);
        assert!(close(&lhs, 0.0, 54.0, 1e-60));
        assert!(c.real().is_sign_positive() && c.imag().is_sign_positive());
        let mut bound = Float::with_val(256, 1);
        bound >>= 128;
        assert!(e.residual_max < bound);
    }

    #[test]
    fn broken_seeds() {
        let mut curve = figure1_curve();
        curve.seed.leading = Complex::with_val(64, (0, 1));
        assert!(matches!(algebraic_series(&curve, 10, 128), Err(MopError::BranchAmbiguity(_))));
        curve.seed = BranchSeed { exponent: 2, leading: Complex::with_val(64, (1, 0)) };
        assert!(matches!(
            algebraic_series(&curve, 10, 128),
            Err(MopError::BranchAmbiguity(_) | MopError::NewtonDivergence(_))
        ));
    }

    #[test]
    fn curve_json_round_trip() {
        let curve = figure1_curve();
        let back = AlgebraicCurveSpec::from_json(&curve.to_json().to_string()).unwrap();
        assert_eq!(back.coefficients, curve.coefficients);
        assert_eq!(back.seed.exponent, 1);
    }
}
