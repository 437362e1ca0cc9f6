//! Rational approximants to ζ(3) from the mixed system
//! `A f₁ − B f₂ = C + O(z^-(n+1))`, `A f₂ − 2B f₃ = D + O(z^-(n+1))`,
//! `A(1) = 0`, with `f₁, f₂, f₃` the Cauchy transforms of `dx`, `−log x dx`
//! and `½ log²x dx` on `[0, 1]`.

use rayon::prelude::*;
use rug::{Float, Rational};
use serde_json::json;

use crate::error::{MopError, Result};
use crate::hermitepade::contact;
use crate::measures::{apery_triple, cauchy_series};
use crate::mopcore::mixed::{FormTerm, MomentForm, PointConstraint, Unknown};
use crate::mopcore::{mixed_solve, MixedSystemSpec, Normalization, SolutionKind};
use crate::numerics::scalar::check_precision;
use crate::numerics::text::{format_float, format_rational};
use crate::numerics::Polynomial;
use crate::series::{polynomial_part_of_product, LaurentSeries};

#[derive(Debug, Clone)]
pub struct AperyStep {
    pub n: usize,
    pub a: Polynomial<Rational>,
    pub b: Polynomial<Rational>,
    pub c: Polynomial<Rational>,
    pub d: Polynomial<Rational>,
    /// `−D(1) / (2 B(1))`.
    pub approximant: Rational,
    pub abs_error: Float,
    /// Orders of contact of the two linear forms.
    pub orders: [i64; 2],
}

#[derive(Debug, Clone)]
pub struct AperySequence {
    pub steps: Vec<AperyStep>,
    /// `abs_error(n+1) / abs_error(n)`.
    pub ratios: Vec<Float>,
    pub precision: u32,
}

/// The mixed system at index `n` over the measure triple.
pub fn apery_system(n: usize) -> MixedSystemSpec {
    let t = |c: i64, measure: usize, unknown: usize| FormTerm { coefficient: Rational::from(c), measure, unknown };
    MixedSystemSpec {
        unknowns: vec![Unknown { name: "A".into(), max_degree: n }, Unknown { name: "B".into(), max_degree: n }],
        forms: vec![
            MomentForm { terms: vec![t(1, 0, 0), t(-1, 1, 1)], conditions: n },
            MomentForm { terms: vec![t(1, 1, 0), t(-2, 2, 1)], conditions: n },
        ],
        point_constraints: vec![PointConstraint { unknown: 0, point: Rational::from(1), value: Rational::new() }],
        kind: SolutionKind::OneDimensional,
        normalization: Normalization::IntegerContent,
    }
}

/// ζ(3) at `prec` bits, rounded from a value computed at twice that.
pub fn zeta3(prec: u32) -> Float {
    Float::with_val(prec, Float::with_val(2 * prec, Float::zeta_u(3)))
}

fn eval_at_one(p: &Polynomial<Rational>) -> Rational {
    p.coeffs().iter().fold(Rational::new(), |acc, c| acc + c)
}

pub fn apery_step(n: usize, prec: u32) -> Result<AperyStep> {
    check_precision(prec)?;
    let measures = apery_triple();
    let mut polys = mixed_solve(&apery_system(n), &measures)?;
    let b = polys.pop().expect("two unknowns");
    let a = polys.pop().expect("two unknowns");

    let terms = 2 * n + 8;
    let f: Vec<LaurentSeries<Rational>> = measures.iter().map(|m| cauchy_series(m, terms)).collect::<Result<_>>()?;
    let two_b = b.scale(&Rational::from(2));
    let c = polynomial_part_of_product(&a, &f[0].tail).sub(&polynomial_part_of_product(&b, &f[1].tail));
    let d = polynomial_part_of_product(&a, &f[1].tail).sub(&polynomial_part_of_product(&two_b, &f[2].tail));
    let first = contact(&f[..2], &[a.clone(), b.neg()], &c)?;
    let second = contact(&f[1..], &[a.clone(), two_b.neg()], &d)?;

    let b1 = eval_at_one(&b);
    if b1.cmp0().is_eq() {
        return Err(MopError::NoSolution(format!("B_{n}(1) = 0")));
    }
    let approximant = -eval_at_one(&d) / (Rational::from(2) * b1);
    let abs_error = (zeta3(prec) - &approximant).abs();
    Ok(AperyStep { n, a, b, c, d, approximant, abs_error, orders: [first.order, second.order] })
}

pub fn apery_sequence(n_max: usize, prec: u32) -> Result<AperySequence> {
    if n_max < 2 {
        return Err(MopError::InvalidInput("apery_sequence needs n_max >= 2".into()));
    }
    let steps = (1..=n_max).into_par_iter().map(|n| apery_step(n, prec)).collect::<Result<Vec<_>>>()?;
    let ratios = steps.windows(2).map(|w| Float::with_val(prec, &w[1].abs_error / &w[0].abs_error)).collect();
    Ok(AperySequence { steps, ratios, precision: prec })
}

fn sci(x: &Float) -> String {
    x.to_string_radix(10, Some(6))
}

impl AperySequence {
    pub fn to_text(&self) -> String {
        let mut out = format!("{:>3}  {:<48}  {:<14}  {}\n", "n", "approximant", "abs_error", "ratio");
        for (i, s) in self.steps.iter().enumerate() {
            let ratio = if i == 0 { "-".to_string() } else { sci(&self.ratios[i - 1]) };
            out.push_str(&format!(
                "{:>3}  {:<48}  {:<14}  {}\n",
                s.n,
                format_rational(&s.approximant),
                sci(&s.abs_error),
                ratio
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs = |p: &Polynomial<Rational>| p.coeffs().iter().map(format_rational).collect::<Vec<_>>();
        json!({
            "precision": self.precision,
            "zeta3": format_float(&zeta3(self.precision)),
            "steps": self.steps.iter().map(|s| json!({
                "n": s.n,
                "A": coeffs(&s.a),
                "B": coeffs(&s.b),
                "C": coeffs(&s.c),
                "D": coeffs(&s.d),
                "approximant": format_rational(&s.approximant),
                "abs_error": format_float(&s.abs_error),
                "orders": s.orders,
            })).collect::<Vec<_>>(),
            "ratios": self.ratios.iter().map(format_float).collect::<Vec<_>>(),
        })
    }
}
