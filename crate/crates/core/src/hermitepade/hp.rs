//! Type I and type II Hermite-Padé approximation at infinity.
//!
//! Series may carry a polynomial part. The order conditions are imposed on
//! the tails only; the polynomial parts are absorbed into `B` (type I) and
//! `Q_j` (type II).

use rug::Float;

use crate::error::{MopError, Result};
use crate::mopcore::MultiIndex;
use crate::numerics::scalar::working_prec;
use crate::numerics::{lin_solve, negligible, DenseMatrix, Polynomial, Scalar};
use crate::series::{polynomial_part_of_product, LaurentSeries};

/// Extra tail terms beyond what the linear system reads, so the order of
/// contact can be observed past the imposed conditions.
pub const GUARD: usize = 4;

/// Tail length every input series needs for index `n`.
pub fn required_terms(n: &MultiIndex) -> usize {
    n.size() + n.max_part() + GUARD
}

#[derive(Debug, Clone, PartialEq)]
pub struct HpTypeI<T> {
    pub a: Vec<Polynomial<T>>,
    pub b: Polynomial<T>,
    /// `Σ A_j f_j − B = O(z^-achieved_order)`; a lower bound when
    /// `remainder_vanishes`.
    pub achieved_order: i64,
    pub remainder_vanishes: bool,
    /// Some input series had a nonzero polynomial part.
    pub polynomial_parts_subtracted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HpTypeII<T> {
    pub p: Polynomial<T>,
    pub q: Vec<Polynomial<T>>,
    /// Per function, `P f_j − Q_j = O(z^-order)`.
    pub achieved_orders: Vec<i64>,
    pub remainder_vanishes: Vec<bool>,
}

/// Order of contact observed within the available truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contact {
    pub order: i64,
    /// Every known coefficient vanished; `order` is then only a lower bound.
    pub vanishes: bool,
}

fn check_inputs<T: Scalar>(series: &[LaurentSeries<T>], n: &MultiIndex) -> Result<()> {
    if series.len() != n.r() {
        return Err(MopError::InvalidInput(format!(
            "{} series given for an index with {} components",
            series.len(),
            n.r()
        )));
    }
    let need = required_terms(n);
    if let Some((j, f)) = series.iter().enumerate().find(|(_, f)| f.terms() < need) {
        return Err(MopError::InsufficientTerms(format!(
            "series {} has {} tail terms; index {n} needs {need}",
            j + 1,
            f.terms()
        )));
    }
    Ok(())
}

fn series_prec<T: Scalar>(series: &[LaurentSeries<T>]) -> u32 {
    series.iter().filter_map(|f| f.tail.first()).map(Scalar::precision).max().unwrap_or(0)
}

fn singular_to_non_normal<T>(r: Result<T>, n: &MultiIndex) -> Result<T> {
    r.map_err(|e| match e {
        MopError::SingularSystem(_) => MopError::NonNormalIndex(n.to_string()),
        other => other,
    })
}

/// `A_j` with `deg A_j <= n_j − 1` such that the `z^-1 … z^-(|n|-1)`
/// coefficients of `Σ A_j f_j` vanish and the `z^-|n|` coefficient is one.
pub fn hp_type_i<T: Scalar>(series: &[LaurentSeries<T>], n: &MultiIndex) -> Result<HpTypeI<T>> {
    check_inputs(series, n)?;
    let size = n.size();
    if size == 0 {
        return Err(MopError::InvalidInput("type I needs |n| >= 1".into()));
    }
    let prec = series_prec(series);
    let mut cols: Vec<(usize, usize)> = Vec::with_capacity(size);
    for (j, &nj) in n.parts().iter().enumerate() {
        cols.extend((0..nj).map(|i| (j, i)));
    }
    let m = DenseMatrix::from_fn(size, size, |k, c| {
        let (j, i) = cols[c];
        series[j].tail[i + k].clone()
    });
    let mut rhs = vec![T::zero(prec); size];
    rhs[size - 1] = T::one(prec);
    let x = singular_to_non_normal(lin_solve(&m, &rhs), n)?.x;

    let mut offset = 0;
    let a: Vec<Polynomial<T>> = n
        .parts()
        .iter()
        .map(|&nj| {
            let p = Polynomial::new(x[offset..offset + nj].to_vec());
            offset += nj;
            p
        })
        .collect();
    let b = a.iter().zip(series).fold(Polynomial::zero(), |acc: Polynomial<T>, (aj, f)| {
        acc.add(&aj.mul(&f.poly_part)).add(&polynomial_part_of_product(aj, &f.tail))
    });
    let contact = contact(series, &a, &b)?;
    Ok(HpTypeI {
        a,
        b,
        achieved_order: contact.order,
        remainder_vanishes: contact.vanishes,
        polynomial_parts_subtracted: series.iter().any(|f| !f.poly_part.is_zero()),
    })
}

/// Monic `P` of degree `|n|` with `P f_j − Q_j = O(z^-(n_j+1))` for every `j`.
pub fn hp_type_ii<T: Scalar>(series: &[LaurentSeries<T>], n: &MultiIndex) -> Result<HpTypeII<T>> {
    check_inputs(series, n)?;
    let size = n.size();
    let prec = series_prec(series);
    let mut rows: Vec<(usize, usize)> = Vec::with_capacity(size);
    for (j, &nj) in n.parts().iter().enumerate() {
        rows.extend((0..nj).map(|k| (j, k)));
    }
    let mut coeffs = if size == 0 {
        Vec::new()
    } else {
        let m = DenseMatrix::from_fn(size, size, |r, i| {
            let (j, k) = rows[r];
            series[j].tail[i + k].clone()
        });
        let rhs: Vec<T> = rows.iter().map(|&(j, k)| series[j].tail[size + k].neg()).collect();
        singular_to_non_normal(lin_solve(&m, &rhs), n)?.x
    };
    coeffs.push(T::one(prec));
    let p = Polynomial::new(coeffs);
    let q: Vec<Polynomial<T>> =
        series.iter().map(|f| p.mul(&f.poly_part).add(&polynomial_part_of_product(&p, &f.tail))).collect();
    let mut achieved_orders = Vec::with_capacity(series.len());
    let mut remainder_vanishes = Vec::with_capacity(series.len());
    for (f, qj) in series.iter().zip(&q) {
        let c = contact(std::slice::from_ref(f), std::slice::from_ref(&p), qj)?;
        achieved_orders.push(c.order);
        remainder_vanishes.push(c.vanishes);
    }
    Ok(HpTypeII { p, q, achieved_orders, remainder_vanishes })
}

/// The `r = 1` case of [`hp_type_ii`].
pub fn pade<T: Scalar>(series: &LaurentSeries<T>, n: usize) -> Result<HpTypeII<T>> {
    hp_type_ii(std::slice::from_ref(series), &MultiIndex::new(vec![n])?)
}

/// Order of `Σ A_j f_j − B` at infinity, with a flag for an identically
/// vanishing known remainder.
pub fn contact<T: Scalar>(series: &[LaurentSeries<T>], a: &[Polynomial<T>], b: &Polynomial<T>) -> Result<Contact> {
    if series.len() != a.len() {
        return Err(MopError::InvalidInput(format!("{} series but {} polynomials", series.len(), a.len())));
    }
    let prec = working_prec(series_prec(series));
    let abs_series: Vec<LaurentSeries<Float>> = series.iter().map(|f| f.map(|c| c.magnitude(prec))).collect();
    let abs_poly = |p: &Polynomial<T>| p.map(|c| c.magnitude(prec));

    let mut value: Option<LaurentSeries<T>> = None;
    let mut scale: Option<LaurentSeries<Float>> = None;
    for ((f, af), aj) in series.iter().zip(&abs_series).zip(a) {
        let term = f.mul_poly(aj);
        let term_abs = af.mul_poly(&abs_poly(aj));
        value = Some(match value {
            None => term,
            Some(v) => v.add(&term),
        });
        scale = Some(match scale {
            None => term_abs,
            Some(s) => s.add(&term_abs),
        });
    }
    let (mut value, mut scale) = (value.expect("at least one series"), scale.expect("at least one series"));
    value.poly_part = value.poly_part.sub(b);
    scale.poly_part = scale.poly_part.add(&abs_poly(b));

    let zero_scale = Float::new(prec);
    let top = value.poly_part.degree().map_or(-1, |d| d as i64);
    for e in (0..=top).rev() {
        let v = value.poly_part.coeff(e as usize).cloned().unwrap_or_else(|| T::zero(prec));
        let s = scale.poly_part.coeff(e as usize).unwrap_or(&zero_scale);
        if !negligible(&v, s) {
            return Ok(Contact { order: -e, vanishes: false });
        }
    }
    for (k, (v, s)) in value.tail.iter().zip(&scale.tail).enumerate() {
        if !negligible(v, s) {
            return Ok(Contact { order: k as i64 + 1, vanishes: false });
        }
    }
    Ok(Contact { order: value.tail.len() as i64 + 1, vanishes: true })
}

/// Largest `m` with `Σ A_j f_j − B = O(z^-m)` within the known truncation.
pub fn order_of_contact<T: Scalar>(series: &[LaurentSeries<T>], a: &[Polynomial<T>], b: &Polynomial<T>) -> Result<i64> {
    let c = contact(series, a, b)?;
    if c.vanishes {
        return Err(MopError::InsufficientTerms(format!("all {} known remainder coefficients vanish", c.order - 1)));
    }
    Ok(c.order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{apery_pair, cauchy_series, MeasureSpec};
    use crate::mopcore::{type_i, type_ii};
    use rug::{Complex, Rational};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn idx(s: &str) -> MultiIndex {
        s.parse().unwrap()
    }

    fn series(measures: &[MeasureSpec], terms: usize) -> Vec<LaurentSeries<Rational>> {
        measures.iter().map(|m| cauchy_series(m, terms).unwrap()).collect()
    }

    #[test]
    fn type_i_lebesgue() {
        let f = series(&[MeasureSpec::LebesgueUnit], 12);
        let r = hp_type_i(&f, &idx("2")).unwrap();
        assert_eq!(r.a, vec![Polynomial::from_ints(&[-6, 12])]);
        assert_eq!(r.b, Polynomial::from_ints(&[12]));
        assert_eq!(r.achieved_order, 2);
        assert_eq!(order_of_contact(&f, &r.a, &r.b).unwrap(), 2);

        let r1 = hp_type_i(&f, &idx("1")).unwrap();
        assert_eq!(r1.a, vec![Polynomial::from_ints(&[1])]);
        assert!(r1.b.is_zero());
    }

    #[test]
    fn type_i_apery_pair() {
        let f = series(&apery_pair(), 12);
        let r = hp_type_i(&f, &idx("1,1")).unwrap();
        assert_eq!(r.a, vec![Polynomial::from_ints(&[4]), Polynomial::from_ints(&[-4])]);
        assert!(r.b.is_zero());
        assert!(r.achieved_order >= 2);
    }

    #[test]
    fn type_ii_lebesgue() {
        let f = series(&[MeasureSpec::LebesgueUnit], 12);
        let r = hp_type_ii(&f, &idx("2")).unwrap();
        assert_eq!(r.p, Polynomial::new(vec![q(1, 6), q(-1, 1), q(1, 1)]));
        assert_eq!(r.q, vec![Polynomial::new(vec![q(-1, 2), q(1, 1)])]);
        assert!(r.achieved_orders[0] >= 3);
        let r0 = hp_type_ii(&f, &idx("0")).unwrap();
        assert_eq!(r0.p, Polynomial::from_ints(&[1]));
        assert!(r0.q[0].is_zero());
    }

    #[test]
    fn moment_side_agrees() {
        let m = apery_pair();
        let f = series(&m, 16);
        let n = idx("2,1");
        assert_eq!(hp_type_ii(&f, &n).unwrap().p, type_ii::<Rational>(&m, &n).unwrap().poly);
        assert_eq!(hp_type_i(&f, &n).unwrap().a, type_i::<Rational>(&m, &n).unwrap().polys);
    }

    #[test]
    fn pade_examples() {
        let f = cauchy_series(&MeasureSpec::LebesgueUnit, 8).unwrap();
        let r = pade(&f, 1).unwrap();
        assert_eq!(r.p, Polynomial::new(vec![q(-1, 2), q(1, 1)]));
        assert_eq!(r.q[0], Polynomial::from_ints(&[1]));

        let geometric = LaurentSeries::from_tail(vec![Rational::from(1); 8]);
        let r = pade(&geometric, 1).unwrap();
        assert_eq!(r.p, Polynomial::from_ints(&[-1, 1]));
        assert_eq!(r.q[0], Polynomial::from_ints(&[1]));
        assert!(r.remainder_vanishes[0]);
    }

    #[test]
    fn contact_edge_cases() {
        let f = series(&[MeasureSpec::LebesgueUnit], 12);
        let zero = Polynomial::<Rational>::zero();
        assert!(matches!(
            order_of_contact(&f, std::slice::from_ref(&zero), &zero),
            Err(MopError::InsufficientTerms(_))
        ));
        let broken = [Polynomial::from_ints(&[-6, 13])];
        let b = polynomial_part_of_product(&broken[0], &f[0].tail);
        assert!(order_of_contact(&f, &broken, &b).unwrap() < 2);
        assert!(matches!(
            hp_type_i(&series(&[MeasureSpec::LebesgueUnit], 4), &idx("2")),
            Err(MopError::InsufficientTerms(_))
        ));
    }

    #[test]
    fn complex_domain_tracks_exact() {
        let f = series(&apery_pair(), 16);
        let fc: Vec<LaurentSeries<Complex>> = f.iter().map(|s| s.map(|c| Complex::with_val(256, c))).collect();
        let n = idx("2,2");
        let exact = hp_type_i(&f, &n).unwrap();
        let approx = hp_type_i(&fc, &n).unwrap();
        assert_eq!(approx.achieved_order, exact.achieved_order);
        for (pe, pa) in exact.a.iter().zip(&approx.a) {
            for (ce, ca) in pe.coeffs().iter().zip(pa.coeffs()) {
                let d = Complex::with_val(256, ca - Complex::with_val(256, ce));
                assert!(Float::with_val(256, d.abs_ref()) < 1e-50);
            }
        }
    }
}
