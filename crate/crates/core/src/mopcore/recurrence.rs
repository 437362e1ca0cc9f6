//! Nearest-neighbour recurrences
//! `x P_n = P_{n+e_j} + b_{n,j} P_n + Σ_i a_{n,i} P_{n−e_i}`,
//! fitted exactly and checked by symbolic subtraction.

use rug::Rational;

use crate::error::{MopError, Result};
use crate::measures::MeasureSpec;
use crate::mopcore::systems::{check_shape, type_ii};
use crate::mopcore::MultiIndex;
use crate::numerics::matrix::exact_solution_space;
use crate::numerics::Polynomial;

#[derive(Debug, Clone, PartialEq)]
pub struct NnRecurrence {
    pub index: MultiIndex,
    /// `b_{n,j}`, one per direction `j`.
    pub b: Vec<Rational>,
    /// `a_{n,i}`, one per measure; zero where `n_i = 0` (no `P_{n−e_i}` term).
    pub a: Vec<Rational>,
    /// `x P_n − P_{n+e_j} − b_{n,j} P_n − Σ_i a_{n,i} P_{n−e_i}`, per direction.
    pub residuals: Vec<Polynomial<Rational>>,
}

impl NnRecurrence {
    pub fn is_exact(&self) -> bool {
        self.residuals.iter().all(Polynomial::is_zero)
    }
}

fn neighbour(measures: &[MeasureSpec], n: &MultiIndex) -> Result<Polynomial<Rational>> {
    Ok(type_ii::<Rational>(measures, n)?.poly)
}

/// Fits the recurrence coefficients of `P_n` in every direction.
pub fn nn_recurrence(measures: &[MeasureSpec], n: &MultiIndex) -> Result<NnRecurrence> {
    check_shape(measures, n)?;
    let r = n.r();
    let p = neighbour(measures, n)?;
    let lower: Vec<Option<Polynomial<Rational>>> =
        (0..r).map(|i| n.minus(i).map(|m| neighbour(measures, &m)).transpose()).collect::<Result<_>>()?;
    let active: Vec<usize> = (0..r).filter(|&i| lower[i].is_some()).collect();
    let xp = p.shift(1);
    let len = n.size() + 1;
    let coeff = |poly: &Polynomial<Rational>, k: usize| poly.coeff(k).cloned().unwrap_or_default();

    let mut b = Vec::with_capacity(r);
    let mut a_common: Option<Vec<Rational>> = None;
    let mut residuals = Vec::with_capacity(r);
    for j in 0..r {
        let target = xp.sub(&neighbour(measures, &n.plus(j))?);
        // unknowns: b, then a_i for active i
        let rows: Vec<Vec<Rational>> = (0..len)
            .map(|k| {
                std::iter::once(coeff(&p, k))
                    .chain(active.iter().map(|&i| coeff(lower[i].as_ref().expect("active"), k)))
                    .collect()
            })
            .collect();
        let rhs: Vec<Rational> = (0..len).map(|k| coeff(&target, k)).collect();
        let space = exact_solution_space(&rows, &rhs, 1 + active.len())
            .ok_or_else(|| MopError::NoFit(format!("direction {} at {n}", j + 1)))?;
        if space.dimension() > 0 {
            return Err(MopError::NonUnique(format!("recurrence coefficients at {n} direction {}", j + 1)));
        }
        let sol = space.particular;
        let mut a = vec![Rational::new(); r];
        for (slot, &i) in active.iter().enumerate() {
            a[i] = sol[1 + slot].clone();
        }
        let mut fitted = p.scale(&sol[0]);
        for &i in &active {
            fitted = fitted.add(&lower[i].as_ref().expect("active").scale(&a[i]));
        }
        residuals.push(target.sub(&fitted));
        b.push(sol[0].clone());
        match &a_common {
            None => a_common = Some(a),
            Some(prev) if *prev != a => {
                return Err(MopError::NoFit(format!("a-coefficients at {n} differ between directions")))
            }
            Some(_) => {}
        }
    }
    Ok(NnRecurrence { index: n.clone(), b, a: a_common.unwrap_or_default(), residuals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::apery_pair;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn legendre_three_term() {
        let leb = [MeasureSpec::LebesgueUnit];
        let rec = nn_recurrence(&leb, &"1".parse().unwrap()).unwrap();
        assert_eq!(rec.b, vec![q(1, 2)]);
        assert_eq!(rec.a, vec![q(1, 12)]);
        assert!(rec.is_exact());
        let rec0 = nn_recurrence(&leb, &"0".parse().unwrap()).unwrap();
        assert_eq!(rec0.b, vec![q(1, 2)]);
        assert_eq!(rec0.a, vec![q(0, 1)]);
    }

    #[test]
    fn apery_pair_both_directions() {
        let rec = nn_recurrence(&apery_pair(), &"1,1".parse().unwrap()).unwrap();
        assert_eq!(rec.residuals.len(), 2);
        assert!(rec.is_exact());
    }

    #[test]
    fn non_normal_neighbour() {
        let dup = [MeasureSpec::LebesgueUnit, MeasureSpec::LebesgueUnit];
        assert!(matches!(nn_recurrence(&dup, &"1,0".parse().unwrap()), Err(MopError::NonNormalIndex(_))));
    }
}
