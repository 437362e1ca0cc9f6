//! The defining linear systems of type I and type II multiple orthogonal
//! polynomials.
//!
//! Canonical ordering. Type II unknowns are the coefficients of
//! `x^0, …, x^{|n|-1}` of the monic `P_n`; its conditions run measure by
//! measure, then by `k`. Type I unknowns are the coefficients of `A_{n,1}`
//! (low to high), then `A_{n,2}`, …; its conditions run over
//! `k = 0, …, |n|-1`, the normalization row last. With this ordering the
//! type I matrix is exactly the transpose of the type II matrix.

use rayon::prelude::*;
use rug::{Float, Rational};

use crate::error::{MopError, Result};
use crate::measures::MeasureSpec;
use crate::mopcore::MultiIndex;
use crate::numerics::matrix::{lin_solve, DenseMatrix};
use crate::numerics::scalar::{negligible, working_prec, Scalar};
use crate::numerics::{det, Polynomial};

/// Moments `m_{j,0..count}` of every measure.
pub fn moment_table(measures: &[MeasureSpec], count: usize) -> Result<Vec<Vec<Rational>>> {
    measures.iter().map(|m| m.moments(count)).collect()
}

/// Moments needed by the systems of index `n`.
pub(crate) fn moments_for(measures: &[MeasureSpec], n: &MultiIndex) -> Result<Vec<Vec<Rational>>> {
    check_shape(measures, n)?;
    moment_table(measures, n.size() + n.max_part() + 1)
}

pub(crate) fn check_shape(measures: &[MeasureSpec], n: &MultiIndex) -> Result<()> {
    if measures.len() != n.r() {
        return Err(MopError::InvalidInput(format!(
            "{} measures but multi-index {n} has {} components",
            measures.len(),
            n.r()
        )));
    }
    Ok(())
}

/// `Σ_i c_i m_{k+i}`: the integral of `x^k · poly` against a measure.
pub fn integrate_against<T: Scalar>(coeffs: &[T], moments: &[T], k: usize) -> T {
    let prec = coeffs.first().map_or(0, Scalar::precision);
    coeffs.iter().enumerate().fold(T::zero(prec), |acc, (i, c)| acc.add(&c.mul(&moments[k + i])))
}

fn integrate_scale<T: Scalar>(coeffs: &[T], moments: &[T], k: usize) -> Float {
    let prec = working_prec(coeffs.first().map_or(0, Scalar::precision));
    coeffs
        .iter()
        .enumerate()
        .fold(Float::new(prec), |acc, (i, c)| acc + c.magnitude(prec) * moments[k + i].magnitude(prec))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSystems {
    /// `|n| × |n|` matrix of the type I conditions.
    pub type_i: DenseMatrix<Rational>,
    /// `|n| × |n|` matrix of the type II conditions.
    pub type_ii: DenseMatrix<Rational>,
    pub rhs_i: Vec<Rational>,
    pub rhs_ii: Vec<Rational>,
}

/// Builds both systems for index `n` from the same moment blocks.
pub fn assemble_systems(measures: &[MeasureSpec], n: &MultiIndex) -> Result<AssembledSystems> {
    let moments = moments_for(measures, n)?;
    Ok(assemble_from_moments(&moments, n))
}

pub(crate) fn assemble_from_moments(moments: &[Vec<Rational>], n: &MultiIndex) -> AssembledSystems {
    let size = n.size();
    // (measure, k) for type II rows, (measure, i) for type I columns
    let blocks: Vec<(usize, usize)> =
        n.parts().iter().enumerate().flat_map(|(j, &nj)| (0..nj).map(move |k| (j, k))).collect();
    let type_ii = DenseMatrix::from_fn(size, size, |row, col| {
        let (j, k) = blocks[row];
        moments[j][k + col].clone()
    });
    let rhs_ii = blocks.iter().map(|&(j, k)| -moments[j][k + size].clone()).collect();
    let type_i = DenseMatrix::from_fn(size, size, |row, col| {
        let (j, i) = blocks[col];
        moments[j][row + i].clone()
    });
    let mut rhs_i = vec![Rational::new(); size];
    if let Some(last) = rhs_i.last_mut() {
        *last = Rational::from(1);
    }
    AssembledSystems { type_i, type_ii, rhs_i, rhs_ii }
}

fn convert<T: Scalar>(m: &DenseMatrix<Rational>, prec: u32) -> DenseMatrix<T> {
    m.map(|q| T::from_rational(q, prec))
}

fn convert_vec<T: Scalar>(v: &[Rational], prec: u32) -> Vec<T> {
    v.iter().map(|q| T::from_rational(q, prec)).collect()
}

/// Starting precision for floating solves of index `n`.
pub fn initial_precision(n: &MultiIndex) -> u32 {
    64 + 16 * n.size() as u32
}

const RETRIES: usize = 4;

/// Solves a moment system in domain `T`. Exact domains solve once; floating
/// domains verify `accept` and retry at doubled precision.
fn solve_with_retries<T: Scalar, S>(
    n: &MultiIndex,
    normal: impl Fn() -> Result<bool>,
    mut attempt: impl FnMut(u32) -> Result<Option<S>>,
) -> Result<S> {
    if T::EXACT {
        return attempt(0)?.ok_or_else(|| MopError::NonNormalIndex(n.to_string()));
    }
    let mut prec = initial_precision(n);
    for _ in 0..=RETRIES {
        if let Some(s) = attempt(prec)? {
            return Ok(s);
        }
        prec *= 2;
    }
    if !normal()? {
        return Err(MopError::NonNormalIndex(n.to_string()));
    }
    Err(MopError::IllConditioned { precision: prec / 2 })
}

/// Monic type II polynomial with its orthogonality residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeIISolution<T> {
    pub index: MultiIndex,
    pub poly: Polynomial<T>,
    /// `∫ P_n x^k dμ_j` in canonical row order.
    pub residuals: Vec<T>,
    /// Working precision (`None` when exact).
    pub precision: Option<u32>,
    /// Some measure's moments were divided by its total mass.
    pub mass_normalized: bool,
}

pub fn type_ii<T: Scalar>(measures: &[MeasureSpec], n: &MultiIndex) -> Result<TypeIISolution<T>> {
    let moments = moments_for(measures, n)?;
    let mass_normalized = measures.iter().any(MeasureSpec::is_mass_normalized);
    let size = n.size();
    if size == 0 {
        return Ok(TypeIISolution {
            index: n.clone(),
            poly: Polynomial::constant(T::one(64)),
            residuals: Vec::new(),
            precision: None,
            mass_normalized,
        });
    }
    let sys = assemble_from_moments(&moments, n);
    solve_with_retries::<T, _>(
        n,
        || Ok(!det(&sys.type_ii)?.is_zero()),
        |prec| {
            let a: DenseMatrix<T> = convert(&sys.type_ii, prec);
            let b: Vec<T> = convert_vec(&sys.rhs_ii, prec);
            let mut coeffs = match lin_solve(&a, &b) {
                Ok(s) => s.x,
                Err(MopError::SingularSystem(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            coeffs.push(T::one(prec));
            let moms: Vec<Vec<T>> = moments.iter().map(|m| convert_vec(m, prec)).collect();
            let mut residuals = Vec::with_capacity(size);
            for (j, &nj) in n.parts().iter().enumerate() {
                for k in 0..nj {
                    let r = integrate_against(&coeffs, &moms[j], k);
                    if !negligible(&r, &integrate_scale(&coeffs, &moms[j], k)) {
                        return Ok(None);
                    }
                    residuals.push(r);
                }
            }
            Ok(Some(TypeIISolution {
                index: n.clone(),
                poly: Polynomial::new(coeffs),
                residuals,
                precision: (!T::EXACT).then_some(prec),
                mass_normalized,
            }))
        },
    )
}

/// Type I vector `(A_{n,1}, …, A_{n,r})` with its residuals.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeISolution<T> {
    pub index: MultiIndex,
    pub polys: Vec<Polynomial<T>>,
    /// `Σ_j ∫ x^k A_{n,j} dμ_j` for `k = 0..|n|-2` (all zero).
    pub residuals: Vec<T>,
    /// The same sum at `k = |n|-1` (one).
    pub normalization_value: T,
    pub precision: Option<u32>,
    /// Some measure's moments were divided by its total mass; the `A_{n,j}`
    /// then belong to the normalized measures `μ_j / m₀(μ_j)`.
    pub mass_normalized: bool,
}

pub(crate) fn type_i_value<T: Scalar>(polys: &[Polynomial<T>], moments: &[Vec<T>], k: usize) -> (T, Float) {
    let prec = polys.iter().find_map(|p| p.coeffs().first()).map_or(0, Scalar::precision);
    let mut acc = T::zero(prec);
    let mut scale = Float::new(working_prec(prec));
    for (p, m) in polys.iter().zip(moments) {
        acc = acc.add(&integrate_against(p.coeffs(), m, k));
        if !p.is_zero() {
            scale += integrate_scale(p.coeffs(), m, k);
        }
    }
    (acc, scale)
}

pub fn type_i<T: Scalar>(measures: &[MeasureSpec], n: &MultiIndex) -> Result<TypeISolution<T>> {
    let size = n.size();
    if size == 0 {
        return Err(MopError::InvalidInput("type I needs |n| >= 1".into()));
    }
    let moments = moments_for(measures, n)?;
    let mass_normalized = measures.iter().any(MeasureSpec::is_mass_normalized);
    let sys = assemble_from_moments(&moments, n);
    solve_with_retries::<T, _>(
        n,
        || Ok(!det(&sys.type_i)?.is_zero()),
        |prec| {
            let a: DenseMatrix<T> = convert(&sys.type_i, prec);
            let b: Vec<T> = convert_vec(&sys.rhs_i, prec);
            let x = match lin_solve(&a, &b) {
                Ok(s) => s.x,
                Err(MopError::SingularSystem(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let mut offset = 0;
            let polys: Vec<Polynomial<T>> = n
                .parts()
                .iter()
                .map(|&nj| {
                    let p = Polynomial::new(x[offset..offset + nj].to_vec());
                    offset += nj;
                    p
                })
                .collect();
            let moms: Vec<Vec<T>> = moments.iter().map(|m| convert_vec(m, prec)).collect();
            let mut residuals = Vec::with_capacity(size - 1);
            for k in 0..size - 1 {
                let (v, scale) = type_i_value(&polys, &moms, k);
                if !negligible(&v, &scale) {
                    return Ok(None);
                }
                residuals.push(v);
            }
            let (normalization_value, scale) = type_i_value(&polys, &moms, size - 1);
            if !negligible(&normalization_value.sub(&T::one(prec)), &scale) {
                return Ok(None);
            }
            Ok(Some(TypeISolution {
                index: n.clone(),
                polys,
                residuals,
                normalization_value,
                precision: (!T::EXACT).then_some(prec),
                mass_normalized,
            }))
        },
    )
}

/// `det(M_II) != 0`, decided exactly.
pub fn is_normal(measures: &[MeasureSpec], n: &MultiIndex) -> Result<bool> {
    let sys = assemble_systems(measures, n)?;
    Ok(!det(&sys.type_ii)?.is_zero())
}

/// Every index with `1 <= |n| <= max_size` that is not normal. An empty result
/// certifies the system perfect up to `max_size`.
pub fn perfectness_scan(measures: &[MeasureSpec], max_size: usize) -> Result<Vec<MultiIndex>> {
    if max_size == 0 {
        return Err(MopError::InvalidInput("perfectness_scan needs max_size >= 1".into()));
    }
    let candidates: Vec<MultiIndex> =
        MultiIndex::all_up_to(measures.len(), max_size).into_iter().filter(|n| n.size() > 0).collect();
    let verdicts: Vec<Result<bool>> = candidates.par_iter().map(|n| is_normal(measures, n)).collect();
    let mut failures = Vec::new();
    for (n, v) in candidates.into_iter().zip(verdicts) {
        if !v? {
            failures.push(n);
        }
    }
    Ok(failures)
}

/// `Σ_j ∫ P_n A_{m,j} dμ_j`, exactly.
pub fn biortho_table(measures: &[MeasureSpec], m: &MultiIndex, n: &MultiIndex) -> Result<Rational> {
    let p = type_ii::<Rational>(measures, n)?.poly;
    let a = type_i::<Rational>(measures, m)?.polys;
    let count = p.coeffs().len() + m.max_part() + 1;
    let moments = moment_table(measures, count)?;
    Ok(a.iter().zip(&moments).fold(Rational::new(), |acc, (aj, mj)| acc + integrate_against(p.mul(aj).coeffs(), mj, 0)))
}
