//! Dense matrices and the elimination kernels behind every moment system.
//!
//! Exact systems are eliminated fraction-free (Bareiss) on rows scaled to
//! integers. Floating systems use Gaussian elimination with partial pivoting;
//! a pivot smaller than `2^(-prec+8)` times the largest entry of the input is
//! treated as structural singularity.

use rug::{Float, Integer, Rational};

use crate::error::{MopError, Result};
use crate::numerics::scalar::{working_prec, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(MopError::InvalidInput("ragged matrix rows".into()));
        }
        Ok(DenseMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one(prec) } else { T::zero(prec) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> DenseMatrix<U> {
        DenseMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let prec = x.first().map_or(0, Scalar::precision);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).fold(T::zero(prec), |acc, (a, b)| acc.add(&a.mul(b))))
            .collect()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self, prec: u32) -> Float {
        self.entries.iter().map(|e| e.magnitude(prec)).fold(Float::new(prec), |m, v| if v > m { v } else { m })
    }
}

/// Result of [`lin_solve`]: the solution and `‖Ax − b‖∞`.
#[derive(Debug, Clone)]
pub struct LinSolution<T> {
    pub x: Vec<T>,
    pub residual: Float,
}

/// Solves `a x = b`, reporting the infinity-norm residual.
pub fn lin_solve<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<LinSolution<T>> {
    if !a.is_square() || b.len() != a.rows() {
        return Err(MopError::InvalidInput(format!(
            "lin_solve needs a square matrix and matching rhs, got {}x{} and {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let x = T::solve_system(a, b)?;
    let residual = residual_inf(a, &x, b);
    Ok(LinSolution { x, residual })
}

pub fn det<T: Scalar>(a: &DenseMatrix<T>) -> Result<T> {
    if !a.is_square() {
        return Err(MopError::InvalidInput("determinant of a non-square matrix".into()));
    }
    Ok(T::determinant(a))
}

pub fn residual_inf<T: Scalar>(a: &DenseMatrix<T>, x: &[T], b: &[T]) -> Float {
    let prec = working_prec(x.first().map_or(0, Scalar::precision));
    a.mul_vec(x).iter().zip(b).map(|(ax, bi)| ax.sub(bi).magnitude(prec)).fold(Float::new(prec), |m, v| {
        if v > m {
            v
        } else {
            m
        }
    })
}

fn lcm_of_denominators<'a>(row: impl Iterator<Item = &'a Rational>) -> Integer {
    let mut l = Integer::from(1);
    for q in row {
        l.lcm_mut(q.denom());
    }
    l
}

fn integer_row<'a>(row: impl Iterator<Item = &'a Rational> + Clone) -> (Vec<Integer>, Integer) {
    let scale = lcm_of_denominators(row.clone());
    let ints = row.map(|q| q.numer() * Integer::from(&scale / q.denom())).collect();
    (ints, scale)
}

/// Fraction-free forward elimination. Returns the number of row swaps, or
/// `None` when a column has no pivot.
fn bareiss_forward(m: &mut [Vec<Integer>], n: usize) -> Option<usize> {
    let width = m.first().map_or(0, Vec::len);
    let mut swaps = 0;
    let mut prev = Integer::from(1);
    for k in 0..n {
        let p = (k..n).find(|&i| m[i][k] != 0)?;
        if p != k {
            m.swap(p, k);
            swaps += 1;
        }
        for i in k + 1..n {
            for j in k + 1..width {
                let t = Integer::from(&m[i][j] * &m[k][k]) - Integer::from(&m[i][k] * &m[k][j]);
                m[i][j] = t.div_exact(&prev);
            }
            m[i][k] = Integer::new();
        }
        prev = m[k][k].clone();
    }
    Some(swaps)
}

pub(crate) fn bareiss_solve(a: &DenseMatrix<Rational>, b: &[Rational]) -> Result<Vec<Rational>> {
    let n = a.rows();
    let mut m: Vec<Vec<Integer>> =
        (0..n).map(|i| integer_row(a.row(i).iter().chain(std::iter::once(&b[i]))).0).collect();
    bareiss_forward(&mut m, n)
        .ok_or_else(|| MopError::SingularSystem(format!("no pivot in {n}x{n} exact elimination")))?;
    let mut x = vec![Rational::new(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from(&m[i][n]);
        for j in i + 1..n {
            acc -= Rational::from(&m[i][j]) * &x[j];
        }
        x[i] = acc / Rational::from(&m[i][i]);
    }
    Ok(x)
}

pub(crate) fn bareiss_det(a: &DenseMatrix<Rational>) -> Rational {
    let n = a.rows();
    if n == 0 {
        return Rational::from(1);
    }
    let mut scale = Integer::from(1);
    let mut m: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            let (row, s) = integer_row(a.row(i).iter());
            scale *= s;
            row
        })
        .collect();
    match bareiss_forward(&mut m, n) {
        None => Rational::new(),
        Some(swaps) => {
            let mut d = Rational::from((m[n - 1][n - 1].clone(), scale));
            if swaps % 2 == 1 {
                d = -d;
            }
            d
        }
    }
}

/// Gaussian elimination with partial pivoting; returns the reduced augmented
/// rows, or `None` on a pivot below threshold.
fn pivoted_forward<T: Scalar>(a: &DenseMatrix<T>, rhs: Option<&[T]>) -> (Vec<Vec<T>>, Option<usize>) {
    let n = a.rows();
    let prec = working_prec(a.entries().first().map_or(0, Scalar::precision));
    let mut threshold = a.max_abs(prec);
    threshold >>= prec.saturating_sub(8);
    let mut m: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            if let Some(b) = rhs {
                row.push(b[i].clone());
            }
            row
        })
        .collect();
    let width = m.first().map_or(0, Vec::len);
    let mut swaps = 0;
    for k in 0..n {
        let (p, best) = (k..n).map(|i| (i, m[i][k].magnitude(prec))).fold((k, Float::new(prec)), |acc, cur| {
            if cur.1 > acc.1 {
                cur
            } else {
                acc
            }
        });
        if best.is_zero() || best <= threshold {
            return (m, None);
        }
        if p != k {
            m.swap(p, k);
            swaps += 1;
        }
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in bottom.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            let factor = row[k].div(&pivot_row[k]);
            for j in k + 1..width {
                row[j] = row[j].sub(&factor.mul(&pivot_row[j]));
            }
            row[k] = T::zero(prec);
        }
    }
    (m, Some(swaps))
}

pub(crate) fn pivoted_solve<T: Scalar>(a: &DenseMatrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    let (m, swaps) = pivoted_forward(a, Some(b));
    if swaps.is_none() {
        return Err(MopError::SingularSystem(format!("pivot below threshold in {n}x{n} elimination")));
    }
    let prec = working_prec(a.entries().first().map_or(0, Scalar::precision));
    let mut x = vec![T::zero(prec); n];
    for i in (0..n).rev() {
        let mut acc = m[i][n].clone();
        for j in i + 1..n {
            acc = acc.sub(&m[i][j].mul(&x[j]));
        }
        x[i] = acc.div(&m[i][i]);
    }
    Ok(x)
}

pub(crate) fn pivoted_det<T: Scalar>(a: &DenseMatrix<T>) -> T {
    let n = a.rows();
    let prec = working_prec(a.entries().first().map_or(0, Scalar::precision));
    if n == 0 {
        return T::one(prec);
    }
    let (m, swaps) = pivoted_forward(a, None);
    match swaps {
        None => T::zero(prec),
        Some(s) => {
            let d = (0..n).fold(T::one(prec), |acc, i| acc.mul(&m[i][i]));
            if s % 2 == 1 {
                d.neg()
            } else {
                d
            }
        }
    }
}

/// Affine solution set `{particular + span(null_basis)}` of an exact system.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSpace {
    pub particular: Vec<Rational>,
    pub null_basis: Vec<Vec<Rational>>,
}

impl SolutionSpace {
    pub fn dimension(&self) -> usize {
        self.null_basis.len()
    }
}

/// Exact solution set of a possibly rectangular system. Returns `None` when
/// the system is inconsistent.
///
/// Rows are kept primitive integer vectors during Gauss-Jordan reduction, so
/// the output is independent of the input row scaling.
pub fn exact_solution_space(rows: &[Vec<Rational>], rhs: &[Rational], unknowns: usize) -> Option<SolutionSpace> {
    let mut m: Vec<Vec<Integer>> = rows
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let (mut ints, _) = integer_row(row.iter().chain(std::iter::once(b)));
            make_primitive(&mut ints);
            ints
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..unknowns {
        let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(p, rank);
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[col] == 0 {
                continue;
            }
            let f = row[col].clone();
            for j in 0..=unknowns {
                let t = Integer::from(&row[j] * &pivot_row[col]) - Integer::from(&f * &pivot_row[j]);
                row[j] = t;
            }
            make_primitive(row);
        }
        pivots.push(col);
        rank += 1;
    }
    if m[rank..].iter().any(|row| row[unknowns] != 0) {
        return None;
    }
    let mut particular = vec![Rational::new(); unknowns];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = Rational::from((m[r][unknowns].clone(), m[r][c].clone()));
    }
    let free: Vec<usize> = (0..unknowns).filter(|c| !pivots.contains(c)).collect();
    let null_basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::new(); unknowns];
            v[f] = Rational::from(1);
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -Rational::from((m[r][f].clone(), m[r][c].clone()));
            }
            v
        })
        .collect();
    Some(SolutionSpace { particular, null_basis })
}

fn make_primitive(row: &mut [Integer]) {
    let mut g = Integer::new();
    for v in row.iter() {
        g.gcd_mut(v);
    }
    if g > 1 {
        for v in row.iter_mut() {
            v.div_exact_mut(&g);
        }
    }
}
