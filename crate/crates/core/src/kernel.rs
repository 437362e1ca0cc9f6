//! Christoffel-Darboux kernels: the classical `r = 1` kernel and the path sum
//! `K_n(x, y) = Σ_k P_{n_k}(x) Q_{n_{k+1}}(y)` over a monotone lattice path,
//! with `Q_m = Σ_j A_{m,j} w_j` built from the type I vector of `m`.
//!
//! Exact comparison happens in the basis `x^i y^l w_j(y)`: a kernel is the
//! array of rational coefficients of those functions.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use rug::{Float, Rational};

use crate::error::{MopError, Result};
use crate::measures::MeasureSpec;
use crate::mopcore::systems::{check_shape, integrate_against};
use crate::mopcore::{type_i, type_ii, MultiIndex};
use crate::numerics::scalar::check_precision;
use crate::numerics::Polynomial;

/// `p_k = monic / sqrt(norm_sq)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orthonormal {
    pub monic: Polynomial<Rational>,
    pub norm_sq: Rational,
}

impl Orthonormal {
    pub fn eval(&self, x: &Float) -> Float {
        let prec = x.prec();
        self.monic.eval_float(x) / Float::with_val(prec, &self.norm_sq).sqrt()
    }
}

/// `p_0, …, p_degree` for a single measure.
pub fn orthonormalize(measure: &MeasureSpec, degree: usize) -> Result<Vec<Orthonormal>> {
    let measures = std::slice::from_ref(measure);
    let moments = measure.moments(2 * degree + 1)?;
    (0..=degree)
        .map(|k| {
            let monic = type_ii::<Rational>(measures, &MultiIndex::new(vec![k])?)?.poly;
            let norm_sq = integrate_against(monic.coeffs(), &moments, k);
            if norm_sq.cmp0().is_le() {
                return Err(MopError::NonNormalIndex(format!("({k}): nonpositive norm")));
            }
            Ok(Orthonormal { monic, norm_sq })
        })
        .collect()
}

/// Rational coefficients `c[i][l]` of `x^i y^l`.
pub type Bivariate = Vec<Vec<Rational>>;

fn outer_add(acc: &mut Bivariate, px: &Polynomial<Rational>, qy: &Polynomial<Rational>, factor: &Rational) {
    for (i, a) in px.coeffs().iter().enumerate() {
        for (l, b) in qy.coeffs().iter().enumerate() {
            acc[i][l] += Rational::from(a * b) * factor;
        }
    }
}

fn eval_bivariate(c: &Bivariate, x: &Float, y: &Float) -> Float {
    let prec = x.prec().max(y.prec());
    let mut acc = Float::new(prec);
    for row in c.iter().rev() {
        let mut inner = Float::new(prec);
        for v in row.iter().rev() {
            inner *= y;
            inner += Float::with_val(prec, v);
        }
        acc *= x;
        acc += inner;
    }
    acc
}

/// `K_n(x, y) = Σ_{k<n} p_k(x) p_k(y)` as exact coefficients; the weight
/// factor is left to callers.
pub fn cd_kernel_r1_coeffs(measure: &MeasureSpec, n: usize) -> Result<Bivariate> {
    if n == 0 {
        return Err(MopError::InvalidInput("kernel needs n >= 1".into()));
    }
    let basis = orthonormalize(measure, n - 1)?;
    let mut c = vec![vec![Rational::new(); n]; n];
    for p in &basis {
        outer_add(&mut c, &p.monic, &p.monic, &Rational::from(p.norm_sq.recip_ref()));
    }
    Ok(c)
}

pub fn cd_kernel_r1(measure: &MeasureSpec, n: usize, x: &Float, y: &Float) -> Result<Float> {
    Ok(eval_bivariate(&cd_kernel_r1_coeffs(measure, n)?, x, y))
}

/// `∫ K_n(x, y) q(y) dμ(y)` as a polynomial in `x`, exactly.
pub fn reproduce(measure: &MeasureSpec, kernel: &Bivariate, q: &Polynomial<Rational>) -> Result<Polynomial<Rational>> {
    let width = kernel.first().map_or(0, Vec::len);
    let moments = measure.moments(width + q.coeffs().len() + 1)?;
    Ok(Polynomial::new(
        kernel.iter().map(|row| integrate_against(Polynomial::new(row.clone()).mul(q).coeffs(), &moments, 0)).collect(),
    ))
}

/// Monotone path from the zero index to a target, one unit step at a time.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticePath {
    steps: Vec<MultiIndex>,
}

impl LatticePath {
    pub fn new(steps: Vec<MultiIndex>) -> Result<Self> {
        let bad = |m: &str| Err(MopError::InvalidInput(format!("lattice path: {m}")));
        let Some(first) = steps.first() else { return bad("empty") };
        if first.size() != 0 {
            return bad("does not start at the zero index");
        }
        for w in steps.windows(2) {
            if w[0].r() != w[1].r() || w[1].size() != w[0].size() + 1 || !w[0].dominated_by(&w[1]) {
                return bad(&format!("{} -> {} is not a unit step", w[0], w[1]));
            }
        }
        Ok(LatticePath { steps })
    }

    /// Path given by the sequence of directions taken.
    pub fn from_directions(r: usize, dirs: &[usize]) -> Result<Self> {
        let mut steps = vec![MultiIndex::zero(r)];
        for &j in dirs {
            if j >= r {
                return Err(MopError::InvalidInput(format!("direction {j} out of range")));
            }
            steps.push(steps.last().expect("nonempty").plus(j));
        }
        Self::new(steps)
    }

    pub fn steps(&self) -> &[MultiIndex] {
        &self.steps
    }

    pub fn target(&self) -> &MultiIndex {
        self.steps.last().expect("nonempty")
    }
}

impl fmt::Display for LatticePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.steps.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" -> "))
    }
}

/// Every monotone path to `n`, in lexicographic order of directions.
pub fn all_paths(n: &MultiIndex) -> Vec<LatticePath> {
    fn walk(remaining: &mut Vec<usize>, dirs: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if remaining.iter().all(|&c| c == 0) {
            out.push(dirs.clone());
            return;
        }
        for j in 0..remaining.len() {
            if remaining[j] > 0 {
                remaining[j] -= 1;
                dirs.push(j);
                walk(remaining, dirs, out);
                dirs.pop();
                remaining[j] += 1;
            }
        }
    }
    let mut out = Vec::new();
    walk(&mut n.parts().to_vec(), &mut Vec::new(), &mut out);
    out.into_iter().map(|d| LatticePath::from_directions(n.r(), &d).expect("valid by construction")).collect()
}

/// Kernel as coefficients of `x^i y^l w_j(y)`, indexed `[j][i][l]`. The
/// weights are those of the measures whose moments the solvers use (divided
/// by the total mass where the measure is mass-normalized).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelStructure {
    pub coeffs: Vec<Bivariate>,
}

impl KernelStructure {
    pub fn eval(&self, measures: &[MeasureSpec], x: &Float, y: &Float, prec: u32) -> Result<Float> {
        let mut acc = Float::new(prec);
        for (c, m) in self.coeffs.iter().zip(measures) {
            let w = weight_at(m, y, prec)?;
            acc += eval_bivariate(c, x, y) * w;
        }
        Ok(acc)
    }

    /// Largest coefficient difference.
    pub fn deviation(&self, other: &Self) -> Rational {
        let mut max = Rational::new();
        for (a, b) in self.coeffs.iter().flatten().flatten().zip(other.coeffs.iter().flatten().flatten()) {
            let d = Rational::from(a - b).abs();
            if d > max {
                max = d;
            }
        }
        max
    }
}

fn weight_at(m: &MeasureSpec, y: &Float, prec: u32) -> Result<Float> {
    Ok(Float::with_val(prec, m.normalized_weight_value(y, 2 * prec)?))
}

type Cache = HashMap<MultiIndex, (Polynomial<Rational>, Vec<Polynomial<Rational>>)>;

fn pieces(measures: &[MeasureSpec], path: &LatticePath, cache: &mut Cache) -> Result<()> {
    for (k, m) in path.steps().iter().enumerate() {
        if cache.contains_key(m) {
            continue;
        }
        let p = type_ii::<Rational>(measures, m)?.poly;
        let a = if k == 0 { Vec::new() } else { type_i::<Rational>(measures, m)?.polys };
        cache.insert(m.clone(), (p, a));
    }
    Ok(())
}

fn structure_from(measures: &[MeasureSpec], path: &LatticePath, cache: &Cache) -> KernelStructure {
    let n = path.target();
    let one = Rational::from(1);
    let mut coeffs: Vec<Bivariate> =
        n.parts().iter().map(|&nj| vec![vec![Rational::new(); nj.max(1)]; n.size().max(1)]).collect();
    for w in path.steps().windows(2) {
        let p = &cache[&w[0]].0;
        let a = &cache[&w[1]].1;
        for (j, aj) in a.iter().enumerate() {
            outer_add(&mut coeffs[j], p, aj, &one);
        }
    }
    debug_assert_eq!(coeffs.len(), measures.len());
    KernelStructure { coeffs }
}

pub fn kernel_structure(measures: &[MeasureSpec], path: &LatticePath) -> Result<KernelStructure> {
    check_shape(measures, path.target())?;
    let mut cache = Cache::new();
    pieces(measures, path, &mut cache)?;
    Ok(structure_from(measures, path, &cache))
}

#[derive(Debug, Clone)]
pub struct KernelValue {
    pub value: Float,
    pub x: Float,
    pub y: Float,
    pub path: LatticePath,
    pub precision: u32,
}

/// `Σ_k P_{n_k}(x) Q_{n_{k+1}}(y)` along `path`.
pub fn mop_kernel(
    measures: &[MeasureSpec],
    path: &LatticePath,
    x: &Float,
    y: &Float,
    prec: u32,
) -> Result<KernelValue> {
    check_precision(prec)?;
    check_shape(measures, path.target())?;
    let mut cache = Cache::new();
    pieces(measures, path, &mut cache)?;
    let weights: Vec<Float> = measures.iter().map(|m| weight_at(m, y, prec)).collect::<Result<_>>()?;
    let (x, y) = (Float::with_val(prec, x), Float::with_val(prec, y));
    let mut value = Float::new(prec);
    for w in path.steps().windows(2) {
        let p = cache[&w[0]].0.eval_float(&x);
        let q = cache[&w[1]].1.iter().zip(&weights).fold(Float::new(prec), |acc, (a, wj)| acc + a.eval_float(&y) * wj);
        value += p * q;
    }
    Ok(KernelValue { value, x, y, path: path.clone(), precision: prec })
}

#[derive(Debug, Clone)]
pub struct PathIndependence {
    pub paths: usize,
    /// Largest coefficient difference against the first path, exact.
    pub structural_deviation: Rational,
    /// Largest `|K_path − K_first|` over the sample points.
    pub numeric_deviation: Float,
}

pub fn path_independence_check(
    measures: &[MeasureSpec],
    n: &MultiIndex,
    samples: &[(Float, Float)],
    prec: u32,
) -> Result<PathIndependence> {
    check_precision(prec)?;
    check_shape(measures, n)?;
    let paths = all_paths(n);
    let mut cache = Cache::new();
    for p in &paths {
        pieces(measures, p, &mut cache)?;
    }
    let structures: Vec<KernelStructure> = paths.par_iter().map(|p| structure_from(measures, p, &cache)).collect();
    let structural_deviation = structures.iter().skip(1).map(|s| s.deviation(&structures[0])).max().unwrap_or_default();

    let mut numeric_deviation = Float::new(prec);
    for (x, y) in samples {
        let base = mop_kernel(measures, &paths[0], x, y, prec)?.value;
        for p in paths.iter().skip(1) {
            let d = (mop_kernel(measures, p, x, y, prec)?.value - &base).abs();
            if d > numeric_deviation {
                numeric_deviation = d;
            }
        }
    }
    Ok(PathIndependence { paths: paths.len(), structural_deviation, numeric_deviation })
}

/// For `r = 1` the path kernel is the classical kernel times the weight:
/// returns both coefficient arrays so they can be compared exactly.
pub fn r1_specialization(measure: &MeasureSpec, n: usize) -> Result<(Bivariate, Bivariate)> {
    let cd = cd_kernel_r1_coeffs(measure, n)?;
    let path = LatticePath::from_directions(1, &vec![0; n])?;
    let mop = kernel_structure(std::slice::from_ref(measure), &path)?;
    Ok((cd, mop.coeffs.into_iter().next().expect("one measure")))
}
