//! Fixtures shared by the criterion benchmarks.

use mop_core::mopcore::assemble_systems;
use mop_core::numerics::DenseMatrix;
use mop_core::{MeasureSpec, MultiIndex, Rational, Result};

/// Type II matrix and right-hand side for the Apéry pair at `(k, k)`.
pub fn apery_pair_system(k: usize) -> Result<(DenseMatrix<Rational>, Vec<Rational>)> {
    let measures = mop_core::measures::apery_pair();
    let n = MultiIndex::new(vec![k, k])?;
    let s = assemble_systems(&measures, &n)?;
    Ok((s.type_ii, s.rhs_ii))
}

/// Three log-power weights on [0, 1].
pub fn log_triple() -> Vec<MeasureSpec> {
    (0..3).map(|p| MeasureSpec::LogWeight { power: p }).collect()
}
