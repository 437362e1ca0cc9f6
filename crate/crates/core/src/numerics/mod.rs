//! Scalar domains, dense elimination, root finding and quadrature.

pub mod matrix;
pub mod poly;
pub mod quad;
pub mod roots;
pub mod scalar;
pub mod text;

pub use matrix::{det, exact_solution_space, lin_solve, DenseMatrix, LinSolution, SolutionSpace};
pub use poly::Polynomial;
pub use roots::{poly_roots, RootCluster, RootSet};
pub use scalar::{negligible, Scalar, ScalarDomain, MIN_PRECISION};
