//! Multiple orthogonal polynomials from moment data.
//!
//! The crate assembles and solves the moment systems that define type I,
//! type II and mixed-type multiple orthogonal polynomials, runs the
//! equivalent Hermite-Padé problems on series data, and checks the
//! structural identities relating them: transpose duality of the two
//! systems, normality, nearest-neighbour recurrences and path independence
//! of the mixed Christoffel-Darboux kernel. Exact rational arithmetic is the
//! default; multiprecision real and complex domains cover the numerical
//! pipelines (Apéry's ζ(3) approximants, zeros of Hermite-Padé polynomials
//! for an algebraic function).

pub mod apery;
pub mod error;
pub mod formats;
pub mod hermitepade;
pub mod kernel;
pub mod measures;
pub mod mopcore;
pub mod numerics;
pub mod series;
pub mod zeros;

pub use error::{MopError, Result};
pub use measures::MeasureSpec;
pub use mopcore::MultiIndex;
pub use numerics::{Polynomial, Scalar, ScalarDomain};
pub use series::LaurentSeries;

/// Re-exported so callers can build scalars without depending on `rug`
/// directly.
pub use rug::{Complex, Float, Integer, Rational};
