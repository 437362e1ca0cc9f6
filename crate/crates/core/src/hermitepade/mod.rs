//! Hermite-Padé approximation from series data and Laurent expansion of
//! algebraic functions.

pub mod algebraic;
pub mod hp;

pub use algebraic::{
    algebraic_series, figure1_curve, figure1_default_seed, AlgebraicCurveSpec, AlgebraicExpansion, BranchSeed,
    GaussianRational,
};
pub use hp::{contact, hp_type_i, hp_type_ii, order_of_contact, pade, required_terms, Contact, HpTypeI, HpTypeII};
