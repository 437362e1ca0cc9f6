//! Type I, type II and mixed-type multiple orthogonal polynomials.

mod index;
pub mod mixed;
pub mod recurrence;
pub mod systems;

pub use index::MultiIndex;
pub use mixed::{mixed_solve, MixedSystemSpec, Normalization, SolutionKind};
pub use recurrence::{nn_recurrence, NnRecurrence};
pub use systems::{
    assemble_systems, biortho_table, is_normal, perfectness_scan, type_i, type_ii, AssembledSystems, TypeIISolution,
    TypeISolution,
};
