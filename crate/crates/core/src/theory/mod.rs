//! Algebraic theories from abstract clones, their algebras, and free
//! algebras as left Kan extensions.

mod algebraic;
mod clone;
mod extend;
mod free;

pub use algebraic::{
    power_functor, restricted_hom, shift_functor, theory_inclusion, theory_of, Algebra, AlgebraicTheory, Powers,
    ShiftFunctor,
};
pub use clone::{
    builtin, f2_vector, m_set, op_counts, pointed, semilattice, trivial, validate_clone, validate_clone_doc,
    AbstractClone, CloneDoc, Monoid, SubstEntry, BUILTIN_NAMES,
};
pub use free::{
    fr1_check, fr1_insert, fr1_inverse, free_algebra, literal_relation, op_action_concat, op_action_concat_triples,
    relation_check, FreeAlgebra, Fr1Failure, Triple,
};
pub use extend::{
    count_transformations, hom_extend, lan_along, stability_between, truncation_stability, HomExtension, LanAlong,
    StabilityFailure,
};
