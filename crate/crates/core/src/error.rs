use thiserror::Error;

use crate::fincat::Violation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown morphism `{0}`")]
    UnknownMorphism(String),
    #[error("element `{element}` is not in the set over `{object}`")]
    UnknownElement { object: String, element: String },
    #[error("duplicate identifier `{0}`")]
    Duplicate(String),
    #[error("invalid category: {}", summarize(.0))]
    InvalidCategory(Vec<Violation>),
    #[error("invalid functor: {}", summarize(.0))]
    InvalidFunctor(Vec<Violation>),
    #[error("invalid set-valued functor: {}", summarize(.0))]
    InvalidSetFunctor(Vec<Violation>),
    #[error("invalid clone: {}", summarize(.0))]
    InvalidClone(Vec<Violation>),
    #[error("missing product witness for ({0})")]
    MissingWitness(String),
    #[error("arity overflow: total arity {arity} does not fit below rank {rank}")]
    ArityOverflow { arity: usize, rank: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-commuting square: {0}")]
    NotCommuting(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("ill-defined map on classes: {0}")]
    IllDefined(String),
}

fn summarize(v: &[Violation]) -> String {
    match v {
        [] => "no violations".to_string(),
        [one] => one.to_string(),
        [first, rest @ ..] => format!("{first} (and {} more)", rest.len()),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
