//! Generators for the standard examples: Leibnizian data and their
//! alternating sign patterns, the discontinuity family `G(t)`, and the block
//! sequences `h₀`, `h`.

mod discontinuity;
mod h0;
mod leibniz;

pub use discontinuity::*;
pub use h0::*;
pub use leibniz::*;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructionError {
    #[error("not Leibnizian: {0}")]
    Leibniz(#[from] LeibnizViolation),
    #[error("block {block} out of range 1..={count}")]
    BlockOutOfRange { block: usize, count: usize },
    #[error("{0}")]
    ParameterOutOfRange(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("constraint violated at {block}: {clause}")]
    Constraint { clause: &'static str, block: usize },
    #[error("insufficient tail mass: found {found} of {wanted} blocks")]
    InsufficientTailMass { found: usize, wanted: usize },
    #[error("input increases at index {index}")]
    NotNonincreasing { index: usize },
    #[error("target must be positive")]
    NonPositiveTarget,
}
