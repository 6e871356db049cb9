use thiserror::Error;

/// Errors raised by the algebra engine.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("structure constants are not antisymmetric at ({0}, {1}, {2})")]
    NotAntisymmetric(usize, usize, usize),

    #[error("product is not commutative at ({0}, {1}, {2})")]
    NotCommutative(usize, usize, usize),

    #[error("subspace is not closed under the bracket")]
    NotClosed,

    #[error("subspace is not a complement of the derived subalgebra")]
    NotComplement,

    #[error("product values leave the center")]
    OutsideCenter,

    #[error("product is not associative at ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),

    #[error("products are not orthogonal")]
    NotOrthogonal,

    #[error("matrix is singular")]
    Singular,

    #[error("map is not a Lie algebra automorphism: bracket fails at ({0}, {1})")]
    NotAutomorphism(usize, usize),

    #[error("product is not a transposed Poisson structure")]
    NotTransposedPoisson,

    #[error("unsupported algebra for this operation: {0}")]
    UnsupportedAlgebra(String),

    #[error("unknown catalog entry: {0}")]
    UnknownCatalog(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("basis does not span the derivation space")]
    BasisMismatch,

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
