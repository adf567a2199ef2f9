use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    /// Broken mesh: bad indices, non-positive area, non-manifold edges,
    /// hanging vertices or inconsistent boundary flags.
    #[error("invalid mesh structure: {0}")]
    Structural(String),

    #[error("mesh is not a refinement of the given coarse mesh")]
    Lineage,

    #[error("vertex index {0} out of range")]
    InvalidVertex(usize),

    #[error("element index {0} out of range")]
    InvalidElement(usize),

    #[error("polynomial degree must be at least 1, got {0}")]
    InvalidDegree(usize),

    #[error("spaces are not nested: {0}")]
    NotNested(String),

    #[error("diffusion coefficient is not symmetric positive definite in region {0}")]
    NonSpdCoefficient(usize),

    #[error("no coefficient region contains the point ({0}, {1})")]
    UncoveredPoint(f64, f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("edge {0} lies on the boundary")]
    BoundaryEdge(usize),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("direct solve failed: {0}")]
    DirectSolve(String),

    #[error("iteration cap of {cap} exceeded")]
    IterationCap { cap: usize, zeta_history: Vec<f64> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("need at least {needed} records, found {found}")]
    InsufficientRecords { needed: usize, found: usize },

    #[error("refinement of a non-empty marking produced no new elements")]
    StalledRefinement,
}
