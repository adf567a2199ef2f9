//! Adaptive finite elements for 2D diffusion problems with a local geometric
//! multigrid solver.
//!
//! The crate is `no_std` (it only needs `alloc`). Everything touching files,
//! clocks or the command line lives in the companion `afem-cli` crate.
//!
//! Pipeline overview:
//!
//! * [`mesh`]: conforming triangulations, newest vertex bisection, patches and
//!   the changed-vertex sets between consecutive meshes.
//! * [`space`]: Lagrange spaces of degree `p`, patch subspaces and prolongations.
//! * [`assembly`]: stiffness matrix and load vector over the free dofs.
//! * [`estimator`]: the residual error estimator.
//! * [`solver`]: one step of the local multigrid with its built-in algebraic
//!   error estimator.
//! * [`adaptivity`]: the solve / estimate / mark / refine loop.
//! * [`problems`]: benchmark problem definitions.

#![no_std]
#![allow(clippy::excessive_precision, clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod adaptivity;
pub mod assembly;
pub mod direct;
mod error;
pub mod estimator;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod space;
pub mod sparse;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

/// Spatial dimension. Every element has `DIM + 1` vertices.
pub const DIM: usize = 2;
