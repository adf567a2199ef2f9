//! Sparse Cholesky solves for symmetric positive definite systems, backed by
//! faer. Used for the coarse problem and as the reference solution in
//! validation.

use alloc::format;
use alloc::vec::Vec;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::sparse::{SparseColMat, Triplet};
use faer::{MatMut, Side};

use crate::sparse::{CsrMatrix, DenseCholesky};
use crate::{Error, Result};

/// Below this size a dense factorization is used.
pub const DENSE_LIMIT: usize = 2000;

#[derive(Debug)]
enum Factor {
    Dense(DenseCholesky),
    Sparse(Llt<usize, f64>),
}

/// Factorization of a symmetric positive definite matrix.
#[derive(Debug)]
pub struct Cholesky {
    n: usize,
    factor: Factor,
}

impl Cholesky {
    /// Dense below [`DENSE_LIMIT`] rows, sparse otherwise.
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        if a.nrows() <= DENSE_LIMIT {
            Self::dense(a)
        } else {
            Self::sparse(a)
        }
    }

    pub fn dense(a: &CsrMatrix) -> Result<Self> {
        check_square(a)?;
        let n = a.nrows();
        let mut d = alloc::vec![0.0; n * n];
        for (i, j, v) in a.triplets() {
            d[i * n + j] = v;
        }
        Ok(Self { n, factor: Factor::Dense(DenseCholesky::factor(n, &d)?) })
    }

    pub fn sparse(a: &CsrMatrix) -> Result<Self> {
        check_square(a)?;
        let n = a.nrows();
        // CSR of a symmetric matrix read as CSC is the same matrix; keep the
        // lower triangle.
        let trips: Vec<Triplet<usize, usize, f64>> =
            a.triplets().filter(|&(i, j, _)| j <= i).map(|(row, col, val)| Triplet { row, col, val }).collect();
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trips)
            .map_err(|e| Error::DirectSolve(format!("{e:?}")))?;
        let llt = m.as_ref().sp_cholesky(Side::Lower).map_err(|e| Error::DirectSolve(format!("{e:?}")))?;
        Ok(Self { n, factor: Factor::Sparse(llt) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        match &self.factor {
            Factor::Dense(f) => f.solve_in_place(b),
            Factor::Sparse(llt) => {
                let rhs = MatMut::from_column_major_slice_mut(b, self.n, 1);
                llt.solve_in_place(rhs);
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

fn check_square(a: &CsrMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    Ok(())
}

/// Solves `A x = b` with a fresh factorization.
pub fn solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.len() });
    }
    Ok(Cholesky::factor(a)?.solve(b))
}
