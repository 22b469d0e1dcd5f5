//! Sparse and small dense linear algebra.

pub mod cg;
pub mod constrained;
pub mod csr;
pub mod dense;

pub use cg::{cg_solve, cg_solve_monitored, CgOptions, CgOutcome, Preconditioner};
pub use constrained::{
    constrained_solve, constrained_solve_with, ConstraintProjector, SaddleSystem, SparseRow,
};
pub use csr::{axpy, dot, norm2, norm_inf, CsrMatrix};
pub use dense::{Cholesky, DenseMatrix, Lu};
