//! Dense Cholesky for Gram blocks, symmetric sparse storage and conjugate gradients.

mod cg;
mod dense;
mod sparse;

pub use cg::{cg_solve, cg_solve_observed, CgOptions, CgSolution};
pub use dense::{DenseCholesky, DenseMatrix};
pub use sparse::{SparseSymmetric, TripletBuilder};
