//! Discontinuous Petrov–Galerkin solver for the singularly perturbed
//! reaction-diffusion problem `-ε Δu + c u = f` on polygonal domains.
//!
//! The discretization uses the ultra-weak first-order formulation with
//! piecewise-constant field variables `(u, σ, ρ)`, piecewise-linear traces
//! and piecewise-constant fluxes on the mesh skeleton, and broken polynomial
//! test spaces of order `r`. Optimal test functions are approximated element
//! by element through the Gram matrix of an ε-weighted test norm, which yields
//! a symmetric positive definite normal-equation system and a built-in local
//! error estimator used to drive newest-vertex-bisection adaptivity.

pub mod adaptivity;
pub mod basis;
pub mod dpg;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod mesh;
pub mod verification;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];

pub mod prelude {
    pub use crate::adaptivity::{adaptive_loop, mark_doerfler, IndicatorField, Refinement, StepResult};
    pub use crate::basis::{AffineMap, QuadratureRule, ShapeTable};
    pub use crate::dpg::{assemble_normal_equations, EpsWeights, NormalEquations, Problem, TrialDofMap};
    pub use crate::experiment::{ExperimentConfig, ProblemKind};
    pub use crate::linalg::{cg_solve, CgOptions, DenseCholesky, DenseMatrix, SparseSymmetric};
    pub use crate::mesh::{Mesh, Skeleton};
    pub use crate::verification::{balanced_errors, rate_fit, ErrorReport, ExactSolution};
    pub use crate::{Error, Point, Result};
}
