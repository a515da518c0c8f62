//! Experiment configuration, problem setup and CSV output.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use crate::adaptivity::{Refinement, StepResult};
use crate::basis::{ReferenceElement, MAX_ORDER, MAX_QUADRATURE_DEGREE};
use crate::dpg::{Problem, DEFAULT_ALPHA, DEFAULT_BETA};
use crate::mesh::{make_lshape_mesh, make_unit_square_mesh, Mesh};
use crate::verification::{load_unaligned, problem_from_exact, ExactSolution, Manufactured};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    /// Boundary layers on the unit square, variable reaction, inhomogeneous
    /// boundary data; exact solution known.
    Manufactured,
    /// Unit square, `f` the indicator of a disk not aligned with the mesh.
    Unaligned,
    /// L-shaped domain, `f = 1`.
    LShape,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Manufactured => "manufactured",
            Self::Unaligned => "unaligned",
            Self::LShape => "lshape",
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "manufactured" => Ok(Self::Manufactured),
            "unaligned" => Ok(Self::Unaligned),
            "lshape" => Ok(Self::LShape),
            _ => Err(Error::InvalidArgument(format!("unknown problem '{s}'"))),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub test_order: usize,
    pub refinement: Refinement,
    pub theta: f64,
    pub max_elements: usize,
    /// Stop after this many solved meshes.
    pub max_steps: Option<usize>,
    pub cg_tol: f64,
    pub cg_max_iter: Option<usize>,
    pub jacobi: bool,
    /// Defaults to `2 r + 6`, capped at the largest available rule.
    pub quadrature: Option<usize>,
    /// Replaces the built-in initial mesh.
    pub initial_mesh: Option<Mesh>,
    pub output_dir: Option<PathBuf>,
    pub dump_meshes: bool,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Manufactured,
            eps: 1.0,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            test_order: 4,
            refinement: Refinement::Adaptive,
            theta: 0.75,
            max_elements: 20_000,
            max_steps: None,
            cg_tol: 1e-10,
            cg_max_iter: None,
            jacobi: false,
            quadrature: None,
            initial_mesh: None,
            output_dir: None,
            dump_meshes: false,
            seed: 0,
        }
    }
}

/// Data and initial mesh of one experiment.
pub struct ProblemSetup {
    pub problem: Problem,
    pub exact: Option<Arc<dyn ExactSolution>>,
    pub mesh: Mesh,
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind) -> Self {
        Self {
            problem,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be positive, got {}", self.eps));
        }
        if self.test_order > MAX_ORDER {
            return Err(Error::UnsupportedOrder {
                order: self.test_order,
                max: MAX_ORDER,
            });
        }
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return bad(format!("theta must lie in (0, 1], got {}", self.theta));
        }
        if !(self.cg_tol > 0.0 && self.cg_tol < 1.0) {
            return bad(format!("cg tolerance must lie in (0, 1), got {}", self.cg_tol));
        }
        if self.max_steps == Some(0) {
            return bad("max_steps must be at least 1".into());
        }
        Ok(())
    }

    pub fn quadrature_degree(&self) -> usize {
        self.quadrature
            .unwrap_or_else(|| ReferenceElement::default_degree(self.test_order).min(MAX_QUADRATURE_DEGREE))
    }

    pub fn setup(&self) -> Result<ProblemSetup> {
        let (problem, exact, mesh) = match self.problem {
            ProblemKind::Manufactured => {
                let exact: Arc<dyn ExactSolution> = Arc::new(Manufactured::new(self.eps));
                (problem_from_exact(exact.clone()), Some(exact), make_unit_square_mesh(2)?)
            }
            ProblemKind::Unaligned => (Problem::new(load_unaligned), None, make_unit_square_mesh(2)?),
            ProblemKind::LShape => (Problem::new(|_| 1.0), None, make_lshape_mesh()),
        };
        Ok(ProblemSetup {
            problem,
            exact,
            mesh: self.initial_mesh.clone().unwrap_or(mesh),
        })
    }
}

pub const CSV_HEADER: &str = "step,n_elements,eta_sq,err_u_sq,err_sigma_sq,eps_err_rho_sq,cg_iters,wall_ms";

/// One CSV line (without newline); floats carry 17 significant digits.
pub fn csv_row(step: &StepResult) -> String {
    let r = &step.report;
    let mut s = String::new();
    let _ = write!(s, "{},{},{:.16e},", step.step, r.n_elements, r.eta_sq);
    if step.has_exact {
        let _ = write!(s, "{:.16e},{:.16e},{:.16e},", r.err_u_sq, r.err_sigma_sq, r.eps_err_rho_sq);
    } else {
        s.push_str(",,,");
    }
    let _ = write!(s, "{},{:.3}", r.cg_iterations, step.wall_ms);
    s
}
