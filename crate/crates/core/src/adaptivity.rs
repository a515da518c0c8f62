//! Residual-based error indicators, Dörfler marking and the
//! solve–estimate–mark–refine loop.

use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use crate::basis::ReferenceElement;
use crate::dpg::{assemble_normal_equations, Discretization, EpsWeights, NormalEquations, Problem, TrialDofMap};
use crate::experiment::ExperimentConfig;
use crate::linalg::{cg_solve, CgOptions};
use crate::mesh::{build_skeleton, Mesh, Skeleton};
use crate::verification::{balanced_errors, element_fields, ErrorReport, ExactSolution};
use crate::{Error, Result};

/// Element indicators `η_K² = ‖G_K^{-1/2}(ℓ_K - B_K x)‖²`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IndicatorField {
    pub values: Vec<f64>,
}

impl IndicatorField {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `η² = Σ_K η_K²`.
    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Indicators of the coefficient vector `x` from the factored element data.
pub fn local_indicators(system: &NormalEquations, x: &[f64]) -> IndicatorField {
    IndicatorField::new(system.residuals_sq(x))
}

/// Smallest set `M` with `Σ_{K∈M} η_K² ≥ θ Σ_K η_K²`, returned in ascending
/// element order. Elements are taken by decreasing indicator, ties by
/// ascending index.
pub fn mark_doerfler(eta: &IndicatorField, theta: f64) -> Result<Vec<usize>> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta must lie in (0, 1], got {theta}")));
    }
    let mut order: Vec<usize> = (0..eta.len()).collect();
    order.sort_by(|&a, &b| eta.values[b].total_cmp(&eta.values[a]));
    // summing in the same order makes θ = 1 stop exactly at the last nonzero
    let total: f64 = order.iter().map(|&k| eta.values[k]).sum();
    if total <= 0.0 {
        return Ok(Vec::new());
    }
    let goal = theta * total;
    let mut acc = 0.0;
    let mut count = 0;
    for &k in &order {
        if acc >= goal {
            break;
        }
        acc += eta.values[k];
        count += 1;
    }
    let mut marked = order[..count].to_vec();
    marked.sort_unstable();
    Ok(marked)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// Every element bisected twice per step.
    Uniform,
    /// Dörfler marking followed by newest-vertex bisection.
    Adaptive,
}

impl FromStr for Refinement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "adaptive" => Ok(Self::Adaptive),
            _ => Err(Error::InvalidArgument(format!("unknown refinement '{s}'"))),
        }
    }
}

impl std::fmt::Display for Refinement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Uniform => "uniform",
            Self::Adaptive => "adaptive",
        })
    }
}

/// Discrete solution on one mesh.
#[derive(Debug)]
pub struct MeshSolution {
    pub skeleton: Skeleton,
    pub dofs: TrialDofMap,
    pub system: NormalEquations,
    /// Free trial coefficients.
    pub x: Vec<f64>,
    pub indicators: IndicatorField,
    pub cg_iterations: usize,
}

/// Assembles and solves the normal equations on `mesh`.
pub fn solve_on_mesh(
    mesh: &Mesh,
    problem: &Problem,
    weights: &EpsWeights,
    reference: &ReferenceElement,
    cg: &CgOptions,
) -> Result<MeshSolution> {
    let skeleton = build_skeleton(mesh)?;
    let dofs = TrialDofMap::with_dirichlet(mesh, &skeleton, problem.dirichlet.as_deref().map(|g| g as _));
    let disc = Discretization {
        mesh,
        skeleton: &skeleton,
        dofs: &dofs,
        weights,
        reference,
        problem,
    };
    let system = assemble_normal_equations(&disc)?;
    let sol = cg_solve(&system.matrix, &system.rhs, cg)?;
    let indicators = local_indicators(&system, &sol.x);
    Ok(MeshSolution {
        skeleton,
        dofs,
        system,
        x: sol.x,
        indicators,
        cg_iterations: sol.iterations,
    })
}

/// One iterate of the adaptive loop.
#[derive(Clone, Debug)]
pub struct StepResult {
    pub step: usize,
    pub mesh: Mesh,
    /// Free trial coefficients.
    pub solution: Vec<f64>,
    /// `[u, σx, σy, ρ]` per element.
    pub fields: Vec<[f64; 4]>,
    pub indicators: IndicatorField,
    /// Elements selected for refinement after this step.
    pub marked: Vec<usize>,
    /// Field errors (zero without an exact solution), `η²`, `#T`, CG iterations.
    pub report: ErrorReport,
    pub has_exact: bool,
    pub wall_ms: f64,
}

/// Runs the loop and collects every iterate.
pub fn adaptive_loop(config: &ExperimentConfig) -> Result<Vec<StepResult>> {
    let mut steps = Vec::new();
    adaptive_loop_with(config, |s| {
        steps.push(s.clone());
        Ok(())
    })?;
    Ok(steps)
}

/// Solve → estimate → mark → refine until the next mesh would exceed
/// `max_elements` (or `max_steps` iterates were produced). The initial mesh is
/// always solved. `on_step` sees each iterate as soon as it is available.
pub fn adaptive_loop_with(
    config: &ExperimentConfig,
    mut on_step: impl FnMut(&StepResult) -> Result<()>,
) -> Result<()> {
    config.validate()?;
    let setup = config.setup()?;
    let weights = EpsWeights::new(config.eps, config.alpha, config.beta)?;
    let reference = ReferenceElement::new(config.test_order, config.quadrature_degree())?;
    let cg = CgOptions {
        rel_tol: config.cg_tol,
        max_iter: config.cg_max_iter,
        jacobi: config.jacobi,
    };
    let exact: Option<Arc<dyn ExactSolution>> = setup.exact;
    let mut mesh = setup.mesh;
    let mut step = 0;
    loop {
        let start = Instant::now();
        let sol = solve_on_mesh(&mesh, &setup.problem, &weights, &reference, &cg)?;
        let fields = element_fields(&sol.dofs, mesh.n_elements(), &sol.x);
        let mut report = match &exact {
            Some(e) => balanced_errors(&mesh, &fields, e.as_ref(), &weights, &reference.volume_rule)?,
            None => ErrorReport {
                n_elements: mesh.n_elements(),
                ..Default::default()
            },
        };
        report.eta_sq = sol.indicators.total();
        report.cg_iterations = sol.cg_iterations;
        let marked = match config.refinement {
            Refinement::Uniform => (0..mesh.n_elements()).collect(),
            Refinement::Adaptive => mark_doerfler(&sol.indicators, config.theta)?,
        };
        let next = match config.refinement {
            Refinement::Uniform => mesh.uniform_refine(),
            Refinement::Adaptive => mesh.refine_nvb(&marked),
        };
        let result = StepResult {
            step,
            mesh,
            solution: sol.x,
            fields,
            indicators: sol.indicators,
            marked,
            report,
            has_exact: exact.is_some(),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        on_step(&result)?;
        step += 1;
        let done = next.n_elements() > config.max_elements
            || next.n_elements() == result.mesh.n_elements()
            || config.max_steps.is_some_and(|m| step >= m);
        if done {
            return Ok(());
        }
        mesh = next;
    }
}
