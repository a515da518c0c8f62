//! Ultra-weak DPG discretization: ε-weights, trial numbering, element
//! systems and the global normal equations.

mod assembly;
mod dofs;
mod local;
mod weights;


use std::sync::Arc;

pub use assembly::{assemble_normal_equations, Discretization, FactoredLocal, LocalMatrices, NormalEquations};
pub use dofs::{local as local_index, TrialDof, TrialDofMap};
pub use local::{test_dim, ElementGeometry, LocalContext};
pub use weights::{EpsWeights, DEFAULT_ALPHA, DEFAULT_BETA};

use crate::Point;

/// A scalar field on the domain.
pub type Field = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Data of `-ε Δu + c u = f` with `u = g` on the boundary.
#[derive(Clone)]
pub struct Problem {
    pub load: Field,
    /// `None` means `c ≡ 1`.
    pub reaction: Option<Field>,
    /// `None` means homogeneous boundary data.
    pub dirichlet: Option<Field>,
}

impl Problem {
    pub fn new(load: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            load: Arc::new(load),
            reaction: None,
            dirichlet: None,
        }
    }

    pub fn with_reaction(mut self, c: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.reaction = Some(Arc::new(c));
        self
    }

    pub fn with_dirichlet(mut self, g: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.dirichlet = Some(Arc::new(g));
        self
    }

    /// Scales the load (and boundary data) by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let f = self.load.clone();
        let g = self.dirichlet.clone();
        Self {
            load: Arc::new(move |p| s * f(p)),
            reaction: self.reaction.clone(),
            dirichlet: g.map(|g| Arc::new(move |p| s * g(p)) as Field),
        }
    }
}

impl std::fmt::Debug for Problem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Problem")
            .field("variable_reaction", &self.reaction.is_some())
            .field("dirichlet", &self.dirichlet.is_some())
            .finish()
    }
}
