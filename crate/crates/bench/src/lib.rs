//! Fixtures shared by the criterion benchmarks.

use std::sync::Arc;

use dpg_core::basis::ReferenceElement;
use dpg_core::dpg::{EpsWeights, Problem};
use dpg_core::mesh::{make_unit_square_mesh, Mesh};
use dpg_core::verification::{problem_from_exact, Manufactured};

pub struct Fixture {
    pub mesh: Mesh,
    pub problem: Problem,
    pub weights: EpsWeights,
    pub reference: ReferenceElement,
}

/// Manufactured problem on a uniform square mesh with `2 n²` elements.
pub fn manufactured(n: usize, eps: f64, test_order: usize) -> Fixture {
    Fixture {
        mesh: make_unit_square_mesh(n).unwrap(),
        problem: problem_from_exact(Arc::new(Manufactured::new(eps))),
        weights: EpsWeights::balanced(eps).unwrap(),
        reference: ReferenceElement::new(test_order, ReferenceElement::default_degree(test_order)).unwrap(),
    }
}
