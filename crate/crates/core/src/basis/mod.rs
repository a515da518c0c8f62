//! Reference-element polynomial spaces, quadrature and element maps.

mod affine;
pub mod poly;
mod quadrature;
mod shape;

pub use affine::AffineMap;
pub use quadrature::{gauss_legendre, quadrature_edge, quadrature_triangle, QuadratureRule, MAX_QUADRATURE_DEGREE};
pub use shape::{basis_size, lobatto_basis, ShapeTable, MAX_ORDER};

use crate::{Point, Result};

pub const REFERENCE_VERTICES: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Shape tables of one order evaluated at the volume and edge quadrature
/// points of the reference triangle.
#[derive(Clone, Debug)]
pub struct ReferenceElement {
    pub order: usize,
    pub volume_rule: QuadratureRule,
    pub volume: ShapeTable,
    /// Gauss rule on `[0, 1]`; the parameter runs from local vertex `k`
    /// to local vertex `k + 1` on edge `k`.
    pub edge_rule: QuadratureRule,
    pub edges: [ShapeTable; 3],
}

impl ReferenceElement {
    pub fn new(order: usize, quadrature_degree: usize) -> Result<Self> {
        let volume_rule = quadrature_triangle(quadrature_degree)?;
        let volume = ShapeTable::new(order, &volume_rule.points)?;
        let edge_rule = quadrature_edge(quadrature_degree)?;
        let edge_table = |k: usize| {
            let a = REFERENCE_VERTICES[k];
            let b = REFERENCE_VERTICES[(k + 1) % 3];
            let pts: Vec<Point> = edge_rule
                .points
                .iter()
                .map(|p| {
                    let t = p[0];
                    [(1.0 - t) * a[0] + t * b[0], (1.0 - t) * a[1] + t * b[1]]
                })
                .collect();
            ShapeTable::new(order, &pts)
        };
        let edges = [edge_table(0)?, edge_table(1)?, edge_table(2)?];
        Ok(Self {
            order,
            volume_rule,
            volume,
            edge_rule,
            edges,
        })
    }

    /// Default quadrature degree `2 r + 6` for test order `r`.
    pub fn default_degree(order: usize) -> usize {
        2 * order + 6
    }
}
