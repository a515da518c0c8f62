use rayon::prelude::*;

use super::ExactSolution;
use crate::adaptivity::IndicatorField;
use crate::basis::{AffineMap, QuadratureRule};
use crate::dpg::{EpsWeights, TrialDofMap};
use crate::mesh::Mesh;
use crate::Result;

/// Field errors in the balanced weighting plus run metadata.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    /// `‖u - u_h‖²`
    pub err_u_sq: f64,
    /// `‖σ - σ_h‖²` with `σ = ε^α ∇u`
    pub err_sigma_sq: f64,
    /// `ε ‖ρ - ρ_h‖²` with `ρ = ε^α Δu`
    pub eps_err_rho_sq: f64,
    pub eta_sq: f64,
    pub n_elements: usize,
    pub cg_iterations: usize,
}

impl ErrorReport {
    /// `‖u - u_h‖² + ‖σ - σ_h‖² + ε ‖ρ - ρ_h‖²`.
    pub fn field_error_sq(&self) -> f64 {
        self.err_u_sq + self.err_sigma_sq + self.eps_err_rho_sq
    }
}

/// Piecewise-constant `[u, σx, σy, ρ]` per element from a coefficient vector.
pub fn element_fields(dofs: &TrialDofMap, n_elements: usize, x: &[f64]) -> Vec<[f64; 4]> {
    (0..n_elements)
        .map(|k| std::array::from_fn(|c| x[dofs.field(k, c)]))
        .collect()
}

/// Element-quadrature L₂ errors of the field variables. `rule` lives on the
/// reference triangle.
pub fn balanced_errors(
    mesh: &Mesh,
    fields: &[[f64; 4]],
    exact: &dyn ExactSolution,
    weights: &EpsWeights,
    rule: &QuadratureRule,
) -> Result<ErrorReport> {
    let scale = weights.eps_alpha();
    let parts: Vec<[f64; 3]> = (0..mesh.n_elements())
        .into_par_iter()
        .map(|k| {
            let map = AffineMap::new(mesh.corners(k), k)?;
            let [uh, sx, sy, rh] = fields[k];
            let mut acc = [0.0; 3];
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                let x = map.apply(*p);
                let w = w * map.det;
                let g = exact.gradient(x);
                acc[0] += w * (exact.u(x) - uh).powi(2);
                acc[1] += w * ((scale * g[0] - sx).powi(2) + (scale * g[1] - sy).powi(2));
                acc[2] += w * (scale * exact.laplacian(x) - rh).powi(2);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let sum = |i: usize| parts.iter().map(|a| a[i]).sum::<f64>();
    Ok(ErrorReport {
        err_u_sq: sum(0),
        err_sigma_sq: sum(1),
        eps_err_rho_sq: weights.eps * sum(2),
        n_elements: mesh.n_elements(),
        ..Default::default()
    })
}

/// `‖u - u_h‖_E` realized as the discrete residual norm `(Σ η_K²)^{1/2}`.
pub fn energy_error(indicators: &IndicatorField) -> f64 {
    indicators.total().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::quadrature_triangle;
    use crate::Point;

    struct Linear;

    impl ExactSolution for Linear {
        fn eps(&self) -> f64 {
            1.0
        }
        fn u(&self, p: Point) -> f64 {
            p[0]
        }
        fn gradient(&self, _: Point) -> [f64; 2] {
            [1.0, 0.0]
        }
        fn laplacian(&self, _: Point) -> f64 {
            0.0
        }
    }

    struct Zero(f64);

    impl ExactSolution for Zero {
        fn eps(&self) -> f64 {
            self.0
        }
        fn u(&self, _: Point) -> f64 {
            0.0
        }
        fn gradient(&self, _: Point) -> [f64; 2] {
            [0.0; 2]
        }
        fn laplacian(&self, _: Point) -> f64 {
            0.0
        }
    }

    fn reference_mesh() -> Mesh {
        Mesh::from_triangles(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]]).unwrap()
    }

    #[test]
    fn zero_against_zero() {
        let rule = quadrature_triangle(4).unwrap();
        let w = EpsWeights::balanced(1e-3).unwrap();
        let r = balanced_errors(&reference_mesh(), &[[0.0; 4]], &Zero(1e-3), &w, &rule).unwrap();
        assert_eq!(r.field_error_sq(), 0.0);
    }

    #[test]
    fn linear_against_best_constant() {
        let rule = quadrature_triangle(4).unwrap();
        let w = EpsWeights::balanced(1.0).unwrap();
        let r = balanced_errors(&reference_mesh(), &[[1.0 / 3.0, 1.0, 0.0, 0.0]], &Linear, &w, &rule).unwrap();
        assert!((r.err_u_sq - 1.0 / 36.0).abs() < 1e-15);
        assert!(r.err_sigma_sq.abs() < 1e-30);
        assert_eq!(r.eps_err_rho_sq, 0.0);
    }

    #[test]
    fn rho_component_carries_eps() {
        let rule = quadrature_triangle(2).unwrap();
        let eps = 1e-6;
        let w = EpsWeights::balanced(eps).unwrap();
        let r = balanced_errors(&reference_mesh(), &[[0.0, 0.0, 0.0, 2.0]], &Zero(eps), &w, &rule).unwrap();
        // ‖ρ_h‖² = 4 · 1/2
        assert!((r.eps_err_rho_sq - eps * 2.0).abs() < 1e-14 * eps);
    }

    #[test]
    fn invariant_under_renumbering() {
        let m = super::super::Manufactured::new(1e-2);
        let mesh = crate::mesh::make_unit_square_mesh(3).unwrap();
        let n = mesh.n_elements();
        let fields: Vec<[f64; 4]> = (0..n).map(|k| [k as f64 * 0.1, 0.2, -0.1, 0.3 * k as f64]).collect();
        let perm: Vec<usize> = (0..n).rev().collect();
        let tris: Vec<[usize; 3]> = perm.iter().map(|&k| mesh.triangles()[k].vertices).collect();
        let permuted = Mesh::from_triangles(mesh.vertices().to_vec(), tris).unwrap();
        let pf: Vec<[f64; 4]> = perm.iter().map(|&k| fields[k]).collect();
        let rule = quadrature_triangle(10).unwrap();
        let w = EpsWeights::balanced(1e-2).unwrap();
        let a = balanced_errors(&mesh, &fields, &m, &w, &rule).unwrap();
        let b = balanced_errors(&permuted, &pf, &m, &w, &rule).unwrap();
        assert!((a.field_error_sq() - b.field_error_sq()).abs() < 1e-13 * a.field_error_sq());
    }
}
