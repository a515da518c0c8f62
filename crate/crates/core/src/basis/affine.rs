use crate::{Error, Point, Result};

/// `x = a + J ξ` from the reference triangle onto a physical triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub origin: Point,
    /// Columns are the edge vectors `p1 - p0`, `p2 - p0`.
    pub jacobian: [[f64; 2]; 2],
    pub det: f64,
    pub inv_transpose: [[f64; 2]; 2],
}

impl AffineMap {
    /// Map onto the triangle with the given corners; `element` only labels errors.
    pub fn new(corners: [Point; 3], element: usize) -> Result<Self> {
        let [p0, p1, p2] = corners;
        let jacobian = [[p1[0] - p0[0], p2[0] - p0[0]], [p1[1] - p0[1], p2[1] - p0[1]]];
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        let scale = jacobian.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(det > 1e-14 * scale * scale) {
            return Err(Error::SingularMap {
                element,
                area: 0.5 * det,
            });
        }
        let inv_transpose = [
            [jacobian[1][1] / det, -jacobian[1][0] / det],
            [-jacobian[0][1] / det, jacobian[0][0] / det],
        ];
        Ok(Self {
            origin: p0,
            jacobian,
            det,
            inv_transpose,
        })
    }

    pub fn apply(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            self.origin[0] + j[0][0] * xi[0] + j[0][1] * xi[1],
            self.origin[1] + j[1][0] * xi[0] + j[1][1] * xi[1],
        ]
    }

    /// Physical gradient `J⁻ᵀ ĝ`.
    pub fn gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let m = &self.inv_transpose;
        [m[0][0] * g[0] + m[0][1] * g[1], m[1][0] * g[0] + m[1][1] * g[1]]
    }

    /// Coefficients `[c_xx, c_xy, c_yy]` with `Δu = c_xx ∂ξξ + c_xy ∂ξη + c_yy ∂ηη`,
    /// from the constant metric `J⁻¹ J⁻ᵀ`.
    pub fn laplacian_weights(&self) -> [f64; 3] {
        // J⁻ᵀ rows are the physical gradients of ξ and η
        let gx = self.inv_transpose[0];
        let gy = self.inv_transpose[1];
        // Δ = Σ_ab (∇ξ_a · ∇ξ_b) ∂_ab, with ∇ξ_a = column a of J⁻ᵀ
        let a = [gx[0], gy[0]];
        let b = [gx[1], gy[1]];
        [
            a[0] * a[0] + a[1] * a[1],
            2.0 * (a[0] * b[0] + a[1] * b[1]),
            b[0] * b[0] + b[1] * b[1],
        ]
    }

    pub fn laplacian(&self, hessian: [f64; 3]) -> f64 {
        let w = self.laplacian_weights();
        w[0] * hessian[0] + w[1] * hessian[1] + w[2] * hessian[2]
    }

    pub fn area(&self) -> f64 {
        0.5 * self.det
    }
}
