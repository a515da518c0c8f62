//! Hierarchical Lobatto shape functions on the reference triangle.
//!
//! With barycentric coordinates `λ1 = 1 - x - y`, `λ2 = x`, `λ3 = y` the
//! basis of `P^p` consists of
//!
//! * vertex functions `λ1, λ2, λ3`,
//! * edge functions `λi λj φ_{k-2}(λj - λi)` for `k = 2..=p` on the edges
//!   `(1,2), (2,3), (3,1)`,
//! * bubbles `λ1 λ2 λ3 φ_{n1-1}(λ3 - λ2) φ_{n2-1}(λ2 - λ1)` with
//!   `n1, n2 >= 1`, `n1 + n2 <= p - 1`,
//!
//! where `φ_j` are the Lobatto kernel functions, `l_{j+2}(t) = (1-t²)/4 φ_j(t)`
//! for the normalized integrated Legendre polynomials `l_k`. Functions are
//! ordered by degree so the basis of order `p` is a prefix of that of `p+1`.
//! For `p = 0` the basis is the constant one.

use super::poly::{legendre_coefficients, Poly2};
use crate::{Error, Point, Result};

pub const MAX_ORDER: usize = 6;

pub fn basis_size(p: usize) -> usize {
    (p + 1) * (p + 2) / 2
}

/// Coefficients of the Lobatto kernel `φ_j(t) = -2 sqrt(2(2k-1)) / (k(k-1)) P'_{k-1}(t)`, `k = j + 2`.
fn kernel(j: usize) -> Vec<f64> {
    let k = j + 2;
    let legendre = legendre_coefficients(k - 1);
    let pk1 = &legendre[k - 1];
    let scale = -2.0 * (2.0 * (2 * k - 1) as f64).sqrt() / (k * (k - 1)) as f64;
    pk1.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| scale * i as f64 * c)
        .collect()
}

/// Shape functions of order `p` in the monomial basis.
pub fn lobatto_basis(p: usize) -> Result<Vec<Poly2>> {
    if p > MAX_ORDER {
        return Err(Error::UnsupportedOrder {
            order: p,
            max: MAX_ORDER,
        });
    }
    if p == 0 {
        return Ok(vec![Poly2::constant(1.0)]);
    }
    let l1 = Poly2::affine(1.0, -1.0, -1.0);
    let l2 = Poly2::affine(0.0, 1.0, 0.0);
    let l3 = Poly2::affine(0.0, 0.0, 1.0);
    let mut basis = vec![l1.clone(), l2.clone(), l3.clone()];

    let edges = [(&l1, &l2), (&l2, &l3), (&l3, &l1)];
    let bubble = &(&l1 * &l2) * &l3;
    for k in 2..=p {
        for (li, lj) in edges {
            let t = lj - li;
            basis.push(&(li * lj) * &t.compose(&kernel(k - 2)));
        }
        for n1 in 1..k - 1 {
            let n2 = k - 1 - n1;
            let a = (&l3 - &l2).compose(&kernel(n1 - 1));
            let b = (&l2 - &l1).compose(&kernel(n2 - 1));
            basis.push(&bubble * &(&a * &b));
        }
    }
    debug_assert_eq!(basis.len(), basis_size(p));
    Ok(basis)
}

/// Values, gradients and Hessians of the order-`p` basis at reference points.
///
/// Tables are stored point-major: entry `(q, i)` lives at `q * size + i`.
#[derive(Clone, Debug)]
pub struct ShapeTable {
    order: usize,
    size: usize,
    n_points: usize,
    values: Vec<f64>,
    gradients: Vec<[f64; 2]>,
    /// `[∂xx, ∂xy, ∂yy]`
    hessians: Vec<[f64; 3]>,
}

impl ShapeTable {
    pub fn new(p: usize, points: &[Point]) -> Result<Self> {
        let basis = lobatto_basis(p)?;
        let derivs: Vec<[Poly2; 5]> = basis
            .iter()
            .map(|f| {
                let (fx, fy) = (f.dx(), f.dy());
                [fx.clone(), fy.clone(), fx.dx(), fx.dy(), fy.dy()]
            })
            .collect();
        let size = basis.len();
        let mut values = Vec::with_capacity(points.len() * size);
        let mut gradients = Vec::with_capacity(points.len() * size);
        let mut hessians = Vec::with_capacity(points.len() * size);
        for &pt in points {
            for (f, d) in basis.iter().zip(&derivs) {
                values.push(f.eval(pt));
                gradients.push([d[0].eval(pt), d[1].eval(pt)]);
                hessians.push([d[2].eval(pt), d[3].eval(pt), d[4].eval(pt)]);
            }
        }
        Ok(Self {
            order: p,
            size,
            n_points: points.len(),
            values,
            gradients,
            hessians,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn values_at(&self, q: usize) -> &[f64] {
        &self.values[q * self.size..(q + 1) * self.size]
    }

    pub fn gradients_at(&self, q: usize) -> &[[f64; 2]] {
        &self.gradients[q * self.size..(q + 1) * self.size]
    }

    pub fn hessians_at(&self, q: usize) -> &[[f64; 3]] {
        &self.hessians[q * self.size..(q + 1) * self.size]
    }

    pub fn value(&self, q: usize, i: usize) -> f64 {
        self.values[q * self.size + i]
    }

    pub fn gradient(&self, q: usize, i: usize) -> [f64; 2] {
        self.gradients[q * self.size + i]
    }

    /// Reference Laplacian `∂xx + ∂yy`.
    pub fn laplacian(&self, q: usize, i: usize) -> f64 {
        let h = self.hessians[q * self.size + i];
        h[0] + h[2]
    }
}
