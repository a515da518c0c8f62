//! Element matrices of the ultra-weak formulation.
//!
//! Test functions are ordered `[τx, τy, μ, v]`, each block spanning the
//! order-`r` shape functions; trial columns follow [`super::dofs::local`].
//!
//! With reaction coefficient `c`, the third equation is tested with
//! `v - ε^β Δv / c`. Integrating by parts as for `c = 1` changes only
//! element integrals: `(u, v)` becomes `(u, c v)`, the ρ column becomes
//! `ε^{1-α+β} (ρ, Δv / c)` and the load becomes `(f, v - ε^β Δv / c)`.

use super::dofs::local;
use super::EpsWeights;
use crate::basis::{basis_size, AffineMap, ReferenceElement};
use crate::linalg::DenseMatrix;
use crate::mesh::{Mesh, Skeleton};
use crate::{Error, Point, Result};

pub fn test_dim(order: usize) -> usize {
    4 * basis_size(order)
}

/// Geometry of one element as seen from the skeleton.
#[derive(Clone, Copy, Debug)]
pub struct ElementGeometry {
    pub index: usize,
    pub map: AffineMap,
    /// Outward unit normals of the local edges.
    pub normals: [Point; 3],
    pub lengths: [f64; 3],
    /// Orientation of the local edge relative to the stored edge normal.
    pub signs: [f64; 3],
}

impl ElementGeometry {
    pub fn new(mesh: &Mesh, skeleton: &Skeleton, k: usize) -> Result<Self> {
        Self::from_corners(mesh.corners(k), skeleton.element_signs[k], k)
    }

    pub fn from_corners(corners: [Point; 3], signs: [f64; 3], index: usize) -> Result<Self> {
        let map = AffineMap::new(corners, index)?;
        let mut normals = [[0.0; 2]; 3];
        let mut lengths = [0.0; 3];
        for j in 0..3 {
            let a = corners[j];
            let b = corners[(j + 1) % 3];
            let d = [b[0] - a[0], b[1] - a[1]];
            let l = d[0].hypot(d[1]);
            lengths[j] = l;
            normals[j] = [d[1] / l, -d[0] / l];
        }
        Ok(Self {
            index,
            map,
            normals,
            lengths,
            signs,
        })
    }
}

/// Physical shape data of one element at the volume quadrature points.
pub struct LocalContext<'a> {
    pub geometry: ElementGeometry,
    pub reference: &'a ReferenceElement,
    points: Vec<Point>,
    /// Quadrature weights times `det J`.
    weights: Vec<f64>,
    gradients: Vec<[f64; 2]>,
    laplacians: Vec<f64>,
}

impl<'a> LocalContext<'a> {
    pub fn new(geometry: ElementGeometry, reference: &'a ReferenceElement) -> Self {
        let table = &reference.volume;
        let rule = &reference.volume_rule;
        let map = &geometry.map;
        let n = table.size();
        let nq = rule.len();
        let mut gradients = Vec::with_capacity(n * nq);
        let mut laplacians = Vec::with_capacity(n * nq);
        for q in 0..nq {
            for (g, h) in table.gradients_at(q).iter().zip(table.hessians_at(q)) {
                gradients.push(map.gradient(*g));
                laplacians.push(map.laplacian(*h));
            }
        }
        Self {
            geometry,
            reference,
            points: rule.points.iter().map(|&p| map.apply(p)).collect(),
            weights: rule.weights.iter().map(|w| w * map.det).collect(),
            gradients,
            laplacians,
        }
    }

    fn n(&self) -> usize {
        self.reference.volume.size()
    }

    fn at(&self, q: usize) -> (&[f64], &[[f64; 2]], &[f64]) {
        let n = self.n();
        (
            self.reference.volume.values_at(q),
            &self.gradients[q * n..(q + 1) * n],
            &self.laplacians[q * n..(q + 1) * n],
        )
    }

    fn reaction_values(&self, c: Option<&(dyn Fn(Point) -> f64 + Send + Sync)>) -> Result<Vec<f64>> {
        match c {
            None => Ok(vec![1.0; self.points.len()]),
            Some(c) => self
                .points
                .iter()
                .map(|&p| {
                    let v = c(p);
                    if v > 0.0 && v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Error::InvalidCoefficient { value: v, x: p[0], y: p[1] })
                    }
                })
                .collect(),
        }
    }

    /// Gram matrix of the test inner product
    /// `ε^{-2α}(τ,τ') + (div τ, div τ') + ε^{-2β}(μ,μ') + (∇μ,∇μ')
    ///  + (v,v') + ε^{2(β-α)}(∇v,∇v') + ε^{2(1-α)}(Δv,Δv')`.
    pub fn gram(&self, w: &EpsWeights) -> DenseMatrix {
        let n = self.n();
        // mass, ∂x∂x, ∂x∂y, ∂y∂y and Δ·Δ moment matrices
        let mut m = vec![0.0; n * n];
        let mut kxx = vec![0.0; n * n];
        let mut kxy = vec![0.0; n * n];
        let mut kyy = vec![0.0; n * n];
        let mut kll = vec![0.0; n * n];
        for (q, &wq) in self.weights.iter().enumerate() {
            let (val, grad, lap) = self.at(q);
            for i in 0..n {
                let (vi, gi, li) = (wq * val[i], grad[i], wq * lap[i]);
                let (gxi, gyi) = (wq * gi[0], wq * gi[1]);
                let row = i * n;
                for j in 0..n {
                    let gj = grad[j];
                    m[row + j] += vi * val[j];
                    kxx[row + j] += gxi * gj[0];
                    kxy[row + j] += gxi * gj[1];
                    kyy[row + j] += gyi * gj[1];
                    kll[row + j] += li * lap[j];
                }
            }
        }

        let mut g = DenseMatrix::zeros(4 * n, 4 * n);
        let (tx, ty, mu, v) = (0, n, 2 * n, 3 * n);
        for i in 0..n {
            for j in 0..n {
                let ij = i * n + j;
                let stiff = kxx[ij] + kyy[ij];
                g[(tx + i, tx + j)] = w.norm_tau * m[ij] + kxx[ij];
                g[(ty + i, ty + j)] = w.norm_tau * m[ij] + kyy[ij];
                // (∂x τx, ∂y τy) couples the two flux components
                g[(tx + i, ty + j)] = kxy[ij];
                g[(ty + j, tx + i)] = kxy[ij];
                g[(mu + i, mu + j)] = w.norm_mu * m[ij] + stiff;
                g[(v + i, v + j)] = m[ij] + w.norm_grad_v * stiff + w.norm_laplace_v * kll[ij];
            }
        }
        g
    }

    /// Trial-to-test coupling for `c ≡ 1`.
    pub fn b(&self, w: &EpsWeights) -> DenseMatrix {
        self.b_with_reaction(w, None).expect("unit reaction is valid")
    }

    /// Trial-to-test coupling with reaction coefficient `c` (`None` means 1).
    pub fn b_with_reaction(&self, w: &EpsWeights, c: Option<&(dyn Fn(Point) -> f64 + Send + Sync)>) -> Result<DenseMatrix> {
        let n = self.n();
        let (tx, ty, mu, v) = (0, n, 2 * n, 3 * n);
        let cvals = self.reaction_values(c)?;
        let mut b = DenseMatrix::zeros(4 * n, local::SIZE);

        for (q, &wq) in self.weights.iter().enumerate() {
            let (val, grad, lap) = self.at(q);
            let cq = cvals[q];
            for i in 0..n {
                let (phi, g, l) = (wq * val[i], [wq * grad[i][0], wq * grad[i][1]], wq * lap[i]);
                // (u, div τ + c v)
                b[(tx + i, local::U)] += g[0];
                b[(ty + i, local::U)] += g[1];
                b[(v + i, local::U)] += cq * phi;
                // (σ, ε^{-α} τ + ∇μ + (ε^{1-α} + ε^{β-α}) ∇v)
                b[(tx + i, local::SIGMA_X)] += w.sigma_tau * phi;
                b[(ty + i, local::SIGMA_Y)] += w.sigma_tau * phi;
                b[(mu + i, local::SIGMA_X)] += g[0];
                b[(mu + i, local::SIGMA_Y)] += g[1];
                b[(v + i, local::SIGMA_X)] += w.sigma_grad_v * g[0];
                b[(v + i, local::SIGMA_Y)] += w.sigma_grad_v * g[1];
                // (ρ, μ + ε^{1-α+β} Δv / c)
                b[(mu + i, local::RHO)] += phi;
                b[(v + i, local::RHO)] += w.rho_laplace_v * l / cq;
            }
        }

        let geo = &self.geometry;
        let map = &geo.map;
        let rule = &self.reference.edge_rule;
        for e in 0..3 {
            let table = &self.reference.edges[e];
            let nrm = geo.normals[e];
            let len = geo.lengths[e];
            let sign = geo.signs[e];
            let (va, vb) = (e, (e + 1) % 3);
            for (q, (pt, &wq)) in rule.points.iter().zip(&rule.weights).enumerate() {
                let t = pt[0];
                let ds = wq * len;
                let hats = [(va, 1.0 - t), (vb, t)];
                for i in 0..n {
                    let phi = table.value(q, i);
                    let gn = {
                        let g = map.gradient(table.gradient(q, i));
                        g[0] * nrm[0] + g[1] * nrm[1]
                    };
                    for &(vert, hat) in &hats {
                        // -<û_a, τ·n>
                        b[(tx + i, local::TRACE_A + vert)] -= ds * hat * nrm[0] * phi;
                        b[(ty + i, local::TRACE_A + vert)] -= ds * hat * nrm[1] * phi;
                        // -ε^β <û_b, ∇v·n>
                        b[(v + i, local::TRACE_B + vert)] -= w.trace_b * ds * hat * gn;
                    }
                    // -<σ̂_a, μ> and -ε^{1-α} <σ̂_b, v>, σ̂ stored along the edge normal
                    b[(mu + i, local::FLUX_A + e)] -= sign * ds * phi;
                    b[(v + i, local::FLUX_B + e)] -= w.flux_b * sign * ds * phi;
                }
            }
        }
        Ok(b)
    }

    /// Load `(f, v - ε^β Δv / c)`; only the v block is nonzero.
    pub fn load(
        &self,
        w: &EpsWeights,
        f: &(dyn Fn(Point) -> f64 + Send + Sync),
        c: Option<&(dyn Fn(Point) -> f64 + Send + Sync)>,
    ) -> Result<Vec<f64>> {
        let n = self.n();
        let cvals = self.reaction_values(c)?;
        let mut out = vec![0.0; 4 * n];
        for (q, (&p, &wq)) in self.points.iter().zip(&self.weights).enumerate() {
            let fq = f(p);
            if fq == 0.0 {
                continue;
            }
            let (val, _, lap) = self.at(q);
            for i in 0..n {
                out[3 * n + i] += wq * fq * (val[i] - w.trace_b * lap[i] / cvals[q]);
            }
        }
        Ok(out)
    }

    /// Quadrature points and weights (including `det J`) on the element.
    pub fn quadrature(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}
