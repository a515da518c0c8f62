use rayon::prelude::*;

use super::dofs::{local, TrialDof, TrialDofMap};
use super::local::{ElementGeometry, LocalContext};
use super::{EpsWeights, Problem};
use crate::basis::ReferenceElement;
use crate::linalg::{DenseCholesky, DenseMatrix, SparseSymmetric, TripletBuilder};
use crate::mesh::{Mesh, Skeleton};
use crate::{Error, Result};

/// Unfactored element matrices `(G_K, B_K, ℓ_K)`.
#[derive(Clone, Debug)]
pub struct LocalMatrices {
    pub gram: DenseMatrix,
    pub b: DenseMatrix,
    pub load: Vec<f64>,
    pub dofs: [TrialDof; local::SIZE],
}

/// Element data after the Gram block has been factored, `G_K = L Lᵀ`:
/// `L⁻¹ B_K` and `L⁻¹ ℓ_K`. Sufficient for the normal equations and the
/// residual norm `‖ℓ_K - B_K x‖²_{G_K⁻¹} = ‖L⁻¹ℓ_K - L⁻¹B_K x‖²`.
#[derive(Clone, Debug)]
pub struct FactoredLocal {
    pub whitened_b: DenseMatrix,
    pub whitened_load: Vec<f64>,
    pub dofs: [TrialDof; local::SIZE],
}

impl FactoredLocal {
    /// `L⁻¹ (ℓ_K - B_K x_K)` for global free coefficients `x`.
    pub fn whitened_residual(&self, x: &[f64]) -> Vec<f64> {
        let xk = TrialDofMap::gather(&self.dofs, x);
        let mut r = self.whitened_load.clone();
        for (i, ri) in r.iter_mut().enumerate() {
            let row = self.whitened_b.row(i);
            *ri -= row.iter().zip(&xk).map(|(a, b)| a * b).sum::<f64>();
        }
        r
    }

    /// Local residual norm squared, `η_K²`.
    pub fn residual_sq(&self, x: &[f64]) -> f64 {
        self.whitened_residual(x).iter().map(|v| v * v).sum()
    }
}

/// Everything needed to assemble on one mesh.
pub struct Discretization<'a> {
    pub mesh: &'a Mesh,
    pub skeleton: &'a Skeleton,
    pub dofs: &'a TrialDofMap,
    pub weights: &'a EpsWeights,
    pub reference: &'a ReferenceElement,
    pub problem: &'a Problem,
}

impl Discretization<'_> {
    pub fn context(&self, k: usize) -> Result<LocalContext<'_>> {
        Ok(LocalContext::new(
            ElementGeometry::new(self.mesh, self.skeleton, k)?,
            self.reference,
        ))
    }

    pub fn local_matrices(&self, k: usize) -> Result<LocalMatrices> {
        let ctx = self.context(k)?;
        let c = self.problem.reaction.as_deref();
        Ok(LocalMatrices {
            gram: ctx.gram(self.weights),
            b: ctx.b_with_reaction(self.weights, c)?,
            load: ctx.load(self.weights, self.problem.load.as_ref(), c)?,
            dofs: self.dofs.local_dofs(self.mesh, self.skeleton, k),
        })
    }

    pub fn factored_local(&self, k: usize) -> Result<FactoredLocal> {
        let m = self.local_matrices(k)?;
        let chol = DenseCholesky::new(&m.gram).map_err(|e| match e {
            Error::NotSpd { pivot, .. } => Error::Assembly { element: k, pivot },
            other => other,
        })?;
        let mut whitened_load = m.load;
        chol.forward_in_place(&mut whitened_load);
        Ok(FactoredLocal {
            whitened_b: chol.forward_matrix(&m.b),
            whitened_load,
            dofs: m.dofs,
        })
    }
}

/// The SPD system `Bᵀ J⁻¹ B x = Bᵀ J⁻¹ (ℓ - B x_D)` on the free unknowns,
/// with `x_D` the prescribed boundary traces.
#[derive(Clone, Debug)]
pub struct NormalEquations {
    pub matrix: SparseSymmetric,
    pub rhs: Vec<f64>,
    pub locals: Vec<FactoredLocal>,
}

impl NormalEquations {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    /// Per-element `η_K²` at coefficients `x`.
    pub fn residuals_sq(&self, x: &[f64]) -> Vec<f64> {
        self.locals.par_iter().map(|l| l.residual_sq(x)).collect()
    }

    /// `Σ_K (ℓ_K - B_K x)ᵀ G_K⁻¹ (ℓ_K - B_K x)`.
    pub fn residual_form(&self, x: &[f64]) -> f64 {
        self.residuals_sq(x).iter().sum()
    }
}

/// Assembles the normal equations element by element. Local systems are
/// computed in parallel; the scatter runs in element order, so the result is
/// bitwise independent of the thread count.
pub fn assemble_normal_equations(disc: &Discretization) -> Result<NormalEquations> {
    let n = disc.dofs.total();
    let locals: Vec<FactoredLocal> = (0..disc.mesh.n_elements())
        .into_par_iter()
        .map(|k| disc.factored_local(k))
        .collect::<Result<_>>()?;

    let contributions: Vec<(DenseMatrix, [f64; local::SIZE])> = locals
        .par_iter()
        .map(|l| {
            let a = l.whitened_b.gram();
            let mut lifted = l.whitened_load.clone();
            for (j, d) in l.dofs.iter().enumerate() {
                if let TrialDof::Fixed(g) = *d {
                    if g != 0.0 {
                        for (i, v) in lifted.iter_mut().enumerate() {
                            *v -= l.whitened_b[(i, j)] * g;
                        }
                    }
                }
            }
            let rhs_vec = l.whitened_b.tr_mul_vec(&lifted);
            let mut rhs = [0.0; local::SIZE];
            rhs.copy_from_slice(&rhs_vec);
            (a, rhs)
        })
        .collect();

    let mut builder = TripletBuilder::with_capacity(n, locals.len() * local::SIZE * (local::SIZE + 1) / 2);
    let mut rhs = vec![0.0; n];
    for (l, (a, r)) in locals.iter().zip(&contributions) {
        for i in 0..local::SIZE {
            let TrialDof::Free(gi) = l.dofs[i] else { continue };
            rhs[gi] += r[i];
            for j in i..local::SIZE {
                if let TrialDof::Free(gj) = l.dofs[j] {
                    builder.add(gi, gj, a[(i, j)]);
                }
            }
        }
    }
    Ok(NormalEquations {
        matrix: builder.build(),
        rhs,
        locals,
    })
}
