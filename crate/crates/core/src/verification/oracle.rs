use nalgebra::{DMatrix, DVector};

use crate::dpg::{test_dim, Discretization, TrialDof};
use crate::linalg::DenseMatrix;
use crate::{Error, Result};

/// Result of the dense reference solve.
#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub x: Vec<f64>,
    /// `(ℓ - B x)ᵀ J⁻¹ (ℓ - B x)`
    pub eta_sq: f64,
    pub element_eta_sq: Vec<f64>,
    /// `Bᵀ J⁻¹ B` on the free unknowns.
    pub matrix: DenseMatrix,
    pub rhs: Vec<f64>,
}

/// Largest mesh accepted by [`dense_oracle_solve`].
pub const ORACLE_MAX_ELEMENTS: usize = 32;

/// Solves the discrete minimum-residual problem with full dense matrices:
/// global `B`, block-diagonal `J` inverted explicitly, `Bᵀ J⁻¹ B` factored by
/// a dense Cholesky decomposition.
pub fn dense_oracle_solve(disc: &Discretization) -> Result<OracleSolution> {
    let n_el = disc.mesh.n_elements();
    if n_el > ORACLE_MAX_ELEMENTS {
        return Err(Error::InvalidArgument(format!(
            "dense oracle limited to {ORACLE_MAX_ELEMENTS} elements, got {n_el}"
        )));
    }
    let td = test_dim(disc.reference.order);
    let n = disc.dofs.total();
    let m = n_el * td;
    let mut b = DMatrix::<f64>::zeros(m, n);
    let mut load = DVector::<f64>::zeros(m);
    let mut j_inv = DMatrix::<f64>::zeros(m, m);

    for k in 0..n_el {
        let local = disc.local_matrices(k)?;
        let off = k * td;
        for i in 0..td {
            load[off + i] = local.load[i];
            for (c, d) in local.dofs.iter().enumerate() {
                match *d {
                    TrialDof::Free(g) => b[(off + i, g)] += local.b[(i, c)],
                    TrialDof::Fixed(v) => load[off + i] -= local.b[(i, c)] * v,
                }
            }
        }
        let g = DMatrix::from_fn(td, td, |i, j| local.gram[(i, j)]);
        let inv = g.try_inverse().ok_or(Error::Assembly { element: k, pivot: 0 })?;
        j_inv.view_mut((off, off), (td, td)).copy_from(&inv);
    }

    let jb = &j_inv * &b;
    let a = b.transpose() * &jb;
    let a = (&a + a.transpose()) * 0.5;
    let rhs = jb.transpose() * &load;
    let chol = a.clone().cholesky().ok_or(Error::NotSpd { pivot: 0, value: 0.0 })?;
    let x = chol.solve(&rhs);

    let r = &load - &b * &x;
    let jr = &j_inv * &r;
    let element_eta_sq = (0..n_el)
        .map(|k| (k * td..(k + 1) * td).map(|i| r[i] * jr[i]).sum())
        .collect();
    let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    let row_refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Ok(OracleSolution {
        x: x.iter().copied().collect(),
        eta_sq: r.dot(&jr),
        element_eta_sq,
        matrix: DenseMatrix::from_rows(&row_refs),
        rhs: rhs.iter().copied().collect(),
    })
}
