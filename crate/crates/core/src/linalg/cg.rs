use super::SparseSymmetric;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    /// Stop once `‖b - A x‖₂ <= rel_tol ‖b‖₂`.
    pub rel_tol: f64,
    /// Defaults to `50 · dim` when `None`.
    pub max_iter: Option<usize>,
    /// Diagonal (Jacobi) preconditioning. Off unless requested.
    pub jacobi: bool,
}

impl Default for CgOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: None,
            jacobi: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final `‖b - A x‖₂ / ‖b‖₂` of the recursively updated residual.
    pub relative_residual: f64,
    /// `‖r_k‖₂` for `k = 0..=iterations`.
    pub residual_history: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate gradients from a zero initial guess.
pub fn cg_solve(a: &SparseSymmetric, b: &[f64], opts: &CgOptions) -> Result<CgSolution> {
    cg_solve_observed(a, b, opts, |_| {})
}

/// As [`cg_solve`], calling `observe` with every iterate.
pub fn cg_solve_observed(
    a: &SparseSymmetric,
    b: &[f64],
    opts: &CgOptions,
    mut observe: impl FnMut(&[f64]),
) -> Result<CgSolution> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let max_iter = opts.max_iter.unwrap_or(50 * n.max(1));
    let bnorm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok(CgSolution {
            x,
            iterations: 0,
            relative_residual: 0.0,
            residual_history: vec![0.0],
        });
    }
    if !bnorm.is_finite() {
        return Err(Error::Breakdown(0));
    }

    let inv_diag: Option<Vec<f64>> = opts.jacobi.then(|| {
        a.diagonal()
            .into_iter()
            .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect()
    });
    let precondition = |r: &[f64], z: &mut Vec<f64>| match &inv_diag {
        Some(d) => {
            z.clear();
            z.extend(r.iter().zip(d).map(|(r, d)| r * d));
        }
        None => {
            z.clear();
            z.extend_from_slice(r);
        }
    };

    let mut r = b.to_vec();
    let mut z = Vec::with_capacity(n);
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rnorm = bnorm;
    let mut history = vec![rnorm];
    let target = opts.rel_tol * bnorm;

    for it in 1..=max_iter {
        a.mul_vec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) || !pap.is_finite() {
            return Err(Error::Breakdown(it));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        observe(&x);
        rnorm = dot(&r, &r).sqrt();
        history.push(rnorm);
        if !rnorm.is_finite() {
            return Err(Error::Breakdown(it));
        }
        if rnorm <= target {
            return Ok(CgSolution {
                x,
                iterations: it,
                relative_residual: rnorm / bnorm,
                residual_history: history,
            });
        }
        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::MaxIterations {
        iterations: max_iter,
        residual: rnorm / bnorm,
    })
}
