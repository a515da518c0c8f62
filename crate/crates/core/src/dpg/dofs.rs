use crate::mesh::{Mesh, Skeleton};
use crate::Point;

/// Local trial columns of one element.
pub mod local {
    pub const U: usize = 0;
    pub const SIGMA_X: usize = 1;
    pub const SIGMA_Y: usize = 2;
    pub const RHO: usize = 3;
    /// `û_a` at the three local vertices.
    pub const TRACE_A: usize = 4;
    /// `û_b` at the three local vertices.
    pub const TRACE_B: usize = 7;
    /// `σ̂_a` on the three local edges.
    pub const FLUX_A: usize = 10;
    /// `σ̂_b` on the three local edges.
    pub const FLUX_B: usize = 13;
    pub const SIZE: usize = 16;
}

/// A local trial coefficient: either a global unknown or a prescribed value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrialDof {
    Free(usize),
    Fixed(f64),
}

/// Global numbering of the trial space
/// `P⁰ × [P⁰]² × P⁰ × S¹ × S¹ × P⁰(S) × P⁰(S)`.
///
/// Layout: `[u, σx, σy, ρ]` per element, then `û_a` and `û_b` at the free
/// vertices, then `σ̂_a` and `σ̂_b` per edge. Traces at boundary vertices
/// carry the Dirichlet values and are not unknowns.
#[derive(Clone, Debug)]
pub struct TrialDofMap {
    n_elements: usize,
    n_edges: usize,
    free_vertex: Vec<Option<usize>>,
    n_free_vertices: usize,
    /// Prescribed trace value at each vertex (zero for interior vertices).
    lift: Vec<f64>,
}

impl TrialDofMap {
    /// Numbering with homogeneous Dirichlet data.
    pub fn new(mesh: &Mesh, skeleton: &Skeleton) -> Self {
        Self::with_dirichlet(mesh, skeleton, None)
    }

    /// Numbering whose boundary traces interpolate `g` at boundary vertices.
    pub fn with_dirichlet(mesh: &Mesh, skeleton: &Skeleton, g: Option<&(dyn Fn(Point) -> f64 + Send + Sync)>) -> Self {
        let mut next = 0;
        let free_vertex: Vec<Option<usize>> = skeleton
            .boundary_vertex
            .iter()
            .map(|&b| {
                (!b).then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        let lift = mesh
            .vertices()
            .iter()
            .zip(&skeleton.boundary_vertex)
            .map(|(&p, &b)| match (b, g) {
                (true, Some(g)) => g(p),
                _ => 0.0,
            })
            .collect();
        Self {
            n_elements: mesh.n_elements(),
            n_edges: skeleton.n_edges(),
            free_vertex,
            n_free_vertices: next,
            lift,
        }
    }

    pub fn total(&self) -> usize {
        4 * self.n_elements + 2 * self.n_free_vertices + 2 * self.n_edges
    }

    pub fn n_free_vertices(&self) -> usize {
        self.n_free_vertices
    }

    /// Index of field component `c` (0 = u, 1..=2 = σ, 3 = ρ) on element `k`.
    pub fn field(&self, k: usize, c: usize) -> usize {
        4 * k + c
    }

    pub fn trace_a(&self, v: usize) -> Option<usize> {
        self.free_vertex[v].map(|i| 4 * self.n_elements + i)
    }

    pub fn trace_b(&self, v: usize) -> Option<usize> {
        self.free_vertex[v].map(|i| 4 * self.n_elements + self.n_free_vertices + i)
    }

    pub fn flux_a(&self, e: usize) -> usize {
        4 * self.n_elements + 2 * self.n_free_vertices + e
    }

    pub fn flux_b(&self, e: usize) -> usize {
        4 * self.n_elements + 2 * self.n_free_vertices + self.n_edges + e
    }

    pub fn lift(&self, v: usize) -> f64 {
        self.lift[v]
    }

    pub fn is_homogeneous(&self) -> bool {
        self.lift.iter().all(|&g| g == 0.0)
    }

    /// Trial DOFs of element `k` in the order of [`local`].
    pub fn local_dofs(&self, mesh: &Mesh, skeleton: &Skeleton, k: usize) -> [TrialDof; local::SIZE] {
        let mut out = [TrialDof::Fixed(0.0); local::SIZE];
        for c in 0..4 {
            out[c] = TrialDof::Free(self.field(k, c));
        }
        let verts = mesh.triangles()[k].vertices;
        for (j, &v) in verts.iter().enumerate() {
            out[local::TRACE_A + j] = self.trace_a(v).map_or(TrialDof::Fixed(self.lift[v]), TrialDof::Free);
            out[local::TRACE_B + j] = self.trace_b(v).map_or(TrialDof::Fixed(self.lift[v]), TrialDof::Free);
        }
        for (j, &e) in skeleton.element_edges[k].iter().enumerate() {
            out[local::FLUX_A + j] = TrialDof::Free(self.flux_a(e));
            out[local::FLUX_B + j] = TrialDof::Free(self.flux_b(e));
        }
        out
    }

    /// Local coefficient vector, with prescribed values filled in.
    pub fn gather(dofs: &[TrialDof; local::SIZE], x: &[f64]) -> [f64; local::SIZE] {
        let mut out = [0.0; local::SIZE];
        for (o, d) in out.iter_mut().zip(dofs) {
            *o = match *d {
                TrialDof::Free(i) => x[i],
                TrialDof::Fixed(g) => g,
            };
        }
        out
    }
}
