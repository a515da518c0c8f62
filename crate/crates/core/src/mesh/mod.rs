//! Conforming triangulations with newest-vertex-bisection bookkeeping.

mod io;
mod nvb;
mod skeleton;

use std::collections::HashMap;

pub use skeleton::{build_skeleton, Skeleton, SkeletonEdge};

use crate::{Error, Point, Result};

/// Relative tolerance for geometric predicates.
pub const GEOMETRY_TOL: f64 = 1e-14;

/// A triangle given by counter-clockwise vertex indices.
///
/// Local edge `k` joins `vertices[k]` and `vertices[(k + 1) % 3]`;
/// `refinement_edge` selects the edge that is bisected next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub refinement_edge: u8,
}

impl Triangle {
    pub fn new(vertices: [usize; 3], refinement_edge: u8) -> Self {
        Self {
            vertices,
            refinement_edge,
        }
    }

    /// Directed local edge `k`.
    pub fn edge(&self, k: usize) -> [usize; 2] {
        [self.vertices[k], self.vertices[(k + 1) % 3]]
    }

    pub fn refinement_vertices(&self) -> [usize; 2] {
        self.edge(self.refinement_edge as usize)
    }
}

/// Conforming triangulation of a polygonal domain.
///
/// Meshes are immutable values: refinement produces a new mesh.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<Triangle>,
    boundary: Vec<[usize; 2]>,
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub(crate) fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist_sq(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

impl Mesh {
    /// Builds a mesh and checks every structural invariant.
    pub fn new(vertices: Vec<Point>, triangles: Vec<Triangle>, boundary: Vec<[usize; 2]>) -> Result<Self> {
        let mesh = Self {
            vertices,
            triangles,
            boundary,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Builds a mesh from counter-clockwise triangles, assigning the longest
    /// edge as refinement edge and deriving the boundary from edge incidence.
    pub fn from_triangles(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let tris: Vec<Triangle> = triangles
            .iter()
            .map(|&t| Triangle::new(t, longest_edge(&vertices, t)))
            .collect();
        let mut incidence: HashMap<(usize, usize), ([usize; 2], usize)> = HashMap::new();
        let mut order = Vec::new();
        for t in &tris {
            for k in 0..3 {
                let e = t.edge(k);
                let key = edge_key(e[0], e[1]);
                let entry = incidence.entry(key).or_insert_with(|| {
                    order.push(key);
                    (e, 0)
                });
                entry.1 += 1;
            }
        }
        let boundary = order
            .into_iter()
            .filter_map(|key| {
                let (e, count) = incidence[&key];
                (count == 1).then_some(e)
            })
            .collect();
        Self::new(vertices, tris, boundary)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn boundary(&self) -> &[[usize; 2]] {
        &self.boundary
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_elements(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, element: usize) -> [Point; 3] {
        let v = self.triangles[element].vertices;
        [self.vertices[v[0]], self.vertices[v[1]], self.vertices[v[2]]]
    }

    pub fn area(&self, element: usize) -> f64 {
        let [a, b, c] = self.corners(element);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_elements()).map(|k| self.area(k)).sum()
    }

    pub fn centroid(&self, element: usize) -> Point {
        let [a, b, c] = self.corners(element);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Interior angles of an element, ordered by vertex.
    pub fn angles(&self, element: usize) -> [f64; 3] {
        let p = self.corners(element);
        let mut out = [0.0; 3];
        for k in 0..3 {
            let a = p[k];
            let b = p[(k + 1) % 3];
            let c = p[(k + 2) % 3];
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            let cross = u[0] * v[1] - u[1] * v[0];
            let dot = u[0] * v[0] + u[1] * v[1];
            out[k] = cross.atan2(dot);
        }
        out
    }

    pub fn min_angle(&self) -> f64 {
        (0..self.n_elements())
            .flat_map(|k| self.angles(k))
            .fold(f64::INFINITY, f64::min)
    }

    /// Mesh width `max_K diam(K)`.
    pub fn max_diameter(&self) -> f64 {
        (0..self.n_elements())
            .map(|k| {
                let [a, b, c] = self.corners(k);
                dist_sq(a, b).max(dist_sq(b, c)).max(dist_sq(c, a)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Flags vertices lying on the boundary.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for &[a, b] in &self.boundary {
            flags[a] = true;
            flags[b] = true;
        }
        flags
    }

    /// Checks index ranges, orientation, refinement-edge labels, conformity
    /// and that the boundary list matches the edges with a single neighbour.
    pub fn validate(&self) -> Result<()> {
        let nv = self.vertices.len();
        let scale = self
            .vertices
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(1.0, f64::max);
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, t) in self.triangles.iter().enumerate() {
            if t.vertices.iter().any(|&v| v >= nv) {
                return Err(Error::Inconsistent(format!("element {k} references a missing vertex")));
            }
            if t.refinement_edge > 2 {
                return Err(Error::Inconsistent(format!("element {k} has refinement edge {}", t.refinement_edge)));
            }
            let area = self.area(k);
            if !(area > GEOMETRY_TOL * scale * scale) {
                return Err(Error::SingularMap { element: k, area });
            }
            for j in 0..3 {
                let [a, b] = t.edge(j);
                if directed.insert((a, b), k).is_some() {
                    return Err(Error::Inconsistent(format!("edge ({a}, {b}) traversed twice in the same direction")));
                }
            }
        }
        let mut expected: Vec<(usize, usize)> = directed
            .keys()
            .filter(|&&(a, b)| !directed.contains_key(&(b, a)))
            .map(|&(a, b)| edge_key(a, b))
            .collect();
        expected.sort_unstable();
        let mut declared: Vec<(usize, usize)> = self.boundary.iter().map(|&[a, b]| edge_key(a, b)).collect();
        declared.sort_unstable();
        if expected != declared {
            return Err(Error::Inconsistent(format!(
                "boundary list has {} edges but {} edges have a single neighbour",
                declared.len(),
                expected.len()
            )));
        }
        Ok(())
    }
}

/// Longest edge of a triangle; ties go to the edge whose opposite vertex has
/// the smallest index.
fn longest_edge(vertices: &[Point], t: [usize; 3]) -> u8 {
    let lengths: Vec<f64> = (0..3)
        .map(|k| dist_sq(vertices[t[k]], vertices[t[(k + 1) % 3]]))
        .collect();
    let max = lengths.iter().cloned().fold(0.0, f64::max);
    (0..3)
        .filter(|&k| lengths[k] >= max * (1.0 - 1e-12))
        .min_by_key(|&k| t[(k + 2) % 3])
        .unwrap() as u8
}

/// Uniform `n × n` grid of `(0,1)²` with each square cut along its
/// south-west to north-east diagonal.
pub fn make_unit_square_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("subdivision count must be at least 1".into()));
    }
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh::from_triangles(vertices, triangles)
}

/// Coarse mesh of the L-shaped domain `(-1,1)² \ [0,1)×(-1,0]` built from
/// three unit squares; the re-entrant corner sits at the origin.
pub fn make_lshape_mesh() -> Mesh {
    let vertices = vec![
        [-1.0, -1.0],
        [0.0, -1.0],
        [-1.0, 0.0],
        [0.0, 0.0],
        [1.0, 0.0],
        [-1.0, 1.0],
        [0.0, 1.0],
        [1.0, 1.0],
    ];
    let triangles = vec![[0, 1, 3], [0, 3, 2], [2, 3, 6], [2, 6, 5], [3, 4, 7], [3, 7, 6]];
    Mesh::from_triangles(vertices, triangles).expect("L-shape mesh is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_square_counts() {
        let m = make_unit_square_mesh(1).unwrap();
        assert_eq!((m.n_vertices(), m.n_elements()), (4, 2));
        let m = make_unit_square_mesh(2).unwrap();
        assert_eq!((m.n_vertices(), m.n_elements()), (9, 8));
        for n in 1..6 {
            let m = make_unit_square_mesh(n).unwrap();
            assert_eq!(m.n_elements(), 2 * n * n);
            assert!((m.total_area() - 1.0).abs() < 1e-12);
            assert_eq!(m.boundary().len(), 4 * n);
        }
    }

    #[test]
    fn unit_square_rejects_zero() {
        assert!(matches!(make_unit_square_mesh(0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn refinement_edge_is_the_diagonal() {
        let m = make_unit_square_mesh(1).unwrap();
        for t in m.triangles() {
            let [a, b] = t.refinement_vertices();
            assert_eq!(edge_key(a, b), (0, 3));
        }
    }

    #[test]
    fn lshape_geometry() {
        let m = make_lshape_mesh();
        assert_eq!(m.n_elements(), 6);
        assert!((m.total_area() - 3.0).abs() < 1e-12);
        assert!((0..6).all(|k| m.area(k) > 0.0));
        // interior angle at each boundary vertex = sum of element angles there
        let mut angle = vec![0.0; m.n_vertices()];
        for k in 0..m.n_elements() {
            let a = m.angles(k);
            for (j, &v) in m.triangles()[k].vertices.iter().enumerate() {
                angle[v] += a[j];
            }
        }
        let re_entrant: Vec<usize> = (0..m.n_vertices())
            .filter(|&v| (angle[v] - 1.5 * PI).abs() < 1e-12)
            .collect();
        assert_eq!(re_entrant, vec![3]);
        assert_eq!(m.vertices()[3], [0.0, 0.0]);
    }

    #[test]
    fn validate_rejects_clockwise_triangle() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let err = Mesh::new(v, vec![Triangle::new([0, 2, 1], 0)], vec![[0, 2], [2, 1], [1, 0]]);
        assert!(matches!(err, Err(Error::SingularMap { .. })));
    }

    #[test]
    fn validate_rejects_hanging_node() {
        // square split in two, with the lower triangle bisected but not its neighbour
        let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5]];
        let tris = vec![
            Triangle::new([0, 1, 4], 0),
            Triangle::new([4, 1, 2], 0),
            Triangle::new([0, 2, 3], 0),
        ];
        let boundary = vec![[0, 1], [1, 2], [2, 3], [3, 0]];
        assert!(matches!(Mesh::new(v, tris, boundary), Err(Error::Inconsistent(_))));
    }
}
