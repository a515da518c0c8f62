use std::collections::HashMap;

use super::{edge_key, Mesh};
use crate::{Error, Point, Result};

/// An undirected mesh edge with a fixed unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonEdge {
    /// Endpoints, lower index first.
    pub vertices: [usize; 2],
    /// Incident elements with the local edge index inside each.
    pub elements: Vec<(usize, usize)>,
    /// Unit normal of the directed edge `vertices[0] -> vertices[1]`,
    /// rotated clockwise.
    pub normal: Point,
    pub length: f64,
}

impl SkeletonEdge {
    pub fn is_boundary(&self) -> bool {
        self.elements.len() == 1
    }
}

/// Edges of a mesh with adjacency, normals and per-element orientation signs.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    pub edges: Vec<SkeletonEdge>,
    /// Global edge index of each local edge.
    pub element_edges: Vec<[usize; 3]>,
    /// `+1` where the element's outward normal equals the edge normal.
    pub element_signs: Vec<[f64; 3]>,
    pub boundary_vertex: Vec<bool>,
}

impl Skeleton {
    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_interior_edges(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    /// Reverses the stored normal of one edge and the signs that refer to it.
    pub fn flip_orientation(&mut self, edge: usize) {
        let e = &mut self.edges[edge];
        e.normal = [-e.normal[0], -e.normal[1]];
        for &(k, j) in &e.elements {
            self.element_signs[k][j] = -self.element_signs[k][j];
        }
    }
}

/// Extracts the skeleton. Fails on meshes that are not conforming.
pub fn build_skeleton(mesh: &Mesh) -> Result<Skeleton> {
    let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<SkeletonEdge> = Vec::new();
    let mut element_edges = Vec::with_capacity(mesh.n_elements());
    let mut element_signs = Vec::with_capacity(mesh.n_elements());

    for (k, t) in mesh.triangles().iter().enumerate() {
        let mut ids = [0; 3];
        let mut signs = [0.0; 3];
        for j in 0..3 {
            let [a, b] = t.edge(j);
            let key = edge_key(a, b);
            let id = *lookup.entry(key).or_insert_with(|| {
                let (pa, pb) = (mesh.vertices()[key.0], mesh.vertices()[key.1]);
                let d = [pb[0] - pa[0], pb[1] - pa[1]];
                let length = d[0].hypot(d[1]);
                edges.push(SkeletonEdge {
                    vertices: [key.0, key.1],
                    elements: Vec::with_capacity(2),
                    normal: [d[1] / length, -d[0] / length],
                    length,
                });
                edges.len() - 1
            });
            let edge = &mut edges[id];
            edge.elements.push((k, j));
            if edge.elements.len() > 2 {
                return Err(Error::Inconsistent(format!("edge ({a}, {b}) shared by more than two elements")));
            }
            ids[j] = id;
            // counter-clockwise elements have outward normal (dy, -dx) along a -> b
            signs[j] = if a < b { 1.0 } else { -1.0 };
        }
        element_edges.push(ids);
        element_signs.push(signs);
    }

    for e in &edges {
        if let [(k0, j0), (k1, j1)] = e.elements[..] {
            if element_signs[k0][j0] == element_signs[k1][j1] {
                return Err(Error::Inconsistent(format!(
                    "elements {k0} and {k1} traverse edge {:?} in the same direction",
                    e.vertices
                )));
            }
        }
    }

    let mut boundary: Vec<(usize, usize)> = edges
        .iter()
        .filter(|e| e.is_boundary())
        .map(|e| (e.vertices[0], e.vertices[1]))
        .collect();
    boundary.sort_unstable();
    let mut declared: Vec<(usize, usize)> = mesh.boundary().iter().map(|&[a, b]| edge_key(a, b)).collect();
    declared.sort_unstable();
    if boundary != declared {
        return Err(Error::Inconsistent(
            "single-neighbour edges do not match the declared boundary (hanging node?)".into(),
        ));
    }

    Ok(Skeleton {
        edges,
        element_edges,
        element_signs,
        boundary_vertex: mesh.boundary_vertices(),
    })
}
