//! Newest vertex bisection.
//!
//! Marking an element marks its refinement edge. The closure marks the
//! refinement edge of every element that has some marked edge, so each
//! element is split into 1, 2, 3 or 4 children and no hanging nodes appear.
//! Children inherit the edge opposite the new vertex as refinement edge.

use std::collections::{HashMap, VecDeque};

use super::{edge_key, Mesh, Triangle};

struct EdgeIndex {
    edges: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
    element_edges: Vec<[usize; 3]>,
    edge_elements: Vec<Vec<usize>>,
}

impl EdgeIndex {
    fn new(mesh: &Mesh) -> Self {
        let mut edges = Vec::new();
        let mut lookup = HashMap::new();
        let mut element_edges = Vec::with_capacity(mesh.n_elements());
        let mut edge_elements: Vec<Vec<usize>> = Vec::new();
        for (k, t) in mesh.triangles.iter().enumerate() {
            let mut ids = [0; 3];
            for (j, id) in ids.iter_mut().enumerate() {
                let [a, b] = t.edge(j);
                let key = edge_key(a, b);
                *id = *lookup.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_elements.push(Vec::with_capacity(2));
                    edges.len() - 1
                });
                edge_elements[*id].push(k);
            }
            element_edges.push(ids);
        }
        Self {
            edges,
            lookup,
            element_edges,
            edge_elements,
        }
    }
}

impl Mesh {
    /// Bisects every marked element at least once and closes the result
    /// to a conforming mesh. An empty marking returns an identical mesh.
    pub fn refine_nvb(&self, marked: &[usize]) -> Mesh {
        let index = EdgeIndex::new(self);
        let mut edge_marked = vec![false; index.edges.len()];
        let mut queue = VecDeque::new();
        for &k in marked {
            let e = index.element_edges[k][self.triangles[k].refinement_edge as usize];
            if !edge_marked[e] {
                edge_marked[e] = true;
                queue.push_back(e);
            }
        }
        while let Some(e) = queue.pop_front() {
            for &k in &index.edge_elements[e] {
                let r = index.element_edges[k][self.triangles[k].refinement_edge as usize];
                if !edge_marked[r] {
                    edge_marked[r] = true;
                    queue.push_back(r);
                }
            }
        }
        self.bisect_marked(&index, &edge_marked)
    }

    /// Splits every element into four children by marking all edges
    /// (two bisection generations).
    pub fn uniform_refine(&self) -> Mesh {
        let index = EdgeIndex::new(self);
        let edge_marked = vec![true; index.edges.len()];
        self.bisect_marked(&index, &edge_marked)
    }

    fn bisect_marked(&self, index: &EdgeIndex, edge_marked: &[bool]) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        for (e, &(a, b)) in index.edges.iter().enumerate() {
            if edge_marked[e] {
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                midpoint.insert((a, b), vertices.len() - 1);
            }
        }
        debug_assert_eq!(midpoint.len(), edge_marked.iter().filter(|&&m| m).count());
        debug_assert!(midpoint.keys().all(|k| index.lookup.contains_key(k)));

        let mut triangles = Vec::with_capacity(self.triangles.len() + 3 * midpoint.len());
        for t in &self.triangles {
            split(*t, &midpoint, &mut triangles);
        }

        let mut boundary = Vec::with_capacity(self.boundary.len() * 2);
        for &[a, b] in &self.boundary {
            match midpoint.get(&edge_key(a, b)) {
                Some(&m) => {
                    boundary.push([a, m]);
                    boundary.push([m, b]);
                }
                None => boundary.push([a, b]),
            }
        }

        Mesh {
            vertices,
            triangles,
            boundary,
        }
    }
}

fn split(t: Triangle, midpoint: &HashMap<(usize, usize), usize>, out: &mut Vec<Triangle>) {
    let r = t.refinement_edge as usize;
    let a = t.vertices[r];
    let b = t.vertices[(r + 1) % 3];
    let c = t.vertices[(r + 2) % 3];
    match midpoint.get(&edge_key(a, b)) {
        Some(&m) => {
            // the edge opposite the new vertex m becomes the refinement edge
            split(Triangle::new([a, m, c], 2), midpoint, out);
            split(Triangle::new([m, b, c], 1), midpoint, out);
        }
        None => out.push(t),
    }
}
