//! Triangular meshes of polygonal domains, with the structured unit-square
//! family and uniform midpoint refinement.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TriangularMesh {
    nodes: Vec<[f64; 2]>,
    /// Counterclockwise vertex triples.
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
    /// Dense index of each interior node, `None` on the boundary.
    interior_index: Vec<Option<usize>>,
    interior_nodes: Vec<usize>,
    h: f64,
}

impl TriangularMesh {
    /// Builds a mesh, re-orienting clockwise triangles.
    ///
    /// Fails on out-of-range vertex indices and degenerate (zero-area)
    /// triangles. Interior nodes are numbered in node order.
    pub fn new(nodes: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, boundary: Vec<bool>) -> Result<Self> {
        if boundary.len() != nodes.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), found: boundary.len() });
        }
        let mut triangles = triangles;
        for (t, tri) in triangles.iter_mut().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v >= nodes.len()) {
                return Err(Error::InvalidMesh {
                    element: Some(t),
                    reason: format!("vertex index {bad} out of range (mesh has {} nodes)", nodes.len()),
                });
            }
            let area = signed_area(&nodes, tri);
            if area == 0.0 || !area.is_finite() {
                return Err(Error::InvalidMesh { element: Some(t), reason: "zero-area triangle".into() });
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }
        let mut interior_index = vec![None; nodes.len()];
        let mut interior_nodes = Vec::new();
        for (v, &b) in boundary.iter().enumerate() {
            if !b {
                interior_index[v] = Some(interior_nodes.len());
                interior_nodes.push(v);
            }
        }
        let h = triangles.iter().map(|t| diameter(&nodes, t)).fold(0.0, f64::max);
        Ok(Self { nodes, triangles, boundary, interior_index, interior_nodes, h })
    }

    /// Builds a mesh whose boundary flags are derived from the topology: a node
    /// is on the boundary iff it lies on an edge shared by only one triangle.
    pub fn with_topological_boundary(nodes: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        let mut boundary = vec![false; nodes.len()];
        for t in &triangles {
            if t.iter().any(|&v| v >= nodes.len()) {
                // let `new` produce the error
                return Self::new(nodes, triangles, boundary);
            }
        }
        for ((a, b), count) in edge_counts(&triangles) {
            if count == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        Self::new(nodes, triangles, boundary)
    }

    /// Uniform mesh of the unit square with `n` cells per side, each cell split
    /// along its lower-left to upper-right diagonal.
    pub fn structured_unit_square(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "structured mesh needs at least 2 subdivisions per side, got {n}"
            )));
        }
        let h = 1.0 / n as f64;
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut nodes = Vec::with_capacity((n + 1) * (n + 1));
        let mut boundary = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                nodes.push([i as f64 * h, j as f64 * h]);
                boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let mut triangles = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (sw, se, ne, nw) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                triangles.push([sw, se, ne]);
                triangles.push([sw, ne, nw]);
            }
        }
        Self::new(nodes, triangles, boundary)
    }

    /// Splits every triangle into four through its edge midpoints. Midpoints of
    /// boundary edges (edges with a single adjacent triangle whose endpoints are
    /// both boundary nodes) are boundary nodes.
    pub fn refine(&self) -> Result<Self> {
        let mut nodes = self.nodes.clone();
        let mut boundary = self.boundary.clone();
        let counts = edge_counts(&self.triangles);
        let mut midpoint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for tri in &self.triangles {
            let mut mid = [0usize; 3];
            for (k, slot) in mid.iter_mut().enumerate() {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                *slot = *midpoint.entry(key).or_insert_with(|| {
                    let (pa, pb) = (self.nodes[a], self.nodes[b]);
                    nodes.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                    let on_boundary = counts.get(&key) == Some(&1) && self.boundary[a] && self.boundary[b];
                    boundary.push(on_boundary);
                    nodes.len() - 1
                });
            }
            // mid[k] sits on edge (tri[k], tri[k+1])
            let [v0, v1, v2] = *tri;
            let [m01, m12, m20] = mid;
            triangles.push([v0, m01, m20]);
            triangles.push([m01, v1, m12]);
            triangles.push([m20, m12, v2]);
            triangles.push([m01, m12, m20]);
        }
        Self::new(nodes, triangles, boundary)
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.boundary[node]
    }

    /// Dense unknown index of `node`, `None` for boundary nodes.
    pub fn interior_index(&self, node: usize) -> Option<usize> {
        self.interior_index[node]
    }

    /// Mesh node of each unknown, in unknown order.
    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    /// Number of interior nodes `n(h)`, the dimension of the discrete system.
    pub fn num_interior(&self) -> usize {
        self.interior_nodes.len()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Largest triangle diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn area(&self, t: usize) -> f64 {
        signed_area(&self.nodes, &self.triangles[t])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    pub fn diameter(&self, t: usize) -> f64 {
        diameter(&self.nodes, &self.triangles[t])
    }

    pub fn vertices(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        [self.nodes[tri[0]], self.nodes[tri[1]], self.nodes[tri[2]]]
    }

    /// Pairs of distinct nodes with identical coordinates. They are kept as
    /// separate nodes; callers may report them as a warning.
    pub fn duplicate_nodes(&self) -> Vec<(usize, usize)> {
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&a, &b| {
            let (pa, pb) = (self.nodes[a], self.nodes[b]);
            pa[0].total_cmp(&pb[0]).then(pa[1].total_cmp(&pb[1]))
        });
        order
            .windows(2)
            .filter(|w| self.nodes[w[0]] == self.nodes[w[1]])
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .collect()
    }
}

fn signed_area(nodes: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let [a, b, c] = [nodes[t[0]], nodes[t[1]], nodes[t[2]]];
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn diameter(nodes: &[[f64; 2]], t: &[usize; 3]) -> f64 {
    let d = |p: usize, q: usize| {
        let (a, b) = (nodes[t[p]], nodes[t[q]]);
        math::hypot(a[0] - b[0], a[1] - b[1])
    };
    d(0, 1).max(d(1, 2)).max(d(2, 0))
}

fn edge_counts(triangles: &[[usize; 3]]) -> BTreeMap<(usize, usize), usize> {
    let mut counts = BTreeMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    counts
}
