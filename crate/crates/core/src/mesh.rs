//! Immersed triangle meshes: the discrete stand-in for a 2-manifold immersed
//! in Euclidean space of arbitrary ambient dimension.
//!
//! Meshes are stored as indexed face sets (flat coordinate array plus index
//! triples). Vertex stars and edge-face incidence are derived on demand;
//! there is no halfedge structure.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// A triangle mesh immersed in `R^N`, `N >= 3`. Positions are stored flat,
/// vertex `i` occupying `positions[i*N .. (i+1)*N]`. Faces are oriented
/// counterclockwise, but none of the operators depend on a global
/// orientation. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmersedMesh {
    ambient_dim: usize,
    positions: Vec<f64>,
    triangles: Vec<[usize; 3]>,
}

/// A single validation finding, pointing at the offending simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    IndexOutOfBounds { triangle: usize, vertex: usize },
    DegenerateTriangle { triangle: usize },
    ZeroAreaTriangle { triangle: usize },
    NonManifoldEdge { a: usize, b: usize, faces: usize },
    NonFiniteCoordinate { vertex: usize },
    IsolatedVertex { vertex: usize },
    DisconnectedInterior { components: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IndexOutOfBounds { triangle, vertex } => {
                write!(f, "triangle {triangle} references out-of-bounds vertex {vertex}")
            }
            Violation::DegenerateTriangle { triangle } => {
                write!(f, "degenerate triangle {triangle} (repeated vertex)")
            }
            Violation::ZeroAreaTriangle { triangle } => {
                write!(f, "triangle {triangle} has zero area")
            }
            Violation::NonManifoldEdge { a, b, faces } => {
                write!(f, "edge ({a},{b}) is shared by {faces} triangles")
            }
            Violation::NonFiniteCoordinate { vertex } => {
                write!(f, "vertex {vertex} has a non-finite coordinate")
            }
            Violation::IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex} is not referenced by any triangle")
            }
            Violation::DisconnectedInterior { components } => {
                write!(f, "interior vertex graph has {components} components")
            }
        }
    }
}

/// Every invariant violation found in a mesh; empty iff the mesh is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let msgs: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", msgs.join("; "))
    }
}

/// Disjoint split of the vertex set into boundary vertices (incident to an
/// edge with exactly one adjacent triangle) and interior vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryPartition {
    interior: Vec<usize>,
    boundary: Vec<usize>,
    is_boundary: Vec<bool>,
}

impl BoundaryPartition {
    /// Interior vertex indices, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Boundary vertex indices, ascending.
    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn is_boundary(&self, vertex: usize) -> bool {
        self.is_boundary[vertex]
    }

    /// True when the mesh has no boundary edges (a closed surface).
    pub fn is_closed(&self) -> bool {
        self.boundary.is_empty()
    }
}

impl ImmersedMesh {
    /// Build a mesh from flat coordinates and index triples. Only structural
    /// shape is enforced here (`ambient_dim >= 3`, coordinate count divisible
    /// by the ambient dimension); geometric and topological invariants are
    /// reported by [`ImmersedMesh::validate`].
    pub fn new(
        ambient_dim: usize,
        positions: Vec<f64>,
        triangles: Vec<[usize; 3]>,
    ) -> Result<Self> {
        if ambient_dim < 3 {
            return Err(Error::domain(format!(
                "ambient dimension must be at least 3, got {ambient_dim}"
            )));
        }
        if positions.len() % ambient_dim != 0 {
            return Err(Error::domain(format!(
                "coordinate array length {} is not a multiple of the ambient dimension {}",
                positions.len(),
                ambient_dim
            )));
        }
        Ok(ImmersedMesh {
            ambient_dim,
            positions,
            triangles,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len() / self.ambient_dim
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// The intrinsic dimension of a triangle mesh is always 2.
    pub fn intrinsic_dim(&self) -> usize {
        2
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn position(&self, vertex: usize) -> &[f64] {
        &self.positions[vertex * self.ambient_dim..(vertex + 1) * self.ambient_dim]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Twice the area of triangle `t` (Gram determinant, valid in any
    /// ambient dimension).
    pub fn double_area(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        let (p0, p1, p2) = (self.position(i), self.position(j), self.position(k));
        let mut uu = 0.0;
        let mut vv = 0.0;
        let mut uv = 0.0;
        for d in 0..self.ambient_dim {
            let u = p1[d] - p0[d];
            let v = p2[d] - p0[d];
            uu += u * u;
            vv += v * v;
            uv += u * v;
        }
        (uu * vv - uv * uv).max(0.0).sqrt()
    }

    /// Edge-to-incident-triangle-count map, keys stored as `(min, max)`.
    pub(crate) fn edge_face_counts(&self) -> HashMap<(usize, usize), usize> {
        let mut counts = HashMap::with_capacity(self.triangles.len() * 3 / 2);
        let n = self.vertex_count();
        for tri in &self.triangles {
            let [i, j, k] = *tri;
            if i >= n || j >= n || k >= n || i == j || j == k || i == k {
                continue;
            }
            for (a, b) in [(i, j), (j, k), (k, i)] {
                let key = (a.min(b), a.max(b));
                *counts.entry(key).or_insert(0) += 1;
            }
        }
        counts
    }

    /// Check every mesh invariant and return the violations found. An empty
    /// report means the mesh is valid.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.vertex_count();

        for v in 0..n {
            if self.position(v).iter().any(|c| !c.is_finite()) {
                violations.push(Violation::NonFiniteCoordinate { vertex: v });
            }
        }

        let mut referenced = vec![false; n];
        for (t, tri) in self.triangles.iter().enumerate() {
            let [i, j, k] = *tri;
            let mut oob = false;
            for v in [i, j, k] {
                if v >= n {
                    violations.push(Violation::IndexOutOfBounds { triangle: t, vertex: v });
                    oob = true;
                } else {
                    referenced[v] = true;
                }
            }
            if oob {
                continue;
            }
            if i == j || j == k || i == k {
                violations.push(Violation::DegenerateTriangle { triangle: t });
                continue;
            }
            if !(self.double_area(t) > 0.0) {
                violations.push(Violation::ZeroAreaTriangle { triangle: t });
            }
        }

        for (v, seen) in referenced.iter().enumerate() {
            if !seen {
                violations.push(Violation::IsolatedVertex { vertex: v });
            }
        }

        let edge_counts = self.edge_face_counts();
        let mut edges: Vec<(&(usize, usize), &usize)> = edge_counts.iter().collect();
        edges.sort();
        let mut boundary = vec![false; n];
        for (&(a, b), &c) in edges {
            if c > 2 {
                violations.push(Violation::NonManifoldEdge { a, b, faces: c });
            }
            if c == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }

        // Connectivity of the interior vertex graph (edges between two
        // interior vertices only).
        let interior: Vec<usize> = (0..n).filter(|&v| referenced[v] && !boundary[v]).collect();
        if interior.len() > 1 {
            let mut adj: HashMap<usize, Vec<usize>> = HashMap::new();
            for &(a, b) in edge_counts.keys() {
                if !boundary[a] && !boundary[b] {
                    adj.entry(a).or_default().push(b);
                    adj.entry(b).or_default().push(a);
                }
            }
            let mut seen: HashMap<usize, bool> =
                interior.iter().map(|&v| (v, false)).collect();
            let mut components = 0;
            for &start in &interior {
                if seen[&start] {
                    continue;
                }
                components += 1;
                let mut stack = vec![start];
                seen.insert(start, true);
                while let Some(v) = stack.pop() {
                    if let Some(nbrs) = adj.get(&v) {
                        for &w in nbrs {
                            if let Some(flag) = seen.get_mut(&w) {
                                if !*flag {
                                    *flag = true;
                                    stack.push(w);
                                }
                            }
                        }
                    }
                }
            }
            if components > 1 {
                violations.push(Violation::DisconnectedInterior { components });
            }
        }

        ValidationReport { violations }
    }

    /// `Ok(())` when the mesh is valid, otherwise the full report as an error.
    pub fn validated(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidMesh(report))
        }
    }

    /// Split vertices into boundary and interior. Deterministic: both lists
    /// are ascending. Requires a valid mesh.
    pub fn boundary_partition(&self) -> Result<BoundaryPartition> {
        self.validated()?;
        let n = self.vertex_count();
        let mut is_boundary = vec![false; n];
        for (&(a, b), &c) in self.edge_face_counts().iter() {
            if c == 1 {
                is_boundary[a] = true;
                is_boundary[b] = true;
            }
        }
        let (boundary, interior): (Vec<usize>, Vec<usize>) =
            (0..n).partition(|&v| is_boundary[v]);
        Ok(BoundaryPartition {
            interior,
            boundary,
            is_boundary,
        })
    }

    /// Uniformly scale all coordinates by `s > 0`; connectivity is unchanged.
    pub fn scale(&self, s: f64) -> Result<ImmersedMesh> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("scale factor must be positive, got {s}")));
        }
        Ok(ImmersedMesh {
            ambient_dim: self.ambient_dim,
            positions: self.positions.iter().map(|c| c * s).collect(),
            triangles: self.triangles.clone(),
        })
    }

    /// Translate all coordinates by `offset` (length `ambient_dim`).
    pub fn translate(&self, offset: &[f64]) -> Result<ImmersedMesh> {
        if offset.len() != self.ambient_dim {
            return Err(Error::domain(format!(
                "translation offset has length {}, expected ambient dimension {}",
                offset.len(),
                self.ambient_dim
            )));
        }
        let mut positions = self.positions.clone();
        for (i, c) in positions.iter_mut().enumerate() {
            *c += offset[i % self.ambient_dim];
        }
        Ok(ImmersedMesh {
            ambient_dim: self.ambient_dim,
            positions,
            triangles: self.triangles.clone(),
        })
    }

    /// Minimum and maximum edge length over all triangle edges.
    pub fn edge_length_range(&self) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max: f64 = 0.0;
        for &(a, b) in self.edge_face_counts().keys() {
            let (pa, pb) = (self.position(a), self.position(b));
            let len2: f64 = pa
                .iter()
                .zip(pb)
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            let len = len2.sqrt();
            min = min.min(len);
            max = max.max(len);
        }
        (min, max)
    }

    /// Sum of all triangle areas.
    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.double_area(t) / 2.0).sum()
    }
}
