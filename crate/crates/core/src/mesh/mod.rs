//! Oriented triangle meshes embedded in R³.

mod domain;
mod dual;
mod fixtures;
mod io;

pub use domain::{extract_domain, DomainMesh};
pub use dual::{dual_volumes, dual_volumes_with, DualVolumes, EdgeStar};
pub use fixtures::{
    make_cap, make_disk, make_sphere, make_torus, make_torus_patch, Fixture, FixtureSpec,
};
pub use io::{load_mesh, parse_obj, parse_off, write_off, MeshFormat};

use std::collections::HashMap;

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

pub(crate) fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Validated simplicial surface.
///
/// Edges are stored with sorted endpoints and carry the orientation low → high.
/// Face `(i, j, k)` has boundary `[i,j] + [j,k] + [k,i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceMesh {
    vertices: Vec<Vec3>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    face_edges: Vec<[(usize, i8); 3]>,
    edge_faces: Vec<Vec<usize>>,
    vertex_faces: Vec<Vec<usize>>,
    neighbors: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
}

impl SurfaceMesh {
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let nv = vertices.len();
        if let Some(v) = vertices
            .iter()
            .position(|p| p.iter().any(|c| !c.is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "non-finite coordinate at vertex {v}"
            )));
        }
        let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        // directed use of each undirected edge: +1 for low->high, -1 for high->low
        let mut uses: Vec<Vec<i8>> = Vec::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        let mut face_edges = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidFace {
                    face: fi,
                    reason: "vertex index out of range".into(),
                });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidFace {
                    face: fi,
                    reason: "repeated vertex".into(),
                });
            }
            let mut fe = [(0usize, 0i8); 3];
            for s in 0..3 {
                let (a, b) = (f[s], f[(s + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let sign: i8 = if a < b { 1 } else { -1 };
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    uses.push(Vec::new());
                    edge_faces.push(Vec::new());
                    edges.len() - 1
                });
                if uses[e].len() == 2 {
                    return Err(Error::NonManifoldEdge(key.0, key.1));
                }
                if uses[e].contains(&sign) {
                    return Err(Error::NonOrientable(key.0, key.1));
                }
                uses[e].push(sign);
                edge_faces[e].push(fi);
                fe[s] = (e, sign);
            }
            face_edges.push(fe);
        }
        let mut vertex_faces = vec![Vec::new(); nv];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                vertex_faces[v].push(fi);
            }
        }
        if let Some(v) = vertex_faces.iter().position(|f| f.is_empty()) {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} belongs to no face"
            )));
        }
        let mut neighbors = vec![Vec::new(); nv];
        for e in &edges {
            neighbors[e[0]].push(e[1]);
            neighbors[e[1]].push(e[0]);
        }
        for n in &mut neighbors {
            n.sort_unstable();
        }
        let mut boundary_vertex = vec![false; nv];
        for (e, f) in edges.iter().zip(&edge_faces) {
            if f.len() == 1 {
                boundary_vertex[e[0]] = true;
                boundary_vertex[e[1]] = true;
            }
        }
        Ok(SurfaceMesh {
            vertices,
            edges,
            faces,
            face_edges,
            edge_faces,
            vertex_faces,
            neighbors,
            boundary_vertex,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Number of p-simplices.
    pub fn count(&self, p: usize) -> usize {
        match p {
            0 => self.num_vertices(),
            1 => self.num_edges(),
            2 => self.num_faces(),
            _ => 0,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Oriented boundary edges of a face with their incidence signs.
    pub fn face_edges(&self, f: usize) -> &[(usize, i8); 3] {
        &self.face_edges[f]
    }

    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.edge_faces[e].len() == 1
    }

    pub fn is_closed(&self) -> bool {
        self.edge_faces.iter().all(|f| f.len() == 2)
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e];
        norm(sub(self.vertices[b], self.vertices[a]))
    }

    pub fn mean_edge_length(&self) -> f64 {
        (0..self.num_edges())
            .map(|e| self.edge_length(e))
            .sum::<f64>()
            / self.num_edges().max(1) as f64
    }

    /// Area-weighted normal (half the cross product) of a face.
    pub fn face_area_vector(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        scale(cross(sub(pb, pa), sub(pc, pa)), 0.5)
    }

    pub fn face_area(&self, f: usize) -> f64 {
        norm(self.face_area_vector(f))
    }

    pub fn face_barycenter(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.faces[f];
        scale(
            add(add(self.vertices[a], self.vertices[b]), self.vertices[c]),
            1.0 / 3.0,
        )
    }

    /// Unit normal from the area-weighted face normals of the one-ring.
    pub fn vertex_normal(&self, v: usize) -> Vec3 {
        let mut n = [0.0; 3];
        for &f in &self.vertex_faces[v] {
            n = add(n, self.face_area_vector(f));
        }
        let l = norm(n);
        if l > 0.0 {
            scale(n, 1.0 / l)
        } else {
            n
        }
    }

    /// Vertices within `k` edge hops of `v`, excluding `v`, in BFS order.
    pub fn ring(&self, v: usize, k: usize) -> Vec<usize> {
        let mut seen = vec![v];
        let mut frontier = vec![v];
        let mut out = Vec::new();
        for _ in 0..k {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in &self.neighbors[u] {
                    if !seen.contains(&w) {
                        seen.push(w);
                        next.push(w);
                        out.push(w);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Returns a copy with every face orientation reversed.
    pub fn flipped(&self) -> Result<Self> {
        SurfaceMesh::new(
            self.vertices.clone(),
            self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tetrahedron() -> SurfaceMesh {
        SurfaceMesh::new(
            vec![
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ],
            vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
        )
        .unwrap()
    }

    #[test]
    fn tetrahedron_topology() {
        let m = tetrahedron();
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.is_closed());
        for f in 0..4 {
            assert!(dot(m.face_area_vector(f), m.face_barycenter(f)) > 0.0);
        }
    }

    #[test]
    fn rejects_bad_faces() {
        let v = vec![
            [0.0; 3],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [1.0, 1.0, 1.0],
        ];
        let e = SurfaceMesh::new(v.clone(), vec![[0, 1, 2], [0, 1, 3], [0, 1, 4]]).unwrap_err();
        assert!(matches!(e, Error::NonOrientable(0, 1)));
        let e = SurfaceMesh::new(v.clone(), vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]]).unwrap_err();
        assert_eq!(e, Error::NonManifoldEdge(0, 1));
        let e = SurfaceMesh::new(v.clone(), vec![[0, 1, 7]]).unwrap_err();
        assert!(matches!(e, Error::InvalidFace { face: 0, .. }));
        let e = SurfaceMesh::new(v[..3].to_vec(), vec![[0, 1, 1]]).unwrap_err();
        assert!(matches!(e, Error::InvalidFace { .. }));
    }

    #[test]
    fn interior_edges_have_opposite_induced_orientation() {
        let m = tetrahedron();
        for e in 0..m.num_edges() {
            let signs: Vec<i8> = m
                .edge_faces(e)
                .iter()
                .map(|&f| m.face_edges(f).iter().find(|(ei, _)| *ei == e).unwrap().1)
                .collect();
            assert_eq!(signs.iter().map(|&s| s as i32).sum::<i32>(), 0);
        }
    }

    #[test]
    fn rings() {
        let m = tetrahedron();
        assert_eq!(m.ring(0, 1).len(), 3);
        assert_eq!(m.ring(0, 2).len(), 3);
    }
}
