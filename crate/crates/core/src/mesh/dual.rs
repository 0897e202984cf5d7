use super::{add, cross, dot, norm, scale, sub, SurfaceMesh};
use crate::error::{Error, Result};

/// Rule for the edge dual lengths (and hence the 1-form Hodge star).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgeStar {
    /// Circumcentric duals: dual/primal = (cot α + cot β)/2.
    #[default]
    Cotan,
    /// Sum of midpoint-to-barycenter segments of the incident faces.
    Barycentric,
}

/// Primal and dual measures of every simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVolumes {
    /// Barycentric vertex areas, a third of each incident face.
    pub vertex_area: Vec<f64>,
    pub edge_length: Vec<f64>,
    pub edge_dual: Vec<f64>,
    pub face_area: Vec<f64>,
    pub edge_star: EdgeStar,
}

impl DualVolumes {
    pub fn total_area(&self) -> f64 {
        self.face_area.iter().sum()
    }

    /// Diagonal of the unweighted Hodge star in degree p.
    pub fn star(&self, p: usize) -> Vec<f64> {
        match p {
            0 => self.vertex_area.clone(),
            1 => self
                .edge_dual
                .iter()
                .zip(&self.edge_length)
                .map(|(d, l)| d / l)
                .collect(),
            2 => self.face_area.iter().map(|a| 1.0 / a).collect(),
            _ => Vec::new(),
        }
    }

    /// Dual cell area per vertex built from the edge duals (the Voronoi area
    /// for the cotan rule).
    pub fn cell_area(&self, m: &SurfaceMesh) -> Vec<f64> {
        let mut out = vec![0.0; m.num_vertices()];
        for (e, &[a, b]) in m.edges().iter().enumerate() {
            let x = 0.25 * self.edge_length[e] * self.edge_dual[e];
            out[a] += x;
            out[b] += x;
        }
        out
    }
}

pub fn dual_volumes(m: &SurfaceMesh) -> Result<DualVolumes> {
    dual_volumes_with(m, EdgeStar::Cotan)
}

pub fn dual_volumes_with(m: &SurfaceMesh, rule: EdgeStar) -> Result<DualVolumes> {
    let mut face_area = Vec::with_capacity(m.num_faces());
    let scale_len = m.mean_edge_length();
    for f in 0..m.num_faces() {
        let a = m.face_area(f);
        if !(a > 1e-14 * scale_len * scale_len) {
            return Err(Error::DegenerateFace(f));
        }
        face_area.push(a);
    }
    let mut vertex_area = vec![0.0; m.num_vertices()];
    for (f, &[a, b, c]) in m.faces().iter().enumerate() {
        for v in [a, b, c] {
            vertex_area[v] += face_area[f] / 3.0;
        }
    }
    let edge_length: Vec<f64> = (0..m.num_edges()).map(|e| m.edge_length(e)).collect();
    let mut edge_dual = vec![0.0; m.num_edges()];
    for (f, verts) in m.faces().iter().enumerate() {
        let fe = m.face_edges(f);
        for s in 0..3 {
            // face edge s runs verts[s] -> verts[s+1], opposite corner verts[s+2]
            let (e, _) = fe[s];
            let (pa, pb, pc) = (
                m.vertex(verts[s]),
                m.vertex(verts[(s + 1) % 3]),
                m.vertex(verts[(s + 2) % 3]),
            );
            edge_dual[e] += match rule {
                EdgeStar::Cotan => {
                    let (u, w) = (sub(pa, pc), sub(pb, pc));
                    0.5 * dot(u, w) / norm(cross(u, w)) * edge_length[e]
                }
                EdgeStar::Barycentric => {
                    let mid = scale(add(pa, pb), 0.5);
                    norm(sub(m.face_barycenter(f), mid))
                }
            };
        }
    }
    if rule == EdgeStar::Cotan {
        if let Some(e) = edge_dual.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::NonPositiveDual {
                edge: e,
                weight: edge_dual[e] / edge_length[e],
            });
        }
    }
    Ok(DualVolumes {
        vertex_area,
        edge_length,
        edge_dual,
        face_area,
        edge_star: rule,
    })
}
