use super::SurfaceMesh;
use crate::error::{Error, Result};

/// A region Ω of a surface carrying the Dirichlet condition ω = 0 on ∂Ω.
///
/// A simplex is interior when all of its vertices are kept; everything
/// touching an excluded vertex is removed from the function spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMesh {
    mesh: SurfaceMesh,
    interior: [Vec<usize>; 3],
    keep: Vec<bool>,
}

impl DomainMesh {
    /// The whole surface with no boundary condition.
    pub fn whole(mesh: SurfaceMesh) -> Self {
        let interior = [0, 1, 2].map(|p| (0..mesh.count(p)).collect());
        let keep = vec![true; mesh.num_vertices()];
        DomainMesh {
            mesh,
            interior,
            keep,
        }
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    /// Sorted indices of the interior p-simplices.
    pub fn interior(&self, p: usize) -> &[usize] {
        &self.interior[p.min(2)]
    }

    /// Interior p-simplex indices, or an error when the set is empty.
    pub fn interior_nonempty(&self, p: usize) -> Result<&[usize]> {
        let s = self.interior(p);
        if s.is_empty() || p > 2 {
            Err(Error::EmptyInterior(format!("no interior {p}-simplices")))
        } else {
            Ok(s)
        }
    }

    pub fn is_kept(&self, v: usize) -> bool {
        self.keep[v]
    }

    pub fn is_whole(&self) -> bool {
        self.keep.iter().all(|&k| k)
    }

    /// Excluded vertices adjacent to a kept vertex.
    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.mesh.num_vertices())
            .filter(|&v| !self.keep[v] && self.mesh.neighbors(v).iter().any(|&w| self.keep[w]))
            .collect()
    }
}

pub fn extract_domain(mesh: &SurfaceMesh, keep: impl Fn(usize) -> bool) -> Result<DomainMesh> {
    let keep: Vec<bool> = (0..mesh.num_vertices()).map(keep).collect();
    let vertices: Vec<usize> = (0..mesh.num_vertices()).filter(|&v| keep[v]).collect();
    if vertices.is_empty() {
        return Err(Error::EmptyInterior("predicate keeps no vertex".into()));
    }
    let edges = (0..mesh.num_edges())
        .filter(|&e| mesh.edges()[e].iter().all(|&v| keep[v]))
        .collect();
    let faces = (0..mesh.num_faces())
        .filter(|&f| mesh.faces()[f].iter().all(|&v| keep[v]))
        .collect();
    Ok(DomainMesh {
        mesh: mesh.clone(),
        interior: [vertices, edges, faces],
        keep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_sphere;

    #[test]
    fn whole_surface() {
        let m = make_sphere(1.0, 1).unwrap();
        let d = extract_domain(&m, |_| true).unwrap();
        assert_eq!(d, DomainMesh::whole(m.clone()));
        assert!(d.boundary_vertices().is_empty());
        assert_eq!(d.interior(1).len(), m.num_edges());
    }

    #[test]
    fn hemisphere_boundary_near_equator() {
        let m = make_sphere(1.0, 3).unwrap();
        let h = m.mean_edge_length();
        let d = extract_domain(&m, |v| m.vertex(v)[2] > 1e-9).unwrap();
        let b = d.boundary_vertices();
        assert!(!b.is_empty());
        for v in b {
            assert!(m.vertex(v)[2].abs() <= 1.5 * h);
        }
    }

    #[test]
    fn single_vertex_domain() {
        let m = make_sphere(1.0, 1).unwrap();
        let d = extract_domain(&m, |v| v == 0).unwrap();
        assert_eq!(d.interior(0), &[0]);
        assert!(d.interior_nonempty(1).is_err());
        assert!(d.interior_nonempty(2).is_err());
        assert!(extract_domain(&m, |_| false).is_err());
    }
}
