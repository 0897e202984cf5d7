//! Pointwise values of discrete eigenforms at vertices.
//!
//! 1-forms are evaluated as Whitney forms at face barycenters, 2-forms as
//! densities over their face; both are area-averaged over the faces around
//! each vertex and expressed in the vertex frame.

use crate::extalg::PForm;
use crate::geometry::{CurvatureField, DIM};
use crate::mesh::{cross, norm, scale, sub, SurfaceMesh, Vec3};

/// Vertex samples of a set of eigenforms.
#[derive(Debug, Clone)]
pub struct SampledForms {
    /// Vertices where the forms may be nonzero.
    pub support: Vec<usize>,
    /// Quadrature weight (dual area · e^{−f}) per support vertex.
    pub weight: Vec<f64>,
    /// forms[i][s]: eigenform i at support vertex s, normalized so that
    /// Σ_s weight_s |ω_i|² = 1.
    pub forms: Vec<Vec<PForm>>,
}

impl SampledForms {
    /// ∫ g(v, ω_i) dμ_f for every form i.
    pub fn integrate(&self, mut g: impl FnMut(usize, &PForm) -> f64) -> Vec<f64> {
        self.forms
            .iter()
            .map(|form| {
                self.support
                    .iter()
                    .zip(&self.weight)
                    .zip(form)
                    .map(|((&v, w), om)| w * g(v, om))
                    .sum()
            })
            .collect()
    }
}

fn whitney_at_barycenter(m: &SurfaceMesh, f: usize, cochain: &dyn Fn(usize) -> f64) -> Vec3 {
    let [a, b, c] = m.faces()[f];
    let av = m.face_area_vector(f);
    let area = norm(av);
    let n = scale(av, 1.0 / area);
    let grad = |i: usize| {
        // ∇λ_i = n × (x_k − x_j) / 2A for the ccw triple (i, j, k)
        let (j, k) = if i == a {
            (b, c)
        } else if i == b {
            (c, a)
        } else {
            (a, b)
        };
        scale(cross(n, sub(m.vertex(k), m.vertex(j))), 1.0 / (2.0 * area))
    };
    let mut out = [0.0; 3];
    for &(e, _) in m.face_edges(f) {
        let [i, j] = m.edges()[e];
        let c = cochain(e);
        if c == 0.0 {
            continue;
        }
        // λ_i ∇λ_j − λ_j ∇λ_i at λ = 1/3
        let (gi, gj) = (grad(i), grad(j));
        for d in 0..3 {
            out[d] += c * (gj[d] - gi[d]) / 3.0;
        }
    }
    out
}

/// Samples cochains given on the simplices `index` (values on all other
/// p-simplices are zero).
pub fn sample_forms(
    m: &SurfaceMesh,
    c: &CurvatureField,
    vertex_weight: &[f64],
    p: usize,
    index: &[usize],
    vectors: &[Vec<f64>],
) -> SampledForms {
    let nv = m.num_vertices();
    let mut slot = vec![usize::MAX; m.count(p)];
    for (k, &i) in index.iter().enumerate() {
        slot[i] = k;
    }
    let touches = |f: usize| match p {
        0 => false,
        1 => m.face_edges(f).iter().any(|&(e, _)| slot[e] != usize::MAX),
        _ => slot[f] != usize::MAX,
    };
    let support: Vec<usize> = match p {
        0 => index.to_vec(),
        _ => (0..nv)
            .filter(|&v| m.vertex_faces(v).iter().any(|&f| touches(f)))
            .collect(),
    };
    let weight: Vec<f64> = support.iter().map(|&v| vertex_weight[v]).collect();
    let forms = vectors
        .iter()
        .map(|x| {
            let value = |s: usize| {
                if slot[s] == usize::MAX {
                    0.0
                } else {
                    x[slot[s]]
                }
            };
            let mut pts: Vec<PForm> = support
                .iter()
                .map(|&v| {
                    let coeffs = match p {
                        0 => vec![value(v)],
                        _ => {
                            let (mut acc, mut area) = (vec![0.0; if p == 1 { 3 } else { 1 }], 0.0);
                            for &f in m.vertex_faces(v) {
                                let af = m.face_area(f);
                                area += af;
                                if p == 1 {
                                    let w = whitney_at_barycenter(m, f, &value);
                                    acc.iter_mut().zip(w).for_each(|(a, wi)| *a += af * wi);
                                } else {
                                    acc[0] += value(f);
                                }
                            }
                            if p == 1 {
                                let avg = [acc[0] / area, acc[1] / area, acc[2] / area];
                                c.frame[v].project(avg).to_vec()
                            } else {
                                vec![acc[0] / area]
                            }
                        }
                    };
                    PForm::from_coeffs(DIM, p, coeffs).expect("degree checked")
                })
                .collect();
            let total: f64 = pts
                .iter()
                .zip(&weight)
                .map(|(om, w)| w * om.norm_sq())
                .sum();
            if total > 0.0 {
                let s = 1.0 / total.sqrt();
                pts = pts.iter().map(|om| om.scaled(s)).collect();
            }
            pts
        })
        .collect();
    SampledForms {
        support,
        weight,
        forms,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::incidence_d0;
    use crate::geometry::estimate_curvature;
    use crate::mesh::{dual_volumes, make_disk, make_sphere};
    use crate::sparse;

    #[test]
    fn exact_form_of_linear_function_is_constant() {
        let d = make_disk(1.0, 3).unwrap();
        let m = d.mesh();
        let dv = dual_volumes(m).unwrap();
        let c = estimate_curvature(m, &dv).unwrap();
        // d of x1 restricted to nothing: use all edges
        let x1: Vec<f64> = m.vertices().iter().map(|p| p[0] + 2.0 * p[1]).collect();
        let dx = sparse::matvec(&incidence_d0(m), &x1);
        let all: Vec<usize> = (0..m.num_edges()).collect();
        let s = sample_forms(m, &c, &vec![1.0; m.num_vertices()], 1, &all, &[dx]);
        // direction of (1, 2) in the frame, with unit total mass
        let first = s.forms[0][0].coeffs().to_vec();
        for om in &s.forms[0] {
            let a = c.frame[0].project([1.0, 2.0, 0.0]);
            let b = om.coeffs();
            assert!((a[0] * b[1] - a[1] * b[0]).abs() < 1e-9);
            assert!((om.norm_sq() - (first[0] * first[0] + first[1] * first[1])).abs() < 1e-9);
        }
        let total: f64 = s
            .weight
            .iter()
            .zip(&s.forms[0])
            .map(|(w, om)| w * om.norm_sq())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn face_density_of_area_form() {
        let m = make_sphere(1.0, 2).unwrap();
        let dv = dual_volumes(&m).unwrap();
        let c = estimate_curvature(&m, &dv).unwrap();
        let areas: Vec<f64> = (0..m.num_faces()).map(|f| m.face_area(f)).collect();
        let all: Vec<usize> = (0..m.num_faces()).collect();
        let s = sample_forms(&m, &c, &dv.vertex_area, 2, &all, &[areas]);
        let v0 = s.forms[0][0].coeffs()[0];
        assert!(v0 > 0.0);
        assert!(s.forms[0]
            .iter()
            .all(|om| (om.coeffs()[0] - v0).abs() < 1e-12));
        let integral = s.integrate(|_, om| om.norm_sq());
        assert!((integral[0] - 1.0).abs() < 1e-12);
    }
}
