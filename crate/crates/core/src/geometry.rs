//! Per-vertex curvature of an embedded surface.
//!
//! Sign convention: ν is the face-orientation normal (outward on fixtures)
//! and `shape` is the Weingarten map dν, positive on convex surfaces. The
//! standard second fundamental form in direction ν is then `−shape`, the mean
//! curvature is `H = trace(shape)/n` and the mean curvature vector is `−H ν`.
//! With these choices the closed-form Laplacian of `a|X|²/2` vanishes on the
//! sphere of radius √2.

use nalgebra::{DMatrix, DVector, Matrix2, SymmetricEigen};
use rayon::prelude::*;

use crate::dec::assemble_samples;
use crate::error::{Error, Result};
use crate::extalg::{extend_endo, FormEndo, SymEndo};
use crate::mesh::{cross, dot, norm, scale, sub, DualVolumes, SurfaceMesh, Vec3};
use crate::sparse;

pub const DIM: usize = 2;

/// Orthonormal frame (t1, t2, ν) at a vertex, right-handed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t1: Vec3,
    pub t2: Vec3,
    pub normal: Vec3,
}

impl Frame {
    pub fn from_normal(n: Vec3) -> Self {
        let axis = if n[0].abs() <= n[1].abs() && n[0].abs() <= n[2].abs() {
            [1.0, 0.0, 0.0]
        } else if n[1].abs() <= n[2].abs() {
            [0.0, 1.0, 0.0]
        } else {
            [0.0, 0.0, 1.0]
        };
        let t1 = cross(axis, n);
        let t1 = scale(t1, 1.0 / norm(t1));
        let t2 = cross(n, t1);
        Frame { t1, t2, normal: n }
    }

    /// Tangential components of an ambient vector.
    pub fn project(&self, v: Vec3) -> [f64; 2] {
        [dot(v, self.t1), dot(v, self.t2)]
    }

    pub fn local(&self, v: Vec3) -> Vec3 {
        [dot(v, self.t1), dot(v, self.t2), dot(v, self.normal)]
    }

    /// Projections of the ambient basis vectors e_1, e_2, e_3 onto the tangent plane.
    pub fn projected_basis(&self) -> Vec<Vec<f64>> {
        (0..3).map(|i| vec![self.t1[i], self.t2[i]]).collect()
    }
}

/// Curvature data per vertex.
#[derive(Debug, Clone)]
pub struct CurvatureField {
    pub frame: Vec<Frame>,
    /// Weingarten map dν in the frame (t1, t2).
    pub shape: Vec<SymEndo>,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
    /// H = trace(shape)/n.
    pub mean: Vec<f64>,
    /// Angle defect over the dual cell area at interior vertices, det(shape) on the boundary.
    pub gauss: Vec<f64>,
    /// H from the cotangent Laplacian of the position, signed against ν.
    pub mean_cotan: Vec<f64>,
    pub gamma_m: f64,
}

impl CurvatureField {
    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn normal(&self, v: usize) -> Vec3 {
        self.frame[v].normal
    }

    /// Scal = 2K.
    pub fn scal(&self, v: usize) -> f64 {
        2.0 * self.gauss[v]
    }

    /// |II|² = k1² + k2².
    pub fn ii_norm_sq(&self, v: usize) -> f64 {
        self.k1[v].powi(2) + self.k2[v].powi(2)
    }

    /// Mean curvature vector −H ν.
    pub fn mean_vector(&self, v: usize) -> Vec3 {
        scale(self.frame[v].normal, -self.mean[v])
    }
}

/// Least-squares fit of `z = a x² + b xy + c y² + d x + e y` through the origin.
/// Returns (Hessian [[2a,b],[b,2c]], gradient (d,e)).
pub(crate) fn fit_quadric(points: &[[f64; 3]]) -> Option<(Matrix2<f64>, [f64; 2])> {
    if points.len() < 5 {
        return None;
    }
    let a = DMatrix::from_fn(points.len(), 5, |r, c| {
        let [x, y, _] = points[r];
        [x * x, x * y, y * y, x, y][c]
    });
    let b = DVector::from_iterator(points.len(), points.iter().map(|p| p[2]));
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    if !(svd.singular_values.min() > 1e-8 * smax) {
        return None;
    }
    let sol = svd.solve(&b, 0.0).ok()?;
    Some((
        Matrix2::new(2.0 * sol[0], sol[1], sol[1], 2.0 * sol[2]),
        [sol[3], sol[4]],
    ))
}

/// Fits in the frame at `v`, scaling coordinates by `h`. Values are
/// `value(q) − value(v)` for each neighbour q; `None` means use the normal offset.
pub(crate) fn fit_at(
    m: &SurfaceMesh,
    v: usize,
    frame: &Frame,
    h: f64,
    values: Option<&[f64]>,
) -> Result<(Matrix2<f64>, [f64; 2])> {
    for k in [2, 3] {
        let pts: Vec<[f64; 3]> = m
            .ring(v, k)
            .into_iter()
            .map(|q| {
                let l = frame.local(sub(m.vertex(q), m.vertex(v)));
                let z = match values {
                    Some(f) => f[q] - f[v],
                    None => l[2],
                };
                [l[0] / h, l[1] / h, z / h]
            })
            .collect();
        if let Some((hess, g)) = fit_quadric(&pts) {
            return Ok((hess / h, g));
        }
    }
    Err(Error::RankDeficientFit(v))
}

fn angle_at(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let (u, w) = (sub(b, a), sub(c, a));
    norm(cross(u, w)).atan2(dot(u, w))
}

pub fn estimate_curvature(m: &SurfaceMesh, dv: &DualVolumes) -> Result<CurvatureField> {
    let h = m.mean_edge_length();
    let fitted: Vec<(Frame, SymEndo)> = (0..m.num_vertices())
        .into_par_iter()
        .map(|v| {
            let mut frame = Frame::from_normal(m.vertex_normal(v));
            // refit once in the frame of the fitted normal so the gradient vanishes
            let (_, g) = fit_at(m, v, &frame, h, None)?;
            let n_local = [-g[0], -g[1], 1.0];
            let l = norm(n_local);
            let n = [0, 1, 2].map(|i| {
                (n_local[0] * frame.t1[i] + n_local[1] * frame.t2[i] + n_local[2] * frame.normal[i])
                    / l
            });
            frame = Frame::from_normal(n);
            let (hess, g) = fit_at(m, v, &frame, h, None)?;
            let w = (1.0 + g[0] * g[0] + g[1] * g[1]).sqrt();
            // shape = −G^{−1/2} Hess G^{−1/2} / W, with G = I + g gᵀ
            let gm = Matrix2::new(
                1.0 + g[0] * g[0],
                g[0] * g[1],
                g[0] * g[1],
                1.0 + g[1] * g[1],
            );
            let e = SymmetricEigen::new(gm);
            let inv_sqrt = e.eigenvectors
                * Matrix2::from_diagonal(&e.eigenvalues.map(|x| 1.0 / x.sqrt()))
                * e.eigenvectors.transpose();
            let s = -(inv_sqrt * hess * inv_sqrt) / w;
            Ok((
                frame,
                SymEndo::from_fn(DIM, |i, j| 0.5 * (s[(i, j)] + s[(j, i)])),
            ))
        })
        .collect::<Result<_>>()?;
    let (frame, shape): (Vec<Frame>, Vec<SymEndo>) = fitted.into_iter().unzip();
    let mut k1 = Vec::with_capacity(shape.len());
    let mut k2 = Vec::with_capacity(shape.len());
    for s in &shape {
        let ev = s.eigenvalues();
        k1.push(ev[0]);
        k2.push(ev[1]);
    }
    let mean: Vec<f64> = shape.iter().map(|s| s.trace() / DIM as f64).collect();

    let mut angle_sum = vec![0.0; m.num_vertices()];
    for &[a, b, c] in m.faces() {
        let (pa, pb, pc) = (m.vertex(a), m.vertex(b), m.vertex(c));
        angle_sum[a] += angle_at(pa, pb, pc);
        angle_sum[b] += angle_at(pb, pc, pa);
        angle_sum[c] += angle_at(pc, pa, pb);
    }
    let cell = dv.cell_area(m);
    let gauss: Vec<f64> = (0..m.num_vertices())
        .map(|v| {
            if m.is_boundary_vertex(v) {
                k1[v] * k2[v]
            } else {
                (2.0 * std::f64::consts::PI - angle_sum[v]) / cell[v]
            }
        })
        .collect();

    // cotan cross-check: L0 X = W0 · n · H_vec, with H_vec = −H ν
    let ops = assemble_samples(m, dv, &vec![0.0; m.num_vertices()])?;
    let l0 = ops.unweighted().pair(0)?.stiffness;
    let mut lx = [vec![], vec![], vec![]];
    for (c, out) in lx.iter_mut().enumerate() {
        let coord: Vec<f64> = m.vertices().iter().map(|p| p[c]).collect();
        *out = sparse::matvec(&l0, &coord);
    }
    let mean_cotan = (0..m.num_vertices())
        .map(|v| {
            let hv = [0, 1, 2].map(|c| lx[c][v] / cell[v] / DIM as f64);
            dot(hv, frame[v].normal)
        })
        .collect();

    let gamma_m = gauss.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(CurvatureField {
        frame,
        shape,
        k1,
        k2,
        mean,
        gauss,
        mean_cotan,
        gamma_m,
    })
}

/// II^{[p]} in direction ν (as the Weingarten map), per vertex.
pub fn sff_on_forms(c: &CurvatureField, p: usize) -> Result<Vec<FormEndo>> {
    c.shape.iter().map(|s| extend_endo(s, p)).collect()
}

/// 𝔅^{[p]} = nH·S^{[p]} − (S^{[p]})² for a hypersurface with Weingarten map S.
pub fn bochner_ext(c: &CurvatureField, p: usize) -> Result<Vec<FormEndo>> {
    c.shape
        .iter()
        .zip(&c.mean)
        .map(|(s, &h)| {
            let e = extend_endo(s, p)?;
            Ok(e.scaled(DIM as f64 * h).sub(&e.square()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extalg::frame_sum_checks;
    use crate::mesh::{dual_volumes, make_disk, make_sphere, make_torus};

    fn field(m: &SurfaceMesh) -> CurvatureField {
        estimate_curvature(m, &dual_volumes(m).unwrap()).unwrap()
    }

    fn max_rel(xs: &[f64], target: f64) -> f64 {
        xs.iter()
            .map(|x| (x - target).abs() / target.abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn unit_sphere_level4() {
        let m = make_sphere(1.0, 4).unwrap();
        let c = field(&m);
        assert!(max_rel(&c.k1, 1.0) < 0.02);
        assert!(max_rel(&c.k2, 1.0) < 0.02);
        assert!(max_rel(&c.mean, 1.0) < 0.02);
        assert!(max_rel(&c.gauss, 1.0) < 0.02, "{}", max_rel(&c.gauss, 1.0));
        let ii: Vec<f64> = (0..c.len()).map(|v| c.ii_norm_sq(v)).collect();
        assert!(max_rel(&ii, 2.0) < 0.02);
        assert!(
            max_rel(&c.mean_cotan, 1.0) < 0.02,
            "{}",
            max_rel(&c.mean_cotan, 1.0)
        );
        assert!((c.gamma_m - 1.0).abs() < 0.02);
        for v in 0..c.len() {
            assert!((norm(c.normal(v)) - 1.0).abs() < 1e-12);
            assert!(dot(c.normal(v), m.vertex(v)) > 0.0);
        }
    }

    #[test]
    fn sphere_sqrt2() {
        let r = 2f64.sqrt();
        let c = field(&make_sphere(r, 4).unwrap());
        assert!(max_rel(&c.mean, 1.0 / r) < 0.02);
        assert!(max_rel(&c.gauss, 0.5) < 0.02);
        assert!((c.gamma_m - 0.5).abs() < 0.01);
    }

    #[test]
    fn flat_disk() {
        let d = make_disk(1.0, 3).unwrap();
        let c = field(d.mesh());
        for v in 0..c.len() {
            assert!(c.mean[v].abs() < 1e-6 && c.gauss[v].abs() < 1e-6);
        }
        assert!(bochner_ext(&c, 1)
            .unwrap()
            .iter()
            .all(|b| b.matrix().amax() < 1e-6));
    }

    #[test]
    fn gauss_bonnet_is_exact() {
        for m in [
            make_sphere(1.0, 3).unwrap(),
            make_torus(2.0, 1.0, 24, 12).unwrap(),
        ] {
            let dv = dual_volumes(&m).unwrap();
            let c = estimate_curvature(&m, &dv).unwrap();
            let total: f64 = c
                .gauss
                .iter()
                .zip(&dv.cell_area(&m))
                .map(|(k, a)| k * a)
                .sum();
            let want = 2.0 * std::f64::consts::PI * m.euler_characteristic() as f64;
            assert!((total - want).abs() < 1e-8, "{total} vs {want}");
        }
    }

    #[test]
    fn forms_extensions_on_unit_sphere() {
        let c = field(&make_sphere(1.0, 4).unwrap());
        for (p, target) in [(1usize, 1.0), (2, 2.0)] {
            for e in sff_on_forms(&c, p).unwrap() {
                for ev in e.eigenvalues() {
                    assert!((ev - target).abs() < 0.02 * target);
                }
            }
        }
        assert!(sff_on_forms(&c, 0)
            .unwrap()
            .iter()
            .all(|e| e.matrix()[(0, 0)] == 0.0));
        for (b, v) in bochner_ext(&c, 1).unwrap().iter().zip(0..) {
            for ev in b.eigenvalues() {
                assert!((ev - 1.0).abs() < 0.04);
            }
            assert!((b.matrix().trace() - c.scal(v)).abs() < 0.05 * c.scal(v));
        }
    }

    #[test]
    fn bochner_sqrt2_sphere() {
        let c = field(&make_sphere(2f64.sqrt(), 4).unwrap());
        for b in bochner_ext(&c, 1).unwrap() {
            for ev in b.eigenvalues() {
                assert!((ev - 0.5).abs() < 0.02);
            }
        }
    }

    #[test]
    fn frame_sums_at_every_vertex() {
        let m = make_torus(2.0, 1.0, 24, 12).unwrap();
        let c = field(&m);
        for (v, f) in c.frame.iter().enumerate() {
            let x = f.project(m.vertex(v));
            let s1 = frame_sum_checks(2, 1, &f.projected_basis(), &x, 1e-10).unwrap();
            let s2 = frame_sum_checks(2, 2, &f.projected_basis(), &x, 1e-10).unwrap();
            assert!(s1.max_error() < 1e-10 && s2.max_error() < 1e-10);
        }
    }

    #[test]
    fn flipped_orientation_negates_shape() {
        let m = make_sphere(1.0, 2).unwrap();
        let a = field(&m);
        let b = field(&m.flipped().unwrap());
        for v in 0..a.len() {
            assert!((a.mean[v] + b.mean[v]).abs() < 1e-9);
            assert!((a.gauss[v] - b.gauss[v]).abs() < 1e-9);
            assert!((a.ii_norm_sq(v) - b.ii_norm_sq(v)).abs() < 1e-9);
        }
    }
}
