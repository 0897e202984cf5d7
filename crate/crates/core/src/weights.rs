//! Weight functions f with their derived fields.
//!
//! Δ is the geometer's (positive) Laplacian, Δ = δd. Gradients and
//! Hessians at a vertex are expressed in that vertex's tangent frame.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::dec::assemble_samples;
use crate::error::{Error, Result};
use crate::extalg::{extend_endo, FormEndo, SymEndo};
use crate::geometry::{fit_at, CurvatureField, DIM};
use crate::mesh::{cross, dot, norm, scale, sub, DualVolumes, SurfaceMesh, Vec3};
use crate::sparse;

/// Curvature bounds feeding the comparison function H_l.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureBounds {
    /// Ric ≥ (n−1) l.
    Ricci(f64),
    /// l1 ≤ K ≤ l2.
    Sectional(f64, f64),
}

impl CurvatureBounds {
    /// Parses `ricci:L` or `sectional:L1,L2`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("invalid curvature bounds '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        match s.split_once(':') {
            Some(("ricci", l)) => Ok(CurvatureBounds::Ricci(num(l)?)),
            Some(("sectional", rest)) => {
                let (l1, l2) = rest.split_once(',').ok_or_else(bad)?;
                let (l1, l2) = (num(l1)?, num(l2)?);
                if l1 > l2 {
                    return Err(bad());
                }
                Ok(CurvatureBounds::Sectional(l1, l2))
            }
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            CurvatureBounds::Ricci(l) => format!("ricci:{l}"),
            CurvatureBounds::Sectional(l1, l2) => format!("sectional:{l1},{l2}"),
        }
    }

    /// The lower bound used in H_l.
    pub fn lower(&self) -> f64 {
        match *self {
            CurvatureBounds::Ricci(l) => l,
            CurvatureBounds::Sectional(l1, _) => l1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Zero,
    Radial { a: f64 },
    Distance { x0: usize, a: f64 },
    Custom,
}

impl WeightKind {
    pub fn label(&self) -> String {
        match self {
            WeightKind::Zero => "zero".into(),
            WeightKind::Radial { a } => format!("radial:{a}"),
            WeightKind::Distance { x0, a } => format!("distance:{a}@{x0}"),
            WeightKind::Custom => "custom".into(),
        }
    }
}

/// f and its derived fields on a mesh.
#[derive(Debug, Clone)]
pub struct WeightField {
    pub kind: WeightKind,
    f: Vec<f64>,
    /// Tangential gradient per vertex, in the vertex frame.
    pub grad: Vec<[f64; 2]>,
    /// Gradient of the linear interpolant per face (ambient components).
    pub grad_face: Vec<Vec3>,
    pub df_norm_sq: Vec<f64>,
    /// Δf with Δ = δd.
    pub laplacian: Vec<f64>,
    pub hessian: Vec<SymEndo>,
}

impl WeightField {
    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn is_zero(&self) -> bool {
        self.kind == WeightKind::Zero
    }

    /// Ambient Hessian Hess f(ν,ν) and normal derivative ∂f/∂ν at a vertex,
    /// available only for the radial family.
    pub fn ambient_normal_terms(
        &self,
        m: &SurfaceMesh,
        c: &CurvatureField,
        v: usize,
    ) -> Option<(f64, f64)> {
        match self.kind {
            WeightKind::Radial { a } => Some((a, a * dot(m.vertex(v), c.normal(v)))),
            WeightKind::Zero => Some((0.0, 0.0)),
            _ => None,
        }
    }
}

/// Gradient of the piecewise-linear interpolant on each face.
fn face_gradients(m: &SurfaceMesh, f: &[f64]) -> Vec<Vec3> {
    m.faces()
        .iter()
        .enumerate()
        .map(|(fi, &[a, b, c])| {
            let av = m.face_area_vector(fi);
            let area = norm(av);
            let n = scale(av, 1.0 / area);
            let mut g = [0.0; 3];
            // ∇λ_i = n × (opposite edge) / (2A), edges ccw
            for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b)] {
                let grad_i = scale(cross(n, sub(m.vertex(k), m.vertex(j))), 1.0 / (2.0 * area));
                for d in 0..3 {
                    g[d] += f[i] * grad_i[d];
                }
            }
            g
        })
        .collect()
}

pub fn zero_weight(m: &SurfaceMesh) -> WeightField {
    let nv = m.num_vertices();
    WeightField {
        kind: WeightKind::Zero,
        f: vec![0.0; nv],
        grad: vec![[0.0; 2]; nv],
        grad_face: vec![[0.0; 3]; m.num_faces()],
        df_norm_sq: vec![0.0; nv],
        laplacian: vec![0.0; nv],
        hessian: vec![SymEndo::zeros(DIM); nv],
    }
}

/// f = a|X|²/2 with closed-form derived fields.
pub fn radial_weight(m: &SurfaceMesh, c: &CurvatureField, a: f64) -> Result<WeightField> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radial weight needs a > 0, got {a}"
        )));
    }
    let n = DIM as f64;
    let nv = m.num_vertices();
    let mut f = Vec::with_capacity(nv);
    let mut grad = Vec::with_capacity(nv);
    let mut df_norm_sq = Vec::with_capacity(nv);
    let mut laplacian = Vec::with_capacity(nv);
    let mut hessian = Vec::with_capacity(nv);
    for v in 0..nv {
        let x = m.vertex(v);
        let fr = &c.frame[v];
        let xn = dot(x, fr.normal);
        let x2 = dot(x, x);
        f.push(0.5 * a * x2);
        grad.push([a * dot(x, fr.t1), a * dot(x, fr.t2)]);
        df_norm_sq.push(a * a * (x2 - xn * xn));
        laplacian.push(-a * n * (1.0 - c.mean[v] * xn));
        hessian.push(
            SymEndo::identity(DIM)
                .add(&c.shape[v].scaled(-xn))
                .scaled(a),
        );
    }
    let grad_face = (0..m.num_faces())
        .map(|fi| {
            let x = m.face_barycenter(fi);
            let av = m.face_area_vector(fi);
            let nrm = scale(av, 1.0 / norm(av));
            scale(sub(x, scale(nrm, dot(x, nrm))), a)
        })
        .collect();
    Ok(WeightField {
        kind: WeightKind::Radial { a },
        f,
        grad,
        grad_face,
        df_norm_sq,
        laplacian,
        hessian,
    })
}

/// Numerically derived fields for arbitrary vertex samples.
///
/// Gradient and Hessian come from a quadric fit over the 2-ring in the
/// vertex frame; Δf is the cotangent Laplacian at interior vertices and
/// −trace(Hess f) at mesh-boundary vertices, where the one-sided cotangent
/// stencil does not approximate Δ.
pub fn custom_weight(
    m: &SurfaceMesh,
    dv: &DualVolumes,
    c: &CurvatureField,
    samples: &[f64],
) -> Result<WeightField> {
    if samples.len() != m.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: m.num_vertices(),
            got: samples.len(),
        });
    }
    if let Some(v) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteWeight(v));
    }
    let h = m.mean_edge_length();
    let fits: Vec<(SymEndo, [f64; 2])> = (0..m.num_vertices())
        .into_par_iter()
        .map(|v| {
            let (hess, g) = fit_at(m, v, &c.frame[v], h, Some(samples))?;
            Ok((
                SymEndo::from_fn(DIM, |i, j| 0.5 * (hess[(i, j)] + hess[(j, i)])),
                g,
            ))
        })
        .collect::<Result<_>>()?;
    let ops = assemble_samples(m, dv, &vec![0.0; m.num_vertices()])?;
    let l0 = ops.unweighted().pair(0)?.stiffness;
    let lf = sparse::matvec(&l0, samples);
    let (hessian, grad): (Vec<SymEndo>, Vec<[f64; 2]>) = fits.into_iter().unzip();
    let laplacian = (0..m.num_vertices())
        .map(|v| {
            if m.is_boundary_vertex(v) {
                -hessian[v].trace()
            } else {
                lf[v] / dv.vertex_area[v]
            }
        })
        .collect();
    let df_norm_sq = grad.iter().map(|g| g[0] * g[0] + g[1] * g[1]).collect();
    Ok(WeightField {
        kind: WeightKind::Custom,
        f: samples.to_vec(),
        grad,
        grad_face: face_gradients(m, samples),
        df_norm_sq,
        laplacian,
        hessian,
    })
}

/// Comparison function H_l(r) for dimension n.
pub fn comparison_h(n: usize, l: f64, r: f64) -> f64 {
    let k = (n - 1) as f64;
    if l > 0.0 {
        k * l.sqrt() / (l.sqrt() * r).tan()
    } else if l == 0.0 {
        k / r
    } else {
        k * (-l).sqrt() / ((-l).sqrt() * r).tanh()
    }
}

/// r·H_l(r), continuous at r = 0 with value n−1.
pub fn r_times_h(n: usize, l: f64, r: f64) -> f64 {
    if r == 0.0 {
        (n - 1) as f64
    } else {
        r * comparison_h(n, l, r)
    }
}

/// Geodesic-distance data of a distance weight.
#[derive(Debug, Clone)]
pub struct ComparisonData {
    pub x0: usize,
    pub distance: Vec<f64>,
    pub bounds: CurvatureBounds,
    /// d·H_l(d) for the lower bound l (l1 in the sectional case).
    pub d_h_lower: Vec<f64>,
    /// d·H_{l2}(d) in the sectional case.
    pub d_h_upper: Option<Vec<f64>>,
    /// Vertices with √l·d ≥ π, where the cotangent is singular.
    pub flagged: Vec<bool>,
    /// Heuristic bound on |d_graph − d_true| per vertex.
    pub metric_error: Vec<f64>,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Dijkstra distances along mesh edges.
pub fn graph_distance(m: &SurfaceMesh, x0: usize) -> Result<Vec<f64>> {
    if x0 >= m.num_vertices() {
        return Err(Error::InvalidArgument(format!(
            "base vertex {x0} out of range"
        )));
    }
    let mut dist = vec![f64::INFINITY; m.num_vertices()];
    dist[x0] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, x0));
    while let Some(Entry(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &w in m.neighbors(v) {
            let nd = d + norm(sub(m.vertex(w), m.vertex(v)));
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Entry(nd, w));
            }
        }
    }
    if let Some(v) = dist.iter().position(|d| d.is_infinite()) {
        return Err(Error::Disconnected(v));
    }
    Ok(dist)
}

fn flag(l: f64, d: f64) -> bool {
    l > 0.0 && l.sqrt() * d >= std::f64::consts::PI
}

/// f = a·d²/2 for the graph distance d from `x0`, derived fields numerically.
/// Also returns the distances.
pub fn distance_weight(
    m: &SurfaceMesh,
    dv: &DualVolumes,
    c: &CurvatureField,
    x0: usize,
    a: f64,
) -> Result<(WeightField, Vec<f64>)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "distance weight needs a > 0, got {a}"
        )));
    }
    let distance = graph_distance(m, x0)?;
    let samples: Vec<f64> = distance.iter().map(|d| 0.5 * a * d * d).collect();
    let mut w = custom_weight(m, dv, c, &samples)?;
    w.kind = WeightKind::Distance { x0, a };
    Ok((w, distance))
}

impl ComparisonData {
    pub fn new(m: &SurfaceMesh, x0: usize, distance: Vec<f64>, bounds: CurvatureBounds) -> Self {
        let lower = bounds.lower();
        let d_h_lower: Vec<f64> = distance.iter().map(|&d| r_times_h(DIM, lower, d)).collect();
        let d_h_upper = match bounds {
            CurvatureBounds::Sectional(_, l2) => {
                Some(distance.iter().map(|&d| r_times_h(DIM, l2, d)).collect())
            }
            CurvatureBounds::Ricci(_) => None,
        };
        let flagged = distance
            .iter()
            .map(|&d| {
                flag(lower, d) || matches!(bounds, CurvatureBounds::Sectional(_, l2) if flag(l2, d))
            })
            .collect();
        let h = m.mean_edge_length();
        let metric_error = distance
            .iter()
            .map(|d| (2.0 / 3f64.sqrt() - 1.0) * d + 2.0 * h)
            .collect();
        ComparisonData {
            x0,
            distance,
            bounds,
            d_h_lower,
            d_h_upper,
            flagged,
            metric_error,
        }
    }
}

/// Base vertex and graph distances of a distance weight.
pub type DistanceData = (usize, Vec<f64>);

/// Parsed weight choice, before it is built on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    Zero,
    Radial(f64),
    /// Base vertex defaults to the fixture centre when None.
    Distance {
        a: f64,
        x0: Option<usize>,
    },
    Custom(Vec<f64>),
}

impl WeightSpec {
    /// Parses `zero`, `radial:A`, `distance:A`, `distance:A@X0` or
    /// `dist:X0,A`. Custom weights are loaded from files by the caller.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("invalid weight spec '{s}'"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        match s.split_once(':') {
            None if s == "zero" => Ok(WeightSpec::Zero),
            Some(("radial", a)) => Ok(WeightSpec::Radial(num(a)?)),
            Some(("distance", rest)) => match rest.split_once('@') {
                Some((a, x0)) => Ok(WeightSpec::Distance {
                    a: num(a)?,
                    x0: Some(x0.trim().parse().map_err(|_| bad())?),
                }),
                None => Ok(WeightSpec::Distance {
                    a: num(rest)?,
                    x0: None,
                }),
            },
            Some(("dist", rest)) => {
                let (x0, a) = rest.split_once(',').ok_or_else(bad)?;
                Ok(WeightSpec::Distance {
                    a: num(a)?,
                    x0: Some(x0.trim().parse().map_err(|_| bad())?),
                })
            }
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSpec::Zero => "zero".into(),
            WeightSpec::Radial(a) => format!("radial:{a}"),
            WeightSpec::Distance { a, x0: Some(x) } => format!("distance:{a}@{x}"),
            WeightSpec::Distance { a, x0: None } => format!("distance:{a}"),
            WeightSpec::Custom(_) => "custom".into(),
        }
    }

    /// Builds the field; distance weights also return their distances.
    pub fn build(
        &self,
        m: &SurfaceMesh,
        dv: &DualVolumes,
        c: &CurvatureField,
        center: usize,
    ) -> Result<(WeightField, Option<DistanceData>)> {
        Ok(match self {
            WeightSpec::Zero => (zero_weight(m), None),
            WeightSpec::Radial(a) => (radial_weight(m, c, *a)?, None),
            WeightSpec::Distance { a, x0 } => {
                let x0 = x0.unwrap_or(center);
                let (w, d) = distance_weight(m, dv, c, x0, *a)?;
                (w, Some((x0, d)))
            }
            WeightSpec::Custom(samples) => (custom_weight(m, dv, c, samples)?, None),
        })
    }
}

/// Reads one weight value per vertex: either one number per line or
/// `vertex,value` rows. A non-numeric first line is a header.
pub fn read_weight_csv(text: &str, num_vertices: usize) -> Result<Vec<f64>> {
    let mut out = vec![f64::NAN; num_vertices];
    let mut next = 0usize;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let row = match fields.as_slice() {
            [x] => x.parse::<f64>().ok().map(|x| (next, x)),
            [i, x] => i.parse::<usize>().ok().zip(x.parse::<f64>().ok()),
            _ => None,
        };
        let (v, value) = match row {
            Some(r) => r,
            // a non-numeric first row is a header
            None if ln == 0 => continue,
            None => {
                return Err(Error::Parse {
                    line: ln + 1,
                    message: format!("bad row '{line}'"),
                })
            }
        };
        if v >= num_vertices {
            return Err(Error::Parse {
                line: ln + 1,
                message: format!("vertex {v} out of range"),
            });
        }
        out[v] = value;
        next = v + 1;
    }
    if let Some(v) = out.iter().position(|x| x.is_nan()) {
        return Err(Error::InvalidArgument(format!(
            "weight file has no value for vertex {v}"
        )));
    }
    Ok(out)
}

/// T_f^{[p]} = extension of Hess f, per vertex. For radial weights the
/// closed form a(p·I + II^{[p]}_{X^N}) is evaluated as well and must agree.
pub fn t_f_on_forms(
    m: &SurfaceMesh,
    c: &CurvatureField,
    w: &WeightField,
    p: usize,
) -> Result<Vec<FormEndo>> {
    let ext: Vec<FormEndo> = w
        .hessian
        .iter()
        .map(|h| extend_endo(h, p))
        .collect::<Result<_>>()?;
    if let WeightKind::Radial { a } = w.kind {
        for (v, e) in ext.iter().enumerate() {
            let xn = dot(m.vertex(v), c.normal(v));
            let s = extend_endo(&c.shape[v], p)?;
            let closed = FormEndo::identity(DIM, p)
                .scaled(p as f64)
                .sub(&s.scaled(xn))
                .scaled(a);
            let gap = closed.max_abs_diff(e);
            if gap > 1e-9 * (1.0 + closed.matrix().amax()) {
                return Err(Error::EstimatorInconsistency(format!(
                    "T_f closed form differs by {gap:.3e} at vertex {v}"
                )));
            }
        }
    }
    Ok(ext)
}

/// Scal_f = Scal − Δf.
pub fn scal_f(c: &CurvatureField, w: &WeightField) -> Vec<f64> {
    (0..c.len()).map(|v| c.scal(v) - w.laplacian[v]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::estimate_curvature;
    use crate::mesh::{dual_volumes, make_disk, make_sphere, make_torus};

    fn setup(m: &SurfaceMesh) -> (DualVolumes, CurvatureField) {
        let dv = dual_volumes(m).unwrap();
        let c = estimate_curvature(m, &dv).unwrap();
        (dv, c)
    }

    #[test]
    fn shrinker_sphere_radial() {
        let m = make_sphere(2f64.sqrt(), 4).unwrap();
        let (_, c) = setup(&m);
        let w = radial_weight(&m, &c, 1.0).unwrap();
        for v in 0..m.num_vertices() {
            assert!(w.df_norm_sq[v].abs() < 0.02);
            assert!(w.laplacian[v].abs() < 0.02 * 2.0);
            assert!(w.hessian[v].to_matrix().amax() < 0.02);
        }
        let t = t_f_on_forms(&m, &c, &w, 1).unwrap();
        assert!(t.iter().all(|e| e.matrix().amax() < 0.04));
        let s = scal_f(&c, &w);
        assert!(s.iter().all(|x| (x - 1.0).abs() < 0.04));
    }

    #[test]
    fn flat_disk_radial() {
        let d = make_disk(1.0, 3).unwrap();
        let m = d.mesh();
        let (_, c) = setup(m);
        let w = radial_weight(m, &c, 1.0).unwrap();
        for v in 0..m.num_vertices() {
            let x = m.vertex(v);
            assert!((w.df_norm_sq[v] - dot(x, x)).abs() < 1e-9);
            assert!((w.laplacian[v] + 2.0).abs() < 1e-9);
            assert!(
                w.hessian[v]
                    .add(&SymEndo::identity(2).scaled(-1.0))
                    .to_matrix()
                    .amax()
                    < 1e-6
            );
            assert!((scal_f(&c, &w)[v] - 2.0).abs() < 1e-6);
        }
        let t = t_f_on_forms(m, &c, &w, 1).unwrap();
        assert!(t
            .iter()
            .all(|e| (e.matrix() - nalgebra::DMatrix::identity(2, 2)).amax() < 1e-6));
    }

    #[test]
    fn zero_weight_fields() {
        let m = make_sphere(1.0, 1).unwrap();
        let (_, c) = setup(&m);
        let w = zero_weight(&m);
        for p in 0..3 {
            assert!(t_f_on_forms(&m, &c, &w, p)
                .unwrap()
                .iter()
                .all(|e| e.matrix().amax() == 0.0));
        }
        assert_eq!(
            scal_f(&c, &w),
            (0..c.len()).map(|v| c.scal(v)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn custom_constant_and_linear() {
        let d = make_disk(1.0, 3).unwrap();
        let m = d.mesh();
        let (dv, c) = setup(m);
        let w = custom_weight(m, &dv, &c, &vec![2.5; m.num_vertices()]).unwrap();
        for v in 0..m.num_vertices() {
            assert!(w.df_norm_sq[v] < 1e-10 && w.laplacian[v].abs() < 1e-10);
            assert!(w.hessian[v].to_matrix().amax() < 1e-10);
        }
        let x1: Vec<f64> = m.vertices().iter().map(|p| p[0]).collect();
        let w = custom_weight(m, &dv, &c, &x1).unwrap();
        for v in 0..m.num_vertices() {
            assert!((w.df_norm_sq[v] - 1.0).abs() < 1e-6);
            assert!(w.hessian[v].to_matrix().amax() < 1e-6);
        }
        for g in &w.grad_face {
            assert!((g[0] - 1.0).abs() < 1e-9 && g[1].abs() < 1e-9);
        }
        let mut bad = x1.clone();
        bad[3] = f64::NAN;
        assert_eq!(
            custom_weight(m, &dv, &c, &bad).unwrap_err(),
            Error::NonFiniteWeight(3)
        );
    }

    #[test]
    fn custom_matches_radial_hessian_on_sphere() {
        let m = make_sphere(1.0, 4).unwrap();
        let (dv, c) = setup(&m);
        let a = 0.8;
        let r = radial_weight(&m, &c, a).unwrap();
        // add a linear term so the radial Hessian is not trivially constant along the surface
        let samples: Vec<f64> = r.f().to_vec();
        let cw = custom_weight(&m, &dv, &c, &samples).unwrap();
        // on the unit sphere Hess(a|X|²/2) = a(1 − 1)·I = 0, compare absolute to a
        for v in 0..m.num_vertices() {
            assert!(
                cw.hessian[v]
                    .add(&r.hessian[v].scaled(-1.0))
                    .to_matrix()
                    .amax()
                    < 0.05 * a
            );
        }
    }

    #[test]
    fn torus_laplacian_closed_form_vs_cotan() {
        let m = make_torus(2.0, 1.0, 72, 36).unwrap();
        let (dv, c) = setup(&m);
        let r = radial_weight(&m, &c, 1.0).unwrap();
        let cw = custom_weight(&m, &dv, &c, r.f()).unwrap();
        let num: f64 = (0..m.num_vertices())
            .map(|v| dv.vertex_area[v] * (r.laplacian[v] - cw.laplacian[v]).powi(2))
            .sum();
        let den: f64 = (0..m.num_vertices())
            .map(|v| dv.vertex_area[v] * r.laplacian[v].powi(2))
            .sum();
        assert!((num / den).sqrt() < 0.05, "{}", (num / den).sqrt());
    }

    #[test]
    fn comparison_function_values() {
        assert!((comparison_h(2, 0.0, 0.5) - 2.0).abs() < 1e-15);
        assert!((comparison_h(2, -1.0, 1.0) - 1.0 / 1f64.tanh()).abs() < 1e-12);
        assert!((comparison_h(2, -1.0, 1.0) - 1.3130352854993312).abs() < 1e-12);
        assert_eq!(r_times_h(2, 1.0, 0.0), 1.0);
        assert!((r_times_h(2, 1.0, 1e-6) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distance_on_flat_disk() {
        let d = make_disk(1.0, 4).unwrap();
        let m = d.mesh();
        let (dv, c) = setup(m);
        let (w, dist) = distance_weight(m, &dv, &c, 0, 1.0).unwrap();
        let cd = ComparisonData::new(m, 0, dist, CurvatureBounds::Ricci(0.0));
        assert_eq!(cd.distance[0], 0.0);
        assert_eq!(w.f()[0], 0.0);
        for v in 0..m.num_vertices() {
            let e = norm(m.vertex(v));
            assert!(cd.distance[v] >= e - 1e-12);
            assert!(cd.distance[v] - e <= cd.metric_error[v]);
            for &u in m.neighbors(v) {
                assert!(
                    cd.distance[u] <= cd.distance[v] + norm(sub(m.vertex(u), m.vertex(v))) + 1e-12
                );
            }
        }
        assert!(cd.flagged.iter().all(|f| !f));
    }

    #[test]
    fn distance_flags_cut_locus_on_sphere() {
        let m = make_sphere(1.0, 3).unwrap();
        let (dv, c) = setup(&m);
        let (_, dist) = distance_weight(&m, &dv, &c, 0, 1.0).unwrap();
        let cd = ComparisonData::new(&m, 0, dist, CurvatureBounds::Ricci(1.0));
        assert!(cd.flagged.iter().any(|&f| f));
        assert!(!cd.flagged[0]);
    }

    #[test]
    fn spec_parsing_and_csv() {
        assert_eq!(WeightSpec::parse("zero").unwrap(), WeightSpec::Zero);
        assert_eq!(
            WeightSpec::parse("radial:1").unwrap(),
            WeightSpec::Radial(1.0)
        );
        assert_eq!(
            WeightSpec::parse("distance:0.5@7").unwrap(),
            WeightSpec::Distance {
                a: 0.5,
                x0: Some(7)
            }
        );
        assert!(WeightSpec::parse("radial:x").is_err());
        assert!(WeightSpec::parse("gaussian").is_err());
        assert_eq!(
            WeightSpec::parse("dist:3,0.25").unwrap(),
            WeightSpec::Distance {
                a: 0.25,
                x0: Some(3)
            }
        );
        assert_eq!(
            CurvatureBounds::parse("sectional:-1,0.5").unwrap(),
            CurvatureBounds::Sectional(-1.0, 0.5)
        );
        assert_eq!(
            CurvatureBounds::parse("ricci:0").unwrap().label(),
            "ricci:0"
        );
        assert!(CurvatureBounds::parse("sectional:1,-1").is_err());
        assert_eq!(
            read_weight_csv("vertex,f\n1,2.5\n0,1\n", 2).unwrap(),
            vec![1.0, 2.5]
        );
        assert_eq!(
            read_weight_csv("0.5\n# c\n1.5\n", 2).unwrap(),
            vec![0.5, 1.5]
        );
        assert!(read_weight_csv("0.5\n", 2).is_err());
        assert!(matches!(
            read_weight_csv("0.5\nabc\n", 2),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn disconnected_mesh_rejected() {
        let m = SurfaceMesh::new(
            vec![
                [0.0; 3],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [5.0, 0.0, 0.0],
                [6.0, 0.0, 0.0],
                [5.0, 1.0, 0.0],
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        )
        .unwrap();
        assert_eq!(graph_distance(&m, 0).unwrap_err(), Error::Disconnected(3));
    }
}
