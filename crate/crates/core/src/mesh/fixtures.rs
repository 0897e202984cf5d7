use std::collections::HashMap;
use std::f64::consts::PI;

use super::{add, cross, dot, extract_domain, norm, scale, sub, DomainMesh, SurfaceMesh, Vec3};
use crate::error::{Error, Result};

const MAX_LEVEL: usize = 8;

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {x}"
        )))
    }
}

/// Icosahedron subdivided `level` times, projected to the sphere of radius `radius`.
/// Level L has 10·4^L + 2 vertices; faces are oriented outward.
pub fn make_sphere(radius: f64, level: usize) -> Result<SurfaceMesh> {
    positive("radius", radius)?;
    if level > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "sphere level {level} exceeds {MAX_LEVEL}"
        )));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    let project = |p: Vec3| scale(p, 1.0 / norm(p));
    for v in &mut verts {
        *v = project(*v);
    }
    for _ in 0..level {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let mut m = |i: usize, j: usize| {
                *mid.entry((i.min(j), i.max(j))).or_insert_with(|| {
                    verts.push(project(scale(add(verts[i], verts[j]), 0.5)));
                    verts.len() - 1
                })
            };
            let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    for f in &mut faces {
        let n = cross(sub(verts[f[1]], verts[f[0]]), sub(verts[f[2]], verts[f[0]]));
        if dot(n, verts[f[0]]) < 0.0 {
            f.swap(1, 2);
        }
    }
    let verts = verts.into_iter().map(|p| scale(p, radius)).collect();
    SurfaceMesh::new(verts, faces)
}

/// Torus of revolution about the z-axis with a staggered (triangular-lattice)
/// grid: `nu` vertices around the central circle, `nv` rows around the tube.
/// `nv` must be even so the stagger closes up.
pub fn make_torus(big_r: f64, small_r: f64, nu: usize, nv: usize) -> Result<SurfaceMesh> {
    positive("R", big_r)?;
    positive("r", small_r)?;
    if small_r >= big_r {
        return Err(Error::InvalidArgument("torus needs r < R".into()));
    }
    if nu < 3 || nv < 4 || !nv.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "torus grid {nu}x{nv}: need nu >= 3 and even nv >= 4"
        )));
    }
    let id = |i: usize, j: usize| (j % nv) * nu + (i % nu);
    let mut verts = Vec::with_capacity(nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            let u = 2.0 * PI * (i as f64 + 0.5 * (j % 2) as f64) / nu as f64;
            let v = 2.0 * PI * j as f64 / nv as f64;
            let rho = big_r + small_r * v.cos();
            verts.push([rho * u.cos(), rho * u.sin(), small_r * v.sin()]);
        }
    }
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            if j % 2 == 0 {
                faces.push([id(i, j), id(i + 1, j), id(i, j + 1)]);
                faces.push([id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            } else {
                faces.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                faces.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
    }
    SurfaceMesh::new(verts, faces)
}

/// Flat disk in the plane z = 0 centred at the origin: 2^level concentric rings,
/// ring k carrying 6k vertices, consecutive rings zipped by shortest diagonal. The outer
/// ring (6·2^level vertices) is the Dirichlet boundary.
pub fn make_disk(radius: f64, level: usize) -> Result<DomainMesh> {
    positive("radius", radius)?;
    if level > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "disk level {level} exceeds {MAX_LEVEL}"
        )));
    }
    let rings = 1usize << level;
    let mut verts: Vec<Vec3> = vec![[0.0, 0.0, 0.0]];
    let mut start = vec![0usize];
    for k in 1..=rings {
        start.push(verts.len());
        let rho = radius * k as f64 / rings as f64;
        for m in 0..6 * k {
            let t = 2.0 * PI * m as f64 / (6 * k) as f64;
            verts.push([rho * t.cos(), rho * t.sin(), 0.0]);
        }
    }
    let mut faces = Vec::new();
    for m in 0..6 {
        faces.push([0, start[1] + m, start[1] + (m + 1) % 6]);
    }
    for k in 2..=rings {
        let (ni, no) = (6 * (k - 1), 6 * k);
        let inner = |i: usize| start[k - 1] + i % ni;
        let outer = |o: usize| start[k] + o % no;
        let (mut i, mut o) = (0, 0);
        while i < ni || o < no {
            // greedy zipper: add the shorter of the two candidate diagonals
            let advance_outer = i == ni
                || (o < no && {
                    let d_out = norm(sub(verts[inner(i)], verts[outer(o + 1)]));
                    let d_in = norm(sub(verts[inner(i + 1)], verts[outer(o)]));
                    d_out <= d_in
                });
            if advance_outer {
                faces.push([inner(i), outer(o), outer(o + 1)]);
                o += 1;
            } else {
                faces.push([inner(i), outer(o), inner(i + 1)]);
                i += 1;
            }
        }
    }
    let mesh = SurfaceMesh::new(verts, faces)?;
    let boundary_start = start[rings];
    extract_domain(&mesh, |v| v < boundary_start)
}

/// Spherical cap of geodesic angle `angle` (radians) around the vertex
/// closest to the north pole. Returns the domain and its centre vertex.
pub fn make_cap(radius: f64, level: usize, angle: f64) -> Result<(DomainMesh, usize)> {
    positive("cap angle", angle)?;
    let m = make_sphere(radius, level)?;
    let center = (0..m.num_vertices())
        .max_by(|&a, &b| m.vertex(a)[2].total_cmp(&m.vertex(b)[2]))
        .expect("nonempty");
    let c = scale(m.vertex(center), 1.0 / radius);
    let dom = extract_domain(&m, |v| {
        dot(c, scale(m.vertex(v), 1.0 / radius))
            .clamp(-1.0, 1.0)
            .acos()
            < angle
    })?;
    Ok((dom, center))
}

/// Vertices of the torus within Euclidean distance `rho` of vertex 0, which
/// sits on the outer equator (positive curvature).
pub fn make_torus_patch(
    big_r: f64,
    small_r: f64,
    nu: usize,
    nv: usize,
    rho: f64,
) -> Result<DomainMesh> {
    positive("patch radius", rho)?;
    let m = make_torus(big_r, small_r, nu, nv)?;
    let c = m.vertex(0);
    extract_domain(&m, |v| norm(sub(m.vertex(v), c)) < rho)
}

/// Named fixture with its parameters, as written on the command line:
/// `sphere:R,L`, `torus:R,r,NU,NV`, `disk:R,L`, `cap:R,L,ANGLE`,
/// `torus-patch:R,r,NU,NV,RHO`.
#[derive(Debug, Clone, PartialEq)]
pub enum FixtureSpec {
    Sphere {
        radius: f64,
        level: usize,
    },
    Torus {
        big_r: f64,
        small_r: f64,
        nu: usize,
        nv: usize,
    },
    Disk {
        radius: f64,
        level: usize,
    },
    Cap {
        radius: f64,
        level: usize,
        angle: f64,
    },
    TorusPatch {
        big_r: f64,
        small_r: f64,
        nu: usize,
        nv: usize,
        rho: f64,
    },
}

/// A built fixture: the domain (whole surface when closed) and the vertex
/// used as base point for distance weights.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub domain: DomainMesh,
    pub center: usize,
}

impl FixtureSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("invalid fixture spec '{s}'"));
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let vals: Vec<&str> = args.split(',').map(str::trim).collect();
        let f = |i: usize| {
            vals.get(i)
                .and_then(|x| x.parse::<f64>().ok())
                .ok_or_else(bad)
        };
        let u = |i: usize| {
            vals.get(i)
                .and_then(|x| x.parse::<usize>().ok())
                .ok_or_else(bad)
        };
        let arity = |n: usize| if vals.len() == n { Ok(()) } else { Err(bad()) };
        match name {
            "sphere" => arity(2).and(Ok(FixtureSpec::Sphere {
                radius: f(0)?,
                level: u(1)?,
            })),
            "disk" => arity(2).and(Ok(FixtureSpec::Disk {
                radius: f(0)?,
                level: u(1)?,
            })),
            "torus" => arity(4).and(Ok(FixtureSpec::Torus {
                big_r: f(0)?,
                small_r: f(1)?,
                nu: u(2)?,
                nv: u(3)?,
            })),
            "cap" => arity(3).and(Ok(FixtureSpec::Cap {
                radius: f(0)?,
                level: u(1)?,
                angle: f(2)?,
            })),
            "torus-patch" => arity(5).and(Ok(FixtureSpec::TorusPatch {
                big_r: f(0)?,
                small_r: f(1)?,
                nu: u(2)?,
                nv: u(3)?,
                rho: f(4)?,
            })),
            _ => Err(bad()),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            FixtureSpec::Sphere { radius, level } => format!("sphere:{radius},{level}"),
            FixtureSpec::Torus {
                big_r,
                small_r,
                nu,
                nv,
            } => format!("torus:{big_r},{small_r},{nu},{nv}"),
            FixtureSpec::Disk { radius, level } => format!("disk:{radius},{level}"),
            FixtureSpec::Cap {
                radius,
                level,
                angle,
            } => format!("cap:{radius},{level},{angle}"),
            FixtureSpec::TorusPatch {
                big_r,
                small_r,
                nu,
                nv,
                rho,
            } => {
                format!("torus-patch:{big_r},{small_r},{nu},{nv},{rho}")
            }
        }
    }

    /// Exact bounds (l1, l2) on the Gaussian curvature of the smooth surface.
    pub fn curvature_range(&self) -> (f64, f64) {
        match *self {
            FixtureSpec::Sphere { radius, .. } | FixtureSpec::Cap { radius, .. } => {
                (1.0 / (radius * radius), 1.0 / (radius * radius))
            }
            FixtureSpec::Disk { .. } => (0.0, 0.0),
            FixtureSpec::Torus { big_r, small_r, .. }
            | FixtureSpec::TorusPatch { big_r, small_r, .. } => (
                -1.0 / (small_r * (big_r - small_r)),
                1.0 / (small_r * (big_r + small_r)),
            ),
        }
    }

    /// The same fixture at another subdivision level; torus grids have no level.
    pub fn with_level(&self, level: usize) -> Result<Self> {
        let mut out = self.clone();
        match &mut out {
            FixtureSpec::Sphere { level: l, .. }
            | FixtureSpec::Disk { level: l, .. }
            | FixtureSpec::Cap { level: l, .. } => {
                *l = level;
                Ok(out)
            }
            _ => Err(Error::InvalidArgument(format!(
                "fixture '{}' has no subdivision level",
                self.label()
            ))),
        }
    }

    /// True for fixtures whose smooth surface is a centred sphere.
    pub fn is_sphere(&self) -> bool {
        matches!(self, FixtureSpec::Sphere { .. } | FixtureSpec::Cap { .. })
    }

    pub fn build(&self) -> Result<Fixture> {
        let (domain, center) = match *self {
            FixtureSpec::Sphere { radius, level } => {
                (DomainMesh::whole(make_sphere(radius, level)?), 0)
            }
            FixtureSpec::Torus {
                big_r,
                small_r,
                nu,
                nv,
            } => (DomainMesh::whole(make_torus(big_r, small_r, nu, nv)?), 0),
            FixtureSpec::Disk { radius, level } => (make_disk(radius, level)?, 0),
            FixtureSpec::Cap {
                radius,
                level,
                angle,
            } => make_cap(radius, level, angle)?,
            FixtureSpec::TorusPatch {
                big_r,
                small_r,
                nu,
                nv,
                rho,
            } => (make_torus_patch(big_r, small_r, nu, nv, rho)?, 0),
        };
        Ok(Fixture {
            spec: self.clone(),
            domain,
            center,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::dual_volumes;

    #[test]
    fn sphere_counts_and_radius() {
        for level in 0..=4 {
            let m = make_sphere(1.0, level).unwrap();
            assert_eq!(m.num_vertices(), 10 * 4usize.pow(level as u32) + 2);
            assert_eq!(m.euler_characteristic(), 2);
            for p in m.vertices() {
                assert!((norm(*p) - 1.0).abs() < 1e-12);
            }
            for f in 0..m.num_faces() {
                assert!(dot(m.face_area_vector(f), m.face_barycenter(f)) > 0.0);
            }
        }
        let m = make_sphere(2.5, 2).unwrap();
        assert!(m.vertices().iter().all(|p| (norm(*p) - 2.5).abs() < 1e-12));
    }

    #[test]
    fn sphere_area_increases_to_4pi() {
        let mut prev = 0.0;
        for level in 1..=5 {
            let m = make_sphere(1.0, level).unwrap();
            let a: f64 = (0..m.num_faces()).map(|f| m.face_area(f)).sum();
            assert!(a > prev && a < 4.0 * PI);
            prev = a;
            if level == 4 {
                assert!((a - 4.0 * PI).abs() / (4.0 * PI) < 0.01);
            }
        }
    }

    #[test]
    fn torus_topology_and_orientation() {
        for (nu, nv) in [(4, 4), (8, 8), (12, 6), (48, 24)] {
            let m = make_torus(2.0, 1.0, nu, nv).unwrap();
            assert_eq!(m.euler_characteristic(), 0);
            assert!(m.is_closed());
            for f in 0..m.num_faces() {
                // outward: away from the tube's core circle
                let c = m.face_barycenter(f);
                let rho = (c[0] * c[0] + c[1] * c[1]).sqrt();
                let core = [2.0 * c[0] / rho, 2.0 * c[1] / rho, 0.0];
                assert!(dot(m.face_area_vector(f), sub(c, core)) > 0.0);
            }
        }
        assert!(make_torus(2.0, 1.0, 8, 7).is_err());
        assert!(make_torus(1.0, 2.0, 8, 8).is_err());
    }

    #[test]
    fn torus_is_delaunay_when_wide() {
        let m = make_torus(2.0, 1.0, 48, 24).unwrap();
        assert!(dual_volumes(&m).is_ok());
    }

    #[test]
    fn fixture_specs_round_trip() {
        for s in [
            "sphere:1,3",
            "torus:2,1,24,12",
            "disk:1,2",
            "cap:1.5,3,0.8",
            "torus-patch:2,1,24,12,1.2",
        ] {
            let f = FixtureSpec::parse(s).unwrap();
            assert_eq!(f.label(), s);
            let built = f.build().unwrap();
            assert!(built.domain.is_kept(built.center));
        }
        for s in ["sphere:1", "sphere:a,2", "cube:1,1", "disk", "torus:2,1,24"] {
            assert!(FixtureSpec::parse(s).is_err(), "{s}");
        }
        let (l1, l2) = FixtureSpec::parse("torus:2,1,24,12")
            .unwrap()
            .curvature_range();
        assert_eq!((l1, l2), (-1.0, 1.0 / 3.0));
    }

    #[test]
    fn cap_is_a_proper_subdomain() {
        let (d, c) = make_cap(1.0, 3, 1.0).unwrap();
        assert!(!d.is_whole() && d.is_kept(c));
        let kept = (0..d.mesh().num_vertices())
            .filter(|&v| d.is_kept(v))
            .count();
        // area fraction of a cap of angle 1 is (1 − cos 1)/2 ≈ 0.23
        let frac = kept as f64 / d.mesh().num_vertices() as f64;
        assert!((frac - 0.23).abs() < 0.05, "{frac}");
        assert!(!d.boundary_vertices().is_empty());
    }

    #[test]
    fn disk_boundary_count() {
        for level in 0..=5 {
            let d = make_disk(1.0, level).unwrap();
            let m = d.mesh();
            let nb = (0..m.num_vertices())
                .filter(|&v| m.is_boundary_vertex(v))
                .count();
            assert_eq!(nb, 6 << level);
            assert_eq!(d.boundary_vertices().len(), 6 << level);
            assert_eq!(m.euler_characteristic(), 1);
            for f in 0..m.num_faces() {
                assert!(m.face_area_vector(f)[2] > 0.0);
            }
            for &v in &d.boundary_vertices() {
                assert!((norm(m.vertex(v)) - 1.0).abs() < 1e-12);
            }
            assert!(dual_volumes(m).is_ok(), "level {level}");
        }
    }
}
