use std::fmt::Write as _;
use std::path::Path;

use super::{SurfaceMesh, Vec3};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        match path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase())
            .as_deref()
        {
            Some("off") => Ok(MeshFormat::Off),
            Some("obj") => Ok(MeshFormat::Obj),
            _ => Err(Error::InvalidArgument(format!(
                "cannot infer mesh format of {}",
                path.display()
            ))),
        }
    }
}

pub fn load_mesh(path: &Path, format: Option<MeshFormat>) -> Result<SurfaceMesh> {
    let format = match format {
        Some(f) => f,
        None => MeshFormat::from_path(path)?,
    };
    let text = std::fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Obj => parse_obj(&text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Tokens of the OFF body with their 1-based line numbers, comments stripped.
fn tokens(text: &str) -> Vec<(usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("");
            let t: Vec<&str> = l.split_whitespace().collect();
            (!t.is_empty()).then_some((i + 1, t))
        })
        .collect()
}

fn num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

pub fn parse_off(text: &str) -> Result<SurfaceMesh> {
    let lines = tokens(text);
    let mut it = lines.into_iter();
    let (hline, mut head) = it.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if head[0] != "OFF" {
        return Err(parse_err(hline, "missing OFF header"));
    }
    head.remove(0);
    let (cline, counts) = if head.is_empty() {
        it.next()
            .ok_or_else(|| parse_err(hline, "missing counts"))?
    } else {
        (hline, head)
    };
    if counts.len() < 2 {
        return Err(parse_err(cline, "expected vertex and face counts"));
    }
    let nv: usize = num(counts[0], cline)?;
    let nf: usize = num(counts[1], cline)?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (l, t) = it
            .next()
            .ok_or_else(|| parse_err(cline, "truncated vertex list"))?;
        if t.len() < 3 {
            return Err(parse_err(l, "vertex needs three coordinates"));
        }
        vertices.push([num(t[0], l)?, num(t[1], l)?, num(t[2], l)?]);
    }
    let mut faces = Vec::with_capacity(nf);
    for fi in 0..nf {
        let (l, t) = it
            .next()
            .ok_or_else(|| parse_err(cline, "truncated face list"))?;
        let k: usize = num(t[0], l)?;
        if t.len() < k + 1 {
            return Err(parse_err(l, "face shorter than its corner count"));
        }
        if k != 3 {
            return Err(Error::NonTriangleFace {
                face: fi,
                corners: k,
            });
        }
        faces.push([num(t[1], l)?, num(t[2], l)?, num(t[3], l)?]);
    }
    SurfaceMesh::new(vertices, faces)
}

pub fn parse_obj(text: &str) -> Result<SurfaceMesh> {
    let mut vertices: Vec<Vec3> = Vec::new();
    let mut faces = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let l = i + 1;
        let t: Vec<&str> = line
            .split('#')
            .next()
            .unwrap_or("")
            .split_whitespace()
            .collect();
        match t.first().copied() {
            Some("v") => {
                if t.len() < 4 {
                    return Err(parse_err(l, "vertex needs three coordinates"));
                }
                vertices.push([num(t[1], l)?, num(t[2], l)?, num(t[3], l)?]);
            }
            Some("f") => {
                let corners = &t[1..];
                if corners.len() != 3 {
                    return Err(Error::NonTriangleFace {
                        face: faces.len(),
                        corners: corners.len(),
                    });
                }
                let mut f = [0usize; 3];
                for (c, tok) in corners.iter().enumerate() {
                    let idx: i64 = num(tok.split('/').next().unwrap_or(""), l)?;
                    let resolved = if idx > 0 {
                        idx - 1
                    } else {
                        vertices.len() as i64 + idx
                    };
                    if idx == 0 || resolved < 0 {
                        return Err(parse_err(l, format!("bad vertex reference {tok}")));
                    }
                    f[c] = resolved as usize;
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    SurfaceMesh::new(vertices, faces)
}

/// Serializes to OFF; coordinates use shortest round-trip formatting.
pub fn write_off(m: &SurfaceMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "OFF\n{} {} {}",
        m.num_vertices(),
        m.num_faces(),
        m.num_edges()
    );
    for p in m.vertices() {
        let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    for f in m.faces() {
        let _ = writeln!(s, "3 {} {} {}", f[0], f[1], f[2]);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_sphere;

    const TET: &str = "OFF\n# tetrahedron\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n";

    #[test]
    fn off_tetrahedron() {
        let m = parse_off(TET).unwrap();
        assert_eq!((m.num_vertices(), m.num_edges(), m.num_faces()), (4, 6, 4));
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn off_header_on_one_line() {
        let m = parse_off("OFF 3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n").unwrap();
        assert_eq!(m.num_faces(), 1);
    }

    #[test]
    fn off_quad_rejected() {
        let e = parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n").unwrap_err();
        assert_eq!(
            e,
            Error::NonTriangleFace {
                face: 0,
                corners: 4
            }
        );
        assert_eq!(e.code(), "non_triangle_face");
    }

    #[test]
    fn off_parse_failures() {
        assert!(matches!(
            parse_off("PLY\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_off("OFF\n1 0 0\n0 x 0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_off("OFF\n3 1 0\n0 0 0\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn obj_with_slashes_and_negative_indices() {
        let m =
            parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nf 1/1 2/2 3/3\nf -4 -1 -3\n").unwrap();
        assert_eq!(m.num_faces(), 2);
        assert_eq!(m.faces()[1], [0, 3, 1]);
        assert!(matches!(
            parse_obj("v 0 0 0\nf 1 2 3 4\n"),
            Err(Error::NonTriangleFace { .. })
        ));
    }

    #[test]
    fn off_round_trip_is_bit_exact() {
        let m = make_sphere(1.3, 2).unwrap();
        let back = parse_off(&write_off(&m)).unwrap();
        assert_eq!(back.faces(), m.faces());
        for (a, b) in back.vertices().iter().zip(m.vertices()) {
            for c in 0..3 {
                assert_eq!(a[c].to_bits(), b[c].to_bits());
            }
        }
    }

    #[test]
    fn icosphere_642_counts() {
        let m = parse_off(&write_off(&make_sphere(1.0, 3).unwrap())).unwrap();
        assert_eq!(m.num_vertices(), 642);
        assert_eq!(m.num_edges(), 1920);
        assert_eq!(m.num_faces(), 1280);
    }
}
