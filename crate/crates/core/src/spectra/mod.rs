//! Generalized symmetric eigensolves of operator pairs, Hodge-type
//! classification of eigenforms and kernel counting.

mod dense;
mod lanczos;

use std::fmt;
use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::dec::{Complex, OperatorPair, Part};
use crate::error::{Error, Result};
use crate::mesh::DomainMesh;

pub use dense::DENSE_LIMIT;

pub const DEFAULT_SEED: u64 = 0x5eed;
/// Residual target relative to the pair scale.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Eigenvalues below this fraction of the mean of the first positive ones count as zero.
pub const KERNEL_TOL: f64 = 1e-8;
/// Relative energy below which dω or δ_f ω counts as zero.
pub const CLASSIFY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lanczos,
    Dense,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lanczos" => Ok(Method::Lanczos),
            "dense" => Ok(Method::Dense),
            _ => Err(Error::InvalidArgument(format!(
                "unknown solver method '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Tag {
    #[serde(rename = "harmonic")]
    Harmonic,
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "co-exact")]
    CoExact,
    #[serde(rename = "mixed")]
    Mixed,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Harmonic => "harmonic",
            Tag::Exact => "exact",
            Tag::CoExact => "co-exact",
            Tag::Mixed => "mixed",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverMeta {
    pub method: Method,
    pub shifts: Vec<f64>,
    pub cycles: usize,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub degree: usize,
    pub eigenvalues: Vec<f64>,
    /// M-orthonormal eigenvectors on the pair's unknowns.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Empty until [`classify`] runs.
    pub tags: Vec<Tag>,
    /// ‖dω‖ and ‖δ_f ω‖ per eigenvector, filled by [`classify`].
    pub d_norm: Vec<f64>,
    pub delta_norm: Vec<f64>,
    pub kernel_dim: usize,
    pub kernel_threshold: f64,
    /// Separation of the kernel from the rest (see [`kernel_split`]).
    pub kernel_ratio: f64,
    pub scale: f64,
    pub meta: SolverMeta,
}

impl SpectrumResult {
    /// Eigenvalues above the kernel threshold.
    pub fn positive(&self) -> &[f64] {
        &self.eigenvalues[self.kernel_dim..]
    }

    pub fn first_positive(&self) -> Option<f64> {
        self.positive().first().copied()
    }
}

/// Splits sorted eigenvalues into kernel and positive parts.
///
/// Returns (kernel count, threshold, ratio). The ratio measures how far the
/// nearest eigenvalue on either side sits from the threshold; it is infinite
/// when nothing is close.
pub fn kernel_split(values: &[f64], scale: f64, rel_tol: f64) -> (usize, f64, f64) {
    let floor = 1e-9 * scale;
    let firsts: Vec<f64> = values
        .iter()
        .copied()
        .filter(|&v| v > floor)
        .take(5)
        .collect();
    if firsts.is_empty() {
        return (values.len(), floor, f64::INFINITY);
    }
    let mean = firsts.iter().sum::<f64>() / firsts.len() as f64;
    let threshold = rel_tol * mean;
    let kernel = values.iter().take_while(|&&v| v < threshold).count();
    let above = values.get(kernel).map_or(f64::INFINITY, |&v| v / threshold);
    let below = if kernel == 0 {
        f64::INFINITY
    } else {
        threshold / values[kernel - 1].abs().max(f64::MIN_POSITIVE)
    };
    (kernel, threshold, above.min(below))
}

/// The `k` smallest eigenpairs of a pair.
pub fn solve(pair: &OperatorPair, k: usize, method: Method) -> Result<SpectrumResult> {
    solve_seeded(pair, k, method, DEFAULT_SEED)
}

pub fn solve_seeded(
    pair: &OperatorPair,
    k: usize,
    method: Method,
    seed: u64,
) -> Result<SpectrumResult> {
    solve_from(pair, k, method, seed, 0.0)
}

/// Like [`solve`] for pairs that may be indefinite, given a lower bound of
/// the spectrum. Kernel fields are computed but only meaningful when `lower` is 0.
pub fn solve_bounded(
    pair: &OperatorPair,
    k: usize,
    method: Method,
    lower: f64,
) -> Result<SpectrumResult> {
    solve_from(pair, k, method, DEFAULT_SEED, lower.min(0.0))
}

fn solve_from(
    pair: &OperatorPair,
    k: usize,
    method: Method,
    seed: u64,
    lower: f64,
) -> Result<SpectrumResult> {
    let n = pair.dim();
    if k == 0 || k > n {
        return Err(Error::TooManyEigenpairs {
            requested: k,
            dim: n,
        });
    }
    let scale = pair.scale();
    // the sparse factorization needs at least two unknowns
    let method = if n <= 2 { Method::Dense } else { method };
    let (values, vectors, shifts, cycles) = match method {
        Method::Dense => {
            let (v, x) = dense::solve_dense(pair, k)?;
            (v, x, Vec::new(), 0)
        }
        Method::Lanczos => {
            let out = lanczos::solve_lanczos(pair, k, seed, RESIDUAL_TOL, lower)?;
            (out.values, out.vectors, out.shifts, out.cycles)
        }
    };
    let residuals = values
        .iter()
        .zip(&vectors)
        .map(|(&l, x)| lanczos::residual(pair, l, x))
        .collect();
    let (kernel_dim, kernel_threshold, kernel_ratio) = kernel_split(&values, scale, KERNEL_TOL);
    Ok(SpectrumResult {
        degree: pair.degree,
        eigenvalues: values,
        eigenvectors: vectors,
        tags: Vec::new(),
        d_norm: Vec::new(),
        delta_norm: Vec::new(),
        kernel_dim,
        kernel_threshold,
        kernel_ratio,
        scale,
        meta: SolverMeta {
            method,
            shifts,
            cycles,
            residuals,
        },
    })
}

/// Tags every eigenpair as harmonic, exact, co-exact or mixed. Inside a
/// numerically degenerate cluster the eigenvectors are first rotated to
/// diagonalize ‖dω‖², which separates exact from co-exact directions.
pub fn classify(mut res: SpectrumResult, pair: &OperatorPair, tol: f64) -> SpectrumResult {
    let n = res.eigenvalues.len();
    let mut start = res.kernel_dim;
    while start < n {
        let mut end = start + 1;
        while end < n
            && res.eigenvalues[end] - res.eigenvalues[end - 1] <= 1e-6 * res.eigenvalues[end].abs()
        {
            end += 1;
        }
        if end - start > 1 {
            if let Some(up) = &pair.up {
                let images: Vec<Vec<f64>> = res.eigenvectors[start..end]
                    .iter()
                    .map(|x| up.apply(x))
                    .collect();
                let size = end - start;
                let g = DMatrix::<f64>::from_fn(size, size, |a, b| {
                    images[a]
                        .iter()
                        .zip(&images[b])
                        .zip(&up.star)
                        .map(|((x, y), s)| s * x * y)
                        .sum()
                });
                let eig = SymmetricEigen::new(g);
                let old: Vec<Vec<f64>> = res.eigenvectors[start..end].to_vec();
                for c in 0..size {
                    let mut x = vec![0.0; old[0].len()];
                    for (a, v) in old.iter().enumerate() {
                        let w = eig.eigenvectors[(a, c)];
                        x.iter_mut().zip(v).for_each(|(xi, vi)| *xi += w * vi);
                    }
                    res.eigenvectors[start + c] = x;
                }
                // order within the cluster: exact (small ‖dω‖) first
                let mut idx: Vec<usize> = (0..size).collect();
                idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
                let rotated: Vec<Vec<f64>> = idx
                    .iter()
                    .map(|&i| res.eigenvectors[start + i].clone())
                    .collect();
                for (i, x) in rotated.into_iter().enumerate() {
                    res.eigenvectors[start + i] = x;
                }
            }
        }
        start = end;
    }
    res.tags.clear();
    res.d_norm.clear();
    res.delta_norm.clear();
    for i in 0..n {
        let (up, down) = pair.split_energies(&res.eigenvectors[i]);
        res.d_norm.push(up.max(0.0).sqrt());
        res.delta_norm.push(down.max(0.0).sqrt());
        let lambda = res.eigenvalues[i];
        let tag = if i < res.kernel_dim {
            Tag::Harmonic
        } else if up <= tol * lambda {
            Tag::Exact
        } else if down <= tol * lambda {
            Tag::CoExact
        } else {
            Tag::Mixed
        };
        res.tags.push(tag);
    }
    res
}

/// Smallest eigenvalue above the kernel, growing k until one appears.
pub fn first_positive(pair: &OperatorPair, method: Method) -> Result<f64> {
    let n = pair.dim();
    let mut k = n.min(6);
    loop {
        let res = solve(pair, k, method)?;
        if let Some(l) = res.first_positive() {
            return Ok(l);
        }
        if k == n {
            return Err(Error::ZeroOperator(format!(
                "degree {} pair has no positive eigenvalue",
                pair.degree
            )));
        }
        k = n.min(2 * k);
    }
}

/// λ'_{1,p,f}: smallest positive eigenvalue on exact p-forms.
///
/// The nonzero spectra of δ_f d on (p−1)-forms and of dδ_f on p-forms
/// coincide; the smaller of the two pairs is solved.
pub fn first_exact_eigenvalue(
    c: &Complex,
    dom: Option<&DomainMesh>,
    p: usize,
    method: Method,
) -> Result<f64> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "exact forms need degree p >= 1".into(),
        ));
    }
    if p > 2 {
        return Err(Error::DegreeExceedsDimension { degree: p, dim: 2 });
    }
    let index = |q: usize| -> Result<Option<Vec<usize>>> {
        match dom {
            Some(d) if !d.is_whole() => Ok(Some(d.interior_nonempty(q)?.to_vec())),
            _ => Ok(None),
        }
    };
    let (lo, hi) = (index(p - 1)?, index(p)?);
    let dim = |ix: &Option<Vec<usize>>, q: usize| ix.as_ref().map_or(c.star(q).len(), |v| v.len());
    let pair = if dim(&lo, p - 1) <= dim(&hi, p) {
        c.pair_on(p - 1, Part::Up, lo.as_deref())?
    } else {
        c.pair_on(p, Part::Down, hi.as_deref())?
    };
    first_positive(&pair, method)
}

/// Kernel dimension of a pair (the f-Betti number on closed surfaces).
pub fn f_betti(pair: &OperatorPair, kernel_tol: f64) -> Result<usize> {
    let n = pair.dim();
    let mut k = n.min(8);
    loop {
        let res = solve(pair, k, Method::Lanczos)?;
        let (kernel, _, ratio) = kernel_split(&res.eigenvalues, res.scale, kernel_tol);
        if kernel < k || k == n {
            if ratio < 10.0 {
                return Err(Error::AmbiguousKernel(ratio));
            }
            return Ok(kernel);
        }
        k = n.min(2 * k);
    }
}

/// Twelve significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

/// `index,eigenvalue,classification,residual` rows.
pub fn write_spectrum_csv<W: Write>(res: &SpectrumResult, mut w: W) -> Result<()> {
    writeln!(w, "index,eigenvalue,classification,residual")?;
    for (i, l) in res.eigenvalues.iter().enumerate() {
        let tag = res
            .tags
            .get(i)
            .map_or_else(|| "unclassified".to_string(), Tag::to_string);
        writeln!(
            w,
            "{},{},{},{}",
            i + 1,
            fmt_num(*l),
            tag,
            fmt_num(res.meta.residuals[i])
        )?;
    }
    Ok(())
}

/// One row per unknown: global simplex index then one column per eigenvector.
pub fn write_eigenvectors_csv<W: Write>(
    res: &SpectrumResult,
    index: &[usize],
    mut w: W,
) -> Result<()> {
    let header: Vec<String> = (1..=res.eigenvectors.len())
        .map(|i| format!("v{i}"))
        .collect();
    writeln!(w, "simplex,{}", header.join(","))?;
    for (row, &s) in index.iter().enumerate() {
        let vals: Vec<String> = res.eigenvectors.iter().map(|x| fmt_num(x[row])).collect();
        writeln!(w, "{s},{}", vals.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::{assemble_samples, dirichlet_restrict};
    use crate::mesh::{dual_volumes, make_disk, make_sphere, make_torus, SurfaceMesh};
    use crate::sparse;

    fn ops(m: &SurfaceMesh) -> crate::dec::DecOperators {
        assemble_samples(m, &dual_volumes(m).unwrap(), &vec![0.0; m.num_vertices()]).unwrap()
    }

    #[test]
    fn one_by_one() {
        let pair =
            OperatorPair::from_parts(0, sparse::from_triplets(1, 1, vec![(0, 0, 2.0)]), vec![1.0]);
        for method in [Method::Dense, Method::Lanczos] {
            let r = solve(&pair, 1, method).unwrap();
            assert!((r.eigenvalues[0] - 2.0).abs() < 1e-14);
        }
        assert!(matches!(
            solve(&pair, 2, Method::Dense),
            Err(Error::TooManyEigenpairs { .. })
        ));
    }

    #[test]
    fn lanczos_matches_dense_on_sphere() {
        let m = make_sphere(1.0, 2).unwrap();
        let o = ops(&m);
        for p in 0..3 {
            let pair = o.pair(p).unwrap();
            if pair.dim() > DENSE_LIMIT {
                continue;
            }
            let a = solve(&pair, 10, Method::Dense).unwrap();
            let b = solve(&pair, 10, Method::Lanczos).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!(
                    (x - y).abs() <= 1e-8 * x.abs().max(1e-4 * a.scale),
                    "p={p}: {x} vs {y}"
                );
            }
            for i in 0..10 {
                assert!(b.meta.residuals[i] <= 1e-8 * b.scale);
                for j in 0..10 {
                    let g = pair.inner(&b.eigenvectors[i], &b.eigenvectors[j]);
                    assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn sphere_first_eigenvalues() {
        let m = make_sphere(1.0, 4).unwrap();
        let o = ops(&m);
        let r = solve(&o.pair(0).unwrap(), 9, Method::Lanczos).unwrap();
        assert_eq!(r.kernel_dim, 1);
        for l in &r.eigenvalues[1..4] {
            assert!((l - 2.0).abs() < 0.04, "{l}");
        }
        for l in &r.eigenvalues[4..9] {
            assert!((l - 6.0).abs() < 0.12, "{l}");
        }
    }

    #[test]
    fn sphere_one_forms_split_after_rotation() {
        let m = make_sphere(1.0, 3).unwrap();
        let o = ops(&m);
        let pair = o.pair(1).unwrap();
        let r = classify(
            solve(&pair, 6, Method::Lanczos).unwrap(),
            &pair,
            CLASSIFY_TOL,
        );
        assert_eq!(r.kernel_dim, 0);
        assert!(r.eigenvalues.iter().all(|l| (l - 2.0).abs() < 0.1));
        let exact = r.tags.iter().filter(|t| **t == Tag::Exact).count();
        let coexact = r.tags.iter().filter(|t| **t == Tag::CoExact).count();
        assert_eq!((exact, coexact), (3, 3), "{:?}", r.tags);
    }

    #[test]
    fn torus_harmonic_one_forms() {
        let m = make_torus(2.0, 1.0, 24, 12).unwrap();
        let o = ops(&m);
        let pair = o.pair(1).unwrap();
        let r = classify(
            solve(&pair, 4, Method::Lanczos).unwrap(),
            &pair,
            CLASSIFY_TOL,
        );
        assert_eq!(r.kernel_dim, 2);
        assert_eq!(&r.tags[..2], &[Tag::Harmonic, Tag::Harmonic]);
        assert!(r.eigenvalues[2] > 0.1);
        for p in 0..3 {
            assert_eq!(
                f_betti(&o.pair(p).unwrap(), KERNEL_TOL).unwrap(),
                [1, 2, 1][p]
            );
        }
    }

    #[test]
    fn constant_function_is_harmonic() {
        let m = make_sphere(1.0, 2).unwrap();
        let o = ops(&m);
        let pair = o.pair(0).unwrap();
        let r = classify(solve(&pair, 2, Method::Dense).unwrap(), &pair, CLASSIFY_TOL);
        assert_eq!(r.tags[0], Tag::Harmonic);
        let x = &r.eigenvectors[0];
        assert!(x.iter().all(|v| (v - x[0]).abs() < 1e-10));
        // nonconstant functions are co-exact: δ_f of a 1-form, with no down part
        assert_eq!(r.tags[1], Tag::CoExact);
    }

    #[test]
    fn first_exact_matches_function_spectrum() {
        let m = make_sphere(1.0, 3).unwrap();
        let o = ops(&m);
        let c = o.weighted();
        let l1 = first_exact_eigenvalue(c, None, 1, Method::Lanczos).unwrap();
        let f = first_positive(&o.pair(0).unwrap(), Method::Lanczos).unwrap();
        assert!((l1 - f).abs() <= 1e-10 * f);
        let l2 = first_exact_eigenvalue(c, None, 2, Method::Lanczos).unwrap();
        assert!((l2 - 2.0).abs() < 0.05);
        assert!(first_exact_eigenvalue(c, None, 0, Method::Lanczos).is_err());
    }

    #[test]
    fn dirichlet_disk_has_no_kernel() {
        let d = make_disk(1.0, 3).unwrap();
        let o = ops(d.mesh());
        let pair = dirichlet_restrict(&o, &d, 0).unwrap();
        assert_eq!(f_betti(&pair, KERNEL_TOL).unwrap(), 0);
        let r = solve(&pair, 2, Method::Lanczos).unwrap();
        assert!((r.eigenvalues[0] - 5.7832).abs() < 0.05 * 5.7832);
    }

    #[test]
    fn kernel_split_ratio() {
        let (k, _, r) = kernel_split(&[1e-15, 2.0, 2.0, 2.0, 6.0], 100.0, KERNEL_TOL);
        assert_eq!(k, 1);
        assert!(r > 1e3);
        let (k, _, r) = kernel_split(&[2.5e-8, 2.0, 2.0, 2.0, 6.0], 1.0, KERNEL_TOL);
        assert_eq!(k, 0);
        assert!(r < 10.0);
    }

    #[test]
    fn csv_rows() {
        let pair = OperatorPair::from_parts(
            0,
            sparse::from_triplets(2, 2, vec![(0, 0, 1.0), (1, 1, 3.0)]),
            vec![1.0, 1.0],
        );
        let r = classify(solve(&pair, 2, Method::Dense).unwrap(), &pair, CLASSIFY_TOL);
        let mut out = Vec::new();
        write_spectrum_csv(&r, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("index,eigenvalue,classification,residual\n1,1.00000000000e0,"));
    }

    #[test]
    fn function_and_area_form_spectra_agree_under_refinement() {
        // W0 (barycentric) and W2 (1/area) are not dual to each other, so the
        // nonzero spectra match only up to discretization error
        let gap = |level| {
            let o = ops(&make_sphere(1.0, level).unwrap());
            let a = solve(&o.pair(0).unwrap(), 9, Method::Lanczos).unwrap();
            let b = solve(&o.pair(2).unwrap(), 9, Method::Lanczos).unwrap();
            a.eigenvalues[1..]
                .iter()
                .zip(&b.eigenvalues[1..])
                .map(|(x, y)| (x - y).abs() / x)
                .fold(0.0, f64::max)
        };
        let (g2, g3) = (gap(2), gap(3));
        assert!(g3 < 0.01 && g3 < g2, "{g2} {g3}");
    }
}
