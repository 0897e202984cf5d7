//! Discrete weighted exterior calculus on a triangle mesh.
//!
//! Cochains live on vertices (p = 0), edges (p = 1) and faces (p = 2).
//! Hodge stars are diagonal; the weighted star in degree p is the unweighted
//! one scaled by e^{−f} sampled at vertices, edge midpoints and face
//! barycenters. Every operator pair is assembled as
//! `Aᵀ diag(s) A` sums so symmetry is exact.

use crate::error::{Error, Result};
use crate::mesh::{DomainMesh, DualVolumes, SurfaceMesh};
use crate::sparse::{self, Csr};
use crate::weights::WeightField;

/// A map out of degree-p cochains together with the diagonal weight that
/// measures its image: the contributed energy is `Σ_i s_i (A ω)_i²`.
#[derive(Debug, Clone)]
pub struct Factor {
    pub op: Csr,
    pub star: Vec<f64>,
}

impl Factor {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        sparse::matvec(&self.op, x)
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        self.apply(x)
            .iter()
            .zip(&self.star)
            .map(|(y, s)| s * y * y)
            .sum()
    }

    fn stiffness(&self) -> Csr {
        sparse::btdb(&self.op, &self.star)
    }
}

/// Generalized symmetric problem `K x = λ M x` with diagonal `M`.
///
/// `up` realizes ω ↦ dω (energy ‖dω‖²), `down` realizes the codifferential
/// side (energy ‖δ_f ω‖²). Both act on the (possibly restricted) unknowns.
#[derive(Debug, Clone)]
pub struct OperatorPair {
    pub degree: usize,
    pub stiffness: Csr,
    pub mass: Vec<f64>,
    /// Global simplex index of each unknown.
    pub index: Vec<usize>,
    pub up: Option<Factor>,
    pub down: Option<Factor>,
}

impl OperatorPair {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    /// Pair with an explicit stiffness and no factor information.
    pub fn from_parts(degree: usize, stiffness: Csr, mass: Vec<f64>) -> Self {
        let index = (0..mass.len()).collect();
        OperatorPair {
            degree,
            stiffness,
            mass,
            index,
            up: None,
            down: None,
        }
    }

    /// Largest diagonal ratio K_ii / M_ii, the natural eigenvalue scale.
    pub fn scale(&self) -> f64 {
        sparse::diagonal(&self.stiffness)
            .iter()
            .zip(&self.mass)
            .map(|(k, m)| k.abs() / m)
            .fold(0.0, f64::max)
    }

    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.mass)
            .map(|((x, y), m)| x * y * m)
            .sum()
    }

    /// ‖dω‖² and ‖δ_f ω‖² (zero where the factor is absent).
    pub fn split_energies(&self, x: &[f64]) -> (f64, f64) {
        (
            self.up.as_ref().map_or(0.0, |f| f.energy(x)),
            self.down.as_ref().map_or(0.0, |f| f.energy(x)),
        )
    }
}

/// Which part of the Laplacian to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    /// dδ_f + δ_f d
    Full,
    /// δ_f d only
    Up,
    /// d δ_f only
    Down,
}

/// Incidence operators and diagonal stars.
#[derive(Debug, Clone)]
pub struct Complex {
    d: [Csr; 2],
    star: [Vec<f64>; 3],
}

impl Complex {
    pub fn d(&self, p: usize) -> &Csr {
        &self.d[p]
    }

    pub fn star(&self, p: usize) -> &[f64] {
        &self.star[p]
    }

    fn check_degree(p: usize) -> Result<()> {
        if p > 2 {
            Err(Error::DegreeExceedsDimension { degree: p, dim: 2 })
        } else {
            Ok(())
        }
    }

    fn up_factor(&self, p: usize, cols: &[usize]) -> Option<Factor> {
        (p < 2).then(|| {
            let all: Vec<usize> = (0..self.d[p].rows()).collect();
            Factor {
                op: sparse::submatrix(&self.d[p], &all, cols),
                star: self.star[p + 1].clone(),
            }
        })
    }

    fn down_factor(&self, p: usize, cols: &[usize]) -> Option<Factor> {
        (p > 0).then(|| {
            let dt = sparse::scale_cols(&sparse::transpose(&self.d[p - 1]), &self.star[p]);
            let all: Vec<usize> = (0..dt.rows()).collect();
            Factor {
                op: sparse::submatrix(&dt, &all, cols),
                star: self.star[p - 1].iter().map(|s| 1.0 / s).collect(),
            }
        })
    }

    /// Pair on the given p-simplices (all of them when `index` is None).
    pub fn pair_on(&self, p: usize, part: Part, index: Option<&[usize]>) -> Result<OperatorPair> {
        Self::check_degree(p)?;
        let n = self.star[p].len();
        let index: Vec<usize> = match index {
            Some(ix) => ix.to_vec(),
            None => (0..n).collect(),
        };
        if index.is_empty() {
            return Err(Error::EmptyInterior(format!(
                "no {p}-simplices to solve on"
            )));
        }
        let up = if part == Part::Down {
            None
        } else {
            self.up_factor(p, &index)
        };
        let down = if part == Part::Up {
            None
        } else {
            self.down_factor(p, &index)
        };
        let m = index.len();
        let stiffness = match (&up, &down) {
            (Some(u), Some(d)) => sparse::add(&u.stiffness(), &d.stiffness()),
            (Some(u), None) => u.stiffness(),
            (None, Some(d)) => d.stiffness(),
            (None, None) => sparse::from_triplets(m, m, Vec::new()),
        };
        if stiffness.nnz() == 0 {
            return Err(Error::ZeroOperator(format!("{part:?} part in degree {p}")));
        }
        let mass = index.iter().map(|&i| self.star[p][i]).collect();
        Ok(OperatorPair {
            degree: p,
            stiffness,
            mass,
            index,
            up,
            down,
        })
    }

    pub fn pair(&self, p: usize) -> Result<OperatorPair> {
        self.pair_on(p, Part::Full, None)
    }

    pub fn exterior_derivative(&self, p: usize, x: &[f64]) -> Vec<f64> {
        sparse::matvec(&self.d[p], x)
    }

    /// δ_f = W_{p−1}^{−1} d_{p−1}ᵀ W_p, mapping p-cochains to (p−1)-cochains.
    pub fn codifferential(&self, p: usize, x: &[f64]) -> Vec<f64> {
        let wx: Vec<f64> = x.iter().zip(&self.star[p]).map(|(a, s)| a * s).collect();
        sparse::matvec_t(&self.d[p - 1], &wx)
            .iter()
            .zip(&self.star[p - 1])
            .map(|(y, s)| y / s)
            .collect()
    }

    pub fn inner(&self, p: usize, a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.star[p])
            .map(|((x, y), s)| x * y * s)
            .sum()
    }
}

/// Weighted and unweighted complexes of one mesh and weight.
#[derive(Debug, Clone)]
pub struct DecOperators {
    weighted: Complex,
    unweighted: Complex,
    f_samples: [Vec<f64>; 3],
}

impl DecOperators {
    pub fn weighted(&self) -> &Complex {
        &self.weighted
    }

    pub fn unweighted(&self) -> &Complex {
        &self.unweighted
    }

    pub fn d(&self, p: usize) -> &Csr {
        self.weighted.d(p)
    }

    pub fn star_f(&self, p: usize) -> &[f64] {
        self.weighted.star(p)
    }

    /// f at vertices, edge midpoints and face barycenters.
    pub fn f_samples(&self, p: usize) -> &[f64] {
        &self.f_samples[p]
    }

    /// Drift Laplacian pair (L_p^f, W_p^f) on the whole surface.
    pub fn pair(&self, p: usize) -> Result<OperatorPair> {
        self.weighted.pair(p)
    }

    pub fn codifferential(&self, p: usize, x: &[f64]) -> Vec<f64> {
        self.weighted.codifferential(p, x)
    }

    pub fn inner(&self, p: usize, a: &[f64], b: &[f64]) -> f64 {
        self.weighted.inner(p, a, b)
    }
}

pub fn incidence_d0(m: &SurfaceMesh) -> Csr {
    let t = m
        .edges()
        .iter()
        .enumerate()
        .flat_map(|(e, &[a, b])| [(e, a, -1.0), (e, b, 1.0)])
        .collect();
    sparse::from_triplets(m.num_edges(), m.num_vertices(), t)
}

pub fn incidence_d1(m: &SurfaceMesh) -> Csr {
    let t = (0..m.num_faces())
        .flat_map(|f| {
            m.face_edges(f)
                .iter()
                .map(move |&(e, s)| (f, e, s as f64))
                .collect::<Vec<_>>()
        })
        .collect();
    sparse::from_triplets(m.num_faces(), m.num_edges(), t)
}

fn sample_f(m: &SurfaceMesh, f: &[f64]) -> [Vec<f64>; 3] {
    let fe = m
        .edges()
        .iter()
        .map(|&[a, b]| 0.5 * (f[a] + f[b]))
        .collect();
    let ff = m
        .faces()
        .iter()
        .map(|&[a, b, c]| (f[a] + f[b] + f[c]) / 3.0)
        .collect();
    [f.to_vec(), fe, ff]
}

fn check_stars(star: &[Vec<f64>; 3]) -> Result<()> {
    for (p, s) in star.iter().enumerate() {
        if let Some(i) = s.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::NonPositiveStar {
                degree: p,
                index: i,
            });
        }
    }
    Ok(())
}

/// Assembles from vertex samples of f.
pub fn assemble_samples(m: &SurfaceMesh, dv: &DualVolumes, f: &[f64]) -> Result<DecOperators> {
    if f.len() != m.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: m.num_vertices(),
            got: f.len(),
        });
    }
    if let Some(v) = f.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteWeight(v));
    }
    let d = [incidence_d0(m), incidence_d1(m)];
    let star: [Vec<f64>; 3] = [dv.star(0), dv.star(1), dv.star(2)];
    check_stars(&star)?;
    let f_samples = sample_f(m, f);
    let star_f: [Vec<f64>; 3] = [0, 1, 2].map(|p| {
        star[p]
            .iter()
            .zip(&f_samples[p])
            .map(|(s, fv)| s * (-fv).exp())
            .collect()
    });
    check_stars(&star_f)?;
    Ok(DecOperators {
        weighted: Complex {
            d: d.clone(),
            star: star_f,
        },
        unweighted: Complex { d, star },
        f_samples,
    })
}

pub fn assemble(m: &SurfaceMesh, dv: &DualVolumes, w: &WeightField) -> Result<DecOperators> {
    assemble_samples(m, dv, w.f())
}

/// Restriction of the drift pair to the interior p-simplices of a domain.
pub fn dirichlet_restrict(ops: &DecOperators, dom: &DomainMesh, p: usize) -> Result<OperatorPair> {
    restrict_part(ops.weighted(), dom, p, Part::Full)
}

pub fn restrict_part(c: &Complex, dom: &DomainMesh, p: usize, part: Part) -> Result<OperatorPair> {
    if dom.is_whole() {
        return c.pair_on(p, part, None);
    }
    let ix = dom.interior_nonempty(p)?;
    c.pair_on(p, part, Some(ix))
}

/// Gauge-conjugated complex: d̃ = S_{p+1} d S_p^{−1} with S = e^{f/2},
/// paired with the weighted stars.
#[derive(Debug, Clone)]
pub struct TwistedOperators {
    pub scaling: [Vec<f64>; 3],
    complex: Complex,
}

impl TwistedOperators {
    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn pair(&self, p: usize) -> Result<OperatorPair> {
        self.complex.pair(p)
    }
}

pub fn assemble_twisted(
    m: &SurfaceMesh,
    dv: &DualVolumes,
    w: &WeightField,
) -> Result<TwistedOperators> {
    twisted_from(&assemble(m, dv, w)?)
}

pub fn twisted_from(ops: &DecOperators) -> Result<TwistedOperators> {
    let worst = ops
        .f_samples
        .iter()
        .flatten()
        .fold(0.0f64, |a, x| a.max(x.abs()));
    if worst > 700.0 {
        return Err(Error::WeightOverflow(worst));
    }
    let scaling: [Vec<f64>; 3] =
        [0, 1, 2].map(|p| ops.f_samples[p].iter().map(|x| (0.5 * x).exp()).collect());
    let d = [0, 1].map(|p| {
        let inv: Vec<f64> = scaling[p].iter().map(|s| 1.0 / s).collect();
        sparse::scale_rows(&sparse::scale_cols(ops.d(p), &inv), &scaling[p + 1])
    });
    Ok(TwistedOperators {
        scaling,
        complex: Complex {
            d,
            star: ops.weighted.star.clone(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{dual_volumes, make_disk, make_sphere, make_torus};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn radial(m: &SurfaceMesh, a: f64) -> Vec<f64> {
        m.vertices()
            .iter()
            .map(|p| 0.5 * a * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]))
            .collect()
    }

    #[test]
    fn d1_d0_vanishes_exactly() {
        for m in [
            make_sphere(1.0, 2).unwrap(),
            make_torus(2.0, 1.0, 12, 8).unwrap(),
        ] {
            let dd = &incidence_d1(&m) * &incidence_d0(&m);
            assert!(dd.data().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn weighted_adjointness() {
        let m = make_torus(2.0, 1.0, 24, 12).unwrap();
        let dv = dual_volumes(&m).unwrap();
        let ops = assemble_samples(&m, &dv, &radial(&m, 1.0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in 0..2 {
            let a: Vec<f64> = (0..m.count(p)).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = (0..m.count(p + 1))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let lhs = ops.inner(p + 1, &ops.weighted().exterior_derivative(p, &a), &b);
            let rhs = ops.inner(p, &a, &ops.codifferential(p + 1, &b));
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
                "{lhs} {rhs}"
            );
        }
    }

    #[test]
    fn pairs_symmetric_with_constant_kernel() {
        let m = make_sphere(1.0, 2).unwrap();
        let dv = dual_volumes(&m).unwrap();
        let ops = assemble_samples(&m, &dv, &radial(&m, 0.7)).unwrap();
        for p in 0..3 {
            let pair = ops.pair(p).unwrap();
            assert_eq!(sparse::max_asymmetry(&pair.stiffness), 0.0);
            assert!(pair.mass.iter().all(|&w| w > 0.0));
        }
        let l0 = ops.pair(0).unwrap();
        let r = sparse::matvec(&l0.stiffness, &vec![1.0; m.num_vertices()]);
        assert!(r.iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn twisted_is_similarity_of_unweighted() {
        let m = make_torus(2.0, 1.0, 24, 12).unwrap();
        let dv = dual_volumes(&m).unwrap();
        let ops = assemble_samples(&m, &dv, &radial(&m, 1.0)).unwrap();
        let tw = twisted_from(&ops).unwrap();
        for p in 0..3 {
            // S⁻¹ L S⁻¹ == L̃ and S⁻¹ W S⁻¹ == W^f
            let s = &tw.scaling[p];
            let l = sparse::to_dense(&ops.unweighted().pair(p).unwrap().stiffness);
            let lt = sparse::to_dense(&tw.pair(p).unwrap().stiffness);
            let conj =
                nalgebra::DMatrix::from_fn(l.nrows(), l.ncols(), |i, j| l[(i, j)] / (s[i] * s[j]));
            assert!((conj - &lt).amax() <= 1e-12 * lt.amax());
        }
        let big = assemble_samples(&m, &dv, &vec![701.0; m.num_vertices()]).unwrap();
        assert!(matches!(twisted_from(&big), Err(Error::WeightOverflow(_))));
        let under = assemble_samples(&m, &dv, &vec![800.0; m.num_vertices()]);
        assert!(matches!(under, Err(Error::NonPositiveStar { .. })));
    }

    #[test]
    fn constant_weight_scales_stars() {
        let m = make_sphere(1.0, 1).unwrap();
        let dv = dual_volumes(&m).unwrap();
        let ops = assemble_samples(&m, &dv, &vec![0.3; m.num_vertices()]).unwrap();
        for p in 0..3 {
            for (a, b) in ops.star_f(p).iter().zip(ops.unweighted().star(p)) {
                assert!((a - b * (-0.3f64).exp()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn restriction_is_principal_submatrix() {
        let d = make_disk(1.0, 2).unwrap();
        let m = d.mesh();
        let dv = dual_volumes(m).unwrap();
        let ops = assemble_samples(m, &dv, &radial(m, 1.0)).unwrap();
        for p in 0..3 {
            let full = ops.pair(p).unwrap();
            let r = dirichlet_restrict(&ops, &d, p).unwrap();
            let ix = d.interior(p);
            let sub = sparse::submatrix(&full.stiffness, ix, ix);
            assert_eq!(sparse::to_dense(&sub), sparse::to_dense(&r.stiffness));
            assert_eq!(r.dim(), ix.len());
        }
        let single = crate::mesh::extract_domain(m, |v| v == 0).unwrap();
        let p0 = dirichlet_restrict(&ops, &single, 0).unwrap();
        assert_eq!(p0.dim(), 1);
        assert!(p0.stiffness.get(0, 0).copied().unwrap() > 0.0);
        assert!(matches!(
            dirichlet_restrict(&ops, &single, 1),
            Err(Error::EmptyInterior(_))
        ));
    }

    #[test]
    fn zero_operator_parts() {
        let m = make_sphere(1.0, 1).unwrap();
        let dv = dual_volumes(&m).unwrap();
        let ops = assemble_samples(&m, &dv, &vec![0.0; m.num_vertices()]).unwrap();
        assert!(matches!(
            ops.weighted().pair_on(2, Part::Up, None),
            Err(Error::ZeroOperator(_))
        ));
        assert!(matches!(
            ops.weighted().pair_on(0, Part::Down, None),
            Err(Error::ZeroOperator(_))
        ));
    }
}
