//! Block Krylov iteration on the shift-inverted operator (K − σM)^{-1} M,
//! with Rayleigh–Ritz on K and thick restarts from the best Ritz vectors.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sprs::SymmetryCheck;
use sprs_ldl::{Ldl, LdlNumeric};

use crate::dec::OperatorPair;
use crate::error::{Error, Result};
use crate::sparse::{self, Csr};

const MAX_CYCLES: usize = 60;
const STEPS: usize = 4;
/// Smallest acceptable pivot relative to the matrix diagonal.
const PIVOT_FLOOR: f64 = 1e-11;

pub(crate) struct LanczosOutput {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub shifts: Vec<f64>,
    pub cycles: usize,
}

fn factor(a: &Csr) -> Option<LdlNumeric<f64, usize>> {
    let ldl = Ldl::new()
        .check_symmetry(SymmetryCheck::DontCheckSymmetry)
        .numeric(a.view())
        .ok()?;
    let diag = sparse::diagonal(a);
    // the LDLᵀ diagonal is a permutation of pivots; compare against the largest diagonal entry
    let dmax = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let ok = ldl
        .d()
        .iter()
        .all(|&p| p.is_finite() && p > PIVOT_FLOOR * dmax);
    ok.then_some(ldl)
}

/// M^{-1/2}(K − σM)M^{-1/2}, so that pivots compare on the scale of the eigenvalues
/// even when the weight spreads the mass over many orders of magnitude.
fn shifted(pair: &OperatorPair, inv_sqrt_m: &[f64], sigma: f64) -> Csr {
    let n = pair.dim();
    let k = sparse::scale_rows(&sparse::scale_cols(&pair.stiffness, inv_sqrt_m), inv_sqrt_m);
    let t = (0..n).map(|i| (i, i, -sigma)).collect();
    sparse::add(&k, &sparse::from_triplets(n, n, t))
}

fn m_dot(m: &[f64], a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).zip(m).map(|((x, y), w)| x * y * w).sum()
}

/// Orthogonalizes `v` against `basis` (two passes) and normalizes it in the
/// M-inner product. Returns None if `v` is numerically dependent.
fn orthonormalize(m: &[f64], basis: &[Vec<f64>], mut v: Vec<f64>) -> Option<Vec<f64>> {
    let before = m_dot(m, &v, &v).sqrt();
    if before == 0.0 || !before.is_finite() {
        return None;
    }
    for _ in 0..2 {
        for q in basis {
            let c = m_dot(m, q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
    }
    let after = m_dot(m, &v, &v).sqrt();
    if after <= 1e-10 * before {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= after);
    Some(v)
}

/// ‖Kx − λMx‖ in the M^{-1} norm.
pub(crate) fn residual(pair: &OperatorPair, lambda: f64, x: &[f64]) -> f64 {
    let kx = sparse::matvec(&pair.stiffness, x);
    kx.iter()
        .zip(x)
        .zip(&pair.mass)
        .map(|((a, b), m)| {
            let r = a - lambda * m * b;
            r * r / m
        })
        .sum::<f64>()
        .sqrt()
}

/// `lower` is a known lower bound of the spectrum (0 for semidefinite pairs);
/// the shifts start there and move down.
pub(crate) fn solve_lanczos(
    pair: &OperatorPair,
    k: usize,
    seed: u64,
    tol: f64,
    lower: f64,
) -> Result<LanczosOutput> {
    let n = pair.dim();
    let scale = pair.scale().max(f64::MIN_POSITIVE);
    let mut shifts = Vec::new();
    let inv_sqrt_m: Vec<f64> = pair.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let mut ldl = None;
    for sigma in [lower, lower - 1e-6 * scale, lower - 1e-4 * scale] {
        shifts.push(sigma);
        if let Some(f) = factor(&shifted(pair, &inv_sqrt_m, sigma)) {
            ldl = Some(f);
            break;
        }
    }
    let ldl = ldl.ok_or(Error::FactorizationBreakdown {
        attempts: shifts.len(),
    })?;
    let m = &pair.mass;
    // (K − σM)^{-1} M x = M^{-1/2} (K' − σ)^{-1} M^{1/2} x
    let apply = |x: &Vec<f64>| -> Vec<f64> {
        let y: Vec<f64> = x.iter().zip(&inv_sqrt_m).map(|(a, s)| a / s).collect();
        ldl.solve(&y)
            .iter()
            .zip(&inv_sqrt_m)
            .map(|(a, s)| a * s)
            .collect()
    };

    let b = n.min((k + 6).max(8));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut block: Vec<Vec<f64>> = (0..b)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let mut worst = f64::INFINITY;
    for cycle in 1..=MAX_CYCLES {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut current = Vec::new();
        for v in block.drain(..) {
            if let Some(q) = orthonormalize(m, &basis, v) {
                basis.push(q.clone());
                current.push(q);
            }
        }
        for _ in 0..STEPS {
            if basis.len() >= n || current.is_empty() {
                break;
            }
            let images: Vec<Vec<f64>> = current.par_iter().map(apply).collect();
            current.clear();
            for v in images {
                if basis.len() >= n {
                    break;
                }
                if let Some(q) = orthonormalize(m, &basis, v) {
                    basis.push(q.clone());
                    current.push(q);
                }
            }
        }
        let dim = basis.len();
        let kq: Vec<Vec<f64>> = basis
            .par_iter()
            .map(|q| sparse::matvec(&pair.stiffness, q))
            .collect();
        let t = DMatrix::from_fn(dim, dim, |i, j| {
            let a: f64 = basis[i].iter().zip(&kq[j]).map(|(x, y)| x * y).sum();
            let c: f64 = basis[j].iter().zip(&kq[i]).map(|(x, y)| x * y).sum();
            0.5 * (a + c)
        });
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let take = dim.min(b);
        let ritz: Vec<Vec<f64>> = order[..take]
            .par_iter()
            .map(|&c| {
                let mut x = vec![0.0; n];
                for (r, q) in basis.iter().enumerate() {
                    let y = eig.eigenvectors[(r, c)];
                    for (xi, qi) in x.iter_mut().zip(q) {
                        *xi += y * qi;
                    }
                }
                x
            })
            .collect();
        let values: Vec<f64> = order[..take].iter().map(|&c| eig.eigenvalues[c]).collect();
        let kk = k.min(take);
        worst = (0..kk)
            .map(|i| residual(pair, values[i], &ritz[i]))
            .fold(0.0, f64::max);
        if kk == k && (worst <= tol * scale || dim >= n) {
            return Ok(LanczosOutput {
                values: values[..k].to_vec(),
                vectors: ritz[..k].to_vec(),
                shifts,
                cycles: cycle,
            });
        }
        block = ritz;
        while block.len() < b {
            block.push((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        }
    }
    Err(Error::NotConverged {
        residual: worst,
        cycles: MAX_CYCLES,
    })
}
