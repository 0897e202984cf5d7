use nalgebra::{DMatrix, SymmetricEigen};

use crate::dec::OperatorPair;
use crate::error::{Error, Result};
use crate::sparse;

pub const DENSE_LIMIT: usize = 2000;

/// All eigenpairs of `K x = λ M x` through the symmetric matrix M^{-1/2} K M^{-1/2}.
/// Returns the `k` smallest, eigenvectors M-orthonormal.
pub(crate) fn solve_dense(pair: &OperatorPair, k: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = pair.dim();
    if n > DENSE_LIMIT {
        return Err(Error::DenseTooLarge(n));
    }
    let s: Vec<f64> = pair.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let k_dense = sparse::to_dense(&pair.stiffness);
    let a = DMatrix::from_fn(n, n, |i, j| {
        0.5 * (k_dense[(i, j)] + k_dense[(j, i)]) * s[i] * s[j]
    });
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .take(k)
        .map(|&i| (0..n).map(|r| eig.eigenvectors[(r, i)] * s[r]).collect())
        .collect();
    Ok((values, vectors))
}
