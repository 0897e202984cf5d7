//! Thin helpers over `sprs` CSR matrices.

use nalgebra::DMatrix;
use sprs::CsMat;

pub type Csr = CsMat<f64>;

/// Builds a CSR matrix, summing duplicates in insertion order.
pub fn from_triplets(rows: usize, cols: usize, mut t: Vec<(usize, usize, f64)>) -> Csr {
    t.sort_by_key(|&(i, j, _)| (i, j));
    let mut indptr = vec![0usize; rows + 1];
    let mut indices = Vec::with_capacity(t.len());
    let mut data: Vec<f64> = Vec::with_capacity(t.len());
    let mut last: Option<(usize, usize)> = None;
    for (i, j, v) in t {
        if last == Some((i, j)) {
            *data.last_mut().expect("entry exists") += v;
        } else {
            indices.push(j);
            data.push(v);
            indptr[i + 1] += 1;
            last = Some((i, j));
        }
    }
    for i in 0..rows {
        indptr[i + 1] += indptr[i];
    }
    CsMat::new((rows, cols), indptr, indices, data)
}

/// `Bᵀ diag(d) B`, accumulated row by row of B so that entries (i,j) and
/// (j,i) receive identical floating-point sums.
pub fn btdb(b: &Csr, d: &[f64]) -> Csr {
    let n = b.cols();
    let mut t = Vec::new();
    for (r, row) in b.outer_iterator().enumerate() {
        let entries: Vec<(usize, f64)> = row.iter().map(|(j, &v)| (j, v)).collect();
        for &(i, bi) in &entries {
            for &(j, bj) in &entries {
                t.push((i, j, d[r] * (bi * bj)));
            }
        }
    }
    from_triplets(n, n, t)
}

pub fn transpose(a: &Csr) -> Csr {
    a.transpose_view().to_csr()
}

/// `diag(s) · A`.
pub fn scale_rows(a: &Csr, s: &[f64]) -> Csr {
    let mut out = a.clone();
    for (i, mut row) in out.outer_iterator_mut().enumerate() {
        for (_, v) in row.iter_mut() {
            *v *= s[i];
        }
    }
    out
}

/// `A · diag(s)`.
pub fn scale_cols(a: &Csr, s: &[f64]) -> Csr {
    let mut out = a.clone();
    for mut row in out.outer_iterator_mut() {
        for (j, v) in row.iter_mut() {
            *v *= s[j];
        }
    }
    out
}

pub fn add(a: &Csr, b: &Csr) -> Csr {
    let mut t = Vec::with_capacity(a.nnz() + b.nnz());
    for m in [a, b] {
        for (i, row) in m.outer_iterator().enumerate() {
            t.extend(row.iter().map(|(j, &v)| (i, j, v)));
        }
    }
    from_triplets(a.rows(), a.cols(), t)
}

pub fn matvec(a: &Csr, x: &[f64]) -> Vec<f64> {
    a.outer_iterator()
        .map(|row| row.iter().map(|(j, &v)| v * x[j]).sum())
        .collect()
}

/// `Aᵀ x` without forming the transpose.
pub fn matvec_t(a: &Csr, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.cols()];
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, &v) in row.iter() {
            y[j] += v * x[i];
        }
    }
    y
}

/// Submatrix on the given (sorted or not) row and column index lists.
pub fn submatrix(a: &Csr, rows: &[usize], cols: &[usize]) -> Csr {
    let mut col_map = vec![usize::MAX; a.cols()];
    for (k, &c) in cols.iter().enumerate() {
        col_map[c] = k;
    }
    let mut t = Vec::new();
    for (k, &r) in rows.iter().enumerate() {
        if let Some(row) = a.outer_view(r) {
            for (j, &v) in row.iter() {
                if col_map[j] != usize::MAX {
                    t.push((k, col_map[j], v));
                }
            }
        }
    }
    from_triplets(rows.len(), cols.len(), t)
}

/// Largest |A_ij − A_ji|.
pub fn max_asymmetry(a: &Csr) -> f64 {
    let t = transpose(a);
    let mut worst: f64 = 0.0;
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, &v) in row.iter() {
            worst = worst.max((v - t.get(i, j).copied().unwrap_or(0.0)).abs());
        }
    }
    worst
}

pub fn max_abs(a: &Csr) -> f64 {
    a.data().iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn diagonal(a: &Csr) -> Vec<f64> {
    (0..a.rows())
        .map(|i| a.get(i, i).copied().unwrap_or(0.0))
        .collect()
}

pub fn to_dense(a: &Csr) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.rows(), a.cols());
    for (i, row) in a.outer_iterator().enumerate() {
        for (j, &v) in row.iter() {
            m[(i, j)] += v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplets_sum_duplicates() {
        let a = from_triplets(
            2,
            3,
            vec![(1, 2, 1.0), (0, 0, 2.0), (1, 2, 0.5), (0, 1, -1.0)],
        );
        assert_eq!(
            to_dense(&a),
            DMatrix::from_row_slice(2, 3, &[2.0, -1.0, 0.0, 0.0, 0.0, 1.5])
        );
    }

    #[test]
    fn btdb_matches_dense_and_is_symmetric() {
        let b = from_triplets(
            3,
            2,
            vec![
                (0, 0, 1.0),
                (0, 1, -1.0),
                (1, 1, 2.0),
                (2, 0, 0.3),
                (2, 1, 0.7),
            ],
        );
        let d = [0.5, 1.5, 2.0];
        let m = btdb(&b, &d);
        let bd = to_dense(&b);
        let want =
            bd.transpose() * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&d)) * bd;
        assert!((to_dense(&m) - want).amax() < 1e-15);
        assert_eq!(max_asymmetry(&m), 0.0);
    }

    #[test]
    fn products_and_restriction() {
        let a = from_triplets(2, 3, vec![(0, 0, 1.0), (0, 2, 2.0), (1, 1, 3.0)]);
        assert_eq!(matvec(&a, &[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        assert_eq!(matvec_t(&a, &[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
        let s = submatrix(&a, &[1], &[1, 2]);
        assert_eq!(to_dense(&s), DMatrix::from_row_slice(1, 2, &[3.0, 0.0]));
        assert_eq!(to_dense(&scale_rows(&a, &[2.0, 1.0]))[(0, 2)], 4.0);
        assert_eq!(to_dense(&scale_cols(&a, &[1.0, 1.0, 0.5]))[(0, 2)], 1.0);
    }
}
