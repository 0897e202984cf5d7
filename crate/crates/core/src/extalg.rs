//! Pointwise exterior algebra over an n-dimensional inner-product space.
//!
//! A p-form is stored as its coefficient vector in the basis
//! `e^{i_1} ∧ … ∧ e^{i_p}` with `i_1 < … < i_p`, multi-indices ordered
//! lexicographically. Multi-indices are bitmasks internally, so the dimension
//! is capped at [`MAX_DIM`]. The basis is orthonormal for the induced inner
//! product (`|e^1 ∧ e^2| = 1`).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product::<usize>().max(1)
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        Err(Error::UnsupportedDimension(n))
    } else {
        Ok(())
    }
}

/// Lexicographic multi-index basis of Λ^p(R^n).
#[derive(Debug, Clone)]
pub struct Basis {
    n: usize,
    p: usize,
    masks: Vec<u16>,
    position: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl Basis {
    pub fn new(n: usize, p: usize) -> Result<Self> {
        check_dim(n)?;
        if p > n {
            return Err(Error::DegreeExceedsDimension { degree: p, dim: n });
        }
        let mut masks = Vec::with_capacity(binomial(n, p));
        let mut current = Vec::with_capacity(p);
        combinations(n, p, 0, &mut current, &mut masks);
        let mut position = vec![ABSENT; 1 << n];
        for (i, &m) in masks.iter().enumerate() {
            position[m as usize] = i as u32;
        }
        Ok(Basis {
            n,
            p,
            masks,
            position,
        })
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn mask(&self, i: usize) -> u16 {
        self.masks[i]
    }

    pub fn position(&self, mask: u16) -> Option<usize> {
        match self.position.get(mask as usize) {
            Some(&ABSENT) | None => None,
            Some(&i) => Some(i as usize),
        }
    }

    /// Sorted indices of the i-th multi-index.
    pub fn indices(&self, i: usize) -> Vec<usize> {
        bits(self.masks[i])
    }
}

fn combinations(n: usize, p: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<u16>) {
    if current.len() == p {
        out.push(current.iter().fold(0u16, |m, &i| m | (1 << i)));
        return;
    }
    for i in start..n {
        current.push(i);
        combinations(n, p, i + 1, current, out);
        current.pop();
    }
}

fn bits(mask: u16) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `e^I ∧ e^J` relative to `e^{I∪J}`; zero when the sets overlap.
fn wedge_sign(i: u16, j: u16) -> f64 {
    if i & j != 0 {
        return 0.0;
    }
    let mut inversions = 0;
    for b in bits(j) {
        inversions += (i >> (b + 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Number of set bits of `mask` strictly below bit `b`.
fn rank_below(mask: u16, b: usize) -> u32 {
    (mask & ((1u16 << b) - 1)).count_ones()
}

/// A p-form with constant coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PForm {
    n: usize,
    p: usize,
    coeffs: Vec<f64>,
}

impl PForm {
    pub fn zeros(n: usize, p: usize) -> Result<Self> {
        check_dim(n)?;
        if p > n {
            return Err(Error::DegreeExceedsDimension { degree: p, dim: n });
        }
        Ok(PForm {
            n,
            p,
            coeffs: vec![0.0; binomial(n, p)],
        })
    }

    pub fn from_coeffs(n: usize, p: usize, coeffs: Vec<f64>) -> Result<Self> {
        let mut f = Self::zeros(n, p)?;
        if coeffs.len() != f.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: f.coeffs.len(),
                got: coeffs.len(),
            });
        }
        f.coeffs = coeffs;
        Ok(f)
    }

    /// The 1-form with components `v`.
    pub fn one_form(v: &[f64]) -> Result<Self> {
        Self::from_coeffs(v.len(), 1, v.to_vec())
    }

    /// `e^{i_1} ∧ … ∧ e^{i_p}` for distinct zero-based indices in any order.
    pub fn basis_element(n: usize, indices: &[usize]) -> Result<Self> {
        let mut f = Self::zeros(n, indices.len())?;
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) || sorted.last().is_some_and(|&i| i >= n) {
            return Ok(f);
        }
        let mut sign = 1.0;
        for a in 0..indices.len() {
            for b in a + 1..indices.len() {
                if indices[a] > indices[b] {
                    sign = -sign;
                }
            }
        }
        let mask = sorted.iter().fold(0u16, |m, &i| m | (1 << i));
        let basis = Basis::new(n, indices.len())?;
        f.coeffs[basis.position(mask).expect("valid mask")] = sign;
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dot(&self, other: &PForm) -> f64 {
        debug_assert_eq!((self.n, self.p), (other.n, other.p));
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn scaled(&self, s: f64) -> PForm {
        PForm {
            n: self.n,
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &PForm) -> Result<PForm> {
        if (self.n, self.p) != (other.n, other.p) {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                got: other.coeffs.len(),
            });
        }
        Ok(PForm {
            n: self.n,
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

/// Exterior product.
pub fn wedge(a: &PForm, b: &PForm) -> Result<PForm> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            got: b.n,
        });
    }
    let n = a.n;
    let q = a.p + b.p;
    if q > n {
        return Err(Error::DegreeExceedsDimension { degree: q, dim: n });
    }
    let ba = Basis::new(n, a.p)?;
    let bb = Basis::new(n, b.p)?;
    let bq = Basis::new(n, q)?;
    let mut out = vec![0.0; bq.len()];
    for (i, &ca) in a.coeffs.iter().enumerate() {
        if ca == 0.0 {
            continue;
        }
        let mi = ba.mask(i);
        for (j, &cb) in b.coeffs.iter().enumerate() {
            let mj = bb.mask(j);
            let s = wedge_sign(mi, mj);
            if s != 0.0 {
                out[bq.position(mi | mj).expect("union has degree q")] += s * ca * cb;
            }
        }
    }
    Ok(PForm {
        n,
        p: q,
        coeffs: out,
    })
}

/// Interior product `v ⌟ a` (contraction in the first slot).
pub fn interior(v: &[f64], a: &PForm) -> Result<PForm> {
    if a.p == 0 {
        return Err(Error::ContractScalar);
    }
    if v.len() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            got: v.len(),
        });
    }
    let ba = Basis::new(a.n, a.p)?;
    let bo = Basis::new(a.n, a.p - 1)?;
    let mut out = vec![0.0; bo.len()];
    for (i, &c) in a.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let m = ba.mask(i);
        for b in bits(m) {
            let sign = if rank_below(m, b).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out[bo.position(m & !(1 << b)).expect("sub-index")] += sign * v[b] * c;
        }
    }
    Ok(PForm {
        n: a.n,
        p: a.p - 1,
        coeffs: out,
    })
}

/// Symmetric endomorphism of R^n, stored as its packed upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEndo {
    n: usize,
    upper: Vec<f64>,
}

impl SymEndo {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut upper = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                upper.push(f(i, j));
            }
        }
        SymEndo { n, upper }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    /// Reads the upper triangle of a square matrix; rejects asymmetric input.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let scale = m.amax().max(1.0);
        for i in 0..m.nrows() {
            for j in i + 1..m.ncols() {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self::from_fn(m.nrows(), |i, j| m[(i, j)]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.upper[i * self.n - i * (i + 1) / 2 + j]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        SymEndo {
            n: self.n,
            upper: self.upper.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &SymEndo) -> Self {
        assert_eq!(self.n, other.n);
        SymEndo {
            n: self.n,
            upper: self
                .upper
                .iter()
                .zip(&other.upper)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j).powi(2);
            }
        }
        s
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_matrix())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// Symmetric endomorphism of Λ^p(R^n) in the lexicographic basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FormEndo {
    n: usize,
    p: usize,
    mat: DMatrix<f64>,
}

impl FormEndo {
    pub fn zeros(n: usize, p: usize) -> Self {
        let d = binomial(n, p);
        FormEndo {
            n,
            p,
            mat: DMatrix::zeros(d, d),
        }
    }

    pub fn identity(n: usize, p: usize) -> Self {
        let d = binomial(n, p);
        FormEndo {
            n,
            p,
            mat: DMatrix::identity(d, d),
        }
    }

    /// Wraps a matrix after symmetrizing it.
    pub fn from_matrix(n: usize, p: usize, m: DMatrix<f64>) -> Result<Self> {
        let d = binomial(n, p);
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.nrows(),
            });
        }
        let sym = (&m + m.transpose()) * 0.5;
        Ok(FormEndo { n, p, mat: sym })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn apply(&self, w: &PForm) -> PForm {
        let v = &self.mat * nalgebra::DVector::from_column_slice(w.coeffs());
        PForm {
            n: self.n,
            p: self.p,
            coeffs: v.iter().copied().collect(),
        }
    }

    pub fn quadratic(&self, w: &[f64]) -> f64 {
        let d = self.mat.nrows();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += w[i] * self.mat[(i, j)] * w[j];
            }
        }
        s
    }

    pub fn scaled(&self, s: f64) -> Self {
        FormEndo {
            n: self.n,
            p: self.p,
            mat: &self.mat * s,
        }
    }

    pub fn add(&self, other: &FormEndo) -> Self {
        FormEndo {
            n: self.n,
            p: self.p,
            mat: &self.mat + &other.mat,
        }
    }

    pub fn sub(&self, other: &FormEndo) -> Self {
        FormEndo {
            n: self.n,
            p: self.p,
            mat: &self.mat - &other.mat,
        }
    }

    pub fn square(&self) -> Self {
        let m = &self.mat * &self.mat;
        FormEndo {
            n: self.n,
            p: self.p,
            mat: (&m + m.transpose()) * 0.5,
        }
    }

    /// Eigenvalues in ascending order; empty for the zero-dimensional case.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.mat.nrows() == 0 {
            return Vec::new();
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.mat.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn max_abs_diff(&self, other: &FormEndo) -> f64 {
        (&self.mat - &other.mat).amax()
    }
}

/// Derivation extension `A^{[p]}` of a symmetric endomorphism to p-forms:
/// `(A^{[p]} ω)(X_1,…,X_p) = Σ_k ω(X_1,…,A X_k,…,X_p)`.
pub fn extend_endo(a: &SymEndo, p: usize) -> Result<FormEndo> {
    let n = a.dim();
    let basis = Basis::new(n, p)?;
    let d = basis.len();
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let mask = basis.mask(col);
        for (slot, j) in bits(mask).into_iter().enumerate() {
            let rest = mask & !(1 << j);
            for l in 0..n {
                let coeff = a.get(l, j);
                if coeff == 0.0 || rest & (1 << l) != 0 {
                    continue;
                }
                let target = rest | (1 << l);
                let r = rank_below(rest, l) as i64;
                let sign = if (slot as i64 - r) % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                m[(basis.position(target).expect("target in basis"), col)] += sign * coeff;
            }
        }
    }
    FormEndo::from_matrix(n, p, m)
}

/// The endomorphism `ω ↦ v ∧ (v ⌟ ω)` of p-forms.
pub fn wedge_interior_endo(v: &[f64], p: usize) -> Result<FormEndo> {
    let n = v.len();
    let basis = Basis::new(n, p)?;
    let d = basis.len();
    if p == 0 {
        return Ok(FormEndo::zeros(n, 0));
    }
    let vf = PForm::one_form(v)?;
    let mut m = DMatrix::zeros(d, d);
    for col in 0..d {
        let mut e = PForm::zeros(n, p)?;
        e.coeffs[col] = 1.0;
        let img = wedge(&vf, &interior(v, &e)?)?;
        for row in 0..d {
            m[(row, col)] = img.coeffs[row];
        }
    }
    FormEndo::from_matrix(n, p, m)
}

/// Frame-sum identities over projected ambient basis vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSums {
    pub n: usize,
    pub p: usize,
    /// `Σ |v_{i_1} ∧ … ∧ v_{i_p}|²` over ordered tuples.
    pub wedge_sum: f64,
    /// `p!·C(n,p)`.
    pub wedge_predicted: f64,
    /// `Σ |X ⌟ (v_{i_1} ∧ … ∧ v_{i_p})|²` over ordered tuples.
    pub interior_sum: f64,
    /// `p!·C(n−1,p−1)·|X|²`.
    pub interior_predicted: f64,
    pub gram_deviation: f64,
}

impl FrameSums {
    pub fn max_error(&self) -> f64 {
        (self.wedge_sum - self.wedge_predicted)
            .abs()
            .max((self.interior_sum - self.interior_predicted).abs())
    }
}

/// Evaluates the wedge-norm and interior-product frame sums for the family
/// `frame` of tangential projections (each of length n) of an orthonormal
/// ambient basis, against a tangent vector `x`.
pub fn frame_sum_checks(
    n: usize,
    p: usize,
    frame: &[Vec<f64>],
    x: &[f64],
    tol: f64,
) -> Result<FrameSums> {
    check_dim(n)?;
    if p == 0 || p > n {
        return Err(Error::DegreeExceedsDimension { degree: p, dim: n });
    }
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    if let Some(v) = frame.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: v.len(),
        });
    }
    let mut gram_dev: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let g: f64 = frame.iter().map(|v| v[a] * v[b]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            gram_dev = gram_dev.max((g - target).abs());
        }
    }
    if gram_dev > tol {
        return Err(Error::NonIsometricFrame {
            deviation: gram_dev,
            tolerance: tol,
        });
    }
    let ones: Vec<PForm> = frame
        .iter()
        .map(|v| PForm::one_form(v))
        .collect::<Result<_>>()?;
    let mut wedge_sum = 0.0;
    let mut interior_sum = 0.0;
    let mut stack = vec![PForm::from_coeffs(n, 0, vec![1.0])?];
    let mut idx = vec![0usize; p];
    // odometer over ordered tuples in {0..N}^p, wedge products built incrementally
    let count = frame.len();
    if count == 0 {
        return Err(Error::InvalidArgument("empty frame".into()));
    }
    let mut depth = 0;
    loop {
        if depth < p {
            let next = wedge(&stack[depth], &ones[idx[depth]])?;
            stack.truncate(depth + 1);
            stack.push(next);
            depth += 1;
            continue;
        }
        let w = &stack[p];
        wedge_sum += w.norm_sq();
        interior_sum += interior(x, w)?.norm_sq();
        // advance odometer
        let mut k = p;
        loop {
            if k == 0 {
                let x2: f64 = x.iter().map(|c| c * c).sum();
                let pf = factorial(p) as f64;
                return Ok(FrameSums {
                    n,
                    p,
                    wedge_sum,
                    wedge_predicted: pf * binomial(n, p) as f64,
                    interior_sum,
                    interior_predicted: pf * binomial(n - 1, p - 1) as f64 * x2,
                    gram_deviation: gram_dev,
                });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < count {
                break;
            }
            idx[k] = 0;
        }
        depth = k;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn basis_is_lexicographic() {
        let b = Basis::new(4, 2).unwrap();
        let idx: Vec<Vec<usize>> = (0..b.len()).map(|i| b.indices(i)).collect();
        assert_eq!(
            idx,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn wedge_basis_cases() {
        let e1 = PForm::basis_element(3, &[0]).unwrap();
        let e2 = PForm::basis_element(3, &[1]).unwrap();
        let e12 = wedge(&e1, &e2).unwrap();
        assert_eq!(e12, PForm::basis_element(3, &[0, 1]).unwrap());
        assert_eq!(e12.coeffs()[0], 1.0);
        assert_eq!(wedge(&e1, &e1).unwrap().norm_sq(), 0.0);
        let e21 = wedge(&e2, &e1).unwrap();
        assert_eq!(e21.coeffs()[0], -1.0);
    }

    #[test]
    fn wedge_degree_overflow() {
        let a = PForm::basis_element(2, &[0, 1]).unwrap();
        let b = PForm::basis_element(2, &[0]).unwrap();
        assert!(matches!(
            wedge(&a, &b),
            Err(Error::DegreeExceedsDimension { .. })
        ));
    }

    #[test]
    fn interior_basis_cases() {
        let e12 = PForm::basis_element(3, &[0, 1]).unwrap();
        let r = interior(&[1.0, 0.0, 0.0], &e12).unwrap();
        assert_eq!(r, PForm::basis_element(3, &[1]).unwrap());
        let r = interior(&[0.0, 1.0, 0.0], &e12).unwrap();
        assert_eq!(r, PForm::basis_element(3, &[0]).unwrap().scaled(-1.0));
        let r = interior(&[0.0, 0.0, 1.0], &e12).unwrap();
        assert_eq!(r.norm_sq(), 0.0);
        let s = PForm::from_coeffs(3, 0, vec![1.0]).unwrap();
        assert_eq!(interior(&[1.0, 0.0, 0.0], &s), Err(Error::ContractScalar));
    }

    #[test]
    fn extend_identity_scales_by_degree() {
        let a = extend_endo(&SymEndo::identity(3), 2).unwrap();
        assert!(a.max_abs_diff(&FormEndo::identity(3, 2).scaled(2.0)) < 1e-15);
        let d = SymEndo::diagonal(&[0.7, -1.3]);
        let a1 = extend_endo(&d, 1).unwrap();
        assert_eq!(a1.matrix(), &d.to_matrix());
        assert_eq!(extend_endo(&d, 0).unwrap().matrix().nrows(), 1);
        assert_eq!(extend_endo(&d, 0).unwrap().matrix()[(0, 0)], 0.0);
    }

    #[test]
    fn extend_diag_pairwise_sums() {
        let a = extend_endo(&SymEndo::diagonal(&[1.0, 2.0, 3.0]), 2).unwrap();
        let ev = a.eigenvalues();
        for (x, y) in ev.iter().zip([3.0, 4.0, 5.0]) {
            assert!(close(*x, y, 1e-12));
        }
    }

    #[test]
    fn extend_out_of_range() {
        assert!(extend_endo(&SymEndo::identity(2), 3).is_err());
    }

    #[test]
    fn frame_sums_surface_in_r3() {
        // tangent plane spanned by an arbitrary orthonormal pair in R^3
        let t1 = [0.6, 0.8, 0.0];
        let t2 = [0.0, 0.0, 1.0];
        let frame: Vec<Vec<f64>> = (0..3).map(|i| vec![t1[i], t2[i]]).collect();
        let s1 = frame_sum_checks(2, 1, &frame, &[1.0, 0.0], 1e-12).unwrap();
        assert!(close(s1.wedge_sum, 2.0, 1e-12));
        assert!(close(s1.interior_sum, 1.0, 1e-12));
        let s2 = frame_sum_checks(2, 2, &frame, &[0.3, -0.4], 1e-12).unwrap();
        assert!(close(s2.wedge_sum, 2.0, 1e-12));
        assert!(close(s2.interior_predicted, 2.0 * 0.25, 1e-12));
        assert!(close(s2.interior_sum, s2.interior_predicted, 1e-12));
    }

    #[test]
    fn frame_sums_reject_non_isometric() {
        let frame = vec![vec![1.0, 0.0], vec![0.0, 0.5], vec![0.0, 0.0]];
        assert!(matches!(
            frame_sum_checks(2, 1, &frame, &[1.0, 0.0], 1e-10),
            Err(Error::NonIsometricFrame { .. })
        ));
    }

    #[test]
    fn wedge_interior_endo_is_rank_one_on_one_forms() {
        let v = [0.5, -2.0];
        let m = wedge_interior_endo(&v, 1).unwrap();
        assert!(close(m.matrix()[(0, 1)], -1.0, 1e-15));
        assert!(close(m.matrix()[(1, 1)], 4.0, 1e-15));
        // on top forms v ∧ (v ⌟ ω) = |v|² ω
        let top = wedge_interior_endo(&v, 2).unwrap();
        assert!(close(top.matrix()[(0, 0)], 4.25, 1e-15));
    }

    #[test]
    fn sym_endo_packed_access() {
        let s = SymEndo::from_fn(3, |i, j| (10 * i + j) as f64);
        assert_eq!(s.get(2, 1), 12.0);
        assert_eq!(s.get(1, 2), 12.0);
        assert_eq!(s.trace(), 0.0 + 11.0 + 22.0);
        let m = s.to_matrix();
        assert_eq!(SymEndo::from_matrix(&m).unwrap(), s);
        let mut bad = m.clone();
        bad[(0, 1)] += 1.0;
        assert!(SymEndo::from_matrix(&bad).is_err());
    }

    #[test]
    fn dimension_cap() {
        assert!(Basis::new(9, 1).is_err());
        assert!(Basis::new(8, 4).is_ok());
        assert_eq!(binomial(8, 4), 70);
    }
}
