use drift_hodge::extalg::{binomial, extend_endo, interior, wedge, Basis, PForm, SymEndo};
use proptest::prelude::*;

fn perm_sign(p: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                s = -s;
            }
        }
    }
    s
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Evaluates a form as an alternating multilinear map on basis vectors.
fn eval(a: &PForm, idx: &[usize]) -> f64 {
    let mut sorted = idx.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return 0.0;
    }
    let order: Vec<usize> = idx
        .iter()
        .map(|i| sorted.iter().position(|s| s == i).unwrap())
        .collect();
    let basis = Basis::new(a.dim(), a.degree()).unwrap();
    let mask = sorted.iter().fold(0u16, |m, &i| m | (1 << i));
    perm_sign(&order) * a.coeffs()[basis.position(mask).unwrap()]
}

/// (a ∧ b)(v_1..v_{p+q}) = 1/(p! q!) Σ_σ sgn σ a(v_σ…) b(v_σ…)
fn brute_wedge(a: &PForm, b: &PForm) -> Vec<f64> {
    let (n, p, q) = (a.dim(), a.degree(), b.degree());
    let basis = Basis::new(n, p + q).unwrap();
    let norm = (1..=p).product::<usize>() as f64 * (1..=q).product::<usize>() as f64;
    (0..basis.len())
        .map(|i| {
            let idx = basis.indices(i);
            permutations(p + q)
                .iter()
                .map(|s| {
                    let v: Vec<usize> = s.iter().map(|&k| idx[k]).collect();
                    perm_sign(s) * eval(a, &v[..p]) * eval(b, &v[p..])
                })
                .sum::<f64>()
                / norm
        })
        .collect()
}

fn form(n: usize, p: usize, seed: &[f64]) -> PForm {
    let len = binomial(n, p);
    PForm::from_coeffs(
        n,
        p,
        (0..len)
            .map(|i| seed[i % seed.len()] * (1.0 + i as f64 * 0.37).sin())
            .collect(),
    )
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 1..12)
}

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{x} vs {y}");
    }
}

#[test]
fn wedge_sum_against_brute_force() {
    let e1 = PForm::basis_element(3, &[0]).unwrap();
    let e2 = PForm::basis_element(3, &[1]).unwrap();
    let s = e1.add(&e2).unwrap();
    let w = wedge(&s, &e2).unwrap();
    assert_eq!(w, PForm::basis_element(3, &[0, 1]).unwrap());
    assert_close(w.coeffs(), &brute_wedge(&s, &e2), 1e-15);
}

proptest! {
    #[test]
    fn wedge_matches_oracle(n in 2usize..=4, p in 0usize..=2, q in 0usize..=2, sa in coeffs(), sb in coeffs()) {
        prop_assume!(p + q <= n);
        let a = form(n, p, &sa);
        let b = form(n, q, &sb);
        assert_close(wedge(&a, &b).unwrap().coeffs(), &brute_wedge(&a, &b), 1e-12);
    }

    #[test]
    fn wedge_associative_and_graded(n in 3usize..=5, sa in coeffs(), sb in coeffs(), sc in coeffs()) {
        let a = form(n, 1, &sa);
        let b = form(n, 2, &sb);
        let c = form(n, n - 3, &sc);
        let l = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
        let r = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
        assert_close(l.coeffs(), r.coeffs(), 1e-12);
        let ab = wedge(&a, &b).unwrap();
        let ba = wedge(&b, &a).unwrap();
        assert_close(ab.coeffs(), ba.coeffs(), 1e-12);
        let aa = wedge(&a, &form(n, 1, &sb)).unwrap();
        let bb = wedge(&form(n, 1, &sb), &a).unwrap().scaled(-1.0);
        assert_close(aa.coeffs(), bb.coeffs(), 1e-12);
    }

    #[test]
    fn interior_adjoint_to_wedge(n in 2usize..=5, p in 0usize..=3, sv in prop::collection::vec(-2.0f64..2.0, 5), sa in coeffs(), sb in coeffs()) {
        prop_assume!(p < n);
        let v = &sv[..n];
        let a = form(n, p, &sa);
        let b = form(n, p + 1, &sb);
        let lhs = wedge(&PForm::one_form(v).unwrap(), &a).unwrap().dot(&b);
        let rhs = a.dot(&interior(v, &b).unwrap());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn interior_antiderivation(n in 3usize..=5, sv in prop::collection::vec(-2.0f64..2.0, 5), sa in coeffs(), sb in coeffs()) {
        let v = &sv[..n];
        for p in 1..=2usize {
            let a = form(n, p, &sa);
            let b = form(n, 1, &sb);
            let lhs = interior(v, &wedge(&a, &b).unwrap()).unwrap();
            let t1 = wedge(&interior(v, &a).unwrap(), &b).unwrap();
            let sign = if p % 2 == 0 { 1.0 } else { -1.0 };
            let t2 = wedge(&a, &interior(v, &b).unwrap()).unwrap().scaled(sign);
            assert_close(lhs.coeffs(), t1.add(&t2).unwrap().coeffs(), 1e-12);
        }
    }

    #[test]
    fn frame_reconstruction_and_wedge_norm(n in 2usize..=5, p in 1usize..=3, sa in coeffs()) {
        prop_assume!(p <= n);
        let a = form(n, p, &sa);
        let mut recon = PForm::zeros(n, p).unwrap();
        let mut wedge_norms = 0.0;
        for i in 0..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            let ei = PForm::one_form(&e).unwrap();
            recon = recon.add(&wedge(&ei, &interior(&e, &a).unwrap()).unwrap()).unwrap();
            if p < n {
                wedge_norms += wedge(&ei, &a).unwrap().norm_sq();
            }
        }
        assert_close(recon.scaled(1.0 / p as f64).coeffs(), a.coeffs(), 1e-12);
        if p < n {
            prop_assert!((wedge_norms - (n - p) as f64 * a.norm_sq()).abs() <= 1e-12 * (1.0 + a.norm_sq()));
        }
    }

    #[test]
    fn extension_spectrum_is_distinct_sums(n in 1usize..=4, p in 0usize..=4, ev in prop::collection::vec(-3.0f64..3.0, 4), angle in 0.0f64..6.3) {
        prop_assume!(p <= n);
        // rotate diag(ev) by a Givens rotation in the (0, n-1) plane
        let (c, s) = (angle.cos(), angle.sin());
        let mut r = nalgebra::DMatrix::<f64>::identity(n, n);
        if n > 1 {
            r[(0, 0)] = c; r[(0, n - 1)] = -s; r[(n - 1, 0)] = s; r[(n - 1, n - 1)] = c;
        }
        let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&ev[..n]));
        let m = &r * d * r.transpose();
        let a = SymEndo::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]));
        let got = extend_endo(&a, p).unwrap().eigenvalues();
        let basis = Basis::new(n, p).unwrap();
        let mut want: Vec<f64> = (0..basis.len()).map(|i| basis.indices(i).iter().map(|&k| ev[k]).sum()).collect();
        want.sort_by(|x, y| x.total_cmp(y));
        assert_close(&got, &want, 1e-10);
    }
}
