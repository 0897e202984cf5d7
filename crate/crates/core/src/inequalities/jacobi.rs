use serde::Serialize;

use super::{InequalityReport, ReportInputs, Setting, Status};
use crate::dec::OperatorPair;
use crate::error::{Error, Result};
use crate::extalg::binomial;
use crate::geometry::DIM;
use crate::sparse;
use crate::spectra::{self, f_betti, KERNEL_TOL};
use crate::weights::WeightKind;

/// Default bound on sup |H_f| below which the surface counts as f-minimal.
pub const MINIMALITY_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiOptions {
    /// Lower bound a of the ambient Hessian of f; taken from the radial weight when None.
    pub a: Option<f64>,
    /// Number of levels l in the eigenvalue comparison table.
    pub levels: usize,
    pub minimality_tol: f64,
}

impl Default for JacobiOptions {
    fn default() -> Self {
        JacobiOptions {
            a: None,
            levels: 3,
            minimality_tol: MINIMALITY_TOL,
        }
    }
}

/// L_f = Δ_f − (Hess f(ν,ν) + |II|²) as a pair on vertex functions.
#[derive(Debug, Clone)]
pub struct JacobiOperator {
    pub pair: OperatorPair,
    /// Hess f(ν,ν) + |II|² per vertex.
    pub potential: Vec<f64>,
    /// H_f = nH + ∂f/∂ν per vertex, with the mean curvature taken along ν.
    pub h_f: Vec<f64>,
    pub a: f64,
    pub gamma_m: f64,
    pub p: usize,
}

impl JacobiOperator {
    pub fn new(s: &Setting, p: usize, a: f64) -> Result<Self> {
        let m = s.mesh();
        let c = &s.curvature;
        let n = DIM as f64;
        let mut potential = Vec::with_capacity(m.num_vertices());
        let mut h_f = Vec::with_capacity(m.num_vertices());
        for v in 0..m.num_vertices() {
            let (hnn, dnu) = s.weight.ambient_normal_terms(m, c, v).ok_or_else(|| {
                Error::InvalidArgument("the Jacobi operator needs a zero or radial weight".into())
            })?;
            potential.push(hnn + c.ii_norm_sq(v));
            // the mean curvature along ν is −H for the shape operator dν
            h_f.push(dnu - n * c.mean[v]);
        }
        let base = s.pair(0)?;
        let t = base
            .index
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, -base.mass[i] * potential[v]))
            .collect();
        let stiffness = sparse::add(
            &base.stiffness,
            &sparse::from_triplets(base.dim(), base.dim(), t),
        );
        let mut pair = OperatorPair::from_parts(0, stiffness, base.mass.clone());
        pair.index = base.index;
        Ok(JacobiOperator {
            pair,
            potential,
            h_f,
            a,
            gamma_m: c.gamma_m,
            p,
        })
    }

    /// d(l) = C(n+1, p+1)(l − 1) + 1.
    pub fn d(&self, l: usize) -> usize {
        binomial(DIM + 1, self.p + 1) * (l - 1) + 1
    }

    pub fn minimality_residual(&self) -> f64 {
        self.pair
            .index
            .iter()
            .map(|&v| self.h_f[v].abs())
            .fold(0.0, f64::max)
    }

    /// The k lowest eigenvalues; the potential bounds the spectrum from below.
    pub fn eigenvalues(&self, k: usize, method: spectra::Method) -> Result<Vec<f64>> {
        let top = self
            .pair
            .index
            .iter()
            .map(|&v| self.potential[v])
            .fold(0.0, f64::max);
        let lower = -(1.01 * top + 1e-6 * self.pair.scale());
        Ok(spectra::solve_bounded(&self.pair, k.min(self.pair.dim()), method, lower)?.eigenvalues)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub l: usize,
    pub d: usize,
    pub lambda_jacobi: f64,
    pub lambda_forms: f64,
    pub right: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct JacobiOutcome {
    pub p: usize,
    pub a: f64,
    pub gamma_m: f64,
    pub minimality_residual: f64,
    pub f_minimal: bool,
    pub index: usize,
    /// Lowest eigenvalues of L_f, at least through the first nonnegative one.
    pub spectrum: Vec<f64>,
    /// Eigenvalues within 3% of −1.
    pub minus_one_count: usize,
    pub betti: usize,
    pub beta: usize,
    pub table: Vec<ComparisonRow>,
    pub reports: Vec<InequalityReport>,
}

/// Grows k until the computed eigenvalues pass `stop` or exhaust the dimension.
fn lowest_until(
    dim: usize,
    start: usize,
    mut solve: impl FnMut(usize) -> Result<Vec<f64>>,
    stop: impl Fn(&[f64]) -> bool,
) -> Result<Vec<f64>> {
    let mut k = start.min(dim);
    loop {
        let vals = solve(k)?;
        if stop(&vals) || k == dim {
            return Ok(vals);
        }
        k = dim.min(2 * k);
    }
}

/// Assembles L_f, counts its index and evaluates the comparison with the
/// p-form spectrum and the two index bounds.
pub fn jacobi(s: &Setting, p: usize, opts: &JacobiOptions) -> Result<JacobiOutcome> {
    if p == 0 {
        return Err(Error::InvalidArgument(
            "the index comparison needs p >= 1".into(),
        ));
    }
    if p > DIM {
        return Err(Error::DegreeExceedsDimension {
            degree: p,
            dim: DIM,
        });
    }
    if opts.levels == 0 {
        return Err(Error::InvalidArgument("levels must be >= 1".into()));
    }
    let a = match (opts.a, &s.weight.kind) {
        (Some(a), _) => a,
        (None, WeightKind::Radial { a }) => *a,
        _ => {
            return Err(Error::InvalidArgument(
                "the Hessian lower bound a is required for this weight".into(),
            ))
        }
    };
    let op = JacobiOperator::new(s, p, a)?;
    let method = s.options.method;
    let scale = op.pair.scale();
    let neg = -KERNEL_TOL * scale;

    let spectrum = lowest_until(
        op.pair.dim(),
        opts.levels.max(9),
        |k| op.eigenvalues(k, method),
        |v| v.len() >= opts.levels && v.last().is_some_and(|&x| x >= 0.0),
    )?;
    let index = spectrum.iter().filter(|&&x| x < neg).count();
    let minus_one_count = spectrum
        .iter()
        .filter(|&&x| (x + 1.0).abs() <= 0.03)
        .count();

    let (pf, n) = (p as f64, DIM as f64);
    let shift = (pf + 1.0) * a - op.gamma_m * pf * (pf - 1.0);
    let forms = s.pair(p)?;
    let need = op.d(opts.levels);
    let lambdas = lowest_until(
        forms.dim(),
        need.max(8),
        |k| Ok(s.spectrum(p, k)?.eigenvalues),
        |v| v.len() >= need && v.last().is_some_and(|&x| x >= shift),
    )?;
    if lambdas.len() < need {
        return Err(Error::TooManyEigenpairs {
            requested: need,
            dim: forms.dim(),
        });
    }

    let f_minimal = op.minimality_residual() < opts.minimality_tol;
    let advisory = |r: InequalityReport| {
        if f_minimal {
            r
        } else {
            let note = if r.note.is_empty() {
                "not f-minimal".to_string()
            } else {
                format!("{}; not f-minimal", r.note)
            };
            r.with_status(Status::Advisory).with_note(note)
        }
    };
    let inputs = |l: Option<usize>| ReportInputs {
        p: Some(p),
        l,
        ..s.inputs()
    };

    let mut table = Vec::new();
    let mut reports = Vec::new();
    for l in 1..=opts.levels {
        let d = op.d(l);
        let (left, lam) = (spectrum[l - 1], lambdas[d - 1]);
        let right = lam - shift;
        let r = InequalityReport::upper(
            "thm1.5",
            inputs(Some(l)),
            left,
            right,
            s.tolerance(left.abs().max(right.abs())),
        );
        table.push(ComparisonRow {
            l,
            d,
            lambda_jacobi: left,
            lambda_forms: lam,
            right,
            pass: r.pass,
        });
        reports.push(advisory(r));
    }

    let c = binomial(DIM + 1, p + 1) as f64;
    let beta = lambdas.iter().filter(|&&x| x < shift).count();
    reports.push(advisory(
        InequalityReport::lower("cor1.6", inputs(None), index as f64, beta as f64 / c, 0.0)
            .with_note(format!("beta = {beta}")),
    ));

    let betti = f_betti(&forms, KERNEL_TOL)?;
    let bound = betti as f64 / c + n + 1.0;
    let cor17 = InequalityReport::lower("cor1.7", inputs(None), index as f64, bound, 0.0)
        .with_note(format!("b_p = {betti}"));
    if pf * (pf - 1.0) * op.gamma_m <= pf + 1.0 {
        reports.push(advisory(cor17));
    } else {
        reports.push(
            cor17
                .with_status(Status::HypothesisFails)
                .with_note("p(p-1) gamma_M > p+1"),
        );
    }

    Ok(JacobiOutcome {
        p,
        a,
        gamma_m: op.gamma_m,
        minimality_residual: op.minimality_residual(),
        f_minimal,
        index,
        spectrum,
        minus_one_count,
        betti,
        beta,
        table,
        reports,
    })
}
