use super::{InequalityReport, Setting, Status};
use crate::error::{Error, Result};
use crate::geometry::DIM;
use crate::spectra::{f_betti, KERNEL_TOL};

fn check_degree(p: usize) -> Result<()> {
    if p == 0 {
        Err(Error::InvalidArgument("bound needs degree p >= 1".into()))
    } else if p > DIM {
        Err(Error::DegreeExceedsDimension {
            degree: p,
            dim: DIM,
        })
    } else {
        Ok(())
    }
}

fn support(s: &Setting) -> Vec<usize> {
    (0..s.mesh().num_vertices())
        .filter(|&v| s.domain.is_kept(v))
        .collect()
}

/// λ_{1,p,f} − λ_{1,p−1,f} ≥ (1/p) inf min-eig(𝔅 + T_f − (II)²).
pub fn thm11_gap(s: &Setting, p: usize) -> Result<InequalityReport> {
    check_degree(p)?;
    let hi = s.lambda_first(p)?;
    let lo = if s.options.include_zero {
        s.lambda_min(p - 1)?
    } else {
        s.lambda_first(p - 1)?
    };
    let ric = s.ricci(p)?;
    let inf = support(s)
        .into_iter()
        .map(|v| ric.ric_f[v].sub(&ric.sff_sq[v]).min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    let right = inf / p as f64;
    let tol = s.tolerance(hi.abs().max(lo.abs()).max(right.abs()));
    let inputs = super::ReportInputs {
        p: Some(p),
        ..s.inputs()
    };
    let note = if s.options.include_zero {
        "lambda_{1,p-1} includes zero"
    } else {
        "first positive eigenvalues"
    };
    Ok(InequalityReport::lower("thm1.1_gap", inputs, hi - lo, right, tol).with_note(note))
}

/// Pointwise integrand of the upper bound: pn|H|² − p(p−1)/(n(n−1)) Scal + (p/n)|df|².
pub(crate) fn upper_integrand(s: &Setting, p: usize) -> Vec<f64> {
    let (n, pf) = (DIM as f64, p as f64);
    (0..s.curvature.len())
        .map(|v| {
            let h = s.curvature.mean[v];
            pf * n * h * h - pf * (pf - 1.0) / (n * (n - 1.0)) * s.curvature.scal(v)
                + pf / n * s.weight.df_norm_sq[v]
        })
        .collect()
}

/// λ'_{1,p,f} ≤ Vol_f-average of the upper integrand (closed surfaces).
pub fn thm11_upper(s: &Setting, p: usize) -> Result<InequalityReport> {
    check_degree(p)?;
    if !s.is_closed() {
        return Err(Error::InvalidArgument(
            "the upper bound needs a closed surface".into(),
        ));
    }
    let left = s.lambda_exact(p)?;
    let right = s.average(&upper_integrand(s, p));
    let tol = s.tolerance(left.abs().max(right.abs()));
    let inputs = super::ReportInputs {
        p: Some(p),
        ..s.inputs()
    };
    Ok(InequalityReport::upper(
        "thm1.1_upper",
        inputs,
        left,
        right,
        tol,
    ))
}

fn admissible(n_param: f64, p: usize) -> bool {
    n_param.is_infinite() && n_param > 0.0 || n_param < 0.0 || n_param > (DIM - p + 1) as f64
}

/// If Ric^{(p)}_{N,f} ≥ p(n−p)γ then λ'_{1,p,f} ≥ p(n−p)γ N/(N−1).
///
/// With `gamma` None the largest admissible γ is used. `n_param` may be
/// +∞, in which case N/(N−1) = 1.
pub fn gallot_meyer_f(
    s: &Setting,
    p: usize,
    n_param: f64,
    gamma: Option<f64>,
) -> Result<InequalityReport> {
    check_degree(p)?;
    if !admissible(n_param, p) {
        return Err(Error::InvalidArgument(format!(
            "N = {n_param} outside (-inf, 0) U ({}, inf)",
            DIM - p + 1
        )));
    }
    let ric = s.ricci(p)?;
    let ric_n = ric.ric_n(&s.weight, n_param)?;
    let min_eig = support(s)
        .into_iter()
        .map(|v| ric_n[v].min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    let c = (p * (DIM - p)) as f64;
    let inputs = super::ReportInputs {
        p: Some(p),
        n_param: Some(n_param),
        ..s.inputs()
    };
    let gamma = match gamma {
        Some(g) => g,
        None if c > 0.0 => min_eig / c,
        None => 0.0,
    };
    let required = c * gamma;
    let hyp_tol = s.tolerance(required.abs().max(min_eig.abs()));
    if min_eig < required - hyp_tol || gamma <= 0.0 && c > 0.0 {
        let r = InequalityReport::lower("gallot_meyer_f", inputs, min_eig, required, hyp_tol);
        return Ok(r.with_status(Status::HypothesisFails).with_note(format!(
            "min eig of Ric_N,f is {min_eig:.6}, need {required:.6} with gamma > 0"
        )));
    }
    let factor = if n_param.is_infinite() {
        1.0
    } else {
        n_param / (n_param - 1.0)
    };
    let left = s.lambda_exact(p)?;
    let right = c * gamma * factor;
    let tol = s.tolerance(left.abs().max(right.abs()));
    Ok(
        InequalityReport::lower("gallot_meyer_f", inputs, left, right, tol)
            .with_note(format!("gamma = {gamma:.6}")),
    )
}

/// If 𝔅^{[p]} > ½Δf + ¼|df|² everywhere then the p-th f-Betti number vanishes.
pub fn vanishing_check(s: &Setting, p: usize) -> Result<InequalityReport> {
    if p > DIM {
        return Err(Error::DegreeExceedsDimension {
            degree: p,
            dim: DIM,
        });
    }
    if !s.is_closed() {
        return Err(Error::InvalidArgument(
            "the vanishing criterion needs a closed surface".into(),
        ));
    }
    let ric = s.ricci(p)?;
    let margin = (0..s.curvature.len())
        .map(|v| {
            ric.bochner[v].min_eigenvalue()
                - 0.5 * s.weight.laplacian[v]
                - 0.25 * s.weight.df_norm_sq[v]
        })
        .fold(f64::INFINITY, f64::min);
    let betti = f_betti(&s.pair(p)?, KERNEL_TOL)?;
    let inputs = super::ReportInputs {
        p: Some(p),
        ..s.inputs()
    };
    if margin > 0.0 {
        Ok(
            InequalityReport::upper("vanishing", inputs, betti as f64, 0.0, 0.0)
                .with_note(format!("criterion margin {margin:.6}")),
        )
    } else {
        let r = InequalityReport::lower("vanishing", inputs, margin, 0.0, 0.0);
        Ok(r.with_status(Status::HypothesisFails)
            .with_note(format!("criterion fails; b_{p} = {betti}")))
    }
}
