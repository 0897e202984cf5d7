use super::{recursion_sides, InequalityReport, ReportInputs, SampledForms, Setting};
use crate::error::{Error, Result};
use crate::extalg::PForm;
use crate::geometry::DIM;
use crate::mesh::dot;
use crate::spectra::SpectrumResult;
use crate::weights::{ComparisonData, CurvatureBounds, WeightKind};

use super::bounds::upper_integrand;

struct Eigen {
    res: SpectrumResult,
    forms: SampledForms,
}

fn eigen(s: &Setting, p: usize, k: usize, alpha: f64) -> Result<Eigen> {
    if k == 0 {
        return Err(Error::InvalidArgument("recursion needs k >= 1".into()));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    if p > DIM {
        return Err(Error::DegreeExceedsDimension {
            degree: p,
            dim: DIM,
        });
    }
    let (res, forms) = s.sampled(p, k + 1)?;
    Ok(Eigen { res, forms })
}

fn inputs(s: &Setting, p: usize, k: usize, alpha: Option<f64>) -> ReportInputs {
    ReportInputs {
        p: Some(p),
        k: Some(k),
        alpha,
        ..s.inputs()
    }
}

fn report(
    theorem: &str,
    s: &Setting,
    e: &Eigen,
    p: usize,
    k: usize,
    alpha: f64,
    brackets: &[f64],
) -> InequalityReport {
    let (left, right) = recursion_sides(&e.res.eigenvalues, k, alpha, brackets);
    let tol = s.tolerance(left.abs().max(right.abs()));
    InequalityReport::upper(theorem, inputs(s, p, k, Some(alpha)), left, right, tol)
}

/// δ₁ = inf min-eig(𝔅 + T_f) and δ₂ = sup(n²H² − 2Δf − |df|²) over the support.
fn deltas(s: &Setting, p: usize, support: &[usize]) -> Result<(f64, f64)> {
    let ric = s.ricci(p)?;
    let n = DIM as f64;
    let d1 = support
        .iter()
        .map(|&v| ric.ric_f[v].min_eigenvalue())
        .fold(f64::INFINITY, f64::min);
    let d2 = support
        .iter()
        .map(|&v| {
            let h = s.curvature.mean[v];
            n * n * h * h - 2.0 * s.weight.laplacian[v] - s.weight.df_norm_sq[v]
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((d1, d2))
}

/// Recursion formula with the eigenform integrals evaluated directly.
pub fn yang_recursion(s: &Setting, p: usize, k: usize, alpha: f64) -> Result<InequalityReport> {
    let e = eigen(s, p, k, alpha)?;
    let ric = s.ricci(p)?;
    let n = DIM as f64;
    let (c, w) = (&s.curvature, &s.weight);
    let curv = e
        .forms
        .integrate(|v, om| ric.ric_f[v].quadratic(om.coeffs()));
    let rest = e.forms.integrate(|v, om| {
        let h = c.mean[v];
        (0.25 * n * n * h * h - 0.25 * (2.0 * w.laplacian[v] + w.df_norm_sq[v])) * om.norm_sq()
    });
    let brackets: Vec<f64> = (0..k)
        .map(|i| e.res.eigenvalues[i] - curv[i] + rest[i])
        .collect();
    Ok(report("thm1.2", s, &e, p, k, alpha, &brackets))
}

/// Recursion formula with extremal constants δ₁, δ₂ in place of the integrals.
pub fn cor13_recursion(s: &Setting, p: usize, k: usize, alpha: f64) -> Result<InequalityReport> {
    let e = eigen(s, p, k, alpha)?;
    let (d1, d2) = deltas(s, p, &e.forms.support)?;
    let brackets: Vec<f64> = (0..k)
        .map(|i| e.res.eigenvalues[i] - d1 + 0.25 * d2)
        .collect();
    Ok(report("cor1.3", s, &e, p, k, alpha, &brackets)
        .with_note(format!("delta1 = {d1:.6}, delta2 = {d2:.6}")))
}

/// λ_{k+1} ≤ (δ₁ − δ₂/4)(1 − (1+4/n)k^{2/n}) + (1+4/n)k^{2/n}·avg, where avg is
/// the Vol_f-average of the upper-bound integrand over the whole surface.
pub fn cor14_bound(s: &Setting, p: usize, k: usize) -> Result<InequalityReport> {
    let e = eigen(s, p, k, 2.0)?;
    let (d1, d2) = deltas(s, p, &e.forms.support)?;
    let n = DIM as f64;
    let c = (1.0 + 4.0 / n) * (k as f64).powf(2.0 / n);
    let avg = s.average(&upper_integrand(s, p));
    let left = e.res.eigenvalues[k];
    let right = (d1 - 0.25 * d2) * (1.0 - c) + c * avg;
    let tol = s.tolerance(left.abs().max(right.abs()));
    let mut note = format!("delta1 = {d1:.6}, delta2 = {d2:.6}, average = {avg:.6}");
    if !s.mesh().is_closed() {
        note.push_str("; average taken over a surface with boundary");
    }
    Ok(InequalityReport::upper("cor1.4", inputs(s, p, k, None), left, right, tol).with_note(note))
}

/// Recursion formula for f = a|X|²/2 with the closed-form curvature terms.
pub fn cor41_radial(s: &Setting, p: usize, k: usize, alpha: f64) -> Result<InequalityReport> {
    let WeightKind::Radial { a } = s.weight.kind else {
        return Err(Error::InvalidArgument(
            "cor4.1 needs a radial weight".into(),
        ));
    };
    let e = eigen(s, p, k, alpha)?;
    let ric = s.ricci(p)?;
    let (n, pf) = (DIM as f64, p as f64);
    let m = s.mesh();
    let c = &s.curvature;
    let terms = e.forms.integrate(|v, om: &PForm| {
        let x = m.vertex(v);
        let z = a * dot(x, c.normal(v)) - n * c.mean[v];
        let w = om.coeffs();
        let s_om = ric.sff[v].apply(om);
        z * ric.sff[v].quadratic(w) + s_om.norm_sq() - 0.25 * a * a * dot(x, x) * om.norm_sq()
            + 0.25 * z * z * om.norm_sq()
    });
    let brackets: Vec<f64> = (0..k)
        .map(|i| e.res.eigenvalues[i] + terms[i] - a * pf + 0.5 * n * a)
        .collect();
    Ok(report("cor4.1", s, &e, p, k, alpha, &brackets))
}

/// Recursion formula for f = a·d²/2 with δ₂ from the comparison function,
/// under a Ricci lower bound or two-sided sectional bounds.
pub fn distance_weight_bounds(
    s: &Setting,
    p: usize,
    k: usize,
    alpha: f64,
    bounds: CurvatureBounds,
) -> Result<InequalityReport> {
    let WeightKind::Distance { a, .. } = s.weight.kind else {
        return Err(Error::InvalidArgument(
            "distance corollaries need a distance weight".into(),
        ));
    };
    let (x0, dist) = s
        .distance
        .clone()
        .ok_or_else(|| Error::InvalidArgument("distance data missing".into()))?;
    let cd = ComparisonData::new(s.mesh(), x0, dist, bounds);
    let e = eigen(s, p, k, alpha)?;
    if let Some(&v) = e.forms.support.iter().find(|&&v| cd.flagged[v]) {
        return Err(Error::InvalidArgument(format!(
            "domain reaches the cut locus of vertex {x0} at vertex {v}"
        )));
    }
    let (n, pf) = (DIM as f64, p as f64);
    let c = &s.curvature;
    let common = |v: usize| {
        let (h, d) = (c.mean[v], cd.distance[v]);
        n * n * h * h + 2.0 * a * (1.0 + cd.d_h_lower[v]) - a * a * d * d
    };
    let sup = |g: &dyn Fn(usize) -> f64| {
        e.forms
            .support
            .iter()
            .map(|&v| g(v))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    match bounds {
        CurvatureBounds::Ricci(_) => {
            let (d1, _) = deltas(s, p, &e.forms.support)?;
            let d2 = sup(&common);
            let brackets: Vec<f64> = (0..k)
                .map(|i| e.res.eigenvalues[i] - d1 + 0.25 * d2)
                .collect();
            Ok(report("cor_distance_ricci", s, &e, p, k, alpha, &brackets)
                .with_note(format!("delta1 = {d1:.6}, delta2 = {d2:.6}")))
        }
        CurvatureBounds::Sectional(_, l2) => {
            let upper = cd
                .d_h_upper
                .as_ref()
                .expect("sectional bounds carry the upper comparison");
            let d2 = if l2 <= 0.0 {
                sup(&|v| common(v) - 4.0 * a * ((pf - 1.0) * upper[v] / (n - 1.0) + 1.0))
            } else {
                sup(&|v| common(v) - 4.0 * a * pf * upper[v] / (n - 1.0))
            };
            let ric = s.ricci(p)?;
            let terms = e.forms.integrate(|v, om| {
                -n * c.mean[v] * ric.sff[v].quadratic(om.coeffs()) + ric.sff[v].apply(om).norm_sq()
            });
            let brackets: Vec<f64> = (0..k)
                .map(|i| e.res.eigenvalues[i] + terms[i] + 0.25 * d2)
                .collect();
            Ok(
                report("cor_distance_sectional", s, &e, p, k, alpha, &brackets)
                    .with_note(format!("delta2 = {d2:.6}")),
            )
        }
    }
}
