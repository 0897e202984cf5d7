//! Evaluators for the eigenvalue bounds. Every evaluator is pure and
//! returns an [`InequalityReport`] whose slack is oriented so that
//! slack ≥ 0 means the bound holds.

mod bounds;
mod jacobi;
mod recursion;
pub mod sampling;

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::dec::{assemble, dirichlet_restrict, DecOperators, OperatorPair};
use crate::error::{Error, Result};
use crate::extalg::{wedge_interior_endo, FormEndo};
use crate::geometry::{bochner_ext, estimate_curvature, sff_on_forms, CurvatureField, DIM};
use crate::mesh::{dual_volumes, DomainMesh, DualVolumes, Fixture, FixtureSpec, SurfaceMesh};
use crate::spectra::{self, classify, Method, SpectrumResult, CLASSIFY_TOL};
use crate::weights::{t_f_on_forms, CurvatureBounds, DistanceData, WeightField, WeightSpec};

pub use bounds::{gallot_meyer_f, thm11_gap, thm11_upper, vanishing_check};
pub use jacobi::{
    jacobi, ComparisonRow, JacobiOperator, JacobiOptions, JacobiOutcome, MINIMALITY_TOL,
};
pub use recursion::{
    cor13_recursion, cor14_bound, cor41_radial, distance_weight_bounds, yang_recursion,
};
pub use sampling::SampledForms;

/// Relative slack tolerance applied to the dominant side of an inequality.
pub const DEFAULT_REL_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The hypothesis of a conditional statement does not hold; no judgement.
    HypothesisFails,
    /// Evaluated although a precondition (e.g. f-minimality) is only approximate.
    Advisory,
}

/// Inputs echoed into each report.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ReportInputs {
    pub mesh: String,
    pub weight: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_param: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub theorem: String,
    pub inputs: ReportInputs,
    pub left: f64,
    pub right: f64,
    pub slack: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl InequalityReport {
    /// Report for `left ≤ right`.
    pub fn upper(
        theorem: &str,
        inputs: ReportInputs,
        left: f64,
        right: f64,
        tolerance: f64,
    ) -> Self {
        Self::from_slack(theorem, inputs, left, right, right - left, tolerance)
    }

    /// Report for `left ≥ right`.
    pub fn lower(
        theorem: &str,
        inputs: ReportInputs,
        left: f64,
        right: f64,
        tolerance: f64,
    ) -> Self {
        Self::from_slack(theorem, inputs, left, right, left - right, tolerance)
    }

    fn from_slack(
        theorem: &str,
        inputs: ReportInputs,
        left: f64,
        right: f64,
        slack: f64,
        tolerance: f64,
    ) -> Self {
        let pass = slack >= -tolerance;
        InequalityReport {
            theorem: theorem.into(),
            inputs,
            left,
            right,
            slack,
            tolerance,
            pass,
            status: if pass { Status::Pass } else { Status::Fail },
            note: String::new(),
        }
    }

    pub fn with_status(mut self, status: Status) -> Self {
        self.status = status;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Only a definite failure counts against a run.
    pub fn is_failure(&self) -> bool {
        self.status == Status::Fail
    }
}

/// Evaluation knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub method: Method,
    pub rel_tol: f64,
    /// Use the first eigenvalue including zero for λ_{1,p−1} in the gap bound.
    pub include_zero: bool,
    /// Start-vector seed for the sparse eigensolver.
    pub seed: u64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            method: Method::Lanczos,
            rel_tol: DEFAULT_REL_TOL,
            include_zero: false,
            seed: spectra::DEFAULT_SEED,
        }
    }
}

/// Per-vertex curvature endomorphisms on p-forms.
#[derive(Debug, Clone)]
pub struct PointwiseRicci {
    pub p: usize,
    /// 𝔅^{[p]} + T_f^{[p]}.
    pub ric_f: Vec<FormEndo>,
    /// (II^{[p]})².
    pub sff_sq: Vec<FormEndo>,
    pub bochner: Vec<FormEndo>,
    pub sff: Vec<FormEndo>,
}

impl PointwiseRicci {
    /// Ric^{(p)}_{N,f} = Ric_f^{(p)} − df∧(df⌟·)/(N − (n−p+1)); N = ∞ drops the term.
    pub fn ric_n(&self, w: &WeightField, n_param: f64) -> Result<Vec<FormEndo>> {
        if n_param.is_infinite() {
            return Ok(self.ric_f.clone());
        }
        let denom = n_param - (DIM - self.p + 1) as f64;
        self.ric_f
            .iter()
            .zip(&w.grad)
            .map(|(r, g)| Ok(r.sub(&wedge_interior_endo(g, self.p)?.scaled(1.0 / denom))))
            .collect()
    }
}

/// A surface or domain with its weight and everything derived from them.
#[derive(Debug)]
pub struct Setting {
    pub label: String,
    pub domain: DomainMesh,
    pub dv: DualVolumes,
    pub curvature: CurvatureField,
    pub weight: WeightField,
    pub weight_label: String,
    /// Base vertex and graph distances for distance weights.
    pub distance: Option<DistanceData>,
    /// Exact curvature range (l1, l2) when known.
    pub curvature_range: Option<(f64, f64)>,
    pub ops: DecOperators,
    pub options: EvalOptions,
    cache: Mutex<HashMap<usize, SpectrumResult>>,
}

impl Setting {
    pub fn new(
        label: impl Into<String>,
        domain: DomainMesh,
        center: usize,
        spec: &WeightSpec,
        options: EvalOptions,
    ) -> Result<Self> {
        let m = domain.mesh();
        let dv = dual_volumes(m)?;
        let curvature = estimate_curvature(m, &dv)?;
        let (weight, distance) = spec.build(m, &dv, &curvature, center)?;
        let ops = assemble(m, &dv, &weight)?;
        Ok(Setting {
            label: label.into(),
            domain,
            dv,
            curvature,
            weight,
            weight_label: spec.label(),
            distance,
            curvature_range: None,
            ops,
            options,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_fixture(fx: &Fixture, spec: &WeightSpec, options: EvalOptions) -> Result<Self> {
        let mut s = Setting::new(fx.spec.label(), fx.domain.clone(), fx.center, spec, options)?;
        s.curvature_range = Some(fx.spec.curvature_range());
        Ok(s)
    }

    pub fn from_spec(
        spec: &FixtureSpec,
        weight: &WeightSpec,
        options: EvalOptions,
    ) -> Result<Self> {
        Setting::from_fixture(&spec.build()?, weight, options)
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        self.domain.mesh()
    }

    pub fn is_closed(&self) -> bool {
        self.domain.is_whole() && self.mesh().is_closed()
    }

    pub fn inputs(&self) -> ReportInputs {
        ReportInputs {
            mesh: self.label.clone(),
            weight: self.weight_label.clone(),
            ..Default::default()
        }
    }

    /// The drift pair on p-forms, Dirichlet-restricted on proper domains.
    pub fn pair(&self, p: usize) -> Result<OperatorPair> {
        dirichlet_restrict(&self.ops, &self.domain, p)
    }

    /// The k smallest eigenpairs on p-forms, classified.
    pub fn spectrum(&self, p: usize, k: usize) -> Result<SpectrumResult> {
        if let Some(r) = self.cache.lock().expect("cache lock").get(&p) {
            if r.eigenvalues.len() >= k {
                return Ok(truncate(r, k));
            }
        }
        let pair = self.pair(p)?;
        let r = classify(
            spectra::solve_seeded(&pair, k, self.options.method, self.options.seed)?,
            &pair,
            CLASSIFY_TOL,
        );
        self.cache.lock().expect("cache lock").insert(p, r.clone());
        Ok(r)
    }

    /// λ'_{1,p,f}, the first positive eigenvalue on exact p-forms.
    pub fn lambda_exact(&self, p: usize) -> Result<f64> {
        let dom = (!self.domain.is_whole()).then_some(&self.domain);
        spectra::first_exact_eigenvalue(self.ops.weighted(), dom, p, self.options.method)
    }

    /// First positive eigenvalue on all p-forms. On closed surfaces the
    /// nonzero spectrum splits into exact and co-exact parts, each equal to
    /// an exact spectrum in degree p or p+1.
    pub fn lambda_first(&self, p: usize) -> Result<f64> {
        if self.is_closed() {
            let mut best = f64::INFINITY;
            for q in [p, p + 1] {
                if (1..=DIM).contains(&q) {
                    best = best.min(self.lambda_exact(q)?);
                }
            }
            Ok(best)
        } else {
            spectra::first_positive(&self.pair(p)?, self.options.method)
        }
    }

    /// Smallest eigenvalue on p-forms, zero included.
    pub fn lambda_min(&self, p: usize) -> Result<f64> {
        Ok(self.spectrum(p, 1)?.eigenvalues[0])
    }

    /// Vertex quadrature weights dual-area · e^{−f}.
    pub fn quadrature(&self) -> Vec<f64> {
        self.dv
            .vertex_area
            .iter()
            .zip(self.weight.f())
            .map(|(a, f)| a * (-f).exp())
            .collect()
    }

    /// Vol_f-average of a vertex field over the whole mesh.
    pub fn average(&self, g: &[f64]) -> f64 {
        let q = self.quadrature();
        q.iter().zip(g).map(|(w, x)| w * x).sum::<f64>() / q.iter().sum::<f64>()
    }

    pub fn ricci(&self, p: usize) -> Result<PointwiseRicci> {
        let bochner = bochner_ext(&self.curvature, p)?;
        let t = t_f_on_forms(self.mesh(), &self.curvature, &self.weight, p)?;
        let sff = sff_on_forms(&self.curvature, p)?;
        let ric_f = bochner.iter().zip(&t).map(|(b, t)| b.add(t)).collect();
        let sff_sq = sff.iter().map(FormEndo::square).collect();
        Ok(PointwiseRicci {
            p,
            ric_f,
            sff_sq,
            bochner,
            sff,
        })
    }

    /// Eigenforms 1..=count sampled at vertices.
    pub fn sampled(&self, p: usize, count: usize) -> Result<(SpectrumResult, SampledForms)> {
        let res = self.spectrum(p, count)?;
        let pair = self.pair(p)?;
        let s = sampling::sample_forms(
            self.mesh(),
            &self.curvature,
            &self.quadrature(),
            p,
            &pair.index,
            &res.eigenvectors,
        );
        Ok((res, s))
    }

    pub fn tolerance(&self, magnitude: f64) -> f64 {
        self.options.rel_tol * magnitude.abs()
    }

    /// Bounds for distance corollaries: explicit ones win over the fixture range.
    pub fn resolve_bounds(
        &self,
        explicit: Option<CurvatureBounds>,
        sectional: bool,
    ) -> Result<CurvatureBounds> {
        explicit
            .or_else(|| {
                self.curvature_range.map(|(l1, l2)| {
                    if sectional {
                        CurvatureBounds::Sectional(l1, l2)
                    } else {
                        CurvatureBounds::Ricci(l1)
                    }
                })
            })
            .ok_or_else(|| {
                Error::InvalidArgument("missing curvature bounds for the distance weight".into())
            })
    }
}

fn truncate(r: &SpectrumResult, k: usize) -> SpectrumResult {
    let mut out = r.clone();
    out.eigenvalues.truncate(k);
    out.eigenvectors.truncate(k);
    out.tags.truncate(k);
    out.d_norm.truncate(k);
    out.delta_norm.truncate(k);
    out.meta.residuals.truncate(k);
    out.kernel_dim = out.kernel_dim.min(k);
    out
}

/// Universal constant of the recursion formula: 4/n for α ≤ 2, 2α/n above.
pub fn recursion_constant(alpha: f64) -> f64 {
    let n = DIM as f64;
    if alpha <= 2.0 {
        4.0 / n
    } else {
        2.0 * alpha / n
    }
}

/// Both sides of Σ(λ_{k+1}−λ_i)^α ≤ C Σ(λ_{k+1}−λ_i)^{α−1} B_i for given brackets B_i.
pub fn recursion_sides(lambdas: &[f64], k: usize, alpha: f64, brackets: &[f64]) -> (f64, f64) {
    let top = lambdas[k];
    let mut left = 0.0;
    let mut right = 0.0;
    for i in 0..k {
        let gap = (top - lambdas[i]).max(0.0);
        if gap == 0.0 && alpha < 1.0 {
            continue;
        }
        left += gap.powf(alpha);
        right += gap.powf(alpha - 1.0) * brackets[i];
    }
    (left, recursion_constant(alpha) * right)
}
