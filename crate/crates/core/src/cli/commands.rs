use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::config::{MeshSource, RunConfig, WeightSource};
use super::output::{coo_diag, coo_text, sig, OutDir};
use crate::error::{Error, Result};
use crate::geometry::DIM;
use crate::inequalities::{
    cor13_recursion, cor14_bound, cor41_radial, distance_weight_bounds, gallot_meyer_f, jacobi,
    thm11_gap, thm11_upper, vanishing_check, yang_recursion, EvalOptions, InequalityReport,
    JacobiOptions, JacobiOutcome, Setting,
};
use crate::mesh::{load_mesh, DomainMesh};
use crate::spectra::{fmt_num, write_eigenvectors_csv, write_spectrum_csv, SolverMeta};
use crate::weights::{read_weight_csv, CurvatureBounds, WeightKind, WeightSpec};

pub const THEOREMS: &[&str] = &[
    "thm1.1_gap",
    "thm1.1_upper",
    "gallot_meyer_f",
    "vanishing",
    "thm1.2",
    "cor1.3",
    "cor1.4",
    "cor4.1",
    "cor_distance_ricci",
    "cor_distance_sectional",
];

/// Files written and the number of definite failures.
#[derive(Debug, Default)]
pub struct Outcome {
    pub failures: usize,
    pub lines: Vec<String>,
}

pub fn build_setting(cfg: &RunConfig) -> Result<Setting> {
    let options = EvalOptions {
        method: cfg.method,
        rel_tol: cfg.tolerance,
        include_zero: cfg.include_zero,
        seed: cfg.seed,
    };
    let source = cfg
        .mesh
        .as_ref()
        .ok_or_else(|| Error::Config("no mesh: give --fixture or --mesh".into()))?;
    let (label, domain, center, range) = match source {
        MeshSource::Fixture(spec) => {
            let fx = spec.build()?;
            (
                spec.label(),
                fx.domain,
                fx.center,
                Some(spec.curvature_range()),
            )
        }
        MeshSource::File(path) => (
            source.label(),
            DomainMesh::whole(load_mesh(path, None)?),
            0,
            None,
        ),
    };
    let weight = match &cfg.weight {
        WeightSource::Spec(w) => w.clone(),
        WeightSource::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            WeightSpec::Custom(read_weight_csv(&text, domain.mesh().num_vertices())?)
        }
    };
    let mut s = Setting::new(label, domain, center, &weight, options)?;
    s.weight_label = cfg.weight.label();
    s.curvature_range = range;
    Ok(s)
}

fn check_degrees(ps: &[usize]) -> Result<()> {
    match ps.iter().find(|&&p| p > DIM) {
        Some(&p) => Err(Error::DegreeExceedsDimension {
            degree: p,
            dim: DIM,
        }),
        None if ps.is_empty() => Err(Error::Config("empty degree list".into())),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct MeshMeta {
    label: String,
    vertices: usize,
    edges: usize,
    faces: usize,
    euler_characteristic: i64,
    closed: bool,
    unknowns: [usize; 3],
    mean_edge_length: f64,
}

#[derive(Serialize)]
struct DegreeMeta {
    p: usize,
    dim: usize,
    k: usize,
    kernel_dim: usize,
    kernel_threshold: f64,
    kernel_ratio: f64,
    scale: f64,
    max_residual: f64,
    solver: SolverMeta,
}

#[derive(Serialize)]
struct SpectrumMeta {
    mesh: MeshMeta,
    weight: String,
    seed: u64,
    degrees: Vec<DegreeMeta>,
}

fn mesh_meta(s: &Setting) -> MeshMeta {
    let m = s.mesh();
    let unknowns = [0, 1, 2].map(|p| {
        if s.domain.is_whole() {
            m.count(p)
        } else {
            s.domain.interior(p).len()
        }
    });
    MeshMeta {
        label: s.label.clone(),
        vertices: m.num_vertices(),
        edges: m.num_edges(),
        faces: m.num_faces(),
        euler_characteristic: m.euler_characteristic(),
        closed: s.is_closed(),
        unknowns,
        mean_edge_length: m.mean_edge_length(),
    }
}

/// Spectra per degree, metadata and optional eigenvectors and operator dumps.
pub fn cmd_spectrum(cfg: &RunConfig, eigenvectors: bool, dump_ops: bool) -> Result<Outcome> {
    let degrees = cfg.degrees.clone().unwrap_or_else(|| vec![0, 1, 2]);
    check_degrees(&degrees)?;
    let k = cfg.k.unwrap_or(10);
    let s = build_setting(cfg)?;
    let mut out = OutDir::create(&cfg.out)?;
    let mut outcome = Outcome::default();
    let mut metas = Vec::new();
    for &p in &degrees {
        let pair = s.pair(p)?;
        let res = s.spectrum(p, k.min(pair.dim()))?;
        let mut csv = Vec::new();
        write_spectrum_csv(&res, &mut csv)?;
        out.write(&format!("spectrum_p{p}.csv"), &csv)?;
        if eigenvectors {
            let mut csv = Vec::new();
            write_eigenvectors_csv(&res, &pair.index, &mut csv)?;
            out.write(&format!("eigenvectors_p{p}.csv"), &csv)?;
        }
        if dump_ops {
            out.write(
                &format!("stiffness_p{p}.coo"),
                coo_text(&pair.stiffness).as_bytes(),
            )?;
            out.write(&format!("mass_p{p}.coo"), coo_diag(&pair.mass).as_bytes())?;
        }
        let shown: Vec<String> = res.eigenvalues.iter().take(6).map(|&x| sig(x)).collect();
        outcome.lines.push(format!(
            "p={p}: kernel {} | {}",
            res.kernel_dim,
            shown.join(" ")
        ));
        metas.push(DegreeMeta {
            p,
            dim: pair.dim(),
            k: res.eigenvalues.len(),
            kernel_dim: res.kernel_dim,
            kernel_threshold: res.kernel_threshold,
            kernel_ratio: res.kernel_ratio,
            scale: res.scale,
            max_residual: res.meta.residuals.iter().fold(0.0, |a: f64, &b| a.max(b)),
            solver: res.meta.clone(),
        });
    }
    if dump_ops {
        for p in 0..DIM {
            out.write(&format!("d{p}.coo"), coo_text(s.ops.d(p)).as_bytes())?;
        }
        for p in 0..=DIM {
            out.write(
                &format!("star{p}.coo"),
                coo_diag(s.ops.star_f(p)).as_bytes(),
            )?;
        }
    }
    let meta = SpectrumMeta {
        mesh: mesh_meta(&s),
        weight: s.weight_label.clone(),
        seed: cfg.seed,
        degrees: metas,
    };
    out.json("meta.json", &meta)?;
    Ok(outcome)
}

#[derive(Debug, Clone, Copy)]
enum Job {
    Gap(usize),
    Upper(usize),
    GallotMeyer(usize),
    Vanishing(usize),
    Yang(usize, usize, f64),
    Cor13(usize, usize, f64),
    Cor14(usize, usize),
    Cor41(usize, usize, f64),
    Distance(usize, usize, f64, CurvatureBounds),
}

fn ricci_bounds(cfg: &RunConfig, s: &Setting) -> Result<CurvatureBounds> {
    match cfg.bounds {
        Some(CurvatureBounds::Sectional(l1, _)) => Ok(CurvatureBounds::Ricci(l1)),
        explicit => s.resolve_bounds(explicit, false),
    }
}

fn sectional_bounds(cfg: &RunConfig, s: &Setting) -> Result<CurvatureBounds> {
    match cfg.bounds {
        Some(CurvatureBounds::Ricci(_)) => Err(Error::InvalidArgument(
            "sectional corollary needs sectional bounds".into(),
        )),
        explicit => s.resolve_bounds(explicit, true),
    }
}

fn plan(cfg: &RunConfig, s: &Setting, degrees: &[usize], k_max: usize) -> Result<Vec<Job>> {
    for t in &cfg.theorems {
        if !THEOREMS.contains(&t.as_str()) {
            return Err(Error::InvalidArgument(format!(
                "unknown theorem '{t}' (known: {})",
                THEOREMS.join(", ")
            )));
        }
    }
    let explicit = !cfg.theorems.is_empty();
    let want = |t: &str| !explicit || cfg.theorems.iter().any(|x| x == t);
    let closed = s.is_closed();
    let radial = matches!(s.weight.kind, WeightKind::Radial { .. });
    let distance = matches!(s.weight.kind, WeightKind::Distance { .. });
    // implicit runs skip statements whose setting does not apply; explicit ones report the error
    let applies = |t: &str, ok: bool| want(t) && (ok || explicit);
    let mut jobs = Vec::new();
    for &p in degrees {
        if p >= 1 {
            if applies("thm1.1_gap", true) {
                jobs.push(Job::Gap(p));
            }
            if applies("thm1.1_upper", closed) {
                jobs.push(Job::Upper(p));
            }
            if applies("gallot_meyer_f", closed) {
                jobs.push(Job::GallotMeyer(p));
            }
            if applies("vanishing", closed) {
                jobs.push(Job::Vanishing(p));
            }
        }
        for k in 1..=k_max {
            for &alpha in &cfg.alphas {
                if applies("thm1.2", true) {
                    jobs.push(Job::Yang(p, k, alpha));
                }
                if applies("cor1.3", true) {
                    jobs.push(Job::Cor13(p, k, alpha));
                }
                if applies("cor4.1", radial) {
                    jobs.push(Job::Cor41(p, k, alpha));
                }
                // whole surfaces reach the cut locus of any base point
                if applies("cor_distance_ricci", distance && !s.domain.is_whole()) {
                    jobs.push(Job::Distance(p, k, alpha, ricci_bounds(cfg, s)?));
                }
                let sectional_ok = !matches!(cfg.bounds, Some(CurvatureBounds::Ricci(_)));
                if applies(
                    "cor_distance_sectional",
                    distance && !s.domain.is_whole() && sectional_ok,
                ) {
                    jobs.push(Job::Distance(p, k, alpha, sectional_bounds(cfg, s)?));
                }
            }
            if applies("cor1.4", true) {
                jobs.push(Job::Cor14(p, k));
            }
        }
    }
    Ok(jobs)
}

fn run_job(cfg: &RunConfig, s: &Setting, job: Job) -> Result<InequalityReport> {
    match job {
        Job::Gap(p) => thm11_gap(s, p),
        Job::Upper(p) => thm11_upper(s, p),
        Job::GallotMeyer(p) => gallot_meyer_f(s, p, cfg.n_param, cfg.gamma),
        Job::Vanishing(p) => vanishing_check(s, p),
        Job::Yang(p, k, a) => yang_recursion(s, p, k, a),
        Job::Cor13(p, k, a) => cor13_recursion(s, p, k, a),
        Job::Cor14(p, k) => cor14_bound(s, p, k),
        Job::Cor41(p, k, a) => cor41_radial(s, p, k, a),
        Job::Distance(p, k, a, b) => distance_weight_bounds(s, p, k, a, b),
    }
}

/// Evaluates the configured theorem grid on one setting.
pub fn verify_reports(cfg: &RunConfig, s: &Setting) -> Result<Vec<InequalityReport>> {
    let degrees = cfg.degrees.clone().unwrap_or_else(|| vec![0, 1, 2]);
    check_degrees(&degrees)?;
    let k_max = cfg.k.unwrap_or(5);
    let jobs = plan(cfg, s, &degrees, k_max)?;
    // fill the spectrum cache up front so that parallel jobs read identical data
    let warm: BTreeSet<usize> = degrees
        .iter()
        .flat_map(|&p| [p.saturating_sub(1), p])
        .collect();
    for p in warm {
        let dim = s.pair(p)?.dim();
        s.spectrum(p, (k_max + 1).min(dim))?;
    }
    jobs.par_iter().map(|&j| run_job(cfg, s, j)).collect()
}

fn report_line(r: &InequalityReport) -> String {
    let mut tags = Vec::new();
    if let Some(p) = r.inputs.p {
        tags.push(format!("p={p}"));
    }
    if let Some(k) = r.inputs.k {
        tags.push(format!("k={k}"));
    }
    if let Some(a) = r.inputs.alpha {
        tags.push(format!("alpha={a}"));
    }
    if let Some(l) = r.inputs.l {
        tags.push(format!("l={l}"));
    }
    let status = serde_json::to_value(r.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    format!(
        "{status:<16} {:<24} {:<22} left {} right {} slack {}",
        r.theorem,
        tags.join(" "),
        sig(r.left),
        sig(r.right),
        sig(r.slack)
    )
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome> {
    let s = build_setting(cfg)?;
    let reports = verify_reports(cfg, &s)?;
    let mut out = OutDir::create(&cfg.out)?;
    out.json("verify.json", &reports)?;
    let failures = reports.iter().filter(|r| r.is_failure()).count();
    let mut lines: Vec<String> = reports.iter().map(report_line).collect();
    lines.push(format!("{} reports, {failures} failed", reports.len()));
    Ok(Outcome { failures, lines })
}

#[derive(Serialize)]
struct JacobiFile<'a> {
    mesh: &'a str,
    weight: &'a str,
    index: usize,
    results: &'a [JacobiOutcome],
}

pub fn cmd_jacobi(cfg: &RunConfig) -> Result<Outcome> {
    let degrees = cfg.degrees.clone().unwrap_or_else(|| vec![1]);
    check_degrees(&degrees)?;
    let s = build_setting(cfg)?;
    let opts = JacobiOptions {
        a: cfg.hessian_bound,
        levels: cfg.levels,
        ..JacobiOptions::default()
    };
    let results = degrees
        .iter()
        .map(|&p| jacobi(&s, p, &opts))
        .collect::<Result<Vec<_>>>()?;
    let index = results[0].index;
    let mut out = OutDir::create(&cfg.out)?;
    out.json(
        "jacobi.json",
        &JacobiFile {
            mesh: &s.label,
            weight: &s.weight_label,
            index,
            results: &results,
        },
    )?;
    let mut outcome = Outcome::default();
    outcome.lines.push(format!("index: {index}"));
    for j in &results {
        outcome.lines.push(format!(
            "p={}: sup|H_f| {} ({}), eigenvalues near -1: {}, beta {}, b_p {}",
            j.p,
            sig(j.minimality_residual),
            if j.f_minimal {
                "f-minimal"
            } else {
                "not f-minimal"
            },
            j.minus_one_count,
            j.beta,
            j.betti
        ));
        outcome.lines.extend(j.reports.iter().map(report_line));
        outcome.failures += j.reports.iter().filter(|r| r.is_failure()).count();
    }
    Ok(outcome)
}

fn read_json(path: &std::path::Path) -> Result<Option<Value>> {
    match fs::read_to_string(path) {
        Ok(t) => serde_json::from_str(&t)
            .map(Some)
            .map_err(|e| Error::Parse {
                line: e.line(),
                message: format!("{}: {e}", path.display()),
            }),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::Io(format!("{}: {e}", path.display()))),
    }
}

fn num(v: &Value) -> String {
    v.as_f64().map_or_else(|| v.to_string(), sig)
}

fn summarize_reports(text: &mut String, dat: &mut String, reports: &[Value], offset: usize) {
    for (i, r) in reports.iter().enumerate() {
        let inputs = &r["inputs"];
        let field = |k: &str| {
            if inputs[k].is_null() {
                "-".to_string()
            } else {
                num(&inputs[k])
            }
        };
        let _ = writeln!(
            text,
            "  {:<16} {:<24} p={} k={} alpha={} l={}  slack {} (tol {})",
            r["status"].as_str().unwrap_or("?"),
            r["theorem"].as_str().unwrap_or("?"),
            field("p"),
            field("k"),
            field("alpha"),
            field("l"),
            num(&r["slack"]),
            num(&r["tolerance"])
        );
        let _ = writeln!(
            dat,
            "{} {} {} {} {} {} {} {}",
            offset + i,
            r["theorem"].as_str().unwrap_or("?"),
            field("p"),
            field("k"),
            field("alpha"),
            num(&r["slack"]),
            num(&r["tolerance"]),
            u8::from(r["pass"].as_bool().unwrap_or(false))
        );
    }
}

fn refinement(cfg: &RunConfig, out: &mut OutDir, text: &mut String) -> Result<()> {
    let Some(MeshSource::Fixture(spec)) = &cfg.mesh else {
        return Err(Error::Config("refinement curves need a fixture".into()));
    };
    // key (theorem, p, k, alpha) → rows (level, h, slack)
    let mut series: Vec<(String, Vec<String>)> = Vec::new();
    for &level in &cfg.refine {
        let mut c = cfg.clone();
        c.mesh = Some(MeshSource::Fixture(spec.with_level(level)?));
        let s = build_setting(&c)?;
        let h = s.mesh().mean_edge_length();
        for r in verify_reports(&c, &s)? {
            let key = format!(
                "{} p={} k={} alpha={}",
                r.theorem,
                r.inputs.p.map_or("-".into(), |p| p.to_string()),
                r.inputs.k.map_or("-".into(), |k| k.to_string()),
                r.inputs.alpha.map_or("-".into(), |a| a.to_string())
            );
            let row = format!("{level} {} {} {}", sig(h), sig(r.slack), sig(r.tolerance));
            match series.iter_mut().find(|(k, _)| *k == key) {
                Some((_, rows)) => rows.push(row),
                None => series.push((key, vec![row])),
            }
        }
    }
    let mut dat =
        String::from("# level mean_edge_length slack tolerance; one block per statement\n");
    let _ = writeln!(
        text,
        "\nrefinement over levels {:?}: {} series in refinement.dat",
        cfg.refine,
        series.len()
    );
    for (key, rows) in &series {
        let _ = writeln!(dat, "# {key}\n{}\n\n", rows.join("\n"));
        let _ = writeln!(
            text,
            "  {key}: {}",
            rows.iter()
                .map(|r| r.split(' ').nth(2).unwrap_or(""))
                .collect::<Vec<_>>()
                .join(" -> ")
        );
    }
    out.write("refinement.dat", dat.as_bytes())?;
    let gp = format!(
        "set logscale x\nset xlabel 'mean edge length'\nset ylabel 'slack'\nplot for [i=0:{}] 'refinement.dat' index i using 2:3 with linespoints title columnheader(1)\n",
        series.len().saturating_sub(1)
    );
    out.write("refinement.gp", gp.as_bytes())?;
    Ok(())
}

/// Summarizes whatever earlier commands left in the output directory.
pub fn cmd_report(cfg: &RunConfig, curvature: bool) -> Result<Outcome> {
    let root = cfg.out.clone();
    let verify = read_json(&root.join("verify.json"))?;
    let jac = read_json(&root.join("jacobi.json"))?;
    let meta = read_json(&root.join("meta.json"))?;
    let spectra: Vec<(usize, String)> = (0..=DIM)
        .filter_map(|p| {
            fs::read_to_string(root.join(format!("spectrum_p{p}.csv")))
                .ok()
                .map(|t| (p, t))
        })
        .collect();
    let nothing = verify.is_none() && jac.is_none() && meta.is_none() && spectra.is_empty();
    if nothing && !curvature && cfg.refine.is_empty() {
        return Err(Error::Io(format!(
            "nothing to report in {}",
            root.display()
        )));
    }
    let mut out = OutDir::create(&root)?;
    let mut text = String::new();
    let mut dat = String::from("# index theorem p k alpha slack tolerance pass\n");
    let mut failures = 0;
    if let Some(m) = &meta {
        let mesh = &m["mesh"];
        let _ = writeln!(
            text,
            "mesh {} (V={} E={} F={}, chi={}), weight {}",
            mesh["label"].as_str().unwrap_or("?"),
            mesh["vertices"],
            mesh["edges"],
            mesh["faces"],
            mesh["euler_characteristic"],
            m["weight"].as_str().unwrap_or("?")
        );
    }
    for (p, csv) in &spectra {
        let vals: Vec<&str> = csv
            .lines()
            .skip(1)
            .take(8)
            .filter_map(|l| l.split(',').nth(1))
            .collect();
        let shown: Vec<String> = vals
            .iter()
            .map(|v| v.parse::<f64>().map_or(v.to_string(), sig))
            .collect();
        let _ = writeln!(text, "spectrum p={p}: {}", shown.join(" "));
    }
    if let Some(Value::Array(reports)) = &verify {
        let fails = reports.iter().filter(|r| r["status"] == "fail").count();
        failures += fails;
        let _ = writeln!(text, "\nverify: {} reports, {fails} failed", reports.len());
        summarize_reports(&mut text, &mut dat, reports, 0);
    }
    if let Some(j) = &jac {
        let _ = writeln!(text, "\njacobi: index {}", j["index"]);
        if let Some(results) = j["results"].as_array() {
            for r in results {
                let _ = writeln!(
                    text,
                    "  p={} sup|H_f| {} eigenvalues near -1: {}",
                    r["p"],
                    num(&r["minimality_residual"]),
                    r["minus_one_count"]
                );
                if let Some(reports) = r["reports"].as_array() {
                    failures += reports.iter().filter(|x| x["status"] == "fail").count();
                    let offset = dat.lines().count() - 1;
                    summarize_reports(&mut text, &mut dat, reports, offset);
                }
            }
        }
    }
    if dat.lines().count() > 1 {
        out.write("slack.dat", dat.as_bytes())?;
    }
    if !cfg.refine.is_empty() {
        refinement(cfg, &mut out, &mut text)?;
    }
    if curvature {
        let s = build_setting(cfg)?;
        let c = &s.curvature;
        let mut csv = String::from("vertex,x,y,z,k1,k2,mean,gauss,mean_cotan\n");
        for v in 0..c.len() {
            let x = s.mesh().vertex(v);
            let row = [
                x[0],
                x[1],
                x[2],
                c.k1[v],
                c.k2[v],
                c.mean[v],
                c.gauss[v],
                c.mean_cotan[v],
            ];
            let _ = writeln!(csv, "{v},{}", row.map(fmt_num).join(","));
        }
        out.write("curvature.csv", csv.as_bytes())?;
        let _ = writeln!(
            text,
            "\ncurvature.csv: {} vertices, gamma_M {}",
            c.len(),
            sig(c.gamma_m)
        );
    }
    out.write("report.txt", text.as_bytes())?;
    Ok(Outcome {
        failures,
        lines: text.lines().map(str::to_string).collect(),
    })
}
