//! Run configuration: a plain `key = value` file overlaid by command-line flags.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::inequalities::DEFAULT_REL_TOL;
use crate::mesh::FixtureSpec;
use crate::spectra::{Method, DEFAULT_SEED};
use crate::weights::{CurvatureBounds, WeightSpec};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "DRIFT_HODGE_OUT";

const KEYS: &[&str] = &[
    "a",
    "alpha",
    "bounds",
    "fixture",
    "gamma",
    "include_zero",
    "k",
    "levels",
    "mesh",
    "method",
    "n",
    "out",
    "p",
    "refine",
    "seed",
    "theorems",
    "tolerance",
    "weight",
];

#[derive(Debug, Clone, PartialEq)]
pub enum MeshSource {
    Fixture(FixtureSpec),
    File(PathBuf),
}

impl MeshSource {
    pub fn label(&self) -> String {
        match self {
            MeshSource::Fixture(f) => f.label(),
            MeshSource::File(p) => p.display().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum WeightSource {
    Spec(WeightSpec),
    /// Per-vertex samples read from a CSV file once the mesh is known.
    File(PathBuf),
}

impl WeightSource {
    pub fn parse(s: &str) -> Result<Self> {
        match s.strip_prefix("file:") {
            Some(p) if !p.is_empty() => Ok(WeightSource::File(PathBuf::from(p))),
            Some(_) => Err(Error::InvalidArgument("empty weight file path".into())),
            None => Ok(WeightSource::Spec(WeightSpec::parse(s)?)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            WeightSource::Spec(w) => w.label(),
            WeightSource::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// Everything a run needs. Options left as None fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mesh: Option<MeshSource>,
    pub weight: WeightSource,
    pub degrees: Option<Vec<usize>>,
    pub k: Option<usize>,
    pub alphas: Vec<f64>,
    pub method: Method,
    pub seed: u64,
    pub tolerance: f64,
    pub out: PathBuf,
    /// Empty means every applicable theorem.
    pub theorems: Vec<String>,
    pub bounds: Option<CurvatureBounds>,
    /// N of the Bakry–Emery Ricci tensor; +∞ drops the df term.
    pub n_param: f64,
    pub gamma: Option<f64>,
    pub include_zero: bool,
    /// Lower bound of the ambient Hessian of f.
    pub hessian_bound: Option<f64>,
    pub levels: usize,
    /// Subdivision levels for refinement curves.
    pub refine: Vec<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mesh: None,
            weight: WeightSource::Spec(WeightSpec::Zero),
            degrees: None,
            k: None,
            alphas: vec![1.5, 2.0, 3.0],
            method: Method::Lanczos,
            seed: DEFAULT_SEED,
            tolerance: DEFAULT_REL_TOL,
            out: PathBuf::from("out"),
            theorems: Vec::new(),
            bounds: None,
            n_param: f64::INFINITY,
            gamma: None,
            include_zero: false,
            hessian_bound: None,
            levels: 3,
            refine: Vec::new(),
        }
    }
}

fn list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Config(format!("bad value '{t}' for '{key}'")))
        })
        .collect()
}

fn one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("bad value '{v}' for '{key}'")))
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Parses config text; later lines override earlier ones.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "fixture" => self.mesh = Some(MeshSource::Fixture(FixtureSpec::parse(value)?)),
            "mesh" => self.mesh = Some(MeshSource::File(PathBuf::from(value))),
            "weight" => self.weight = WeightSource::parse(value)?,
            "p" => self.degrees = Some(list(key, value)?),
            "k" => self.k = Some(one(key, value)?),
            "alpha" => self.alphas = list(key, value)?,
            "method" => self.method = value.parse()?,
            "seed" => self.seed = one(key, value)?,
            "tolerance" => self.tolerance = one(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "theorems" => self.theorems = list(key, value)?,
            "bounds" => self.bounds = Some(CurvatureBounds::parse(value)?),
            "n" => self.n_param = one(key, value)?,
            "gamma" => self.gamma = Some(one(key, value)?),
            "include_zero" => self.include_zero = one(key, value)?,
            "a" => self.hessian_bound = Some(one(key, value)?),
            "levels" => self.levels = one(key, value)?,
            "refine" => self.refine = list(key, value)?,
            _ => {
                return Err(Error::Config(format!(
                    "unknown key '{key}' (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return bad(format!("alpha values must be positive: {:?}", self.alphas));
        }
        if self.k == Some(0) {
            return bad("k must be at least 1".into());
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return bad(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            ));
        }
        if self.levels == 0 {
            return bad("levels must be at least 1".into());
        }
        if self.n_param.is_nan() {
            return bad("n must be a number or inf".into());
        }
        Ok(())
    }

    /// Every key in sorted order, one per line. Parsing the result gives back
    /// an equal config.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        if let Some(a) = self.hessian_bound {
            put("a", a.to_string());
        }
        put("alpha", join(&self.alphas));
        if let Some(b) = &self.bounds {
            put("bounds", b.label());
        }
        if let Some(MeshSource::Fixture(f)) = &self.mesh {
            put("fixture", f.label());
        }
        if let Some(g) = self.gamma {
            put("gamma", g.to_string());
        }
        put("include_zero", self.include_zero.to_string());
        if let Some(k) = self.k {
            put("k", k.to_string());
        }
        put("levels", self.levels.to_string());
        if let Some(MeshSource::File(p)) = &self.mesh {
            put("mesh", p.display().to_string());
        }
        put("method", format!("{:?}", self.method).to_lowercase());
        put("n", self.n_param.to_string());
        put("out", self.out.display().to_string());
        if let Some(p) = &self.degrees {
            put("p", join(p));
        }
        if !self.refine.is_empty() {
            put("refine", join(&self.refine));
        }
        put("seed", self.seed.to_string());
        if !self.theorems.is_empty() {
            put("theorems", self.theorems.join(","));
        }
        put("tolerance", self.tolerance.to_string());
        put("weight", self.weight.label());
        s
    }

    /// Output directory after the environment override.
    pub fn resolve_out(&mut self, flag: Option<&Path>) {
        if let Some(p) = flag {
            self.out = p.to_path_buf();
        } else if let Some(p) = std::env::var_os(OUT_DIR_ENV).filter(|p| !p.is_empty()) {
            self.out = PathBuf::from(p);
        }
    }
}
