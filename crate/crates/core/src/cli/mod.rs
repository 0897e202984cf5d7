//! Command-line driver: `spectrum`, `verify`, `jacobi` and `report`.
//!
//! Exit codes: 0 when nothing failed, 1 when some report failed, 2 for an
//! invalid configuration or argument, 3 for any other error. Errors are
//! written to stderr as one JSON record.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
pub use commands::{
    build_setting, cmd_jacobi, cmd_report, cmd_spectrum, cmd_verify, verify_reports, Outcome,
};
pub use config::{MeshSource, RunConfig, WeightSource, OUT_DIR_ENV};

#[derive(Debug, Parser)]
#[command(
    name = "drift-hodge",
    version,
    about = "Spectra of the drift Hodge Laplacian and eigenvalue-bound checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lowest eigenvalues per degree, written to spectrum_p{P}.csv and meta.json.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Also write eigenvectors_p{P}.csv.
        #[arg(long)]
        eigenvectors: bool,
        /// Write d_p, the weighted stars and each pair in coordinate format.
        #[arg(long)]
        dump_ops: bool,
    },
    /// Evaluate the eigenvalue bounds, written to verify.json.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Every applicable statement (the default when no --theorem is given).
        #[arg(long, conflicts_with = "theorem")]
        all: bool,
        /// Restrict to the named statements.
        #[arg(long, value_delimiter = ',')]
        theorem: Vec<String>,
        /// N of the Bakry–Emery Ricci tensor (number or inf).
        #[arg(long = "n-param")]
        n_param: Option<f64>,
        /// γ for the Gallot–Meyer bound; the best admissible value when omitted.
        #[arg(long)]
        gamma: Option<f64>,
        /// Bounds as `ricci:L` or `sectional:L1,L2`.
        #[arg(long)]
        bounds: Option<String>,
        /// Compare against the lowest eigenvalue in degree p−1 including zero.
        #[arg(long)]
        include_zero: bool,
    },
    /// Index of the weighted Jacobi operator and its bounds, written to jacobi.json.
    Jacobi {
        #[command(flatten)]
        common: Common,
        /// Lower bound a of the ambient Hessian of f.
        #[arg(long)]
        a: Option<f64>,
        /// Number of rows l in the comparison table.
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Summarize the output directory into report.txt and gnuplot data.
    Report {
        #[command(flatten)]
        common: Common,
        /// Subdivision levels for slack-versus-refinement curves.
        #[arg(long, value_delimiter = ',')]
        refine: Vec<usize>,
        /// Statements to follow under refinement (default: all applicable).
        #[arg(long, value_delimiter = ',')]
        theorem: Vec<String>,
        /// Write per-vertex curvature to curvature.csv.
        #[arg(long)]
        curvature: bool,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Key-value config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `sphere:R,L`, `torus:R,r,NU,NV`, `disk:R,L`, `cap:R,L,ANGLE` or `torus-patch:R,r,NU,NV,RHO`.
    #[arg(long, conflicts_with = "mesh")]
    pub fixture: Option<String>,
    /// OFF or OBJ file.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// `zero`, `radial:A`, `distance:A[@X0]`, `dist:X0,A` or `file:PATH`.
    #[arg(long)]
    pub weight: Option<String>,
    /// Degrees, comma separated.
    #[arg(short = 'p', long = "degree", value_delimiter = ',')]
    pub degrees: Vec<usize>,
    /// Eigenpairs per degree (spectrum) or largest k in the recursions (verify).
    #[arg(short = 'k')]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// `lanczos` or `dense`.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative slack tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Output directory (overrides the environment and the config file).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl Common {
    /// The config file, then the environment, then flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.resolve_out(self.out.as_deref());
        if let Some(f) = &self.fixture {
            cfg.set("fixture", f)?;
        }
        if let Some(m) = &self.mesh {
            cfg.mesh = Some(MeshSource::File(m.clone()));
        }
        if let Some(w) = &self.weight {
            cfg.set("weight", w)?;
        }
        if !self.degrees.is_empty() {
            cfg.degrees = Some(self.degrees.clone());
        }
        if let Some(k) = self.k {
            cfg.set("k", &k.to_string())?;
        }
        if !self.alpha.is_empty() {
            cfg.set("alpha", &join(&self.alpha))?;
        }
        if let Some(m) = &self.method {
            cfg.set("method", m)?;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.tolerance {
            cfg.set("tolerance", &t.to_string())?;
        }
        Ok(cfg)
    }
}

/// Runs a parsed command.
pub fn execute(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::Spectrum {
            common,
            eigenvectors,
            dump_ops,
        } => cmd_spectrum(&common.resolve()?, *eigenvectors, *dump_ops),
        Command::Verify {
            common,
            all,
            theorem,
            n_param,
            gamma,
            bounds,
            include_zero,
        } => {
            let mut cfg = common.resolve()?;
            if *all {
                cfg.theorems.clear();
            } else if !theorem.is_empty() {
                cfg.theorems = theorem.clone();
            }
            if let Some(n) = n_param {
                cfg.set("n", &n.to_string())?;
            }
            if let Some(g) = gamma {
                cfg.gamma = Some(*g);
            }
            if let Some(b) = bounds {
                cfg.set("bounds", b)?;
            }
            cfg.include_zero |= *include_zero;
            cmd_verify(&cfg)
        }
        Command::Jacobi { common, a, levels } => {
            let mut cfg = common.resolve()?;
            if let Some(a) = a {
                cfg.hessian_bound = Some(*a);
            }
            if let Some(l) = levels {
                cfg.set("levels", &l.to_string())?;
            }
            cmd_jacobi(&cfg)
        }
        Command::Report {
            common,
            refine,
            theorem,
            curvature,
        } => {
            let mut cfg = common.resolve()?;
            if !theorem.is_empty() {
                cfg.theorems = theorem.clone();
            }
            if !refine.is_empty() {
                cfg.refine = refine.clone();
            }
            cmd_report(&cfg, *curvature)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::Config(_)
        | Error::Parse { .. }
        | Error::DegreeExceedsDimension { .. } => 2,
        _ => 3,
    }
}

/// Full driver: parses arguments, runs, prints, returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // help and version go to stdout with success
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 2;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            for l in &outcome.lines {
                let _ = writeln!(stdout, "{l}");
            }
            i32::from(outcome.failures > 0)
        }
        Err(e) => {
            let record = json!({ "error": { "code": e.code(), "message": e.to_string() } });
            let _ = writeln!(stderr, "{record}");
            exit_code(&e)
        }
    }
}
