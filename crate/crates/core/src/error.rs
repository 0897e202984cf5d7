use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Each variant maps to a stable short code (see [`Error::code`]) that the
/// command-line driver writes into its JSON error records.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree exceeds dimension: degree {degree} in dimension {dim}")]
    DegreeExceedsDimension { degree: usize, dim: usize },
    #[error("cannot contract scalar (0-form)")]
    ContractScalar,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("dimension {0} not supported (1..=8)")]
    UnsupportedDimension(usize),
    #[error("non-isometric frame: Gram deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NonIsometricFrame { deviation: f64, tolerance: f64 },

    #[error("parse failure at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("non-triangle face {face} with {corners} corners")]
    NonTriangleFace { face: usize, corners: usize },
    #[error("non-manifold edge ({0}, {1}) shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("inconsistent orientation across edge ({0}, {1})")]
    NonOrientable(usize, usize),
    #[error("invalid face {face}: {reason}")]
    InvalidFace { face: usize, reason: String },
    #[error("degenerate (zero-area) face {0}")]
    DegenerateFace(usize),
    #[error("non-positive dual length on edge {edge} (cotan weight {weight:.3e}); mesh is not Delaunay there")]
    NonPositiveDual { edge: usize, weight: f64 },
    #[error("empty interior: {0}")]
    EmptyInterior(String),
    #[error("mesh is disconnected: vertex {0} unreachable")]
    Disconnected(usize),

    #[error("rank-deficient fit neighbourhood at vertex {0}")]
    RankDeficientFit(usize),
    #[error("non-finite weight sample at vertex {0}")]
    NonFiniteWeight(usize),
    #[error("weight magnitude {0:.3e} too large for e^(f/2); rescale the weight")]
    WeightOverflow(f64),
    #[error("estimator inconsistency: {0}")]
    EstimatorInconsistency(String),

    #[error("zero or non-positive Hodge star entry in degree {degree} at index {index}")]
    NonPositiveStar { degree: usize, index: usize },
    #[error("factorization breakdown after {attempts} shift attempts")]
    FactorizationBreakdown { attempts: usize },
    #[error("requested {requested} eigenpairs but dimension is {dim}")]
    TooManyEigenpairs { requested: usize, dim: usize },
    #[error("dense oracle limited to dimension 2000, got {0}")]
    DenseTooLarge(usize),
    #[error("eigensolver did not converge: worst residual {residual:.3e} after {cycles} cycles")]
    NotConverged { residual: f64, cycles: usize },
    #[error("ambiguous spectral gap below kernel (ratio {0:.3e} < 10); refine the mesh")]
    AmbiguousKernel(f64),
    #[error("zero operator: {0}")]
    ZeroOperator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DegreeExceedsDimension { .. } => "degree_exceeds_dimension",
            Error::ContractScalar => "contract_scalar",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::UnsupportedDimension(_) => "unsupported_dimension",
            Error::NonIsometricFrame { .. } => "non_isometric_frame",
            Error::Parse { .. } => "parse_failure",
            Error::NonTriangleFace { .. } => "non_triangle_face",
            Error::NonManifoldEdge(..) => "non_manifold_edge",
            Error::NonOrientable(..) => "non_orientable",
            Error::InvalidFace { .. } => "invalid_face",
            Error::DegenerateFace(_) => "degenerate_face",
            Error::NonPositiveDual { .. } => "non_positive_dual",
            Error::EmptyInterior(_) => "empty_interior",
            Error::Disconnected(_) => "disconnected_mesh",
            Error::RankDeficientFit(_) => "rank_deficient_fit",
            Error::NonFiniteWeight(_) => "non_finite_weight",
            Error::WeightOverflow(_) => "weight_overflow",
            Error::EstimatorInconsistency(_) => "estimator_inconsistency",
            Error::NonPositiveStar { .. } => "non_positive_star",
            Error::FactorizationBreakdown { .. } => "factorization_breakdown",
            Error::TooManyEigenpairs { .. } => "too_many_eigenpairs",
            Error::DenseTooLarge(_) => "dense_too_large",
            Error::NotConverged { .. } => "not_converged",
            Error::AmbiguousKernel(_) => "ambiguous_kernel",
            Error::ZeroOperator(_) => "zero_operator",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Io(_) => "io",
            Error::Config(_) => "config",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
