use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("mixed partial mismatch {defect:e} exceeds limit {limit:e}")]
    SymmetryDefect { defect: f64, limit: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("not a Hopf point: {0}")]
    NotHopf(String),
    #[error("defective spectrum: {0}")]
    DefectiveSpectrum(String),
    #[error("missing jet entry: {0}")]
    MissingJetEntry(String),
    #[error("assumption violated: {0}")]
    AssumptionViolation(String),
    #[error("branch exists for sign(mu) = {expected}, got mu = {mu}")]
    WrongDirection { expected: i8, mu: f64 },
    #[error("step size underflow at t = {t}")]
    StepFailure { t: f64 },
    #[error("singular shooting system")]
    SingularShooting,
    #[error("branch lost at mu = {mu}: {reason}")]
    BranchLost { mu: f64, reason: String },
    #[error("trajectory left the validity region at tau = {tau}")]
    LeftDomain { tau: f64 },
    #[error("parameters outside the admissible region: {0}")]
    NotAdmissible(String),
    #[error("alpha1 == alpha2 makes the Hopf point formula singular")]
    DegenerateAlphas,
    #[error("invalid bounds: {0}")]
    InvalidBounds(String),
    #[error("coexistence impossible: {0}")]
    NoCoexistencePossible(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
