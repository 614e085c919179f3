use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mean is infinite for {0}")]
    InfiniteMean(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("integrand returned a non-finite value at {at}")]
    NonFiniteEvaluation { at: f64 },

    #[error("root bracket [{lo}, {hi}] does not change sign")]
    InvalidBracket { lo: f64, hi: f64 },

    #[error("not stochastically ordered: Q_X({u}) = {qx} > Q_Y({u}) = {qy}")]
    NotStochasticallyOrdered { u: f64, qx: f64, qy: f64 },

    #[error("means are equal ({0}); the pair carries no unit-interval law")]
    EqualMeans(f64),

    #[error("{0} has no density")]
    MissingDensity(String),

    #[error("Q(p) = 0 at p = {0}; proportional residual undefined")]
    QZero(f64),

    #[error("test function supports derivatives up to order {available}, {requested} requested")]
    InsufficientDerivatives { requested: usize, available: usize },

    #[error("phi is not increasing near u = {0}")]
    NonMonotonePhi(f64),

    #[error("hypothesis '{hypothesis}' failed on grid: {witness}")]
    HypothesisFailed { hypothesis: String, witness: String },

    #[error("sample size must be positive")]
    InvalidSampleSize,

    #[error("unit density is not normalized: integral = {0}")]
    NotNormalized(f64),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("unknown {kind} '{name}'")]
    UnknownName { kind: &'static str, name: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::InvalidTable(e.to_string())
    }
}
