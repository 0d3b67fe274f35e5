use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("insufficient points: need at least {needed}, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("invalid point set: {0}")]
    InvalidPoints(String),

    #[error("k = {k} exceeds precomputed depth {depth}")]
    DepthExceeded { k: usize, depth: usize },

    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    #[error("moments undefined at this order: need n >= 4, got {0}")]
    MomentsUndefined(usize),

    #[error("instance too large for oracle: {labelings} labelings exceed budget {budget}")]
    OracleBudget { labelings: u128, budget: u128 },

    #[error("{0} is a two-class index")]
    TwoClassOnly(&'static str),

    #[error("class {0} is degenerate (size 0 or n)")]
    ClassDegenerate(usize),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("approximation domain violated: {0}")]
    DomainViolated(String),

    #[error("covariance not PSD: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("combined covariance singular")]
    SingularCombined,

    #[error("degenerate labeling: {0}")]
    DegenerateLabeling(String),

    #[error("labeling stalled after {sweeps} sweeps with {cases} of {target} cases")]
    LabelingStalled { sweeps: usize, cases: usize, target: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("no null sample")]
    EmptySample,

    #[error("unknown test identifier `{0}`")]
    UnknownTest(String),

    #[error("input error at line {line}: {message}")]
    Input { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("config error: {0}")]
    Config(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
