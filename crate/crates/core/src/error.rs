use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("tree mismatch: {0}")]
    Tree(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("invalid format: {0}")]
    Format(String),
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("ellipticity violated: margin {0}")]
    NotElliptic(f64),
    #[error("index outside universe: {0}")]
    OutsideUniverse(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SolverError {
    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),
    #[error("iteration cap of {cap} reached (last residual {last:.3e})")]
    IterationCap { cap: usize, last: f64 },
    #[error("empty index set")]
    EmptyIndexSet,
    #[error("zero residual passed to expand")]
    ZeroResidual,
    #[error("postcondition failed: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Error, Debug)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("degenerate fit window: {0}")]
    DegenerateWindow(String),
    #[error("run not certified: {0}")]
    NotCertified(String),
    #[error("missing run: {0}")]
    MissingRun(String),
    #[error("solver failed: {0}")]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum OracleError {
    #[error("problem too large for the oracle: {0}")]
    TooLarge(String),
    #[error("conjugate gradients stagnated after {iterations} iterations (relative residual {residual:.3e})")]
    Stagnation { iterations: usize, residual: f64 },
    #[error("invalid oracle input: {0}")]
    Input(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}
