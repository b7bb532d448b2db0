use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate signal: realized signal variance is zero for {config}")]
    DegenerateSignal { config: String },

    #[error("beta generation produced an all-zero vector after {retries} retries")]
    DegenerateBeta { retries: usize },

    #[error("holdout split infeasible for n = {n} (need n >= 5)")]
    SplitInfeasible { n: usize },

    #[error("coordinate descent did not converge after {sweeps} sweeps (KKT residual {kkt_residual:e})")]
    ConvergenceFailure { sweeps: usize, kkt_residual: f64 },

    #[error("alpha_max undefined: {0}")]
    UndefinedAlphaMax(String),

    #[error("invalid cross-validation plan: {0}")]
    InvalidPlan(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid grouping: {0}")]
    InvalidGrouping(String),

    #[error("unsupported design: {0}")]
    UnsupportedDesign(String),

    #[error("incomplete method pair; missing records for {} key(s): {}", .missing.len(), .missing.join(", "))]
    IncompletePair { missing: Vec<String> },

    #[error("knockoffs unsupported: {0}")]
    KnockoffsUnsupported(String),

    #[error("stability selection failed at iteration {iteration}: {source}")]
    StabilityIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("result store schema version {found} does not match supported version {expected}; {hint}")]
    SchemaMismatch { found: u32, expected: u32, hint: String },

    #[error("unknown metric name `{0}`")]
    UnknownMetric(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
