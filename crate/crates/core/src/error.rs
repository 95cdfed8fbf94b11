use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("sample has {n} observations, at least 2 are required")]
    SampleTooSmall { n: usize },
    #[error("observation {index} is not finite")]
    NonFinite { index: usize },
    #[error("tied values in the {axis} column")]
    TiesPresent { axis: char },
    #[error("n = {n} is out of range: {reason}")]
    InvalidN { n: usize, reason: &'static str },
    #[error("exact enumeration supports n <= {max}, got {n}")]
    TooLarge { n: usize, max: usize },
    #[error("not a permutation of 1..=n")]
    NotPermutation,
    #[error("{0} is not a function of the rank-position vector alone")]
    NotRankStatistic(&'static str),
    #[error("copula family {0} has no density")]
    DensityUnavailable(&'static str),
    #[error("invalid copula parameter: {0}")]
    InvalidCopula(String),
    #[error("competing-risks data is empty")]
    EmptyData,
    #[error("record {index} has a non-positive or non-finite time")]
    InvalidTime { index: usize },
    #[error("no root bracketed at t = {time} (residuals {lo_residual:e}, {hi_residual:e})")]
    NoRoot { time: f64, lo_residual: f64, hi_residual: f64 },
    #[error("bisection did not reach the tolerance at t = {time} after {iterations} iterations")]
    NonConvergence { time: f64, iterations: usize },
    #[error("block size {k} is invalid for n = {n} (need k >= 2 and n >= 2k)")]
    BlockTooSmall { k: usize, n: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("x or y column has zero variance")]
    DegenerateVariance,
    #[error("table is for {table_stat} at n = {table_n}, expected {stat} at n = {n}")]
    TableMismatch { table_stat: &'static str, table_n: usize, stat: &'static str, n: usize },
    #[error("statistic {0} needs a quantile table")]
    MissingTable(&'static str),
    #[error("quantile table has no entry for probability {0}")]
    MissingQuantile(f64),
    #[error("correlation {0} is outside [-1, 1]")]
    InvalidR(f64),
    #[error("probabilities must be strictly inside (0, 1) and strictly increasing")]
    InvalidProbs,
    #[error("at least {min} iterations are required, got {got}")]
    TooFewIterations { min: usize, got: usize },
}
