use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("coefficient of degree {degree} requested beyond truncation order {trunc}")]
    BeyondTruncation { degree: usize, trunc: usize },

    #[error("negative dimension {value} at degree {degree}")]
    NegativeDimension { degree: usize, value: String },

    #[error(
        "injectivity violated: target degree {target_degree} (source degree {source_degree}) \
         would have dimension {value}"
    )]
    InjectivityViolation {
        target_degree: usize,
        source_degree: i64,
        value: String,
    },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("enumeration budget exceeded: {states} states requested, cap is {cap}")]
    BudgetExceeded { states: String, cap: u64 },

    #[error("no stabilization of q^0..q^{window} coefficients for d={d} up to n={n_max}")]
    NotStabilized { d: usize, window: usize, n_max: usize },

    #[error("differential rules contradict positivity: {0}")]
    RuleContradiction(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
