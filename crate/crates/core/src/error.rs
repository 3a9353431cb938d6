use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parameter `{name}` out of domain: {value}")]
    Domain { name: &'static str, value: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("GARCH stationarity condition violated (margin {margin})")]
    NonStationary { margin: f64 },
    #[error("optimizer failed from every start (best objective {best_value})")]
    AllStartsFailed { best: [f64; 3], best_value: f64 },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64) -> Self {
        Error::Domain { name, value }
    }
}
