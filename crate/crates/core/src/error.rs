use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lazy word not accepted here")]
    LazyWord,
    #[error("letter {0} is outside the alphabet of {1} generators")]
    LetterOutOfRange(String, usize),
    #[error("word does not represent the identity: {0}")]
    NotClosed(String),
    #[error("{what} budget exceeded (limit {limit})")]
    BudgetExceeded { what: &'static str, limit: u64 },
    #[error("element lies farther than the radius cap {0}")]
    RadiusCapExceeded(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("composition requires an inner series with zero constant term")]
    NonzeroConstantTerm,
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::RadiusCapExceeded(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
