use thiserror::Error;

use crate::lp::LpError;
use crate::model::ModelError;

/// Errors raised by the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A strategy set is too large to enumerate.
    #[error("{what} has {count} strategies, above the cap of {cap}; {advice}")]
    EnumerationCap { what: &'static str, count: u128, cap: u128, advice: &'static str },
    #[error("customer {customer} out of range (m = {customers})")]
    CustomerOutOfRange { customer: usize, customers: usize },
    #[error("instance is not disjoint (some customer sees several media); use the multi-LP solver")]
    NotDisjoint,
    #[error("{0}")]
    InvalidInput(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl Error {
    pub fn is_cap(&self) -> bool {
        matches!(self, Error::EnumerationCap { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
