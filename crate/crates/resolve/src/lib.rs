//! Shipped data, verification goals and reports for the resolve engine.

pub mod data;
pub mod explain;
pub mod goals;
pub mod pluecker;
pub mod replay;
pub mod report;

use resolve_core::chart::ChartError;
use resolve_core::certify::CertifyError;
use resolve_core::ideal::IdealError;
use resolve_core::pluecker::PlueckerError;
use resolve_core::poly::{ParseError, PolyError};
use resolve_core::schubert::SchubertError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] data::DataError),
    #[error(transparent)]
    Chart(#[from] ChartError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Pluecker(#[from] PlueckerError),
    #[error(transparent)]
    Schubert(#[from] SchubertError),
    #[error("malformed definition `{0}`")]
    BadDefinition(String),
    #[error("unknown goal `{0}`")]
    UnknownGoal(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

impl Error {
    /// A Gröbner computation ran out of budget somewhere underneath.
    pub fn is_inconclusive(&self) -> bool {
        fn ideal(e: &IdealError) -> bool {
            matches!(e, IdealError::Inconclusive { .. })
        }
        fn chart(e: &ChartError) -> bool {
            matches!(e, ChartError::Ideal(i) if ideal(i))
        }
        match self {
            Error::Ideal(e) => ideal(e),
            Error::Chart(e) => chart(e),
            Error::Certify(CertifyError::Ideal(e)) => ideal(e),
            Error::Pluecker(PlueckerError::Ideal(e)) => ideal(e),
            Error::Pluecker(PlueckerError::Chart(e)) => chart(e),
            _ => false,
        }
    }
}
