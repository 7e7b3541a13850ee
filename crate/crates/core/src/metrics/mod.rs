//! Scoring: word error rate and diarization error rate, with every
//! intermediate count exposed for auditability.

pub mod assignment;
mod der;
mod wer;

pub use der::{der, der_components, finish_der, DerComponents, DerReport};
pub use wer::{wer, wer_corpus, WerReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("corpus scoring requires at least one pair")]
    EmptyCorpus,
    #[error("reference has no scored speech; DER is undefined")]
    EmptyReference,
}
