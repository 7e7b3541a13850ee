//! Forced word alignment: Viterbi decoding over a CTC trellis built from an
//! emission matrix and a tokenized transcript, yielding per-word timestamps.

mod emission;
mod viterbi;
mod words;

pub use emission::{
    load_emissions, save_emissions, sniff_is_binary, EmissionError, EmissionMatrix,
    TextEmissionOptions,
};
pub use viterbi::{
    build_extended_sequence, min_frames_required, viterbi_align, viterbi_align_with, AlignOptions,
    ViterbiAlignment,
};
pub use words::{
    alignments_from_jsonl, alignments_to_jsonl, collapse_to_words, WordAlignment, WordSpan,
};

use thiserror::Error;

use crate::text::{self, TextError, TokenTable};
use crate::Scalar;

/// Why an audio/transcript pair could not be aligned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    TranscriptTooLong,
    EmptyTranscript,
    EmptyTokenization,
    DegenerateEmissions,
}

impl FailureKind {
    /// Stable machine-readable name, used in failure reports.
    pub fn as_str(&self) -> &'static str {
        match self {
            FailureKind::TranscriptTooLong => "transcript_too_long",
            FailureKind::EmptyTranscript => "empty_transcript",
            FailureKind::EmptyTokenization => "empty_tokenization",
            FailureKind::DegenerateEmissions => "degenerate_emissions",
        }
    }
}

impl std::fmt::Display for FailureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A flagged alignment failure, per the pipeline's filter-or-flag policy.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind}: {detail}")]
pub struct AlignmentFailure {
    pub kind: FailureKind,
    pub detail: String,
}

impl AlignmentFailure {
    pub fn new(kind: FailureKind, detail: impl Into<String>) -> Self {
        Self { kind, detail: detail.into() }
    }
}

#[derive(Debug, Error)]
pub enum AlignError {
    #[error(transparent)]
    Failure(#[from] AlignmentFailure),
    #[error(transparent)]
    Token(#[from] TextError),
    #[error("token table does not match emissions: {0}")]
    TableMismatch(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("bad alignment record at line {line}: {reason}")]
    Jsonl { line: usize, reason: String },
}

/// A word dropped before alignment because its tokenization came up empty
/// under the skip policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedWord {
    pub index: usize,
    pub word: String,
}

/// Output of [`force_align`]: aligned words plus any skipped ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcedAlignment {
    pub words: Vec<WordAlignment>,
    pub skipped: Vec<SkippedWord>,
}

/// End-to-end forced alignment of one transcript against one emission
/// matrix: normalize, split, tokenize, decode, collapse.
///
/// Words that tokenize to nothing under the skip policy are dropped from
/// the trellis but reported in `skipped`.
pub fn force_align<S: Scalar>(
    emissions: &EmissionMatrix<S>,
    transcript: &str,
    table: &TokenTable,
) -> Result<ForcedAlignment, AlignError> {
    force_align_with(emissions, transcript, table, &AlignOptions::default())
}

pub fn force_align_with<S: Scalar>(
    emissions: &EmissionMatrix<S>,
    transcript: &str,
    table: &TokenTable,
    options: &AlignOptions,
) -> Result<ForcedAlignment, AlignError> {
    if table.blank_id() != emissions.blank_id() {
        return Err(AlignError::TableMismatch(format!(
            "table blank id {} vs emission blank id {}",
            table.blank_id(),
            emissions.blank_id()
        )));
    }
    if table.vocab_size() as usize > emissions.vocab_size() {
        return Err(AlignError::TableMismatch(format!(
            "table vocabulary {} exceeds emission vocabulary {}",
            table.vocab_size(),
            emissions.vocab_size()
        )));
    }

    let normalized = text::normalize_transcript(transcript);
    let raw_words = text::split_words(&normalized);
    if raw_words.is_empty() {
        return Err(AlignmentFailure::new(
            FailureKind::EmptyTranscript,
            "transcript normalizes to nothing",
        )
        .into());
    }

    let mut spans: Vec<WordSpan> = Vec::with_capacity(raw_words.len());
    let mut tokens: Vec<u32> = Vec::new();
    let mut skipped = Vec::new();
    for (index, word) in raw_words.iter().enumerate() {
        match text::tokenize_word(word, table) {
            Ok(ids) => {
                spans.push(WordSpan { word: (*word).to_string(), token_count: ids.len() });
                tokens.extend(ids);
            }
            Err(TextError::EmptyTokenization) => {
                skipped.push(SkippedWord { index, word: (*word).to_string() });
            }
            Err(other) => return Err(other.into()),
        }
    }
    if spans.is_empty() {
        return Err(AlignmentFailure::new(
            FailureKind::EmptyTokenization,
            format!("all {} words tokenized to nothing", raw_words.len()),
        )
        .into());
    }

    let decoded = viterbi_align_with(emissions, &tokens, options)?;
    let words = collapse_to_words(
        &decoded.path,
        &decoded.frame_scores,
        &spans,
        emissions.frame_duration(),
    )?;
    Ok(ForcedAlignment { words, skipped })
}
