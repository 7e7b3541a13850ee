//! Deterministic building blocks for long-form speech data preparation:
//! WAV decoding and standardization, transcript normalization, CTC forced
//! word alignment over precomputed emission matrices, word-preserving
//! chunking with an energy VAD front end, diarization annotation formats
//! (CSV/RTTM) and windowing, and WER/DER scoring with exact speaker
//! assignment.
//!
//! Numeric kernels are generic over the scalar type via [`Scalar`]
//! (`f32` or `f64`); times are always seconds as `f64`.

pub mod align;
pub mod audio;
pub mod chunk;
pub mod diar;
pub mod manifest;
pub mod metrics;
pub mod text;

/// Floating-point scalar for sample and score math: `f32` or `f64`.
pub trait Scalar:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + std::fmt::Debug
    + std::fmt::Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: num_traits::Float
        + num_traits::FromPrimitive
        + num_traits::ToPrimitive
        + std::fmt::Debug
        + std::fmt::Display
        + Send
        + Sync
        + 'static
{
}

/// Audio sample amplitude, dimensionless in `[-1, 1]`.
pub type Sample = f32;
/// Log-probability / path score.
pub type Score = f64;
/// Wall-clock time in seconds.
pub type Seconds = f64;

pub use align::{
    build_extended_sequence, collapse_to_words, force_align, viterbi_align, viterbi_align_with,
    AlignError, AlignOptions, AlignmentFailure, EmissionMatrix, FailureKind, ForcedAlignment,
    ViterbiAlignment, WordAlignment,
};
pub use audio::{
    apply_gain, augment_gain, downmix_mono, read_wav, resample, write_wav, AudioBuffer,
    AudioError, GainAugmentConfig,
};
pub use chunk::{chunk_words, detect_speech, extract_chunk_audio, Chunk, ChunkError, ChunkPolicy, VadConfig};
pub use diar::{parse_csv, parse_rttm, to_rttm, window_annotation, DiarAnnotation, DiarError, DiarSegment};
pub use manifest::{scan_dataset, ManifestReport};
pub use metrics::{der, wer, wer_corpus, DerReport, MetricsError, WerReport};
pub use text::{normalize_transcript, split_words, tokenize_word, TextError, TokenTable, UnknownPolicy};
