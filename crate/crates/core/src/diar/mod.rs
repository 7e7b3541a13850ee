//! Diarization annotations: CSV parsing, RTTM conversion, and fixed-window
//! clipping for training chunk preparation.

mod csv;
mod rttm;
mod window;

pub use csv::{parse_csv, parse_csv_text};
pub use rttm::{parse_rttm, to_rttm, RttmDocument};
pub use window::window_annotation;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DiarError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing required column {0:?}")]
    MissingColumn(String),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("speaker {speaker:?} overlaps itself (lines {line_a} and {line_b})")]
    OverlapWithinSpeaker { speaker: String, line_a: u64, line_b: u64 },
    #[error("malformed RTTM line {line}: {reason}")]
    MalformedRttmLine { line: usize, reason: String },
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
}

/// One speaker turn: `[start, start + duration)` seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiarSegment {
    pub start: f64,
    pub duration: f64,
    pub speaker: String,
}

impl DiarSegment {
    pub fn new(start: f64, duration: f64, speaker: impl Into<String>) -> Self {
        Self { start, duration, speaker: speaker.into() }
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }
}

/// All speaker turns for one recording, sorted by `(start, speaker)`.
///
/// Different speakers may overlap (overlapping speech); the same speaker
/// may not. File ids and speaker labels are whitespace-free so they survive
/// space-separated formats.
#[derive(Debug, Clone, PartialEq)]
pub struct DiarAnnotation {
    file_id: String,
    segments: Vec<DiarSegment>,
}

fn label_ok(label: &str) -> bool {
    !label.is_empty() && !label.chars().any(|c| c.is_whitespace())
}

impl DiarAnnotation {
    pub fn new(file_id: impl Into<String>, mut segments: Vec<DiarSegment>) -> Result<Self, DiarError> {
        let file_id = file_id.into();
        if !label_ok(&file_id) {
            return Err(DiarError::InvalidAnnotation(format!(
                "file id {file_id:?} must be non-empty without whitespace"
            )));
        }
        for (i, seg) in segments.iter().enumerate() {
            if !(seg.start.is_finite() && seg.start >= 0.0) {
                return Err(DiarError::InvalidAnnotation(format!(
                    "segment {i} start {} must be finite and non-negative",
                    seg.start
                )));
            }
            if !(seg.duration.is_finite() && seg.duration > 0.0) {
                return Err(DiarError::InvalidAnnotation(format!(
                    "segment {i} duration {} must be positive",
                    seg.duration
                )));
            }
            if !label_ok(&seg.speaker) {
                return Err(DiarError::InvalidAnnotation(format!(
                    "segment {i} speaker {:?} must be non-empty without whitespace",
                    seg.speaker
                )));
            }
        }
        segments.sort_by(|a, b| a.start.total_cmp(&b.start).then_with(|| a.speaker.cmp(&b.speaker)));
        // Same-speaker turns must not overlap; touching endpoints are fine.
        let mut last_end: std::collections::HashMap<&str, f64> = std::collections::HashMap::new();
        for (i, seg) in segments.iter().enumerate() {
            if let Some(&end) = last_end.get(seg.speaker.as_str()) {
                if seg.start < end {
                    return Err(DiarError::InvalidAnnotation(format!(
                        "speaker {:?} overlaps itself near segment {i} ({} < {end})",
                        seg.speaker, seg.start
                    )));
                }
            }
            let entry = last_end.entry(seg.speaker.as_str()).or_insert(f64::NEG_INFINITY);
            *entry = entry.max(seg.end());
        }
        Ok(Self { file_id, segments })
    }

    pub fn file_id(&self) -> &str {
        &self.file_id
    }

    pub fn segments(&self) -> &[DiarSegment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Sum of all segment durations (speaker-seconds, counts overlap twice).
    pub fn total_speech(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    /// Latest segment end, or 0 for an empty annotation.
    pub fn max_end(&self) -> f64 {
        self.segments.iter().map(|s| s.end()).fold(0.0, f64::max)
    }
}
