//! Frame-level emission matrices and their on-disk formats.
//!
//! Binary format (little-endian): magic `CTCE`, version `u32`, `T u64`,
//! `V u64`, `blank_id u32`, `frame_duration f64` seconds, `normalized u8`,
//! then `T*V` row-major `f32` entries. A plain-text debug format — one row
//! per line, whitespace-separated values, `#` comments — is also accepted;
//! it carries no header, so blank id and frame duration come from the
//! caller.

use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::Scalar;

const MAGIC: &[u8; 4] = b"CTCE";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 4 + 8 + 1;

#[derive(Debug, Error)]
pub enum EmissionError {
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed emission file at byte {offset}: {reason}")]
    Malformed { offset: usize, reason: String },
    #[error("malformed emission text at line {line}: {reason}")]
    MalformedText { line: usize, reason: String },
    #[error("invalid emission matrix: {0}")]
    Invalid(String),
}

/// `T x V` matrix of per-frame token log-probabilities (or raw scores when
/// `normalized` is off), plus the blank id and the frame stride in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionMatrix<S: Scalar = f64> {
    log_probs: Vec<S>,
    num_frames: usize,
    vocab_size: usize,
    blank_id: u32,
    frame_duration: f64,
    normalized: bool,
}

impl<S: Scalar> EmissionMatrix<S> {
    /// Validates and wraps a row-major `T x V` matrix.
    ///
    /// Entries must be finite or `-inf`. When `normalized` is set the matrix
    /// claims to hold log-probabilities: entries must be `<= 0` and each
    /// row's exponentiated sum must fall in `[0.999, 1.001]`. Un-normalized
    /// score matrices skip both checks.
    pub fn new(
        log_probs: Vec<S>,
        num_frames: usize,
        vocab_size: usize,
        blank_id: u32,
        frame_duration: f64,
        normalized: bool,
    ) -> Result<Self, EmissionError> {
        if num_frames == 0 {
            return Err(EmissionError::Invalid("need at least one frame".into()));
        }
        if vocab_size < 2 {
            return Err(EmissionError::Invalid(format!(
                "vocabulary must hold blank plus one token, got {vocab_size}"
            )));
        }
        if blank_id as usize >= vocab_size {
            return Err(EmissionError::Invalid(format!(
                "blank id {blank_id} outside vocabulary of {vocab_size}"
            )));
        }
        if log_probs.len() != num_frames * vocab_size {
            return Err(EmissionError::Invalid(format!(
                "expected {num_frames}x{vocab_size} = {} entries, got {}",
                num_frames * vocab_size,
                log_probs.len()
            )));
        }
        if !(frame_duration.is_finite() && frame_duration > 0.0) {
            return Err(EmissionError::Invalid(format!(
                "frame duration {frame_duration} must be positive"
            )));
        }
        for (i, &p) in log_probs.iter().enumerate() {
            if p.is_nan() || p == S::infinity() {
                return Err(EmissionError::Invalid(format!(
                    "entry {i} is {p}; entries must be finite or -inf"
                )));
            }
            if normalized && p > S::zero() {
                return Err(EmissionError::Invalid(format!(
                    "entry {i} is {p} > 0 in a matrix claiming normalized log-probabilities"
                )));
            }
        }
        if normalized {
            for t in 0..num_frames {
                let sum: f64 = log_probs[t * vocab_size..(t + 1) * vocab_size]
                    .iter()
                    .map(|p| p.to_f64().unwrap().exp())
                    .sum();
                if !(0.999..=1.001).contains(&sum) {
                    return Err(EmissionError::Invalid(format!(
                        "row {t} exponentiates to {sum}, outside [0.999, 1.001]"
                    )));
                }
            }
        }
        Ok(Self {
            log_probs,
            num_frames,
            vocab_size,
            blank_id,
            frame_duration,
            normalized,
        })
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn blank_id(&self) -> u32 {
        self.blank_id
    }

    pub fn frame_duration(&self) -> f64 {
        self.frame_duration
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn log_prob(&self, frame: usize, token: u32) -> S {
        self.log_probs[frame * self.vocab_size + token as usize]
    }

    pub fn row(&self, frame: usize) -> &[S] {
        &self.log_probs[frame * self.vocab_size..(frame + 1) * self.vocab_size]
    }

    /// Overrides the frame stride, e.g. from a CLI flag.
    pub fn with_frame_duration(mut self, frame_duration: f64) -> Result<Self, EmissionError> {
        if !(frame_duration.is_finite() && frame_duration > 0.0) {
            return Err(EmissionError::Invalid(format!(
                "frame duration {frame_duration} must be positive"
            )));
        }
        self.frame_duration = frame_duration;
        Ok(self)
    }
}

/// Text-format fallbacks for header fields the debug format cannot carry.
#[derive(Debug, Clone, Copy)]
pub struct TextEmissionOptions {
    pub blank_id: u32,
    pub frame_duration: f64,
    pub normalized: bool,
}

impl Default for TextEmissionOptions {
    fn default() -> Self {
        // 0.02 s matches a 320-sample stride at 16 kHz.
        Self { blank_id: 0, frame_duration: 0.02, normalized: false }
    }
}

fn parse_binary<S: Scalar>(data: &[u8]) -> Result<EmissionMatrix<S>, EmissionError> {
    if data.len() < HEADER_LEN {
        return Err(EmissionError::Malformed {
            offset: 0,
            reason: format!("file shorter than {HEADER_LEN}-byte header"),
        });
    }
    if &data[0..4] != MAGIC {
        return Err(EmissionError::Malformed { offset: 0, reason: "missing CTCE magic".into() });
    }
    let version = u32::from_le_bytes(data[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(EmissionError::Malformed {
            offset: 4,
            reason: format!("unsupported version {version}"),
        });
    }
    let num_frames = u64::from_le_bytes(data[8..16].try_into().unwrap()) as usize;
    let vocab_size = u64::from_le_bytes(data[16..24].try_into().unwrap()) as usize;
    let blank_id = u32::from_le_bytes(data[24..28].try_into().unwrap());
    let frame_duration = f64::from_le_bytes(data[28..36].try_into().unwrap());
    let normalized = match data[36] {
        0 => false,
        1 => true,
        other => {
            return Err(EmissionError::Malformed {
                offset: 36,
                reason: format!("normalized flag must be 0 or 1, got {other}"),
            })
        }
    };
    let expected = num_frames
        .checked_mul(vocab_size)
        .and_then(|n| n.checked_mul(4))
        .ok_or_else(|| EmissionError::Malformed {
            offset: 8,
            reason: "matrix dimensions overflow".into(),
        })?;
    if data.len() - HEADER_LEN != expected {
        return Err(EmissionError::Malformed {
            offset: HEADER_LEN,
            reason: format!(
                "payload holds {} bytes, header declares {expected}",
                data.len() - HEADER_LEN
            ),
        });
    }
    let values = data[HEADER_LEN..]
        .chunks_exact(4)
        .map(|b| S::from_f32(f32::from_le_bytes([b[0], b[1], b[2], b[3]])).unwrap())
        .collect();
    EmissionMatrix::new(values, num_frames, vocab_size, blank_id, frame_duration, normalized)
}

fn parse_text<S: Scalar>(
    text: &str,
    opts: TextEmissionOptions,
) -> Result<EmissionMatrix<S>, EmissionError> {
    let mut values: Vec<S> = Vec::new();
    let mut vocab_size = 0usize;
    let mut num_frames = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<f32>, _> = line.split_whitespace().map(str::parse::<f32>).collect();
        let row = row.map_err(|e| EmissionError::MalformedText {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        if vocab_size == 0 {
            vocab_size = row.len();
        } else if row.len() != vocab_size {
            return Err(EmissionError::MalformedText {
                line: idx + 1,
                reason: format!("row has {} values, expected {vocab_size}", row.len()),
            });
        }
        values.extend(row.into_iter().map(|v| S::from_f32(v).unwrap()));
        num_frames += 1;
    }
    EmissionMatrix::new(
        values,
        num_frames,
        vocab_size,
        opts.blank_id,
        opts.frame_duration,
        opts.normalized,
    )
}

/// Loads an emission file, sniffing binary vs text by the `CTCE` magic.
pub fn load_emissions<S: Scalar>(
    path: impl AsRef<Path>,
    text_opts: TextEmissionOptions,
) -> Result<EmissionMatrix<S>, EmissionError> {
    let data = std::fs::read(path)?;
    if data.len() >= 4 && &data[0..4] == MAGIC {
        parse_binary(&data)
    } else {
        let text = String::from_utf8(data).map_err(|e| EmissionError::MalformedText {
            line: 0,
            reason: format!("not CTCE binary and not UTF-8 text: {e}"),
        })?;
        parse_text(&text, text_opts)
    }
}

/// Serializes a matrix in the binary format (entries narrowed to `f32`).
pub fn save_emissions<S: Scalar>(
    matrix: &EmissionMatrix<S>,
    path: impl AsRef<Path>,
) -> Result<(), EmissionError> {
    let mut out = Vec::with_capacity(HEADER_LEN + matrix.log_probs.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(matrix.num_frames as u64).to_le_bytes());
    out.extend_from_slice(&(matrix.vocab_size as u64).to_le_bytes());
    out.extend_from_slice(&matrix.blank_id.to_le_bytes());
    out.extend_from_slice(&matrix.frame_duration.to_le_bytes());
    out.push(matrix.normalized as u8);
    for p in &matrix.log_probs {
        out.extend_from_slice(&(p.to_f64().unwrap() as f32).to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&out)?;
    Ok(())
}

/// Reads one emission file's header fields without keeping the payload.
pub fn sniff_is_binary(path: impl AsRef<Path>) -> Result<bool, EmissionError> {
    let mut file = std::fs::File::open(path)?;
    let mut magic = [0u8; 4];
    match file.read_exact(&mut magic) {
        Ok(()) => Ok(&magic == MAGIC),
        Err(_) => Ok(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln(rows: &[&[f64]]) -> Vec<f64> {
        rows.iter().flat_map(|r| r.iter().map(|p| p.ln())).collect()
    }

    #[test]
    fn validates_dimensions_and_entries() {
        assert!(EmissionMatrix::new(vec![0.0f64; 4], 2, 2, 0, 0.02, false).is_ok());
        assert!(EmissionMatrix::new(vec![0.0f64; 3], 2, 2, 0, 0.02, false).is_err());
        assert!(EmissionMatrix::new(vec![0.0f64; 2], 1, 2, 2, 0.02, false).is_err());
        assert!(EmissionMatrix::new(vec![f64::NAN, 0.0], 1, 2, 0, 0.02, false).is_err());
        assert!(EmissionMatrix::new(vec![f64::INFINITY, 0.0], 1, 2, 0, 0.02, false).is_err());
        assert!(EmissionMatrix::new(vec![f64::NEG_INFINITY, 0.0], 1, 2, 0, 0.02, false).is_ok());
        assert!(EmissionMatrix::new(vec![0.0f64; 2], 1, 2, 0, 0.0, false).is_err());
    }

    #[test]
    fn normalized_flag_checks_rows() {
        let good = ln(&[&[0.5, 0.5], &[0.9, 0.1]]);
        assert!(EmissionMatrix::new(good, 2, 2, 0, 0.02, true).is_ok());
        let bad = ln(&[&[0.5, 0.2]]);
        assert!(EmissionMatrix::new(bad, 1, 2, 0, 0.02, true).is_err());
        // Positive scores are fine when the flag is off.
        assert!(EmissionMatrix::new(vec![3.0f64, -1.0], 1, 2, 0, 0.02, false).is_ok());
        assert!(EmissionMatrix::new(vec![3.0f64, -1.0], 1, 2, 0, 0.02, true).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("em.ctce");
        let m = EmissionMatrix::new(ln(&[&[0.1, 0.8, 0.1], &[0.25, 0.5, 0.25]]), 2, 3, 0, 0.02, true)
            .unwrap();
        save_emissions(&m, &path).unwrap();
        assert!(sniff_is_binary(&path).unwrap());
        let back: EmissionMatrix<f64> = load_emissions(&path, TextEmissionOptions::default()).unwrap();
        assert_eq!(back.num_frames(), 2);
        assert_eq!(back.vocab_size(), 3);
        assert_eq!(back.blank_id(), 0);
        assert!(back.normalized());
        // Values pass through f32.
        for t in 0..2 {
            for v in 0..3 {
                let a = m.log_prob(t, v);
                let b = back.log_prob(t, v);
                assert!(((a - b).abs()) < 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn binary_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("em.ctce");
        let m = EmissionMatrix::new(vec![-1.0f64; 6], 2, 3, 0, 0.02, false).unwrap();
        save_emissions(&m, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 2);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_emissions::<f64>(&path, TextEmissionOptions::default()),
            Err(EmissionError::Malformed { .. })
        ));
    }

    #[test]
    fn text_format_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("em.txt");
        std::fs::write(&path, "# debug matrix\n-1.0 -0.5 -2.0\n-inf -0.1 -3.0\n").unwrap();
        let m: EmissionMatrix<f64> = load_emissions(&path, TextEmissionOptions::default()).unwrap();
        assert_eq!(m.num_frames(), 2);
        assert_eq!(m.vocab_size(), 3);
        assert_eq!(m.frame_duration(), 0.02);
        assert_eq!(m.log_prob(1, 0), f64::NEG_INFINITY);
        assert!((m.log_prob(0, 1) + 0.5).abs() < 1e-9);
    }

    #[test]
    fn text_format_rejects_ragged_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("em.txt");
        std::fs::write(&path, "-1 -2\n-1 -2 -3\n").unwrap();
        assert!(matches!(
            load_emissions::<f64>(&path, TextEmissionOptions::default()),
            Err(EmissionError::MalformedText { line: 2, .. })
        ));
    }
}
