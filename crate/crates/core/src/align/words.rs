//! Mapping decoded trellis paths back to word timestamps, plus the
//! JSON-lines serialization of alignment output.

use serde::{Deserialize, Serialize};

use super::AlignError;
use crate::Scalar;

/// One aligned word with start/end in seconds and its mean per-frame
/// log-probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordAlignment {
    pub word: String,
    pub start: f64,
    pub end: f64,
    pub score: f64,
}

/// A word's text and how many tokens it contributed to the concatenated
/// token sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSpan {
    pub word: String,
    pub token_count: usize,
}

/// Groups a decoded path into per-word `[start, end)` intervals.
///
/// A word's frames are those whose state lands on one of its token states;
/// blanks between words belong to neither word, so consecutive words may
/// have a gap. `start` is the first such frame, `end` one past the last,
/// both scaled by `frame_duration`. The score averages `frame_scores` over
/// exactly those frames.
pub fn collapse_to_words<S: Scalar>(
    path: &[usize],
    frame_scores: &[S],
    words: &[WordSpan],
    frame_duration: f64,
) -> Result<Vec<WordAlignment>, AlignError> {
    let total_tokens: usize = words.iter().map(|w| w.token_count).sum();
    if path.len() != frame_scores.len() {
        return Err(AlignError::Internal(format!(
            "path has {} frames but {} frame scores",
            path.len(),
            frame_scores.len()
        )));
    }
    let s_len = 2 * total_tokens + 1;
    let mut token_to_word = Vec::with_capacity(total_tokens);
    for (w, span) in words.iter().enumerate() {
        if span.token_count == 0 {
            return Err(AlignError::Internal(format!("word {w} has zero tokens")));
        }
        token_to_word.extend(std::iter::repeat_n(w, span.token_count));
    }

    struct Acc {
        first: usize,
        last: usize,
        sum: f64,
        frames: usize,
    }
    let mut accs: Vec<Option<Acc>> = (0..words.len()).map(|_| None).collect();
    for (t, &s) in path.iter().enumerate() {
        if s >= s_len {
            return Err(AlignError::Internal(format!(
                "state {s} outside extended sequence of length {s_len}"
            )));
        }
        if s % 2 == 1 {
            let w = token_to_word[(s - 1) / 2];
            let score = frame_scores[t].to_f64().unwrap();
            match &mut accs[w] {
                None => {
                    accs[w] = Some(Acc { first: t, last: t, sum: score, frames: 1 });
                }
                Some(acc) => {
                    acc.last = t;
                    acc.sum += score;
                    acc.frames += 1;
                }
            }
        }
    }

    let mut out = Vec::with_capacity(words.len());
    for (w, span) in words.iter().enumerate() {
        let acc = accs[w].as_ref().ok_or_else(|| {
            AlignError::Internal(format!("word {w} ({:?}) received no frames", span.word))
        })?;
        out.push(WordAlignment {
            word: span.word.clone(),
            start: acc.first as f64 * frame_duration,
            end: (acc.last + 1) as f64 * frame_duration,
            score: acc.sum / acc.frames as f64,
        });
    }
    Ok(out)
}

/// Formats alignments as JSON lines, one `{word, start, end, score}` record
/// per word with times fixed to 3 decimals.
pub fn alignments_to_jsonl(words: &[WordAlignment]) -> String {
    let mut out = String::new();
    for w in words {
        let word = serde_json::to_string(&w.word).expect("string serializes");
        out.push_str(&format!(
            "{{\"word\":{word},\"start\":{:.3},\"end\":{:.3},\"score\":{:.6}}}\n",
            w.start, w.end, w.score
        ));
    }
    out
}

/// Parses JSON-lines alignment records; blank lines are skipped.
pub fn alignments_from_jsonl(text: &str) -> Result<Vec<WordAlignment>, AlignError> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let word: WordAlignment = serde_json::from_str(line).map_err(|e| AlignError::Jsonl {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        out.push(word);
    }
    Ok(out)
}
