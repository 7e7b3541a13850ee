//! Word-boundary-preserving segmentation of aligned long-form audio into
//! chunks strictly under a duration cap, plus an energy-based VAD front end.

mod vad;

pub use vad::{detect_speech, VadConfig};

use std::ops::Range;

use thiserror::Error;

use crate::align::WordAlignment;
use crate::audio::AudioBuffer;
use crate::Scalar;

#[derive(Debug, Error)]
pub enum ChunkError {
    #[error("word {index} is {duration:.3}s, at or over the {max_duration:.3}s chunk cap")]
    WordTooLong { index: usize, duration: f64, max_duration: f64 },
    #[error("chunk starts at {start:.3}s but the buffer ends at {buffer_end:.3}s")]
    ChunkOutOfRange { start: f64, buffer_end: f64 },
    #[error("operation requires mono input (got {channels} channels)")]
    RequiresMono { channels: u16 },
    #[error("max duration must be positive, got {0}")]
    InvalidMaxDuration(f64),
    #[error("word {index} is out of order or overlaps its predecessor")]
    UnorderedWords { index: usize },
}

/// How to pick the split point when a chunk fills up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChunkPolicy {
    /// Close right before the word that would overflow.
    #[default]
    Greedy,
    /// Like greedy, but re-open at the largest inter-word gap among the
    /// closing chunk's trailing words, so splits favor natural pauses.
    GapBiased,
}

/// A run of consecutive words packed under the duration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct Chunk {
    pub start: f64,
    pub end: f64,
    pub word_range: Range<usize>,
    pub transcript: String,
}

impl Chunk {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

fn make_chunk(words: &[WordAlignment], range: Range<usize>) -> Chunk {
    let slice = &words[range.clone()];
    let transcript = slice.iter().map(|w| w.word.as_str()).collect::<Vec<_>>().join(" ");
    Chunk {
        start: slice.first().unwrap().start,
        end: slice.last().unwrap().end,
        word_range: range,
        transcript,
    }
}

/// Packs ordered words into chunks of duration strictly under
/// `max_duration`, never splitting a word.
///
/// Greedy closes a chunk right before the word whose end would reach the
/// cap. Gap-biased then moves the split back to the widest inter-word gap
/// among the last `lookback` candidate positions (ties take the latest,
/// which coincides with greedy when all gaps are equal). Word ranges
/// partition the input in order.
pub fn chunk_words(
    words: &[WordAlignment],
    max_duration: f64,
    policy: ChunkPolicy,
    lookback: usize,
) -> Result<Vec<Chunk>, ChunkError> {
    if !(max_duration.is_finite() && max_duration > 0.0) {
        return Err(ChunkError::InvalidMaxDuration(max_duration));
    }
    for (index, w) in words.iter().enumerate() {
        if w.end <= w.start || (index > 0 && w.start < words[index - 1].end) {
            return Err(ChunkError::UnorderedWords { index });
        }
        let duration = w.end - w.start;
        if duration >= max_duration {
            return Err(ChunkError::WordTooLong { index, duration, max_duration });
        }
    }
    if words.is_empty() {
        return Ok(Vec::new());
    }

    let mut chunks = Vec::new();
    let mut first = 0usize;
    for i in 1..words.len() {
        while first < i && words[i].end - words[first].start >= max_duration {
            let split = match policy {
                ChunkPolicy::Greedy => i,
                ChunkPolicy::GapBiased => {
                    // Candidate split k means the new chunk starts at word k;
                    // k == i reproduces the greedy split.
                    let lo = (i.saturating_sub(lookback)).max(first + 1);
                    let mut best = i;
                    let mut best_gap = f64::NEG_INFINITY;
                    for k in lo..=i {
                        let gap = words[k].start - words[k - 1].end;
                        if gap >= best_gap {
                            best_gap = gap;
                            best = k;
                        }
                    }
                    best
                }
            };
            chunks.push(make_chunk(words, first..split));
            first = split;
        }
    }
    chunks.push(make_chunk(words, first..words.len()));
    Ok(chunks)
}

/// Slices `[start - pad, end + pad)` out of a mono buffer, clamped to the
/// buffer bounds; sample indices round half away from zero.
pub fn extract_chunk_audio<S: Scalar>(
    buffer: &AudioBuffer<S>,
    chunk: &Chunk,
    pad: f64,
) -> Result<AudioBuffer<S>, ChunkError> {
    if buffer.channels() != 1 {
        return Err(ChunkError::RequiresMono { channels: buffer.channels() });
    }
    let duration = buffer.duration_secs();
    if chunk.start > duration {
        return Err(ChunkError::ChunkOutOfRange { start: chunk.start, buffer_end: duration });
    }
    let rate = buffer.sample_rate() as f64;
    let len = buffer.samples().len() as i64;
    let lo = (((chunk.start - pad) * rate).round() as i64).clamp(0, len) as usize;
    let hi = (((chunk.end + pad) * rate).round() as i64).clamp(lo as i64, len) as usize;
    let samples = buffer.samples()[lo..hi].to_vec();
    AudioBuffer::new(samples, buffer.sample_rate(), 1)
        .map_err(|_| ChunkError::ChunkOutOfRange { start: chunk.start, buffer_end: duration })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn word(start: f64, end: f64) -> WordAlignment {
        WordAlignment { word: format!("w{start}"), start, end, score: -1.0 }
    }

    #[test]
    fn greedy_closes_at_the_cap() {
        let words = vec![word(0.0, 10.0), word(10.0, 20.0), word(20.0, 29.0), word(29.0, 40.0)];
        let chunks = chunk_words(&words, 30.0, ChunkPolicy::Greedy, 5).unwrap();
        assert_eq!(chunks.len(), 2);
        assert_eq!(chunks[0].word_range, 0..3);
        assert_eq!((chunks[0].start, chunks[0].end), (0.0, 29.0));
        assert_eq!(chunks[1].word_range, 3..4);
        assert_eq!((chunks[1].start, chunks[1].end), (29.0, 40.0));
        assert!(chunks[1].duration() < 30.0);
    }

    #[test]
    fn single_word_single_chunk() {
        let words = vec![word(0.0, 5.0)];
        let chunks = chunk_words(&words, 30.0, ChunkPolicy::Greedy, 5).unwrap();
        assert_eq!(chunks.len(), 1);
        assert_eq!((chunks[0].start, chunks[0].end), (0.0, 5.0));
    }

    #[test]
    fn oversized_word_is_flagged() {
        let words = vec![word(0.0, 31.0)];
        match chunk_words(&words, 30.0, ChunkPolicy::Greedy, 5) {
            Err(ChunkError::WordTooLong { index: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn gap_biased_splits_at_the_pause() {
        // Words 0-2 tightly packed, a 3 s pause, then two more words whose
        // arrival overflows the cap. Greedy splits at the overflow; the
        // gap-biased policy moves the split back to the pause.
        let words = vec![
            word(0.0, 8.0),
            word(8.1, 16.0),
            word(16.1, 24.0),
            word(27.0, 28.0),
            word(28.2, 33.0),
        ];
        let greedy = chunk_words(&words, 30.0, ChunkPolicy::Greedy, 5).unwrap();
        assert_eq!(greedy[0].word_range, 0..4);
        let biased = chunk_words(&words, 30.0, ChunkPolicy::GapBiased, 5).unwrap();
        assert_eq!(biased[0].word_range, 0..3);
        assert_eq!(biased[1].word_range, 3..5);
        assert!(biased.iter().all(|c| c.duration() < 30.0));
    }

    #[test]
    fn gap_biased_equals_greedy_on_uniform_gaps() {
        let words: Vec<WordAlignment> =
            (0..12).map(|i| word(i as f64 * 4.0, i as f64 * 4.0 + 3.0)).collect();
        let a = chunk_words(&words, 10.0, ChunkPolicy::Greedy, 5).unwrap();
        let b = chunk_words(&words, 10.0, ChunkPolicy::GapBiased, 5).unwrap();
        let ranges_a: Vec<_> = a.iter().map(|c| c.word_range.clone()).collect();
        let ranges_b: Vec<_> = b.iter().map(|c| c.word_range.clone()).collect();
        assert_eq!(ranges_a, ranges_b);
    }

    #[test]
    fn transcript_joins_with_single_spaces() {
        let mut words = vec![word(0.0, 1.0), word(1.5, 2.0)];
        words[0].word = "\u{0995}".into();
        words[1].word = "\u{0996}".into();
        let chunks = chunk_words(&words, 30.0, ChunkPolicy::Greedy, 5).unwrap();
        assert_eq!(chunks[0].transcript, "\u{0995} \u{0996}");
    }

    #[test]
    fn unordered_words_are_rejected()  {
        let words = vec![word(0.0, 2.0), word(1.5, 3.0)];
        assert!(matches!(
            chunk_words(&words, 30.0, ChunkPolicy::Greedy, 5),
            Err(ChunkError::UnorderedWords { index: 1 })
        ));
        assert!(matches!(
            chunk_words(&[word(1.0, 1.0)], 30.0, ChunkPolicy::Greedy, 5),
            Err(ChunkError::UnorderedWords { index: 0 })
        ));
    }

    #[test]
    fn zero_max_duration_is_invalid() {
        assert!(matches!(
            chunk_words(&[word(0.0, 1.0)], 0.0, ChunkPolicy::Greedy, 5),
            Err(ChunkError::InvalidMaxDuration(_))
        ));
    }

    #[test]
    fn extract_identity_and_indexing() {
        let buf = AudioBuffer::mono((0..32000).map(|i| (i % 7) as f32 / 10.0).collect(), 16000).unwrap();
        let full = Chunk { start: 0.0, end: 2.0, word_range: 0..1, transcript: String::new() };
        let out = extract_chunk_audio(&buf, &full, 0.0).unwrap();
        assert_eq!(out, buf);

        let mid = Chunk { start: 1.0, end: 2.0, word_range: 0..1, transcript: String::new() };
        let out = extract_chunk_audio(&buf, &mid, 0.0).unwrap();
        assert_eq!(out.samples(), &buf.samples()[16000..32000]);
    }

    #[test]
    fn extract_clamps_padding_at_the_edges() {
        let buf = AudioBuffer::mono(vec![0.1f32; 16000], 16000).unwrap();
        let chunk = Chunk { start: 0.05, end: 0.2, word_range: 0..1, transcript: String::new() };
        let out = extract_chunk_audio(&buf, &chunk, 0.1).unwrap();
        // (0.05 - 0.1) clamps to sample 0; end pads to 0.3 s.
        assert_eq!(out.samples().len(), 4800);
    }

    #[test]
    fn extract_rejects_out_of_range_and_stereo() {
        let buf = AudioBuffer::mono(vec![0.0f32; 1600], 16000).unwrap();
        let chunk = Chunk { start: 5.0, end: 6.0, word_range: 0..1, transcript: String::new() };
        assert!(matches!(
            extract_chunk_audio(&buf, &chunk, 0.0),
            Err(ChunkError::ChunkOutOfRange { .. })
        ));
        let stereo = AudioBuffer::new(vec![0.0f32; 4], 16000, 2).unwrap();
        let chunk = Chunk { start: 0.0, end: 0.0001, word_range: 0..1, transcript: String::new() };
        assert!(matches!(
            extract_chunk_audio(&stereo, &chunk, 0.0),
            Err(ChunkError::RequiresMono { channels: 2 })
        ));
    }

    prop_compose! {
        fn word_layout()(
            durations in proptest::collection::vec(0.1f64..35.0, 1..40),
            gaps in proptest::collection::vec(0.0f64..5.0, 40),
        ) -> Vec<WordAlignment> {
            let mut t = 0.0;
            let mut out = Vec::with_capacity(durations.len());
            for (i, d) in durations.iter().enumerate() {
                let start = t + gaps[i];
                let end = start + d;
                out.push(WordAlignment { word: format!("w{i}"), start, end, score: -1.0 });
                t = end;
            }
            out
        }
    }

    proptest! {
        #[test]
        fn chunk_invariants_hold(words in word_layout(), gap_biased in proptest::bool::ANY) {
            let max = 29.5;
            let policy = if gap_biased { ChunkPolicy::GapBiased } else { ChunkPolicy::Greedy };
            let oversized: Vec<usize> = words
                .iter()
                .enumerate()
                .filter(|(_, w)| w.end - w.start >= max)
                .map(|(i, _)| i)
                .collect();
            match chunk_words(&words, max, policy, 5) {
                Err(ChunkError::WordTooLong { index, .. }) => {
                    prop_assert!(oversized.contains(&index));
                }
                Err(other) => return Err(TestCaseError::fail(format!("{other:?}"))),
                Ok(chunks) => {
                    prop_assert!(oversized.is_empty());
                    let mut next = 0usize;
                    for c in &chunks {
                        prop_assert_eq!(c.word_range.start, next);
                        prop_assert!(c.word_range.end > c.word_range.start);
                        prop_assert!(c.duration() < max);
                        prop_assert_eq!(c.start, words[c.word_range.start].start);
                        prop_assert_eq!(c.end, words[c.word_range.end - 1].end);
                        next = c.word_range.end;
                    }
                    prop_assert_eq!(next, words.len());
                }
            }
        }
    }
}
