//! CTC trellis construction and Viterbi decoding.
//!
//! The trellis runs over the blank-interleaved extended sequence
//! `[b, t1, b, ..., tN, b]` (length `S = 2N+1`). From state `s` the next
//! frame may occupy `s`, `s+1`, or `s+2`, where the skip is legal only when
//! it lands on a non-blank state different from `extended[s]`. Valid paths
//! start in state 0 or 1 and end in state `S-1` or `S-2`. Ties prefer the
//! smaller previous-state index, which keeps output deterministic across
//! platforms.

use super::emission::EmissionMatrix;
use super::{AlignmentFailure, FailureKind};
use crate::Scalar;

/// Decoding options.
///
/// `band_half_width` enables banded decoding: only states within the given
/// distance of the diagonal `t*(S-1)/(T-1)` are evaluated. This bounds the
/// backpointer grid at `T x (2w+1)` instead of `T x S` but is an
/// approximation — paths forced outside the band are lost.
#[derive(Debug, Clone, Default)]
pub struct AlignOptions {
    pub band_half_width: Option<usize>,
}

/// A decoded path: one extended-sequence state per frame, the total path
/// log-probability, and the per-frame emission scores along the path.
#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiAlignment<S: Scalar = f64> {
    pub path: Vec<usize>,
    pub score: S,
    pub frame_scores: Vec<S>,
}

/// Interleaves blanks around and between tokens: `[b, t1, b, ..., tN, b]`.
pub fn build_extended_sequence(tokens: &[u32], blank_id: u32) -> Result<Vec<u32>, AlignmentFailure> {
    if tokens.is_empty() {
        return Err(AlignmentFailure::new(FailureKind::EmptyTranscript, "no tokens to align"));
    }
    debug_assert!(tokens.iter().all(|&t| t != blank_id));
    let mut ext = Vec::with_capacity(2 * tokens.len() + 1);
    ext.push(blank_id);
    for &t in tokens {
        ext.push(t);
        ext.push(blank_id);
    }
    Ok(ext)
}

/// Minimum frames a token sequence needs: one per token plus one separating
/// blank per adjacent equal pair.
pub fn min_frames_required(tokens: &[u32]) -> usize {
    let repeats = tokens.windows(2).filter(|w| w[0] == w[1]).count();
    tokens.len() + repeats
}

/// Viterbi forced alignment with default (full-grid) options.
pub fn viterbi_align<S: Scalar>(
    emissions: &EmissionMatrix<S>,
    tokens: &[u32],
) -> Result<ViterbiAlignment<S>, AlignmentFailure> {
    viterbi_align_with(emissions, tokens, &AlignOptions::default())
}

pub fn viterbi_align_with<S: Scalar>(
    emissions: &EmissionMatrix<S>,
    tokens: &[u32],
    options: &AlignOptions,
) -> Result<ViterbiAlignment<S>, AlignmentFailure> {
    let ext = build_extended_sequence(tokens, emissions.blank_id())?;
    assert!(
        tokens.iter().all(|&t| (t as usize) < emissions.vocab_size()),
        "token id outside emission vocabulary"
    );
    let t_len = emissions.num_frames();
    let s_len = ext.len();
    let needed = min_frames_required(tokens);
    if t_len < needed {
        return Err(AlignmentFailure::new(
            FailureKind::TranscriptTooLong,
            format!("{} tokens need at least {needed} frames, emissions have {t_len}", tokens.len()),
        ));
    }

    let blank = emissions.blank_id();
    let neg_inf = S::neg_infinity();
    let stride = options.band_half_width.map_or(s_len, |w| (2 * w + 1).min(s_len));

    // Row bounds: states that can still start from {0,1} and finish in
    // {S-2, S-1}, intersected with the band when one is configured.
    let bounds = |t: usize| -> (usize, usize) {
        let lo = (s_len - 2).saturating_sub(2 * (t_len - 1 - t));
        let hi = (2 * t + 1).min(s_len - 1);
        match options.band_half_width {
            None => (lo, hi),
            Some(w) => {
                let center = if t_len > 1 { t * (s_len - 1) / (t_len - 1) } else { 0 };
                (lo.max(center.saturating_sub(w)), hi.min(center + w))
            }
        }
    };

    let mut prev = vec![neg_inf; s_len];
    let mut curr = vec![neg_inf; s_len];
    let mut backptr = vec![0u8; t_len * stride];
    let mut row_lo = vec![0usize; t_len];

    let (lo0, hi0) = bounds(0);
    if lo0 > hi0 {
        return Err(band_too_narrow());
    }
    row_lo[0] = lo0;
    for s in lo0..=hi0 {
        prev[s] = if s <= 1 { emissions.log_prob(0, ext[s]) } else { neg_inf };
    }
    let (mut prev_lo, mut prev_hi) = (lo0, hi0);

    for t in 1..t_len {
        let (lo, hi) = bounds(t);
        if lo > hi {
            return Err(band_too_narrow());
        }
        row_lo[t] = lo;
        for s in lo..=hi {
            // Candidates in ascending previous-state order so the smallest
            // index wins ties.
            let mut best = neg_inf;
            let mut step = 0u8;
            if s >= 2 && ext[s] != blank && ext[s] != ext[s - 2] && s - 2 >= prev_lo && s - 2 <= prev_hi
            {
                let v = prev[s - 2];
                if v > best {
                    best = v;
                    step = 2;
                }
            }
            if s > prev_lo && s - 1 <= prev_hi {
                let v = prev[s - 1];
                if v > best {
                    best = v;
                    step = 1;
                }
            }
            if s >= prev_lo && s <= prev_hi {
                let v = prev[s];
                if v > best {
                    best = v;
                    step = 0;
                }
            }
            curr[s] = best + emissions.log_prob(t, ext[s]);
            backptr[t * stride + (s - lo)] = step;
        }
        std::mem::swap(&mut prev, &mut curr);
        prev_lo = lo;
        prev_hi = hi;
    }

    // Final state: S-2 or S-1, smaller index on ties.
    let mut end_state = None;
    let mut best = neg_inf;
    for s in [s_len.saturating_sub(2), s_len - 1] {
        if s >= prev_lo && s <= prev_hi && prev[s] > best {
            best = prev[s];
            end_state = Some(s);
        }
    }
    let Some(mut state) = end_state else {
        return Err(AlignmentFailure::new(
            FailureKind::DegenerateEmissions,
            "every candidate path has score -inf",
        ));
    };

    let mut path = vec![0usize; t_len];
    path[t_len - 1] = state;
    for t in (1..t_len).rev() {
        let step = backptr[t * stride + (state - row_lo[t])] as usize;
        state -= step;
        path[t - 1] = state;
    }

    let frame_scores: Vec<S> = path
        .iter()
        .enumerate()
        .map(|(t, &s)| emissions.log_prob(t, ext[s]))
        .collect();
    debug_assert_eq!(
        frame_scores.iter().fold(S::zero(), |acc, &v| acc + v),
        best,
        "path score must equal the DP optimum"
    );
    Ok(ViterbiAlignment { path, score: best, frame_scores })
}

fn band_too_narrow() -> AlignmentFailure {
    AlignmentFailure::new(
        FailureKind::DegenerateEmissions,
        "no feasible path inside the configured band",
    )
}
