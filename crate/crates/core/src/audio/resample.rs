//! Windowed-sinc polyphase sample-rate conversion.
//!
//! A Blackman-windowed sinc kernel (32 taps per phase, 256 phases with
//! linear interpolation between adjacent phases) is applied around each
//! fractional input position. The cutoff tracks the lower of the two
//! Nyquist frequencies so downsampling is anti-aliased. Per-output
//! coefficient normalization keeps DC gain at exactly one.

use super::{AudioBuffer, AudioError};
use crate::Scalar;

const TAPS: usize = 32;
const PHASES: usize = 256;
const ROLLOFF: f64 = 0.95;

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Blackman window over [-half, half], zero at the edges.
fn blackman(x: f64, half: f64) -> f64 {
    if x.abs() >= half {
        return 0.0;
    }
    let t = std::f64::consts::PI * x / half;
    0.42 + 0.5 * t.cos() + 0.08 * (2.0 * t).cos()
}

fn build_table(cutoff: f64) -> Vec<f64> {
    let half = TAPS as f64 / 2.0;
    (0..=TAPS * PHASES)
        .map(|i| {
            let x = -half + i as f64 / PHASES as f64;
            2.0 * cutoff * sinc(2.0 * cutoff * x) * blackman(x, half)
        })
        .collect()
}

/// Resamples a mono buffer to `target_rate`.
///
/// Output length is `round(input_length * target_rate / input_rate)`;
/// amplitudes are clamped back to `[-1, 1]` after filtering. A buffer
/// already at the target rate is returned unchanged.
pub fn resample<S: Scalar>(buffer: &AudioBuffer<S>, target_rate: u32) -> Result<AudioBuffer<S>, AudioError> {
    assert!(target_rate > 0, "target_rate must be positive");
    if buffer.channels() != 1 {
        return Err(AudioError::RequiresMono { channels: buffer.channels() });
    }
    if buffer.sample_rate() == target_rate {
        return Ok(buffer.clone());
    }

    let in_rate = buffer.sample_rate() as f64;
    let out_rate = target_rate as f64;
    let input = buffer.samples();
    let out_len = (input.len() as f64 * out_rate / in_rate).round() as usize;

    // Cutoff at the lower Nyquist, normalized to the input rate.
    let cutoff = 0.5 * ROLLOFF * (out_rate / in_rate).min(1.0);
    let table = build_table(cutoff);

    let ratio = in_rate / out_rate;
    let half = (TAPS / 2) as isize;
    let len = input.len() as isize;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let pos = n as f64 * ratio;
        let base = pos.floor();
        let frac = pos - base;
        let base = base as isize;
        let fp = frac * PHASES as f64;
        let q = fp.floor() as usize;
        let r = fp - q as f64;

        let mut acc = 0.0;
        let mut norm = 0.0;
        for k in (1 - half)..=half {
            let i = ((k + half) as usize) * PHASES - q;
            let coeff = table[i] * (1.0 - r) + table[i - 1] * r;
            norm += coeff;
            let src = base + k;
            if src >= 0 && src < len {
                acc += input[src as usize].to_f64().unwrap() * coeff;
            }
        }
        let v = (acc / norm).clamp(-1.0, 1.0);
        out.push(S::from_f64(v).unwrap());
    }
    AudioBuffer::new(out, target_rate, 1)
}
