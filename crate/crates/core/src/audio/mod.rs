//! Audio decode/encode and standardization: WAV I/O, mono downmix,
//! sample-rate conversion, and deterministic gain augmentation.

mod augment;
mod resample;
mod wav;

pub use augment::{augment_gain, GainAugmentConfig, GainAugmentOutcome};
pub use resample::resample;
pub use wav::{encode_wav, parse_wav, probe_wav, read_wav, write_wav, WavInfo};

use crate::Scalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("malformed wav at byte {offset}: {reason}")]
    MalformedWav { offset: usize, reason: String },
    #[error("wav contains no audio frames")]
    EmptyAudio,
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("operation requires mono input (got {channels} channels)")]
    RequiresMono { channels: u16 },
    #[error("invalid audio buffer: {0}")]
    InvalidBuffer(String),
}

/// Interleaved PCM samples with rate/channel metadata.
///
/// Amplitudes are dimensionless in `[-1, 1]`; the constructor enforces the
/// structural invariants (finite samples, interleave multiple, positive
/// rate, at least one channel).
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer<S: Scalar = f32> {
    samples: Vec<S>,
    sample_rate: u32,
    channels: u16,
}

impl<S: Scalar> AudioBuffer<S> {
    pub fn new(samples: Vec<S>, sample_rate: u32, channels: u16) -> Result<Self, AudioError> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidBuffer("sample_rate must be positive".into()));
        }
        if channels == 0 {
            return Err(AudioError::InvalidBuffer("channels must be at least 1".into()));
        }
        if !samples.len().is_multiple_of(channels as usize) {
            return Err(AudioError::InvalidBuffer(format!(
                "{} samples is not a multiple of {} channels",
                samples.len(),
                channels
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(AudioError::InvalidBuffer(format!("non-finite sample at index {i}")));
        }
        Ok(Self { samples, sample_rate, channels })
    }

    /// Single-channel buffer from raw samples.
    pub fn mono(samples: Vec<S>, sample_rate: u32) -> Result<Self, AudioError> {
        Self::new(samples, sample_rate, 1)
    }

    pub fn samples(&self) -> &[S] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<S> {
        self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channels(&self) -> u16 {
        self.channels
    }

    /// Frame count (samples per channel).
    pub fn frames(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    pub fn duration_secs(&self) -> f64 {
        self.frames() as f64 / self.sample_rate as f64
    }
}

/// Averages the channels of each frame into a mono buffer.
///
/// Mono input is returned unchanged, bit for bit.
pub fn downmix_mono<S: Scalar>(buffer: &AudioBuffer<S>) -> AudioBuffer<S> {
    if buffer.channels == 1 {
        return buffer.clone();
    }
    let ch = buffer.channels as usize;
    let inv = S::from_usize(ch).expect("channel count fits scalar").recip();
    let samples = buffer
        .samples
        .chunks_exact(ch)
        .map(|frame| frame.iter().fold(S::zero(), |acc, &s| acc + s) * inv)
        .collect();
    AudioBuffer {
        samples,
        sample_rate: buffer.sample_rate,
        channels: 1,
    }
}

/// Scales every sample by `10^(gain_db/20)` and clamps to `[-1, 1]`.
pub fn apply_gain<S: Scalar>(buffer: &AudioBuffer<S>, gain_db: f64) -> AudioBuffer<S> {
    let factor = S::from_f64(10f64.powf(gain_db / 20.0)).expect("gain factor fits scalar");
    let one = S::one();
    let samples = buffer
        .samples
        .iter()
        .map(|&s| {
            let scaled = s * factor;
            if scaled > one {
                one
            } else if scaled < -one {
                -one
            } else {
                scaled
            }
        })
        .collect();
    AudioBuffer {
        samples,
        sample_rate: buffer.sample_rate,
        channels: buffer.channels,
    }
}
