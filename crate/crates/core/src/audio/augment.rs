//! Seeded stochastic gain augmentation.

use rand_core::{RngCore, SeedableRng};

use super::{apply_gain, AudioBuffer, AudioError};
use crate::Scalar;

/// Gain augmentation parameters: a Bernoulli gate and a uniform dB range.
#[derive(Debug, Clone, PartialEq)]
pub struct GainAugmentConfig {
    pub min_db: f64,
    pub max_db: f64,
    pub probability: f64,
    pub seed: u64,
}

impl GainAugmentConfig {
    pub fn new(min_db: f64, max_db: f64, probability: f64, seed: u64) -> Result<Self, AudioError> {
        if !(min_db.is_finite() && max_db.is_finite()) || min_db > max_db {
            return Err(AudioError::InvalidBuffer(format!(
                "gain range [{min_db}, {max_db}] is invalid"
            )));
        }
        if !(0.0..=1.0).contains(&probability) {
            return Err(AudioError::InvalidBuffer(format!(
                "probability {probability} outside [0, 1]"
            )));
        }
        Ok(Self { min_db, max_db, probability, seed })
    }
}

/// Result of one augmentation draw.
#[derive(Debug, Clone, PartialEq)]
pub struct GainAugmentOutcome<S: Scalar = f32> {
    pub buffer: AudioBuffer<S>,
    pub applied: bool,
    pub gain_db: Option<f64>,
}

/// Uniform in [0, 1) from the top 53 bits of one 64-bit draw.
fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Applies a random gain with `config.probability`, drawn uniformly from
/// `[min_db, max_db]`.
///
/// Exactly two values are drawn from the seeded generator per call (gate
/// first, then gain), whether or not the gain is applied, so outcomes are a
/// pure function of `(buffer, config)`.
pub fn augment_gain<S: Scalar>(buffer: &AudioBuffer<S>, config: &GainAugmentConfig) -> GainAugmentOutcome<S> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let gate = unit_f64(&mut rng);
    let span = unit_f64(&mut rng);
    let applied = gate < config.probability;
    if applied {
        let gain_db = config.min_db + (config.max_db - config.min_db) * span;
        GainAugmentOutcome {
            buffer: apply_gain(buffer, gain_db),
            applied: true,
            gain_db: Some(gain_db),
        }
    } else {
        GainAugmentOutcome {
            buffer: buffer.clone(),
            applied: false,
            gain_db: None,
        }
    }
}
