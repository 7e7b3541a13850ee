//! Energy-based voice activity detection with merge/discard smoothing.

use crate::audio::AudioBuffer;
use crate::Scalar;

/// Frame/threshold parameters for [`detect_speech`]. Thresholds are dBFS
/// (decibels relative to full-scale amplitude 1.0).
#[derive(Debug, Clone, PartialEq)]
pub struct VadConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub threshold_db: f64,
    pub min_speech_ms: f64,
    pub min_silence_ms: f64,
}

impl Default for VadConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            threshold_db: -40.0,
            min_speech_ms: 200.0,
            min_silence_ms: 300.0,
        }
    }
}

impl VadConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("frame_ms", self.frame_ms),
            ("hop_ms", self.hop_ms),
            ("min_speech_ms", self.min_speech_ms),
            ("min_silence_ms", self.min_silence_ms),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.threshold_db.is_finite() {
            return Err(format!("threshold_db must be finite, got {}", self.threshold_db));
        }
        if self.hop_ms > self.frame_ms {
            return Err(format!(
                "hop_ms {} must not exceed frame_ms {}",
                self.hop_ms, self.frame_ms
            ));
        }
        Ok(())
    }
}

/// Finds speech intervals by per-frame RMS energy.
///
/// Frames whose energy in dBFS exceeds `threshold_db` are speech; speech
/// runs separated by less than `min_silence_ms` merge, and merged runs
/// shorter than `min_speech_ms` are discarded. Returns disjoint, ordered
/// `(start, end)` intervals in seconds. Silence yields an empty list.
pub fn detect_speech<S: Scalar>(buffer: &AudioBuffer<S>, config: &VadConfig) -> Vec<(f64, f64)> {
    assert_eq!(buffer.channels(), 1, "detect_speech requires mono input");
    config.validate().expect("invalid VadConfig");

    let rate = buffer.sample_rate() as f64;
    let frame_len = ((config.frame_ms / 1000.0) * rate).round() as usize;
    let hop_len = ((config.hop_ms / 1000.0) * rate).round() as usize;
    let samples = buffer.samples();
    if frame_len == 0 || hop_len == 0 || samples.len() < frame_len {
        return Vec::new();
    }

    let frame_secs = frame_len as f64 / rate;
    let hop_secs = hop_len as f64 / rate;
    let n_frames = (samples.len() - frame_len) / hop_len + 1;

    // Raw speech runs as (start, end) in seconds; frame k spans
    // [k*hop, k*hop + frame).
    let mut runs: Vec<(f64, f64)> = Vec::new();
    let mut current: Option<(f64, f64)> = None;
    for k in 0..n_frames {
        let window = &samples[k * hop_len..k * hop_len + frame_len];
        let energy: f64 =
            window.iter().map(|s| s.to_f64().unwrap()).map(|s| s * s).sum::<f64>() / frame_len as f64;
        let rms = energy.sqrt().max(1e-10);
        let dbfs = 20.0 * rms.log10();
        if dbfs > config.threshold_db {
            let start = k as f64 * hop_secs;
            let end = start + frame_secs;
            current = match current {
                Some((s, _)) => Some((s, end)),
                None => Some((start, end)),
            };
        } else if let Some(run) = current.take() {
            runs.push(run);
        }
    }
    if let Some(run) = current {
        runs.push(run);
    }

    // Merge runs across short gaps, then drop short results.
    let min_silence = config.min_silence_ms / 1000.0;
    let min_speech = config.min_speech_ms / 1000.0;
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(runs.len());
    for run in runs {
        match merged.last_mut() {
            Some(last) if run.0 - last.1 < min_silence => last.1 = run.1,
            _ => merged.push(run),
        }
    }
    merged.retain(|(s, e)| e - s >= min_speech);
    merged
}
