//! Key-value config file and the flags > config > built-ins precedence.
//!
//! The file holds one `key = value` pair per line; `#` starts a comment.
//! Recognized keys:
//!
//! ```text
//! max-chunk-duration  seconds      (default 29.5)
//! frame-duration      seconds      (default 0.02)
//! vad-frame-ms        milliseconds (default 25)
//! vad-hop-ms          milliseconds (default 10)
//! vad-threshold-db    dBFS         (default -40)
//! vad-min-speech-ms   milliseconds (default 200)
//! vad-min-silence-ms  milliseconds (default 300)
//! gain-min-db         decibels     (default -6)
//! gain-max-db         decibels     (default 6)
//! gain-probability    0..1         (default 0.4)
//! seed                u64          (default 0)
//! collar              seconds      (default 0)
//! workers             count        (default 1)
//! token-table         path
//! ```
//!
//! Unknown keys are rejected so typos fail loudly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

const KNOWN_KEYS: &[&str] = &[
    "max-chunk-duration",
    "frame-duration",
    "vad-frame-ms",
    "vad-hop-ms",
    "vad-threshold-db",
    "vad-min-speech-ms",
    "vad-min-silence-ms",
    "gain-min-db",
    "gain-max-db",
    "gain-probability",
    "seed",
    "collar",
    "workers",
    "token-table",
];

/// Raw values from the config file, before flag overrides.
#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let body = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (idx, raw) in body.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("config line {}: expected `key = value`", idx + 1))?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!("config line {}: unknown key {key:?}", idx + 1);
            }
            values.insert(key.to_string(), value.to_string());
        }
        Ok(Self { values })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("config key {key}: bad value {raw:?}: {e}")),
        }
    }
}

/// Fully resolved settings shared across subcommands.
#[derive(Debug, Clone)]
pub struct Settings {
    pub max_chunk_duration: f64,
    pub frame_duration: f64,
    pub vad: longform_core::VadConfig,
    pub gain_min_db: f64,
    pub gain_max_db: f64,
    pub gain_probability: f64,
    pub seed: u64,
    pub collar: f64,
    pub workers: usize,
    pub token_table: Option<PathBuf>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            max_chunk_duration: 29.5,
            frame_duration: 0.02,
            vad: longform_core::VadConfig::default(),
            gain_min_db: -6.0,
            gain_max_db: 6.0,
            gain_probability: 0.4,
            seed: 0,
            collar: 0.0,
            workers: 1,
            token_table: None,
        }
    }
}

impl Settings {
    /// Applies config-file values over the built-in defaults. Flag
    /// overrides happen at each command site (flags > config > built-ins).
    pub fn from_config(config: &ConfigFile) -> Result<Self> {
        let mut s = Settings::default();
        if let Some(v) = config.parse("max-chunk-duration")? {
            s.max_chunk_duration = v;
        }
        if let Some(v) = config.parse("frame-duration")? {
            s.frame_duration = v;
        }
        if let Some(v) = config.parse("vad-frame-ms")? {
            s.vad.frame_ms = v;
        }
        if let Some(v) = config.parse("vad-hop-ms")? {
            s.vad.hop_ms = v;
        }
        if let Some(v) = config.parse("vad-threshold-db")? {
            s.vad.threshold_db = v;
        }
        if let Some(v) = config.parse("vad-min-speech-ms")? {
            s.vad.min_speech_ms = v;
        }
        if let Some(v) = config.parse("vad-min-silence-ms")? {
            s.vad.min_silence_ms = v;
        }
        if let Some(v) = config.parse("gain-min-db")? {
            s.gain_min_db = v;
        }
        if let Some(v) = config.parse("gain-max-db")? {
            s.gain_max_db = v;
        }
        if let Some(v) = config.parse("gain-probability")? {
            s.gain_probability = v;
        }
        if let Some(v) = config.parse("seed")? {
            s.seed = v;
        }
        if let Some(v) = config.parse("collar")? {
            s.collar = v;
        }
        if let Some(v) = config.parse("workers")? {
            s.workers = v;
        }
        if let Some(v) = config.parse::<String>("token-table")? {
            s.token_table = Some(PathBuf::from(v));
        }
        Ok(s)
    }
}
