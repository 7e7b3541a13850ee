//! Dataset auditing: walk a chunked dataset directory and report the
//! summary statistics (counts, durations, rate/channel histograms,
//! over-limit files, missing transcripts).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

use crate::audio::{probe_wav, WavInfo};

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot scan {path}: {source}")]
    Walk {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One undecodable file, kept in the report instead of aborting the scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeFailure {
    pub path: String,
    pub error: String,
}

/// Summary statistics for a chunked dataset directory.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct ManifestReport {
    /// Audio files successfully probed.
    pub utterance_count: usize,
    /// Sum of per-file durations in seconds.
    pub total_duration: f64,
    pub sample_rate_histogram: BTreeMap<u32, usize>,
    pub channel_histogram: BTreeMap<u16, usize>,
    /// Files with duration >= the limit.
    pub over_limit: Vec<String>,
    /// Audio files lacking a same-stem `.txt` transcript.
    pub missing_transcripts: Vec<String>,
    pub decode_errors: Vec<DecodeFailure>,
}

impl ManifestReport {
    pub fn total_hours(&self) -> f64 {
        self.total_duration / 3600.0
    }
}

fn relative_display(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.to_string_lossy().replace(std::path::MAIN_SEPARATOR, "/")
}

/// Walks `*.wav` under `dir` (recursively), probing headers only, and
/// flags files with duration >= `limit` seconds.
///
/// Transcripts pair by filename stem in the same directory. Decode errors
/// never abort the scan. All lists come back sorted by path so reports are
/// deterministic.
pub fn scan_dataset(dir: impl AsRef<Path>, limit: f64) -> Result<ManifestReport, ManifestError> {
    let root = dir.as_ref();
    let mut wavs: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(root).follow_links(true) {
        let entry = entry.map_err(|e| ManifestError::Walk {
            path: root.display().to_string(),
            source: e.into(),
        })?;
        if entry.file_type().is_file()
            && entry
                .path()
                .extension()
                .is_some_and(|ext| ext.eq_ignore_ascii_case("wav"))
        {
            wavs.push(entry.into_path());
        }
    }
    wavs.sort();

    let probed: Vec<(PathBuf, Result<WavInfo, String>)> = wavs
        .par_iter()
        .map(|path| (path.clone(), probe_wav(path).map_err(|e| e.to_string())))
        .collect();

    let mut report = ManifestReport::default();
    for (path, outcome) in probed {
        let display = relative_display(root, &path);
        match outcome {
            Err(error) => report.decode_errors.push(DecodeFailure { path: display, error }),
            Ok(info) => {
                report.utterance_count += 1;
                report.total_duration += info.duration_secs();
                *report.sample_rate_histogram.entry(info.sample_rate).or_insert(0) += 1;
                *report.channel_histogram.entry(info.channels).or_insert(0) += 1;
                if info.duration_secs() >= limit {
                    report.over_limit.push(display.clone());
                }
                if !path.with_extension("txt").is_file() {
                    report.missing_transcripts.push(display);
                }
            }
        }
    }
    Ok(report)
}
