//! RTTM (Rich Transcription Time Mark) serialization.
//!
//! One `SPEAKER` record per segment:
//!
//! ```text
//! SPEAKER <file_id> 1 <start> <duration> <NA> <NA> <speaker> <NA> <NA>
//! ```
//!
//! Times are fixed at 3 decimals; lines are LF-terminated and ordered by
//! `(start, speaker)` within a file.

use std::collections::BTreeMap;

use super::{DiarAnnotation, DiarError, DiarSegment};

/// Renders one annotation as RTTM text. Empty annotations render as empty
/// text.
///
/// Lines are ordered by `(start, speaker)` as printed — two starts that
/// round to the same millisecond sort equal — so serialization is a fixed
/// point under parse-and-reserialize.
pub fn to_rttm(annotation: &DiarAnnotation) -> String {
    let printed = |x: f64| -> f64 { format!("{x:.3}").parse().expect("formatted float parses") };
    let mut segments: Vec<&DiarSegment> = annotation.segments().iter().collect();
    segments.sort_by(|a, b| {
        printed(a.start)
            .total_cmp(&printed(b.start))
            .then_with(|| a.speaker.cmp(&b.speaker))
            .then_with(|| printed(a.duration).total_cmp(&printed(b.duration)))
    });
    let mut out = String::new();
    for seg in segments {
        out.push_str(&format!(
            "SPEAKER {} 1 {:.3} {:.3} <NA> <NA> {} <NA> <NA>\n",
            annotation.file_id(),
            seg.start,
            seg.duration,
            seg.speaker
        ));
    }
    out
}

/// A parsed RTTM stream: one annotation per file id (sorted by id), plus
/// the count of non-`SPEAKER` lines that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct RttmDocument {
    pub annotations: Vec<DiarAnnotation>,
    pub skipped_lines: usize,
}

/// Parses RTTM text, grouping segments by file id.
///
/// Lines whose type field is not `SPEAKER` are skipped and counted;
/// `SPEAKER` lines must carry at least 9 fields with sane times.
pub fn parse_rttm(text: &str) -> Result<RttmDocument, DiarError> {
    let mut by_file: BTreeMap<String, Vec<(DiarSegment, usize)>> = BTreeMap::new();
    let mut skipped = 0usize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields[0] != "SPEAKER" {
            skipped += 1;
            continue;
        }
        if fields.len() < 9 {
            return Err(DiarError::MalformedRttmLine {
                line: line_no,
                reason: format!("expected at least 9 fields, got {}", fields.len()),
            });
        }
        let file_id = fields[1].to_string();
        let start: f64 = fields[3].parse().map_err(|_| DiarError::MalformedRttmLine {
            line: line_no,
            reason: format!("bad start {:?}", fields[3]),
        })?;
        let duration: f64 = fields[4].parse().map_err(|_| DiarError::MalformedRttmLine {
            line: line_no,
            reason: format!("bad duration {:?}", fields[4]),
        })?;
        if !start.is_finite() || start < 0.0 || !duration.is_finite() || duration <= 0.0 {
            return Err(DiarError::MalformedRttmLine {
                line: line_no,
                reason: format!("times out of range: start {start}, duration {duration}"),
            });
        }
        let speaker = fields[7].to_string();
        by_file
            .entry(file_id)
            .or_default()
            .push((DiarSegment::new(start, duration, speaker), line_no));
    }

    let mut annotations = Vec::with_capacity(by_file.len());
    for (file_id, mut rows) in by_file {
        rows.sort_by(|a, b| a.0.start.total_cmp(&b.0.start).then_with(|| a.0.speaker.cmp(&b.0.speaker)));
        let mut last: std::collections::HashMap<String, (f64, usize)> = std::collections::HashMap::new();
        for (seg, line) in &rows {
            if let Some(&(end, prev_line)) = last.get(&seg.speaker) {
                if seg.start < end {
                    return Err(DiarError::OverlapWithinSpeaker {
                        speaker: seg.speaker.clone(),
                        line_a: prev_line as u64,
                        line_b: *line as u64,
                    });
                }
            }
            let entry = last.entry(seg.speaker.clone()).or_insert((f64::NEG_INFINITY, *line));
            if seg.end() >= entry.0 {
                *entry = (seg.end(), *line);
            }
        }
        annotations.push(DiarAnnotation::new(file_id, rows.into_iter().map(|(s, _)| s).collect())?);
    }
    Ok(RttmDocument { annotations, skipped_lines: skipped })
}
