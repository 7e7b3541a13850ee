//! CSV annotation parsing.
//!
//! Expected header columns (case-insensitive): `start`, `end`, `speaker`.
//! `start_time`/`end_time` and `begin`/`finish` are accepted aliases; extra
//! columns are ignored. An optional `file` column overrides the file id,
//! which otherwise derives from the CSV filename stem.

use std::path::Path;

use super::{DiarAnnotation, DiarError, DiarSegment};

struct Columns {
    start: usize,
    end: usize,
    speaker: usize,
    file: Option<usize>,
}

fn resolve_columns(headers: &csv::StringRecord) -> Result<Columns, DiarError> {
    let mut start = None;
    let mut end = None;
    let mut speaker = None;
    let mut file = None;
    for (i, name) in headers.iter().enumerate() {
        match name.trim().to_ascii_lowercase().as_str() {
            "start" | "start_time" | "begin" => start = start.or(Some(i)),
            "end" | "end_time" | "finish" => end = end.or(Some(i)),
            "speaker" => speaker = speaker.or(Some(i)),
            "file" => file = file.or(Some(i)),
            _ => {}
        }
    }
    Ok(Columns {
        start: start.ok_or_else(|| DiarError::MissingColumn("start".into()))?,
        end: end.ok_or_else(|| DiarError::MissingColumn("end".into()))?,
        speaker: speaker.ok_or_else(|| DiarError::MissingColumn("speaker".into()))?,
        file,
    })
}

fn bad_row(line: u64, reason: impl Into<String>) -> DiarError {
    DiarError::MalformedRow { line, reason: reason.into() }
}

/// Parses CSV text into one annotation; `default_file_id` applies when no
/// `file` column is present.
pub fn parse_csv_text(text: &str, default_file_id: &str) -> Result<DiarAnnotation, DiarError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| bad_row(1, e.to_string()))?
        .clone();
    let cols = resolve_columns(&headers)?;

    let mut file_id: Option<(String, u64)> = None;
    let mut rows: Vec<(DiarSegment, u64)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| bad_row(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| record.get(i).ok_or_else(|| bad_row(line, format!("missing field {i}")));

        let start: f64 = field(cols.start)?
            .parse()
            .map_err(|_| bad_row(line, format!("bad start {:?}", record.get(cols.start).unwrap_or(""))))?;
        let end: f64 = field(cols.end)?
            .parse()
            .map_err(|_| bad_row(line, format!("bad end {:?}", record.get(cols.end).unwrap_or(""))))?;
        if !start.is_finite() || !end.is_finite() {
            return Err(bad_row(line, "non-finite time"));
        }
        if start < 0.0 {
            return Err(bad_row(line, format!("negative start {start}")));
        }
        if end <= start {
            return Err(bad_row(line, format!("end {end} not after start {start}")));
        }
        let speaker = field(cols.speaker)?;
        if speaker.is_empty() || speaker.chars().any(char::is_whitespace) {
            return Err(bad_row(line, format!("bad speaker label {speaker:?}")));
        }
        if let Some(fi) = cols.file {
            let value = field(fi)?;
            match &file_id {
                None => file_id = Some((value.to_string(), line)),
                Some((existing, _)) if existing != value => {
                    return Err(bad_row(line, format!("conflicting file ids {existing:?} and {value:?}")));
                }
                _ => {}
            }
        }
        rows.push((DiarSegment::new(start, end - start, speaker), line));
    }

    // Same-speaker overlap is reported with the two offending line numbers.
    rows.sort_by(|a, b| a.0.start.total_cmp(&b.0.start).then_with(|| a.0.speaker.cmp(&b.0.speaker)));
    let mut last: std::collections::HashMap<&str, (f64, u64)> = std::collections::HashMap::new();
    for (seg, line) in &rows {
        if let Some(&(end, prev_line)) = last.get(seg.speaker.as_str()) {
            if seg.start < end {
                return Err(DiarError::OverlapWithinSpeaker {
                    speaker: seg.speaker.clone(),
                    line_a: prev_line,
                    line_b: *line,
                });
            }
        }
        let entry = last.entry(seg.speaker.as_str()).or_insert((f64::NEG_INFINITY, *line));
        if seg.end() >= entry.0 {
            *entry = (seg.end(), *line);
        }
    }

    let id = file_id.map(|(v, _)| v).unwrap_or_else(|| default_file_id.to_string());
    DiarAnnotation::new(id, rows.into_iter().map(|(seg, _)| seg).collect())
}

/// Reads and parses one CSV annotation file.
pub fn parse_csv(path: impl AsRef<Path>) -> Result<DiarAnnotation, DiarError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "unknown".to_string());
    parse_csv_text(&text, &stem)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_schema() {
        let ann = parse_csv_text("start,end,speaker\n0.0,1.5,S1\n", "rec1").unwrap();
        assert_eq!(ann.file_id(), "rec1");
        assert_eq!(ann.segments().len(), 1);
        let seg = &ann.segments()[0];
        assert_eq!(seg.start, 0.0);
        assert_eq!(seg.duration, 1.5);
        assert_eq!(seg.speaker, "S1");
    }

    #[test]
    fn zero_duration_row_is_malformed() {
        let err = parse_csv_text("start,end,speaker\n2.0,2.0,S1\n", "rec").unwrap_err();
        assert!(matches!(err, DiarError::MalformedRow { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn overlap_within_speaker_reports_lines() {
        let err = parse_csv_text("start,end,speaker\n0,2,S1\n1,3,S1\n", "rec").unwrap_err();
        match err {
            DiarError::OverlapWithinSpeaker { speaker, line_a, line_b } => {
                assert_eq!(speaker, "S1");
                assert_eq!((line_a, line_b), (2, 3));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn aliases_and_extra_columns() {
        let ann = parse_csv_text(
            "Begin,Finish,speaker,notes\n0.5,2.0,S2,hello world\n",
            "rec",
        )
        .unwrap();
        assert_eq!(ann.segments()[0].duration, 1.5);

        let ann = parse_csv_text("start_time,end_time,SPEAKER\n1,2,S1\n", "rec").unwrap();
        assert_eq!(ann.segments()[0].start, 1.0);
    }

    #[test]
    fn file_column_overrides_stem() {
        let ann = parse_csv_text("start,end,speaker,file\n0,1,S1,meeting_7\n", "rec").unwrap();
        assert_eq!(ann.file_id(), "meeting_7");

        let err =
            parse_csv_text("start,end,speaker,file\n0,1,S1,a\n2,3,S1,b\n", "rec").unwrap_err();
        assert!(matches!(err, DiarError::MalformedRow { line: 3, .. }));
    }

    #[test]
    fn missing_column_is_named() {
        let err = parse_csv_text("start,speaker\n0,S1\n", "rec").unwrap_err();
        match err {
            DiarError::MissingColumn(name) => assert_eq!(name, "end"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_csv_uses_filename_stem() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("session_03.csv");
        std::fs::write(&path, "start,end,speaker\n0,4,S1\n").unwrap();
        let ann = parse_csv(&path).unwrap();
        assert_eq!(ann.file_id(), "session_03");
    }
}
