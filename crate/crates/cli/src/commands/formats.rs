//! `longform csv2rttm` and `longform window`.

use std::path::Path;

use anyhow::Context;
use longform_core::diar::{parse_csv, parse_rttm, to_rttm, window_annotation, DiarAnnotation};

use super::{usage, CommandResult};
use crate::util::{list_files, write_atomic};
use crate::{Ctx, EXIT_FAILURES, EXIT_OK};

pub fn csv2rttm(ctx: &Ctx, input: &Path, out: &Path) -> CommandResult {
    let files = if input.is_dir() {
        list_files(input, "csv").map_err(super::CommandError::Run)?
    } else if input.is_file() {
        vec![input.to_path_buf()]
    } else {
        return Err(usage(format!("{} does not exist", input.display())));
    };
    if files.is_empty() {
        return Err(usage(format!("no .csv files under {}", input.display())));
    }

    let mut annotations: Vec<DiarAnnotation> = Vec::with_capacity(files.len());
    for path in &files {
        let ann = parse_csv(path)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(super::CommandError::Run)?;
        annotations.push(ann);
    }
    annotations.sort_by(|a, b| a.file_id().cmp(b.file_id()));

    let mut text = String::new();
    let mut segments = 0usize;
    for ann in &annotations {
        segments += ann.segments().len();
        text.push_str(&to_rttm(ann));
    }
    write_atomic(out, text.as_bytes()).map_err(super::CommandError::Run)?;

    if ctx.json {
        println!(
            "{}",
            serde_json::json!({
                "files": annotations.len(),
                "segments": segments,
                "out": out.display().to_string(),
            })
        );
    } else {
        eprintln!("csv2rttm: wrote {segments} segments for {} files to {}", annotations.len(), out.display());
    }
    Ok(EXIT_OK)
}

pub fn window(
    ctx: &Ctx,
    rttm: &Path,
    duration: f64,
    step: Option<f64>,
    total_duration: Option<f64>,
    out: Option<&Path>,
) -> CommandResult {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(usage(format!("--duration must be positive, got {duration}")));
    }
    let step = step.unwrap_or(duration);
    if !(step.is_finite() && step > 0.0) {
        return Err(usage(format!("--step must be positive, got {step}")));
    }
    let text = std::fs::read_to_string(rttm)
        .with_context(|| format!("reading {}", rttm.display()))
        .map_err(super::CommandError::Run)?;
    let doc = parse_rttm(&text)
        .with_context(|| format!("parsing {}", rttm.display()))
        .map_err(super::CommandError::Run)?;

    let mut lines = String::new();
    let mut failed = 0usize;
    let mut window_count = 0usize;
    for ann in &doc.annotations {
        let total = total_duration.unwrap_or_else(|| ann.max_end());
        match window_annotation(ann, duration, step, total) {
            Err(e) => {
                failed += 1;
                eprintln!("window: {}: {e}", ann.file_id());
            }
            Ok(windows) => {
                for (window_start, segments) in windows {
                    window_count += 1;
                    lines.push_str(&serde_json::to_string(&serde_json::json!({
                        "file_id": ann.file_id(),
                        "window_start": window_start,
                        "duration": duration,
                        "segments": segments,
                    })).expect("window record serializes"));
                    lines.push('\n');
                }
            }
        }
    }

    match out {
        Some(path) => write_atomic(path, lines.as_bytes()).map_err(super::CommandError::Run)?,
        None => print!("{lines}"),
    }
    if ctx.json {
        println!(
            "{}",
            serde_json::json!({
                "files": doc.annotations.len(),
                "windows": window_count,
                "failed": failed,
                "skipped_lines": doc.skipped_lines,
            })
        );
    } else {
        eprintln!(
            "window: {window_count} windows from {} files ({failed} failed, {} non-SPEAKER lines skipped)",
            doc.annotations.len(),
            doc.skipped_lines
        );
    }
    if ctx.strict && failed > 0 {
        return Ok(EXIT_FAILURES);
    }
    Ok(EXIT_OK)
}
