//! `longform manifest`: dataset audit.

use std::path::Path;

use anyhow::Context;
use longform_core::manifest::scan_dataset;

use super::{usage, CommandResult};
use crate::{Ctx, EXIT_FAILURES, EXIT_OK};

pub fn run(ctx: &Ctx, dir: &Path, limit: f64) -> CommandResult {
    if !(limit.is_finite() && limit > 0.0) {
        return Err(usage(format!("--limit must be positive, got {limit}")));
    }
    if !dir.is_dir() {
        return Err(usage(format!("{} is not a directory", dir.display())));
    }
    let report = scan_dataset(dir, limit)
        .with_context(|| format!("scanning {}", dir.display()))
        .map_err(super::CommandError::Run)?;

    if ctx.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        let rates = report
            .sample_rate_histogram
            .iter()
            .map(|(rate, n)| format!("{rate} Hz x{n}"))
            .collect::<Vec<_>>()
            .join(", ");
        let channels = report
            .channel_histogram
            .iter()
            .map(|(ch, n)| format!("{ch} ch x{n}"))
            .collect::<Vec<_>>()
            .join(", ");
        let row = |name: &str, value: String| println!("{name:<21}{value}");
        row("Attribute", "Value".into());
        row("Total Utterances", report.utterance_count.to_string());
        row(
            "Total Duration",
            format!("{:.2} s ({:.3} h)", report.total_duration, report.total_hours()),
        );
        row("Sampling Rates", if rates.is_empty() { "-".into() } else { rates });
        row("Channels", if channels.is_empty() { "-".into() } else { channels });
        row(&format!("Over {limit:.1}s"), report.over_limit.len().to_string());
        for path in &report.over_limit {
            println!("  over-limit: {path}");
        }
        row("Missing Transcripts", report.missing_transcripts.len().to_string());
        for path in &report.missing_transcripts {
            println!("  missing: {path}");
        }
        row("Decode Errors", report.decode_errors.len().to_string());
        for failure in &report.decode_errors {
            println!("  error: {} ({})", failure.path, failure.error);
        }
    }
    if ctx.strict && !report.decode_errors.is_empty() {
        return Ok(EXIT_FAILURES);
    }
    Ok(EXIT_OK)
}
