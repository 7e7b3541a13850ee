//! `longform align`: batch forced alignment of emission/transcript pairs.

use std::path::PathBuf;

use anyhow::Context;
use longform_core::align::{
    alignments_to_jsonl, force_align_with, load_emissions, AlignError, AlignOptions,
    TextEmissionOptions,
};
use longform_core::text::{TokenTable, UnknownPolicy};

use super::{usage, CommandResult};
use crate::util::{failures_csv, list_files, run_pool, stem_of, write_atomic, FailureRow};
use crate::{Ctx, EXIT_FAILURES, EXIT_OK};

pub struct Args {
    pub audio_dir: PathBuf,
    pub emissions_dir: PathBuf,
    pub transcripts_dir: PathBuf,
    pub out_dir: PathBuf,
    pub table: Option<PathBuf>,
    pub blank_id: u32,
    pub frame_duration: Option<f64>,
    pub unknown: String,
    pub band: Option<usize>,
}

enum FileOutcome {
    Aligned { stem: String, jsonl: String, skipped: usize },
    Failed(FailureRow),
}

pub fn run(ctx: &Ctx, args: Args) -> CommandResult {
    let policy = match args.unknown.as_str() {
        "skip" => UnknownPolicy::Skip,
        "error" => UnknownPolicy::Error,
        other => return Err(usage(format!("--unknown must be `skip` or `error`, got {other:?}"))),
    };
    if let Some(fd) = args.frame_duration {
        if !(fd.is_finite() && fd > 0.0) {
            return Err(usage(format!("--frame-duration must be positive, got {fd}")));
        }
    }
    for dir in [&args.audio_dir, &args.emissions_dir, &args.transcripts_dir] {
        if !dir.is_dir() {
            return Err(usage(format!("{} is not a directory", dir.display())));
        }
    }
    let table_path = args
        .table
        .clone()
        .or_else(|| ctx.settings.token_table.clone())
        .ok_or_else(|| usage("no token table: pass --table or set token-table in the config"))?;
    let table = TokenTable::load(&table_path, args.blank_id, policy)
        .with_context(|| format!("loading token table {}", table_path.display()))
        .map_err(super::CommandError::Run)?;

    let emission_files = list_files(&args.emissions_dir, "ctce").map_err(super::CommandError::Run)?;
    if emission_files.is_empty() {
        eprintln!("align: no .ctce files in {}", args.emissions_dir.display());
        return Ok(EXIT_OK);
    }
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .map_err(super::CommandError::Run)?;

    let text_opts = TextEmissionOptions {
        blank_id: args.blank_id,
        frame_duration: args.frame_duration.unwrap_or(ctx.settings.frame_duration),
        normalized: false,
    };
    let options = AlignOptions { band_half_width: args.band };
    if args.band.is_some() {
        eprintln!("align: banded decoding is an approximation; paths outside the band are lost");
    }

    let outcomes = run_pool(ctx.settings.workers, "align", emission_files, |path| {
        let stem = stem_of(path);
        let fail = |kind: &str, detail: String| {
            FileOutcome::Failed(FailureRow { file: stem.clone(), kind: kind.into(), detail })
        };
        if !args.audio_dir.join(format!("{stem}.wav")).is_file() {
            return fail("missing_audio", format!("{stem}.wav not found"));
        }
        let transcript_path = args.transcripts_dir.join(format!("{stem}.txt"));
        let transcript = match std::fs::read_to_string(&transcript_path) {
            Ok(t) => t,
            Err(e) => return fail("missing_transcript", format!("{}: {e}", transcript_path.display())),
        };
        let mut emissions = match load_emissions::<f64>(path, text_opts) {
            Ok(m) => m,
            Err(e) => return fail("malformed_emissions", e.to_string()),
        };
        if let Some(fd) = args.frame_duration {
            emissions = match emissions.with_frame_duration(fd) {
                Ok(m) => m,
                Err(e) => return fail("malformed_emissions", e.to_string()),
            };
        }
        match force_align_with(&emissions, &transcript, &table, &options) {
            Ok(alignment) => FileOutcome::Aligned {
                stem,
                jsonl: alignments_to_jsonl(&alignment.words),
                skipped: alignment.skipped.len(),
            },
            Err(AlignError::Failure(f)) => fail(f.kind.as_str(), f.detail),
            Err(AlignError::Token(e)) => fail("unknown_grapheme", e.to_string()),
            Err(other) => fail("internal", other.to_string()),
        }
    })
    .map_err(super::CommandError::Run)?;

    let mut failures: Vec<FailureRow> = Vec::new();
    let mut aligned = 0usize;
    let mut skipped_words = 0usize;
    for outcome in outcomes {
        match outcome {
            FileOutcome::Aligned { stem, jsonl, skipped } => {
                let out_path = args.out_dir.join(format!("{stem}.jsonl"));
                write_atomic(&out_path, jsonl.as_bytes()).map_err(super::CommandError::Run)?;
                aligned += 1;
                skipped_words += skipped;
            }
            FileOutcome::Failed(row) => failures.push(row),
        }
    }
    failures.sort_by(|a, b| a.file.cmp(&b.file));
    write_atomic(&args.out_dir.join("failures.csv"), failures_csv(&failures).as_bytes())
        .map_err(super::CommandError::Run)?;

    if ctx.json {
        println!(
            "{}",
            serde_json::json!({
                "aligned": aligned,
                "failed": failures.len(),
                "skipped_words": skipped_words,
            })
        );
    } else {
        eprintln!("align: {aligned} aligned, {} failed, {skipped_words} words skipped", failures.len());
    }
    if ctx.strict && !failures.is_empty() {
        return Ok(EXIT_FAILURES);
    }
    Ok(EXIT_OK)
}
