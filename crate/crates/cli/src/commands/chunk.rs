//! `longform chunk`: cut aligned audio into word-preserving chunks.

use std::path::PathBuf;

use anyhow::Context;
use longform_core::align::alignments_from_jsonl;
use longform_core::audio::{downmix_mono, encode_wav, read_wav, AudioBuffer};
use longform_core::chunk::{chunk_words, extract_chunk_audio, ChunkPolicy};

use super::{usage, CommandResult};
use crate::util::{csv_quote, failures_csv, list_files, run_pool, stem_of, write_atomic, FailureRow};
use crate::{Ctx, EXIT_FAILURES, EXIT_OK};

pub struct Args {
    pub align_dir: PathBuf,
    pub audio_dir: PathBuf,
    pub out_dir: PathBuf,
    pub max_duration: Option<f64>,
    pub policy: String,
    pub lookback: usize,
    pub pad: f64,
}

struct ChunkRow {
    chunk_id: String,
    source_file: String,
    start: f64,
    end: f64,
    transcript: String,
}

enum FileOutcome {
    Done { rows: Vec<ChunkRow>, wavs: Vec<(String, Vec<u8>)> },
    Failed(FailureRow),
}

pub fn run(ctx: &Ctx, args: Args) -> CommandResult {
    let max_duration = args.max_duration.unwrap_or(ctx.settings.max_chunk_duration);
    if !(max_duration.is_finite() && max_duration > 0.0) {
        return Err(usage(format!("--max-duration must be positive, got {max_duration}")));
    }
    if !(args.pad.is_finite() && args.pad >= 0.0) {
        return Err(usage(format!("--pad must be non-negative, got {}", args.pad)));
    }
    let policy = match args.policy.as_str() {
        "greedy" => ChunkPolicy::Greedy,
        "gap-biased" => ChunkPolicy::GapBiased,
        other => return Err(usage(format!("--policy must be `greedy` or `gap-biased`, got {other:?}"))),
    };
    for dir in [&args.align_dir, &args.audio_dir] {
        if !dir.is_dir() {
            return Err(usage(format!("{} is not a directory", dir.display())));
        }
    }

    let align_files = list_files(&args.align_dir, "jsonl").map_err(super::CommandError::Run)?;
    if align_files.is_empty() {
        eprintln!("chunk: no .jsonl files in {}", args.align_dir.display());
        return Ok(EXIT_OK);
    }
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("creating {}", args.out_dir.display()))
        .map_err(super::CommandError::Run)?;

    let outcomes = run_pool(ctx.settings.workers, "chunk", align_files, |path| {
        let stem = stem_of(path);
        let fail = |kind: &str, detail: String| {
            FileOutcome::Failed(FailureRow { file: stem.clone(), kind: kind.into(), detail })
        };
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => return fail("unreadable_alignment", e.to_string()),
        };
        let words = match alignments_from_jsonl(&text) {
            Ok(w) => w,
            Err(e) => return fail("malformed_alignment", e.to_string()),
        };
        let wav_path = args.audio_dir.join(format!("{stem}.wav"));
        let buffer: AudioBuffer = match read_wav(&wav_path) {
            Ok(b) => b,
            Err(e) => return fail("missing_audio", format!("{}: {e}", wav_path.display())),
        };
        let mono = downmix_mono(&buffer);
        let chunks = match chunk_words(&words, max_duration, policy, args.lookback) {
            Ok(c) => c,
            Err(e) => return fail(chunk_error_kind(&e), e.to_string()),
        };
        let mut rows = Vec::with_capacity(chunks.len());
        let mut wavs = Vec::with_capacity(chunks.len());
        for (idx, chunk) in chunks.iter().enumerate() {
            // Re-verify the cap before anything is written.
            if chunk.duration() >= max_duration {
                return fail(
                    "internal",
                    format!("chunk {idx} is {:.3}s, at or over {max_duration:.3}s", chunk.duration()),
                );
            }
            let audio = match extract_chunk_audio(&mono, chunk, args.pad) {
                Ok(a) => a,
                Err(e) => return fail("chunk_out_of_range", e.to_string()),
            };
            let chunk_id = format!("{stem}_{idx:04}");
            rows.push(ChunkRow {
                chunk_id: chunk_id.clone(),
                source_file: format!("{stem}.wav"),
                start: chunk.start,
                end: chunk.end,
                transcript: chunk.transcript.clone(),
            });
            wavs.push((format!("{chunk_id}.wav"), encode_wav(&audio)));
        }
        FileOutcome::Done { rows, wavs }
    })
    .map_err(super::CommandError::Run)?;

    let mut failures: Vec<FailureRow> = Vec::new();
    let mut manifest = String::from("chunk_id,source_file,start,end,transcript\n");
    let mut chunk_count = 0usize;
    for outcome in outcomes {
        match outcome {
            FileOutcome::Done { rows, wavs } => {
                for (name, bytes) in wavs {
                    write_atomic(&args.out_dir.join(name), &bytes).map_err(super::CommandError::Run)?;
                }
                for row in rows {
                    manifest.push_str(&format!(
                        "{},{},{:.3},{:.3},{}\n",
                        csv_quote(&row.chunk_id),
                        csv_quote(&row.source_file),
                        row.start,
                        row.end,
                        csv_quote(&row.transcript)
                    ));
                    chunk_count += 1;
                }
            }
            FileOutcome::Failed(row) => failures.push(row),
        }
    }
    failures.sort_by(|a, b| a.file.cmp(&b.file));
    write_atomic(&args.out_dir.join("manifest.csv"), manifest.as_bytes())
        .map_err(super::CommandError::Run)?;
    write_atomic(&args.out_dir.join("failures.csv"), failures_csv(&failures).as_bytes())
        .map_err(super::CommandError::Run)?;

    if ctx.json {
        println!(
            "{}",
            serde_json::json!({ "chunks": chunk_count, "failed": failures.len() })
        );
    } else {
        eprintln!("chunk: wrote {chunk_count} chunks, {} files failed", failures.len());
    }
    if ctx.strict && !failures.is_empty() {
        return Ok(EXIT_FAILURES);
    }
    Ok(EXIT_OK)
}

fn chunk_error_kind(e: &longform_core::chunk::ChunkError) -> &'static str {
    use longform_core::chunk::ChunkError::*;
    match e {
        WordTooLong { .. } => "word_too_long",
        ChunkOutOfRange { .. } => "chunk_out_of_range",
        RequiresMono { .. } => "requires_mono",
        InvalidMaxDuration(_) => "invalid_max_duration",
        UnorderedWords { .. } => "unordered_words",
    }
}
