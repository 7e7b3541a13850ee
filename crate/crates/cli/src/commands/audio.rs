//! `longform vad` and `longform augment`.

use std::path::Path;

use anyhow::Context;
use longform_core::audio::{
    augment_gain, downmix_mono, encode_wav, read_wav, AudioBuffer, GainAugmentConfig,
};
use longform_core::chunk::{detect_speech, VadConfig};

use super::{usage, CommandResult};
use crate::util::{failures_csv, file_seed, list_files, run_pool, stem_of, write_atomic, FailureRow};
use crate::{Ctx, EXIT_FAILURES, EXIT_OK};

pub struct VadArgs {
    pub frame_ms: Option<f64>,
    pub hop_ms: Option<f64>,
    pub threshold_db: Option<f64>,
    pub min_speech_ms: Option<f64>,
    pub min_silence_ms: Option<f64>,
}

pub fn vad(ctx: &Ctx, audio: &Path, args: VadArgs) -> CommandResult {
    let mut config: VadConfig = ctx.settings.vad.clone();
    if let Some(v) = args.frame_ms {
        config.frame_ms = v;
    }
    if let Some(v) = args.hop_ms {
        config.hop_ms = v;
    }
    if let Some(v) = args.threshold_db {
        config.threshold_db = v;
    }
    if let Some(v) = args.min_speech_ms {
        config.min_speech_ms = v;
    }
    if let Some(v) = args.min_silence_ms {
        config.min_silence_ms = v;
    }
    if let Err(e) = config.validate() {
        return Err(usage(e));
    }

    let files = if audio.is_dir() {
        list_files(audio, "wav").map_err(super::CommandError::Run)?
    } else if audio.is_file() {
        vec![audio.to_path_buf()]
    } else {
        return Err(usage(format!("{} does not exist", audio.display())));
    };

    let results = run_pool(ctx.settings.workers, "vad", files, |path| {
        let buffer: Result<AudioBuffer, _> = read_wav(path);
        match buffer {
            Err(e) => (stem_of(path), Err(e.to_string())),
            Ok(b) => {
                let mono = downmix_mono(&b);
                (stem_of(path), Ok(detect_speech(&mono, &config)))
            }
        }
    })
    .map_err(super::CommandError::Run)?;

    let mut failed = 0usize;
    if ctx.json {
        let mut files = Vec::new();
        for (stem, outcome) in &results {
            match outcome {
                Ok(intervals) => files.push(serde_json::json!({
                    "file": stem,
                    "speech": intervals.iter().map(|(s, e)| vec![*s, *e]).collect::<Vec<_>>(),
                })),
                Err(e) => {
                    failed += 1;
                    files.push(serde_json::json!({ "file": stem, "error": e }));
                }
            }
        }
        println!("{}", serde_json::json!(files));
    } else {
        for (stem, outcome) in &results {
            match outcome {
                Ok(intervals) => {
                    for (s, e) in intervals {
                        println!("{stem}\t{s:.3}\t{e:.3}");
                    }
                }
                Err(e) => {
                    failed += 1;
                    eprintln!("vad: {stem}: {e}");
                }
            }
        }
    }
    if ctx.strict && failed > 0 {
        return Ok(EXIT_FAILURES);
    }
    Ok(EXIT_OK)
}

enum AugmentOutcome {
    Done { stem: String, wav: Vec<u8>, applied: bool, gain_db: Option<f64> },
    Failed(FailureRow),
}

pub fn augment(
    ctx: &Ctx,
    in_dir: &Path,
    out_dir: &Path,
    p: Option<f64>,
    min_db: Option<f64>,
    max_db: Option<f64>,
) -> CommandResult {
    if !in_dir.is_dir() {
        return Err(usage(format!("{} is not a directory", in_dir.display())));
    }
    let probability = p.unwrap_or(ctx.settings.gain_probability);
    let min_db = min_db.unwrap_or(ctx.settings.gain_min_db);
    let max_db = max_db.unwrap_or(ctx.settings.gain_max_db);
    // Validate once with a placeholder seed; per-file configs reuse it.
    if let Err(e) = GainAugmentConfig::new(min_db, max_db, probability, 0) {
        return Err(usage(e.to_string()));
    }

    let files = list_files(in_dir, "wav").map_err(super::CommandError::Run)?;
    if files.is_empty() {
        eprintln!("augment: no .wav files in {}", in_dir.display());
        return Ok(EXIT_OK);
    }
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))
        .map_err(super::CommandError::Run)?;

    let global_seed = ctx.settings.seed;
    let outcomes = run_pool(ctx.settings.workers, "augment", files, |path| {
        let stem = stem_of(path);
        let buffer: AudioBuffer = match read_wav(path) {
            Ok(b) => b,
            Err(e) => {
                return AugmentOutcome::Failed(FailureRow {
                    file: stem,
                    kind: "undecodable_audio".into(),
                    detail: e.to_string(),
                })
            }
        };
        let config = GainAugmentConfig {
            min_db,
            max_db,
            probability,
            seed: file_seed(global_seed, &stem),
        };
        let outcome = augment_gain(&buffer, &config);
        AugmentOutcome::Done {
            stem,
            wav: encode_wav(&outcome.buffer),
            applied: outcome.applied,
            gain_db: outcome.gain_db,
        }
    })
    .map_err(super::CommandError::Run)?;

    let mut failures: Vec<FailureRow> = Vec::new();
    let mut log_rows: Vec<(String, bool, Option<f64>)> = Vec::new();
    for outcome in outcomes {
        match outcome {
            AugmentOutcome::Done { stem, wav, applied, gain_db } => {
                write_atomic(&out_dir.join(format!("{stem}.wav")), &wav)
                    .map_err(super::CommandError::Run)?;
                log_rows.push((stem, applied, gain_db));
            }
            AugmentOutcome::Failed(row) => failures.push(row),
        }
    }
    log_rows.sort_by(|a, b| a.0.cmp(&b.0));
    failures.sort_by(|a, b| a.file.cmp(&b.file));

    let mut log = String::from("file,applied,gain_db\n");
    for (stem, applied, gain_db) in &log_rows {
        let gain = gain_db.map(|g| format!("{g:.6}")).unwrap_or_default();
        log.push_str(&format!("{stem}.wav,{applied},{gain}\n"));
    }
    write_atomic(&out_dir.join("augment_log.csv"), log.as_bytes())
        .map_err(super::CommandError::Run)?;
    if !failures.is_empty() {
        write_atomic(&out_dir.join("failures.csv"), failures_csv(&failures).as_bytes())
            .map_err(super::CommandError::Run)?;
    }

    let applied_count = log_rows.iter().filter(|(_, applied, _)| *applied).count();
    if ctx.json {
        println!(
            "{}",
            serde_json::json!({
                "processed": log_rows.len(),
                "applied": applied_count,
                "failed": failures.len(),
            })
        );
    } else {
        eprintln!(
            "augment: {} files, gain applied to {applied_count}, {} failed",
            log_rows.len(),
            failures.len()
        );
    }
    if ctx.strict && !failures.is_empty() {
        return Ok(EXIT_FAILURES);
    }
    Ok(EXIT_OK)
}
