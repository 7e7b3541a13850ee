//! Batch front end for long-form speech data preparation: forced
//! alignment, chunking, diarization format conversion and windowing, gain
//! augmentation, dataset audits, and WER/DER scoring.

mod commands;
mod config;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ConfigFile, Settings};

/// Exit codes: 0 success, 1 processing or strict-mode failures, 2 usage
/// errors.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURES: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "longform", version, about = "Long-form speech data preparation and scoring")]
struct Cli {
    /// Key-value config file providing defaults (flags override).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Emit machine-readable JSON instead of human output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for batch commands.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Exit non-zero when any file fails.
    #[arg(long, global = true)]
    strict: bool,
    /// Global random seed; per-file seeds derive from it and the file stem.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Force-align transcripts against emission files, one JSONL per stem.
    Align {
        audio_dir: PathBuf,
        emissions_dir: PathBuf,
        transcripts_dir: PathBuf,
        out_dir: PathBuf,
        /// Token table file (grapheme<TAB>id per line).
        #[arg(long)]
        table: Option<PathBuf>,
        /// Blank token id shared by the table and emission files.
        #[arg(long, default_value_t = 0)]
        blank_id: u32,
        /// Override the per-file frame duration in seconds.
        #[arg(long)]
        frame_duration: Option<f64>,
        /// Unknown-grapheme policy: skip or error.
        #[arg(long, default_value = "skip")]
        unknown: String,
        /// Banded decoding half-width (approximation; full grid if unset).
        #[arg(long)]
        band: Option<usize>,
    },
    /// Cut aligned audio into word-preserving chunks under a duration cap.
    Chunk {
        align_dir: PathBuf,
        audio_dir: PathBuf,
        out_dir: PathBuf,
        #[arg(long)]
        max_duration: Option<f64>,
        /// Split policy: greedy or gap-biased.
        #[arg(long, default_value = "greedy")]
        policy: String,
        /// Words to look back for a better gap when closing a chunk.
        #[arg(long, default_value_t = 5)]
        lookback: usize,
        /// Padding in seconds around each chunk's audio.
        #[arg(long, default_value_t = 0.0)]
        pad: f64,
    },
    /// Convert CSV annotations (file or directory) to one RTTM file.
    Csv2rttm { input: PathBuf, out: PathBuf },
    /// Score hypothesis transcripts against references.
    Wer {
        reference: PathBuf,
        hypothesis: PathBuf,
        /// Treat the paths as directories of .txt files paired by stem.
        #[arg(long)]
        corpus: bool,
    },
    /// Score hypothesis RTTM against reference RTTM.
    Der {
        reference: PathBuf,
        hypothesis: PathBuf,
        /// No-score collar in seconds around reference boundaries.
        #[arg(long)]
        collar: Option<f64>,
    },
    /// Detect speech intervals in a WAV file or directory.
    Vad {
        audio: PathBuf,
        #[arg(long)]
        frame_ms: Option<f64>,
        #[arg(long)]
        hop_ms: Option<f64>,
        #[arg(long)]
        threshold_db: Option<f64>,
        #[arg(long)]
        min_speech_ms: Option<f64>,
        #[arg(long)]
        min_silence_ms: Option<f64>,
    },
    /// Apply seeded random gain to every WAV in a directory.
    Augment {
        in_dir: PathBuf,
        out_dir: PathBuf,
        /// Probability of applying a gain to each file.
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        min_db: Option<f64>,
        #[arg(long)]
        max_db: Option<f64>,
    },
    /// Audit a chunked dataset directory.
    Manifest {
        dir: PathBuf,
        /// Flag files with duration at or over this many seconds.
        #[arg(long, default_value_t = 30.0)]
        limit: f64,
    },
    /// Clip RTTM annotations into fixed-duration training windows.
    Window {
        rttm: PathBuf,
        #[arg(long, default_value_t = 5.0)]
        duration: f64,
        /// Window step; defaults to `duration` (non-overlapping tiling).
        #[arg(long)]
        step: Option<f64>,
        /// Total timeline length; defaults to each file's last segment end.
        #[arg(long)]
        total_duration: Option<f64>,
        /// Write JSONL here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Everything a command needs beyond its own flags.
pub struct Ctx {
    pub settings: Settings,
    pub json: bool,
    pub strict: bool,
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let mut settings = match &cli.config {
        None => Settings::default(),
        Some(path) => match ConfigFile::load(path).and_then(|c| Settings::from_config(&c)) {
            Ok(s) => s,
            Err(e) => return usage_error(e),
        },
    };
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return usage_error("--workers must be at least 1");
        }
        settings.workers = workers;
    }
    if let Some(seed) = cli.seed {
        settings.seed = seed;
    }
    let ctx = Ctx { settings, json: cli.json, strict: cli.strict };

    let outcome = match cli.command {
        Command::Align {
            audio_dir,
            emissions_dir,
            transcripts_dir,
            out_dir,
            table,
            blank_id,
            frame_duration,
            unknown,
            band,
        } => commands::align::run(
            &ctx,
            commands::align::Args {
                audio_dir,
                emissions_dir,
                transcripts_dir,
                out_dir,
                table,
                blank_id,
                frame_duration,
                unknown,
                band,
            },
        ),
        Command::Chunk { align_dir, audio_dir, out_dir, max_duration, policy, lookback, pad } => {
            commands::chunk::run(
                &ctx,
                commands::chunk::Args {
                    align_dir,
                    audio_dir,
                    out_dir,
                    max_duration,
                    policy,
                    lookback,
                    pad,
                },
            )
        }
        Command::Csv2rttm { input, out } => commands::formats::csv2rttm(&ctx, &input, &out),
        Command::Wer { reference, hypothesis, corpus } => {
            commands::score::wer(&ctx, &reference, &hypothesis, corpus)
        }
        Command::Der { reference, hypothesis, collar } => {
            commands::score::der(&ctx, &reference, &hypothesis, collar)
        }
        Command::Vad { audio, frame_ms, hop_ms, threshold_db, min_speech_ms, min_silence_ms } => {
            commands::audio::vad(
                &ctx,
                &audio,
                commands::audio::VadArgs { frame_ms, hop_ms, threshold_db, min_speech_ms, min_silence_ms },
            )
        }
        Command::Augment { in_dir, out_dir, p, min_db, max_db } => {
            commands::audio::augment(&ctx, &in_dir, &out_dir, p, min_db, max_db)
        }
        Command::Manifest { dir, limit } => commands::manifest::run(&ctx, &dir, limit),
        Command::Window { rttm, duration, step, total_duration, out } => {
            commands::formats::window(&ctx, &rttm, duration, step, total_duration, out.as_deref())
        }
    };

    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(commands::CommandError::Usage(message)) => usage_error(message),
        Err(commands::CommandError::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURES)
        }
    }
}
