//! Shared batch-run plumbing: deterministic per-file seeds, crash-safe
//! writes, directory listing, and worker-pool setup.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use anyhow::{Context, Result};

/// FNV-1a over the global seed and the file stem, so per-file randomness is
/// independent of worker count and processing order.
pub fn file_seed(global_seed: u64, stem: &str) -> u64 {
    const OFFSET: u64 = 0xcbf29ce484222325;
    const PRIME: u64 = 0x100000001b3;
    let mut hash = OFFSET;
    for byte in global_seed.to_le_bytes().into_iter().chain(stem.bytes()) {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(PRIME);
    }
    hash
}

/// Writes to a temp name in the same directory, then renames over the
/// target, so interrupted runs never leave half-written outputs.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    let tmp = dir.join(format!(".{name}.part"));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Lists files under `dir` (non-recursive) with the given extension
/// (case-insensitive), sorted by path for deterministic iteration.
pub fn list_files(dir: &Path, extension: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let entries =
        std::fs::read_dir(dir).with_context(|| format!("reading directory {}", dir.display()))?;
    for entry in entries {
        let entry = entry?;
        let path = entry.path();
        if path.is_file()
            && path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case(extension))
        {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn stem_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Runs `work` over `items` on a pool of `workers` threads, printing a
/// progress counter to stderr. Results come back in input order.
pub fn run_pool<T, R, F>(workers: usize, label: &str, items: Vec<T>, work: F) -> Result<Vec<R>>
where
    T: Send + Sync,
    R: Send,
    F: Fn(&T) -> R + Send + Sync,
{
    let total = items.len();
    let done = AtomicUsize::new(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .context("building worker pool")?;
    let results = pool.install(|| {
        use rayon::prelude::*;
        items
            .par_iter()
            .map(|item| {
                let r = work(item);
                let n = done.fetch_add(1, Ordering::Relaxed) + 1;
                eprintln!("{label}: {n}/{total}");
                r
            })
            .collect::<Vec<R>>()
    });
    Ok(results)
}

/// One failed file in a batch run.
#[derive(Debug, Clone)]
pub struct FailureRow {
    pub file: String,
    pub kind: String,
    pub detail: String,
}

fn csv_field(value: &str) -> String {
    if value.contains([',', '"', '\n']) {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

/// Renders `failures.csv` content; rows should already be sorted.
pub fn failures_csv(rows: &[FailureRow]) -> String {
    let mut out = String::from("file,kind,detail\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_field(&row.file),
            csv_field(&row.kind),
            csv_field(&row.detail)
        ));
    }
    out
}

pub fn csv_quote(value: &str) -> String {
    csv_field(value)
}
