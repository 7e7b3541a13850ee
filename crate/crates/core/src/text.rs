//! Transcript normalization and grapheme-to-token mapping.
//!
//! Transcripts are normalized to Unicode NFC with whitespace collapsed to
//! single ASCII spaces, then split into words. Words map to aligner token
//! sequences through a [`TokenTable`] loaded from a plain-text file, since
//! the romanization scheme is external configuration rather than something
//! this crate defines.

use std::collections::HashMap;
use std::path::Path;

use icu_normalizer::ComposingNormalizer;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TextError {
    #[error("unknown grapheme {grapheme:?} at char position {position}")]
    UnknownGrapheme { position: usize, grapheme: String },
    #[error("tokenization consumed the whole word without producing tokens")]
    EmptyTokenization,
    #[error("failed to read token table {path}: {source}")]
    TableIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("token table line {line}: {reason}")]
    TableParse { line: usize, reason: String },
    #[error("invalid token table: {0}")]
    TableInvalid(String),
}

/// What `tokenize_word` does with graphemes absent from the table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnknownPolicy {
    /// Fail with `UnknownGrapheme`.
    Error,
    /// Skip the offending char and keep scanning.
    #[default]
    Skip,
}

/// Immutable grapheme-string -> token-id map with a reserved blank id.
///
/// Token ids (entries plus the blank) must be dense in `[0, V)`.
#[derive(Debug, Clone)]
pub struct TokenTable {
    entries: HashMap<String, u32>,
    blank_id: u32,
    unknown_policy: UnknownPolicy,
    max_key_chars: usize,
    vocab_size: u32,
}

impl TokenTable {
    pub fn new(
        entries: Vec<(String, u32)>,
        blank_id: u32,
        unknown_policy: UnknownPolicy,
    ) -> Result<Self, TextError> {
        let mut map = HashMap::with_capacity(entries.len());
        let mut max_key_chars = 0;
        let mut max_id = blank_id;
        for (key, id) in entries {
            if key.is_empty() {
                return Err(TextError::TableInvalid("empty grapheme key".into()));
            }
            if id == blank_id {
                return Err(TextError::TableInvalid(format!(
                    "grapheme {key:?} maps to the blank id {blank_id}"
                )));
            }
            max_key_chars = max_key_chars.max(key.chars().count());
            max_id = max_id.max(id);
            if map.insert(key.clone(), id).is_some() {
                return Err(TextError::TableInvalid(format!("duplicate grapheme {key:?}")));
            }
        }
        let vocab_size = max_id + 1;
        let mut seen = vec![false; vocab_size as usize];
        seen[blank_id as usize] = true;
        for &id in map.values() {
            seen[id as usize] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(TextError::TableInvalid(format!(
                "token ids not dense: id {missing} unused in [0, {vocab_size})"
            )));
        }
        Ok(Self {
            entries: map,
            blank_id,
            unknown_policy,
            max_key_chars,
            vocab_size,
        })
    }

    /// Loads a table from a UTF-8 text file, one `grapheme<TAB>id` pair per
    /// line. Lines starting with `#` and blank lines are skipped.
    pub fn load(
        path: impl AsRef<Path>,
        blank_id: u32,
        unknown_policy: UnknownPolicy,
    ) -> Result<Self, TextError> {
        let path = path.as_ref();
        let body = std::fs::read_to_string(path).map_err(|source| TextError::TableIo {
            path: path.display().to_string(),
            source,
        })?;
        let mut entries = Vec::new();
        for (idx, raw) in body.lines().enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, id) = line.split_once('\t').ok_or_else(|| TextError::TableParse {
                line: idx + 1,
                reason: "expected `grapheme<TAB>id`".into(),
            })?;
            let id: u32 = id.trim().parse().map_err(|_| TextError::TableParse {
                line: idx + 1,
                reason: format!("bad token id {id:?}"),
            })?;
            entries.push((key.to_string(), id));
        }
        Self::new(entries, blank_id, unknown_policy)
    }

    pub fn blank_id(&self) -> u32 {
        self.blank_id
    }

    pub fn unknown_policy(&self) -> UnknownPolicy {
        self.unknown_policy
    }

    /// Vocabulary size `V`; ids are dense in `[0, V)`.
    pub fn vocab_size(&self) -> u32 {
        self.vocab_size
    }

    pub fn lookup(&self, grapheme: &str) -> Option<u32> {
        self.entries.get(grapheme).copied()
    }
}

/// NFC-normalizes and collapses whitespace.
///
/// Leading/trailing whitespace is removed and every internal run of space,
/// tab, newline, carriage return, or no-break space becomes one ASCII space.
/// Idempotent.
pub fn normalize_transcript(text: &str) -> String {
    let nfc = ComposingNormalizer::new_nfc().normalize(text);
    let mut out = String::with_capacity(nfc.len());
    let mut pending_space = false;
    for c in nfc.chars() {
        if matches!(c, ' ' | '\t' | '\n' | '\r' | '\u{00A0}') {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

/// Splits normalized text on single spaces; never yields empty words.
pub fn split_words(text: &str) -> Vec<&str> {
    text.split(' ').filter(|w| !w.is_empty()).collect()
}

/// Greedy longest-match-first tokenization of one word.
///
/// At each position the longest table key matching the remaining text wins;
/// there is no backtracking. Unknown graphemes follow the table's policy.
pub fn tokenize_word(word: &str, table: &TokenTable) -> Result<Vec<u32>, TextError> {
    let bounds: Vec<usize> = word
        .char_indices()
        .map(|(b, _)| b)
        .chain(std::iter::once(word.len()))
        .collect();
    let n_chars = bounds.len() - 1;
    let mut tokens = Vec::new();
    let mut ci = 0;
    while ci < n_chars {
        let longest = table.max_key_chars.min(n_chars - ci);
        let mut matched = None;
        for len in (1..=longest).rev() {
            let candidate = &word[bounds[ci]..bounds[ci + len]];
            if let Some(id) = table.lookup(candidate) {
                matched = Some((id, len));
                break;
            }
        }
        match matched {
            Some((id, len)) => {
                tokens.push(id);
                ci += len;
            }
            None => match table.unknown_policy {
                UnknownPolicy::Error => {
                    let grapheme = word[bounds[ci]..bounds[ci + 1]].to_string();
                    return Err(TextError::UnknownGrapheme { position: ci, grapheme });
                }
                UnknownPolicy::Skip => ci += 1,
            },
        }
    }
    if tokens.is_empty() {
        return Err(TextError::EmptyTokenization);
    }
    Ok(tokens)
}
