//! `longform wer` and `longform der`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context};
use longform_core::diar::{parse_rttm, DiarAnnotation};
use longform_core::metrics::{
    der_components, finish_der, wer as score_wer, wer_corpus, DerComponents,
};

use super::{usage, CommandResult};
use crate::util::{list_files, stem_of};
use crate::{Ctx, EXIT_OK};

pub fn wer(ctx: &Ctx, reference: &Path, hypothesis: &Path, corpus: bool) -> CommandResult {
    let report = if corpus {
        if !reference.is_dir() || !hypothesis.is_dir() {
            return Err(usage("--corpus expects two directories of .txt files"));
        }
        let ref_files = list_files(reference, "txt").map_err(super::CommandError::Run)?;
        if ref_files.is_empty() {
            return Err(usage(format!("no .txt files under {}", reference.display())));
        }
        let mut pairs: Vec<(String, String)> = Vec::with_capacity(ref_files.len());
        for ref_path in &ref_files {
            let stem = stem_of(ref_path);
            let hyp_path = hypothesis.join(format!("{stem}.txt"));
            let ref_text = std::fs::read_to_string(ref_path)
                .with_context(|| format!("reading {}", ref_path.display()))
                .map_err(super::CommandError::Run)?;
            let hyp_text = std::fs::read_to_string(&hyp_path)
                .with_context(|| format!("no hypothesis for {stem}: {}", hyp_path.display()))
                .map_err(super::CommandError::Run)?;
            pairs.push((ref_text, hyp_text));
        }
        wer_corpus(pairs.iter().map(|(r, h)| (r.as_str(), h.as_str())))
            .map_err(|e| super::CommandError::Run(anyhow!(e)))?
    } else {
        let ref_text = std::fs::read_to_string(reference)
            .with_context(|| format!("reading {}", reference.display()))
            .map_err(super::CommandError::Run)?;
        let hyp_text = std::fs::read_to_string(hypothesis)
            .with_context(|| format!("reading {}", hypothesis.display()))
            .map_err(super::CommandError::Run)?;
        score_wer(&ref_text, &hyp_text)
    };

    if ctx.json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        println!(
            "WER {:.4} (S={} D={} I={} ref={}{})",
            report.wer,
            report.substitutions,
            report.deletions,
            report.insertions,
            report.reference_words,
            if report.degenerate_reference { ", degenerate reference" } else { "" }
        );
    }
    Ok(EXIT_OK)
}

pub fn der(ctx: &Ctx, reference: &Path, hypothesis: &Path, collar: Option<f64>) -> CommandResult {
    let collar = collar.unwrap_or(ctx.settings.collar);
    if !(collar.is_finite() && collar >= 0.0) {
        return Err(usage(format!("--collar must be non-negative, got {collar}")));
    }
    let parse = |path: &Path| -> Result<Vec<DiarAnnotation>, super::CommandError> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(super::CommandError::Run)?;
        let doc = parse_rttm(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(super::CommandError::Run)?;
        if doc.skipped_lines > 0 {
            eprintln!("der: {}: skipped {} non-SPEAKER lines", path.display(), doc.skipped_lines);
        }
        Ok(doc.annotations)
    };
    let refs = parse(reference)?;
    let hyps = parse(hypothesis)?;

    let mut ref_by_id: BTreeMap<&str, &DiarAnnotation> = BTreeMap::new();
    for ann in &refs {
        ref_by_id.insert(ann.file_id(), ann);
    }
    let mut hyp_by_id: BTreeMap<&str, &DiarAnnotation> = BTreeMap::new();
    for ann in &hyps {
        hyp_by_id.insert(ann.file_id(), ann);
    }
    let mut ids: Vec<&str> = ref_by_id.keys().chain(hyp_by_id.keys()).copied().collect();
    ids.sort();
    ids.dedup();

    let mut pooled = DerComponents::default();
    let mut per_file = Vec::new();
    for id in ids {
        let empty_ref;
        let empty_hyp;
        let r = match ref_by_id.get(id) {
            Some(a) => *a,
            None => {
                empty_ref = DiarAnnotation::new(id, vec![]).expect("valid empty annotation");
                &empty_ref
            }
        };
        let h = match hyp_by_id.get(id) {
            Some(a) => *a,
            None => {
                empty_hyp = DiarAnnotation::new(id, vec![]).expect("valid empty annotation");
                &empty_hyp
            }
        };
        let c = der_components(r, h, collar);
        pooled.missed += c.missed;
        pooled.false_alarm += c.false_alarm;
        pooled.confusion += c.confusion;
        pooled.total_reference += c.total_reference;
        per_file.push((id.to_string(), c));
    }

    let report = finish_der(pooled).map_err(|e| super::CommandError::Run(anyhow!(e)))?;
    if ctx.json {
        let files: Vec<serde_json::Value> = per_file
            .iter()
            .map(|(id, c)| {
                serde_json::json!({
                    "file_id": id,
                    "missed": c.missed,
                    "false_alarm": c.false_alarm,
                    "confusion": c.confusion,
                    "total_reference": c.total_reference,
                    "mapping": c.mapping,
                })
            })
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::json!({
                "collar": collar,
                "der": report.der,
                "missed": report.missed,
                "false_alarm": report.false_alarm,
                "confusion": report.confusion,
                "total_reference": report.total_reference,
                "files": files,
            }))
            .expect("report serializes")
        );
    } else {
        for (id, c) in &per_file {
            if c.total_reference > 0.0 {
                let file_der = (c.missed + c.false_alarm + c.confusion) / c.total_reference;
                println!("{id}\tDER {file_der:.3}");
            } else {
                println!("{id}\tDER undefined (no scored reference speech)");
            }
        }
        println!(
            "DER {:.3} (miss={:.3}s fa={:.3}s conf={:.3}s ref={:.3}s, collar {collar})",
            report.der, report.missed, report.false_alarm, report.confusion, report.total_reference
        );
    }
    Ok(EXIT_OK)
}
