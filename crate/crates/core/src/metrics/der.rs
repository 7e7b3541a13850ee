//! Diarization error rate with exact optimal speaker mapping.
//!
//! The time axis is partitioned at every segment boundary from both
//! annotations (a collar widens reference boundaries into no-score zones).
//! Per scored cell, with `Nref`/`Nhyp` active speakers: missed speech is
//! `max(0, Nref - Nhyp)`, false alarm `max(0, Nhyp - Nref)`, and confusion
//! `min(Nref, Nhyp)` minus the active pairs matched under the optimal
//! injective hypothesis-to-reference mapping, each weighted by cell length.
//! The mapping maximizes total scored overlap via the Hungarian method;
//! greedy mapping would break permutation invariance.

use serde::Serialize;

use super::assignment::solve_max_rectangular;
use super::MetricsError;
use crate::diar::DiarAnnotation;

/// Decomposed DER. `der = (missed + false_alarm + confusion) / total_reference`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerReport {
    pub missed: f64,
    pub false_alarm: f64,
    pub confusion: f64,
    pub total_reference: f64,
    pub der: f64,
    /// Optimal hypothesis-label -> reference-label pairs, sorted by
    /// hypothesis label; only pairs with positive scored overlap appear.
    pub mapping: Vec<(String, String)>,
}

/// DER numerator/denominator components without the final ratio, so
/// multi-file scoring can pool before dividing.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DerComponents {
    pub missed: f64,
    pub false_alarm: f64,
    pub confusion: f64,
    pub total_reference: f64,
    pub mapping: Vec<(String, String)>,
}

fn sorted_labels(annotation: &DiarAnnotation) -> Vec<String> {
    let mut labels: Vec<String> =
        annotation.segments().iter().map(|s| s.speaker.clone()).collect();
    labels.sort();
    labels.dedup();
    labels
}

struct Cell {
    len: f64,
    ref_active: Vec<usize>,
    hyp_active: Vec<usize>,
}

/// Computes DER components for one reference/hypothesis pair.
pub fn der_components(
    reference: &DiarAnnotation,
    hypothesis: &DiarAnnotation,
    collar: f64,
) -> DerComponents {
    assert!(collar >= 0.0 && collar.is_finite(), "collar must be non-negative");
    let ref_labels = sorted_labels(reference);
    let hyp_labels = sorted_labels(hypothesis);
    let ref_index = |s: &str| ref_labels.iter().position(|l| l == s).unwrap();
    let hyp_index = |s: &str| hyp_labels.iter().position(|l| l == s).unwrap();

    let mut ref_boundaries: Vec<f64> = Vec::new();
    let mut boundaries: Vec<f64> = Vec::new();
    for seg in reference.segments() {
        ref_boundaries.push(seg.start);
        ref_boundaries.push(seg.end());
    }
    for seg in hypothesis.segments() {
        boundaries.push(seg.start);
        boundaries.push(seg.end());
    }
    boundaries.extend_from_slice(&ref_boundaries);
    if collar > 0.0 {
        for &b in &ref_boundaries {
            boundaries.push(b - collar);
            boundaries.push(b + collar);
        }
    }
    boundaries.sort_by(f64::total_cmp);
    boundaries.dedup();

    let mut cells: Vec<Cell> = Vec::new();
    for pair in boundaries.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi <= lo {
            continue;
        }
        let mid = lo + (hi - lo) / 2.0;
        if collar > 0.0 && ref_boundaries.iter().any(|b| (mid - b).abs() <= collar) {
            continue;
        }
        let ref_active: Vec<usize> = reference
            .segments()
            .iter()
            .filter(|s| s.start <= lo && s.end() >= hi)
            .map(|s| ref_index(&s.speaker))
            .collect();
        let hyp_active: Vec<usize> = hypothesis
            .segments()
            .iter()
            .filter(|s| s.start <= lo && s.end() >= hi)
            .map(|s| hyp_index(&s.speaker))
            .collect();
        if ref_active.is_empty() && hyp_active.is_empty() {
            continue;
        }
        cells.push(Cell { len: hi - lo, ref_active, hyp_active });
    }

    let mut overlap = vec![vec![0.0f64; ref_labels.len()]; hyp_labels.len()];
    let mut missed = 0.0;
    let mut false_alarm = 0.0;
    let mut total_reference = 0.0;
    for cell in &cells {
        let nref = cell.ref_active.len() as f64;
        let nhyp = cell.hyp_active.len() as f64;
        total_reference += cell.len * nref;
        missed += cell.len * (nref - nhyp).max(0.0);
        false_alarm += cell.len * (nhyp - nref).max(0.0);
        for &h in &cell.hyp_active {
            for &r in &cell.ref_active {
                overlap[h][r] += cell.len;
            }
        }
    }

    let assign = solve_max_rectangular(&overlap);
    let mut confusion = 0.0;
    for cell in &cells {
        let matched = cell
            .hyp_active
            .iter()
            .filter(|&&h| assign[h].is_some_and(|r| cell.ref_active.contains(&r)))
            .count();
        let paired = cell.ref_active.len().min(cell.hyp_active.len());
        confusion += cell.len * (paired - matched) as f64;
    }

    let mapping = assign
        .iter()
        .enumerate()
        .filter_map(|(h, r)| {
            r.filter(|&r| overlap[h][r] > 0.0)
                .map(|r| (hyp_labels[h].clone(), ref_labels[r].clone()))
        })
        .collect();
    DerComponents { missed, false_alarm, confusion, total_reference, mapping }
}

/// Scores a hypothesis against a reference.
///
/// `collar` seconds around every reference boundary are excluded from
/// scoring. Errors with `EmptyReference` when no reference speech remains,
/// rather than reporting 0.
pub fn der(
    reference: &DiarAnnotation,
    hypothesis: &DiarAnnotation,
    collar: f64,
) -> Result<DerReport, MetricsError> {
    let c = der_components(reference, hypothesis, collar);
    finish_der(c)
}

/// Turns pooled components into a report; shared by single-file and
/// corpus-level scoring.
pub fn finish_der(c: DerComponents) -> Result<DerReport, MetricsError> {
    if c.total_reference <= 0.0 {
        return Err(MetricsError::EmptyReference);
    }
    Ok(DerReport {
        der: (c.missed + c.false_alarm + c.confusion) / c.total_reference,
        missed: c.missed,
        false_alarm: c.false_alarm,
        confusion: c.confusion,
        total_reference: c.total_reference,
        mapping: c.mapping,
    })
}
