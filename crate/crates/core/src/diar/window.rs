//! Fixed-duration windowing of annotations for training chunk preparation.

use super::{DiarAnnotation, DiarError, DiarSegment};

/// Clips an annotation into windows of `duration` seconds starting at
/// `0, step, 2*step, ...` while the window fits inside `total_duration`.
///
/// Each window's segments are the intersections with
/// `[window_start, window_start + duration)`, re-expressed relative to the
/// window start; empty intersections are dropped, empty windows are kept.
pub fn window_annotation(
    annotation: &DiarAnnotation,
    duration: f64,
    step: f64,
    total_duration: f64,
) -> Result<Vec<(f64, Vec<DiarSegment>)>, DiarError> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(DiarError::InvalidWindow(format!("duration {duration} must be positive")));
    }
    if !(step.is_finite() && step > 0.0) {
        return Err(DiarError::InvalidWindow(format!("step {step} must be positive")));
    }
    if !(total_duration.is_finite() && total_duration >= duration) {
        return Err(DiarError::InvalidWindow(format!(
            "total duration {total_duration} is shorter than the window duration {duration}"
        )));
    }

    let mut windows = Vec::new();
    let mut k = 0usize;
    loop {
        let window_start = k as f64 * step;
        // Absorb float error in the fit test so e.g. 2*5.0 <= 10.0 holds.
        if window_start + duration > total_duration + 1e-9 {
            break;
        }
        let window_end = window_start + duration;
        let mut clipped: Vec<DiarSegment> = annotation
            .segments()
            .iter()
            .filter_map(|seg| {
                let lo = seg.start.max(window_start);
                let hi = seg.end().min(window_end);
                (hi - lo > 0.0).then(|| DiarSegment::new(lo - window_start, hi - lo, seg.speaker.clone()))
            })
            .collect();
        clipped.sort_by(|a, b| a.start.total_cmp(&b.start).then_with(|| a.speaker.cmp(&b.speaker)));
        windows.push((window_start, clipped));
        k += 1;
    }
    Ok(windows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ann(segments: Vec<DiarSegment>) -> DiarAnnotation {
        DiarAnnotation::new("rec", segments).unwrap()
    }

    #[test]
    fn segment_straddling_two_windows_splits() {
        let a = ann(vec![DiarSegment::new(4.0, 2.0, "S1")]);
        let windows = window_annotation(&a, 5.0, 5.0, 10.0).unwrap();
        assert_eq!(windows.len(), 2);
        assert_eq!(windows[0].0, 0.0);
        assert_eq!(windows[0].1, vec![DiarSegment::new(4.0, 1.0, "S1")]);
        assert_eq!(windows[1].0, 5.0);
        assert_eq!(windows[1].1, vec![DiarSegment::new(0.0, 1.0, "S1")]);
    }

    #[test]
    fn interior_segment_only_shifts() {
        let a = ann(vec![DiarSegment::new(6.5, 1.0, "S1")]);
        let windows = window_annotation(&a, 5.0, 5.0, 10.0).unwrap();
        assert!(windows[0].1.is_empty());
        assert_eq!(windows[1].1, vec![DiarSegment::new(1.5, 1.0, "S1")]);
    }

    #[test]
    fn too_short_total_is_an_error() {
        let a = ann(vec![DiarSegment::new(0.0, 1.0, "S1")]);
        assert!(matches!(
            window_annotation(&a, 5.0, 5.0, 4.9),
            Err(DiarError::InvalidWindow(_))
        ));
    }

    #[test]
    fn overlapping_step_produces_overlapping_views() {
        let a = ann(vec![DiarSegment::new(0.0, 10.0, "S1")]);
        let windows = window_annotation(&a, 5.0, 2.5, 10.0).unwrap();
        assert_eq!(windows.len(), 3);
        for (_, segs) in &windows {
            assert_eq!(segs.len(), 1);
            assert_eq!(segs[0].duration, 5.0);
        }
    }

    proptest! {
        #[test]
        fn tiling_conserves_speaker_time(
            spans in proptest::collection::vec((0u32..400, 1u32..300), 1..10),
            duration_ds in 10u32..80,
        ) {
            // Non-overlapping single-speaker segments on a 10 ms grid.
            let mut cursor = 0.0f64;
            let mut segments = Vec::new();
            for (gap, dur) in spans {
                let start = cursor + gap as f64 / 100.0;
                let d = dur as f64 / 100.0;
                cursor = start + d;
                segments.push(DiarSegment::new(start, d, "S0"));
            }
            let duration = duration_ds as f64 / 10.0;
            let total = cursor.max(duration) + 1.0;
            let a = ann(segments);
            let windows = window_annotation(&a, duration, duration, total).unwrap();
            let last_end = windows.last().unwrap().0 + duration;
            let clipped_total: f64 = windows.iter().flat_map(|(_, segs)| segs.iter().map(|s| s.duration)).sum();
            let expected: f64 = a
                .segments()
                .iter()
                .map(|s| (s.end().min(last_end) - s.start.min(last_end)).max(0.0))
                .sum();
            prop_assert!((clipped_total - expected).abs() < 1e-9,
                "clipped {clipped_total} vs expected {expected}");
        }
    }
}
