//! Segment classification from K_alpha, TP/FP rates and ROC curves.

use crate::dca::KAlphaSeries;
use crate::error::{Error, Result};
use crate::ingest::{Label, SegmentMap};

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPrediction {
    pub segment: usize,
    pub start: usize,
    pub end: usize,
    pub l: f64,
    pub predicted: Label,
    pub truth: Label,
}

/// Signed distance of the scores from `th`: `sum_{K >= th} (K - th) -
/// sum_{K < th} (th - K)`. Anomalous when non-negative.
///
/// The sum collapses to `sum(K) - n * th`, so the label is also decided by
/// `mean(ks) >= th`; both are computed and must agree.
pub fn classify_segment(ks: &[f64], th: f64) -> Result<(f64, Label)> {
    if ks.is_empty() {
        return Err(Error::InsufficientData("segment has no K_alpha values".into()));
    }
    let above: f64 = ks.iter().filter(|&&k| k >= th).map(|k| k - th).sum();
    let below: f64 = ks.iter().filter(|&&k| k < th).map(|k| th - k).sum();
    let l = above - below;
    let by_sum = l >= 0.0;
    let by_mean = mean_at_least(ks, th);
    let anomalous = if by_sum == by_mean {
        by_sum
    } else {
        // Only reachable when rounding puts L within an ulp of zero; the
        // compensated sum is the tie-breaker.
        exact_sign_nonneg(ks, th)
    };
    let label = if anomalous { Label::Anomalous } else { Label::Normal };
    Ok((l, label))
}

fn mean_at_least(ks: &[f64], th: f64) -> bool {
    ks.iter().sum::<f64>() / ks.len() as f64 >= th
}

/// Sign of `sum(k - th)` via Neumaier summation.
fn exact_sign_nonneg(ks: &[f64], th: f64) -> bool {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &k in ks {
        for x in [k, -th] {
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
        }
    }
    sum + comp >= 0.0
}

/// Label by the summation form only.
pub fn label_by_sum(ks: &[f64], th: f64) -> Label {
    let above: f64 = ks.iter().filter(|&&k| k >= th).map(|k| k - th).sum();
    let below: f64 = ks.iter().filter(|&&k| k < th).map(|k| th - k).sum();
    if above - below >= 0.0 {
        Label::Anomalous
    } else {
        Label::Normal
    }
}

/// Label by the mean form only.
pub fn label_by_mean(ks: &[f64], th: f64) -> Label {
    if mean_at_least(ks, th) {
        Label::Anomalous
    } else {
        Label::Normal
    }
}

/// Classifies every labelled segment of `map` at threshold `th`.
pub fn classify_segments(
    series: &KAlphaSeries,
    map: &SegmentMap,
    th: f64,
) -> Result<Vec<SegmentPrediction>> {
    let labels = map
        .labels()
        .ok_or_else(|| Error::InvalidArgument("segment map has no labels".into()))?;
    map.segments()
        .into_iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (range, &truth))| {
            let ks = series.in_range(range.clone());
            let (l, predicted) = classify_segment(&ks, th).map_err(|_| {
                Error::InsufficientData(format!(
                    "segment {i} ({}..{}) has no K_alpha values",
                    range.start, range.end
                ))
            })?;
            Ok(SegmentPrediction {
                segment: i,
                start: range.start,
                end: range.end,
                l,
                predicted,
                truth,
            })
        })
        .collect()
}

/// `(tp_rate, fp_rate)` over segment predictions.
pub fn confusion_rates(preds: &[SegmentPrediction]) -> Result<(f64, f64)> {
    let count = |truth: Label, predicted: Option<Label>| {
        preds
            .iter()
            .filter(|p| p.truth == truth && predicted.is_none_or(|l| p.predicted == l))
            .count()
    };
    let positives = count(Label::Anomalous, None);
    let negatives = count(Label::Normal, None);
    if positives == 0 || negatives == 0 {
        return Err(Error::UndefinedRate(format!(
            "need both classes, got {positives} anomalous and {negatives} normal segments"
        )));
    }
    let tp = count(Label::Anomalous, Some(Label::Anomalous));
    let fp = count(Label::Normal, Some(Label::Anomalous));
    Ok((tp as f64 / positives as f64, fp as f64 / negatives as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub threshold: f64,
    pub tp_rate: f64,
    pub fp_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// One row per threshold, thresholds ascending.
    pub rows: Vec<RocPoint>,
    /// Distinct `(fp_rate, tp_rate)` points including `(0,0)` and `(1,1)`,
    /// sorted by fp then tp.
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn threshold_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Default grid: 41 values spanning the observed K_alpha range.
pub fn default_thresholds(series: &KAlphaSeries, n: usize) -> Vec<f64> {
    let lo = series.values().fold(f64::INFINITY, f64::min);
    let hi = series.values().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return Vec::new();
    }
    threshold_grid(lo, hi, n)
}

pub fn roc_curve(series: &KAlphaSeries, map: &SegmentMap, thresholds: &[f64]) -> Result<RocCurve> {
    if thresholds.is_empty() {
        return Err(Error::InvalidArgument("no thresholds given".into()));
    }
    let mut ths = thresholds.to_vec();
    ths.sort_by(f64::total_cmp);
    ths.dedup();
    let rows = ths
        .iter()
        .map(|&th| {
            let preds = classify_segments(series, map, th)?;
            let (tp_rate, fp_rate) = confusion_rates(&preds)?;
            Ok(RocPoint {
                threshold: th,
                tp_rate,
                fp_rate,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points: Vec<(f64, f64)> = rows.iter().map(|r| (r.fp_rate, r.tp_rate)).collect();
    points.push((0.0, 0.0));
    points.push((1.0, 1.0));
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup();
    let auc = trapezoid_auc(&points);
    Ok(RocCurve { rows, points, auc })
}

/// Area under sorted `(x, y)` points by the trapezoidal rule.
pub fn trapezoid_auc(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) / 2.0)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dca::KAlpha;
    use proptest::prelude::*;

    fn series(values: &[f64]) -> KAlphaSeries {
        KAlphaSeries {
            entries: values
                .iter()
                .enumerate()
                .map(|(i, &k)| KAlpha {
                    antigen: i,
                    k_alpha: k,
                    presented: 1,
                })
                .collect(),
        }
    }

    fn pred(truth: Label, predicted: Label) -> SegmentPrediction {
        SegmentPrediction {
            segment: 0,
            start: 0,
            end: 1,
            l: 0.0,
            predicted,
            truth,
        }
    }

    #[test]
    fn classify_examples() {
        let (l, lab) = classify_segment(&[0.5, -0.2], 0.0).unwrap();
        assert!((l - 0.3).abs() < 1e-15);
        assert_eq!(lab, Label::Anomalous);

        let (l, lab) = classify_segment(&[1.7; 3], 1.7).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(lab, Label::Anomalous);

        let (l, lab) = classify_segment(&[-1.0, -1.0], 0.0).unwrap();
        assert_eq!(l, -2.0);
        assert_eq!(lab, Label::Normal);

        assert!(classify_segment(&[], 0.0).is_err());
    }

    #[test]
    fn rates_examples() {
        use Label::*;
        let mut preds = vec![pred(Anomalous, Anomalous); 3];
        preds.push(pred(Normal, Anomalous));
        preds.extend(vec![pred(Normal, Normal); 3]);
        assert_eq!(confusion_rates(&preds).unwrap(), (1.0, 0.25));

        let perfect = vec![pred(Anomalous, Anomalous), pred(Normal, Normal)];
        assert_eq!(confusion_rates(&perfect).unwrap(), (1.0, 0.0));

        let mut preds = vec![pred(Anomalous, Anomalous); 2];
        preds.push(pred(Anomalous, Normal));
        preds.extend(vec![pred(Normal, Normal); 4]);
        let (tp, fp) = confusion_rates(&preds).unwrap();
        assert_eq!(format!("{tp:.2}"), "0.67");
        assert_eq!(fp, 0.0);

        assert!(matches!(
            confusion_rates(&[pred(Normal, Normal)]),
            Err(Error::UndefinedRate(_))
        ));
    }

    #[test]
    fn separable_series_has_unit_auc() {
        // segments of 10: normal, anomalous, normal, anomalous
        let mut v = Vec::new();
        for (i, level) in [-2.0, 1.0, -1.5, 2.0].iter().enumerate() {
            v.extend((0..10).map(|j| level + 0.01 * ((i + j) % 3) as f64));
        }
        let s = series(&v);
        let map = SegmentMap::from_boundaries(40, vec![10, 20, 30])
            .unwrap()
            .apply_labels(&[Label::Normal, Label::Anomalous, Label::Normal, Label::Anomalous])
            .unwrap();
        let roc = roc_curve(&s, &map, &default_thresholds(&s, 41)).unwrap();
        assert!(roc.rows.iter().any(|r| r.tp_rate == 1.0 && r.fp_rate == 0.0));
        assert_eq!(roc.auc, 1.0);
    }

    #[test]
    fn constant_series_is_chance() {
        let s = series(&[0.7; 20]);
        let map = SegmentMap::from_boundaries(20, vec![10])
            .unwrap()
            .apply_labels(&[Label::Normal, Label::Anomalous])
            .unwrap();
        let roc = roc_curve(&s, &map, &[-1.0, 0.7, 2.0]).unwrap();
        let pts: Vec<(f64, f64)> = roc.rows.iter().map(|r| (r.fp_rate, r.tp_rate)).collect();
        assert_eq!(pts, vec![(1.0, 1.0), (1.0, 1.0), (0.0, 0.0)]);
        assert_eq!(roc.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert!((roc.auc - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unlabelled_map_and_empty_segment_rejected() {
        let s = series(&[1.0; 5]);
        let map = SegmentMap::from_boundaries(10, vec![5]).unwrap();
        assert!(classify_segments(&s, &map, 0.0).is_err());
        let map = map.apply_labels(&[Label::Normal, Label::Anomalous]).unwrap();
        assert!(classify_segments(&s, &map, 0.0).is_err());
        assert!(roc_curve(&s, &map, &[]).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = threshold_grid(-2.0, 2.0, 41);
        assert_eq!(g.len(), 41);
        assert_eq!(g[0], -2.0);
        assert_eq!(g[40], 2.0);
        assert!((g[20]).abs() < 1e-15);
        assert_eq!(trapezoid_auc(&[(0.0, 0.0), (1.0, 1.0)]), 0.5);
    }

    proptest! {
        #[test]
        fn sum_and_mean_forms_agree(
            ks in prop::collection::vec(-10.0f64..10.0, 1..30),
            th in -10.0f64..10.0,
        ) {
            let (_, label) = classify_segment(&ks, th).unwrap();
            let mut shuffled = ks.clone();
            shuffled.reverse();
            prop_assert_eq!(classify_segment(&shuffled, th).unwrap().1, label);
        }

        #[test]
        fn raising_threshold_never_adds_anomalies(
            ks in prop::collection::vec(-10.0f64..10.0, 1..30),
            a in -10.0f64..10.0,
            b in -10.0f64..10.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let at_lo = classify_segment(&ks, lo).unwrap().1;
            let at_hi = classify_segment(&ks, hi).unwrap().1;
            prop_assert!(!(at_lo == Label::Normal && at_hi == Label::Anomalous));
        }
    }
}
