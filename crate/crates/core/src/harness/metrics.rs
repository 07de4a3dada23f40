//! Confusion counts and derived classification metrics. The positive class
//! is the case class (label 1).

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    /// False when the corresponding ratio had a zero denominator and was
    /// reported as 0.
    pub precision_defined: bool,
    pub recall_defined: bool,
}

impl Metrics {
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Metrics {
        let total = tp + fp + fn_ + tn;
        let accuracy = if total == 0 {
            0.0
        } else {
            (tp + tn) as f64 / total as f64
        };
        let precision_defined = tp + fp > 0;
        let recall_defined = tp + fn_ > 0;
        Metrics {
            tp,
            fp,
            fn_,
            tn,
            accuracy,
            precision: if precision_defined {
                tp as f64 / (tp + fp) as f64
            } else {
                0.0
            },
            recall: if recall_defined {
                tp as f64 / (tp + fn_) as f64
            } else {
                0.0
            },
            precision_defined,
            recall_defined,
        }
    }

    /// Pools confusion counts across folds (the "Total" row).
    pub fn pooled(folds: &[Metrics]) -> Metrics {
        Metrics::from_counts(
            folds.iter().map(|m| m.tp).sum(),
            folds.iter().map(|m| m.fp).sum(),
            folds.iter().map(|m| m.fn_).sum(),
            folds.iter().map(|m| m.tn).sum(),
        )
    }
}

/// Computes metrics from parallel prediction/label slices.
pub fn compute_metrics(predictions: &[u8], labels: &[u8]) -> Result<Metrics> {
    if predictions.is_empty() {
        return Err(Error::invalid("compute_metrics: empty input"));
    }
    if predictions.len() != labels.len() {
        return Err(Error::invalid(format!(
            "compute_metrics: {} predictions vs {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 1) => fn_ += 1,
            (0, 0) => tn += 1,
            _ => {
                return Err(Error::invalid(format!(
                    "compute_metrics: labels must be 0 or 1, got prediction {p} / label {l}"
                )))
            }
        }
    }
    Ok(Metrics::from_counts(tp, fp, fn_, tn))
}

/// Renders the per-fold + total table in the conventional layout:
/// one row per cross-validation round, then a pooled Total row, with
/// accuracy/precision/recall as percentages.
pub fn render_table(title: &str, per_fold: &[Metrics], total: &Metrics) -> String {
    let mut out = String::new();
    out.push_str(&format!("{title}\n"));
    out.push_str("CV     Acc    Pre    Rec\n");
    for (k, m) in per_fold.iter().enumerate() {
        out.push_str(&format!(
            "{:<6} {:>5.1}  {:>5.1}  {:>5.1}\n",
            k + 1,
            100.0 * m.accuracy,
            100.0 * m.precision,
            100.0 * m.recall
        ));
    }
    out.push_str(&format!(
        "{:<6} {:>5.1}  {:>5.1}  {:>5.1}\n",
        "Total",
        100.0 * total.accuracy,
        100.0 * total.precision,
        100.0 * total.recall
    ));
    out
}

/// Published cross-validation totals (accuracy, precision, recall in
/// percent) kept as report-format references; they come from an
/// access-restricted clinical cohort and are not reproduction targets.
pub mod reference {
    /// Residual network totals on the early-stage cohort.
    pub const RESDNET_EMCI_TOTAL: (f64, f64, f64) = (70.5, 64.7, 90.0);
    /// Residual network totals on the late-stage cohort.
    pub const RESDNET_LMCI_TOTAL: (f64, f64, f64) = (70.6, 63.4, 76.6);
    /// Static-FC + SVM baseline total accuracy (early-stage cohort).
    pub const SFC_SVM_EMCI_TOTAL_ACC: f64 = 45.5;
    /// Dynamic-FC + SVM baseline total accuracy (early-stage cohort).
    pub const DFC_SVM_EMCI_TOTAL_ACC: f64 = 48.0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_example() {
        let m = Metrics::from_counts(9, 3, 1, 7);
        assert!((m.accuracy - 0.8).abs() < 1e-15);
        assert!((m.precision - 0.75).abs() < 1e-15);
        assert!((m.recall - 0.9).abs() < 1e-15);
    }

    #[test]
    fn all_correct_is_perfect() {
        let m = compute_metrics(&[0, 1, 1, 0], &[0, 1, 1, 0]).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall), (1.0, 1.0, 1.0));
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(
            compute_metrics(&[], &[]),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn undefined_ratios_reported_as_zero_with_flag() {
        // No positive predictions and no positive labels.
        let m = compute_metrics(&[0, 0], &[0, 0]).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(!m.precision_defined);
        assert_eq!(m.recall, 0.0);
        assert!(!m.recall_defined);
        assert_eq!(m.accuracy, 1.0);
    }

    #[test]
    fn pooled_total_equals_concatenated_confusions() {
        let a = compute_metrics(&[1, 0, 1], &[1, 0, 0]).unwrap();
        let b = compute_metrics(&[0, 1], &[1, 1]).unwrap();
        let pooled = Metrics::pooled(&[a, b]);
        let concat = compute_metrics(&[1, 0, 1, 0, 1], &[1, 0, 0, 1, 1]).unwrap();
        assert_eq!(pooled.tp, concat.tp);
        assert_eq!(pooled.fp, concat.fp);
        assert_eq!(pooled.fn_, concat.fn_);
        assert_eq!(pooled.tn, concat.tn);
        assert_eq!(pooled.accuracy, concat.accuracy);
    }

    #[test]
    fn reference_totals_recorded() {
        assert_eq!(reference::RESDNET_EMCI_TOTAL.0, 70.5);
        assert_eq!(reference::RESDNET_LMCI_TOTAL, (70.6, 63.4, 76.6));
        assert!(reference::SFC_SVM_EMCI_TOTAL_ACC < reference::DFC_SVM_EMCI_TOTAL_ACC);
    }
}
