//! Accuracy, per-class precision/recall/F1, macro-F1 over the full declared
//! label space, and the confusion matrix (rows = true, columns = predicted).

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: Label,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: Vec<Vec<usize>>,
}

fn safe_div(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Metrics over class indices `0..k`, indices naming positions in `labels`.
pub(crate) fn metrics_from_indices(truth: &[usize], predicted: &[usize], labels: &[Label]) -> Metrics {
    let k = labels.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&t, &p) in truth.iter().zip(predicted) {
        confusion[t][p] += 1;
    }
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    let per_class: Vec<ClassMetrics> = (0..k)
        .map(|c| {
            let tp = confusion[c][c] as f64;
            let support: usize = confusion[c].iter().sum();
            let predicted_c: usize = confusion.iter().map(|row| row[c]).sum();
            let precision = safe_div(tp, predicted_c as f64);
            let recall = safe_div(tp, support as f64);
            ClassMetrics {
                label: labels[c],
                precision,
                recall,
                f1: safe_div(2.0 * precision * recall, precision + recall),
                support,
            }
        })
        .collect();
    let macro_f1 = per_class.iter().map(|c| c.f1).sum::<f64>() / k as f64;
    Metrics {
        accuracy: correct as f64 / truth.len() as f64,
        macro_f1,
        per_class,
        confusion,
    }
}

pub fn compute_metrics(truth: &[Label], predicted: &[Label], label_space: &[Label]) -> Result<Metrics> {
    if truth.len() != predicted.len() || truth.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "need equal non-empty label vectors, got {} and {}",
            truth.len(),
            predicted.len()
        )));
    }
    let position = |l: &Label| {
        label_space
            .iter()
            .position(|s| s == l)
            .ok_or_else(|| Error::UnknownLabel(l.to_string()))
    };
    let t = truth.iter().map(position).collect::<Result<Vec<_>>>()?;
    let p = predicted.iter().map(position).collect::<Result<Vec<_>>>()?;
    Ok(metrics_from_indices(&t, &p, label_space))
}
