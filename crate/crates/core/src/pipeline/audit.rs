//! Fold bookkeeping checks: every posterior that reaches a metric or a
//! meta-classifier must come from a model whose training set excludes the
//! article it describes.

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Sorted article indices a model was fitted on (transforms included).
pub type TrainingSet = Arc<Vec<usize>>;

pub(crate) fn training_set(mut idx: Vec<usize>) -> TrainingSet {
    idx.sort_unstable();
    idx.dedup();
    Arc::new(idx)
}

/// Class posteriors for some articles, each row tagged with the training set
/// of the model that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Posteriors {
    pub articles: Vec<usize>,
    pub probs: Array2<f64>,
    pub producers: Vec<TrainingSet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Use {
    /// Scored against the truth in a reported metric.
    Evaluation,
    /// Fed to a meta-classifier as a training feature.
    MetaTraining,
    /// Fed to a meta-classifier as a test feature.
    MetaInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub setup: u32,
    pub fold: usize,
    pub article: String,
    pub usage: Use,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditSummary {
    pub evaluation_checked: usize,
    pub meta_training_checked: usize,
    pub meta_input_checked: usize,
    pub violations: Vec<Violation>,
}

impl AuditSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.total_checked() > 0
    }

    pub fn total_checked(&self) -> usize {
        self.evaluation_checked + self.meta_training_checked + self.meta_input_checked
    }

    pub fn merge(&mut self, other: AuditSummary) {
        self.evaluation_checked += other.evaluation_checked;
        self.meta_training_checked += other.meta_training_checked;
        self.meta_input_checked += other.meta_input_checked;
        self.violations.extend(other.violations);
    }

    pub(crate) fn check(&mut self, setup: u32, fold: usize, p: &Posteriors, usage: Use, ids: &[String]) {
        for (&a, producer) in p.articles.iter().zip(&p.producers) {
            match usage {
                Use::Evaluation => self.evaluation_checked += 1,
                Use::MetaTraining => self.meta_training_checked += 1,
                Use::MetaInput => self.meta_input_checked += 1,
            }
            if producer.binary_search(&a).is_ok() {
                self.violations.push(Violation {
                    setup,
                    fold,
                    article: ids[a].clone(),
                    usage,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detects_self_trained_rows() {
        let ids: Vec<String> = (0..4).map(|i| format!("a{i}")).collect();
        let clean = training_set(vec![2, 3]);
        let dirty = training_set(vec![3, 1, 2]);
        let p = Posteriors {
            articles: vec![0, 1],
            probs: Array2::zeros((2, 2)),
            producers: vec![clean, dirty],
        };
        let mut s = AuditSummary::default();
        s.check(7, 1, &p, Use::MetaTraining, &ids);
        assert_eq!(s.meta_training_checked, 2);
        assert_eq!(s.violations.len(), 1);
        assert_eq!(s.violations[0].article, "a1");
        assert!(!s.passed());
    }

    #[test]
    fn empty_audit_does_not_pass() {
        assert!(!AuditSummary::default().passed());
    }
}
