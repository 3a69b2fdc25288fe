//! Run reports and their on-disk renderings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::models::argmax_rows;
use crate::resample::ResampleStrategy;

use super::audit::AuditSummary;
use super::config::PipelineConfig;
use super::experiment::Experiment;
use super::metrics::{metrics_from_indices, ClassMetrics};
use super::runner::SetupOutcome;
use super::setups::{ClassifierKind, SetupKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub test_size: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub selected_l2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub fold: usize,
    pub truth: Label,
    pub predicted: Label,
}

/// Pooled results of one setup. Accuracy, macro-F1 and per-class scores are
/// percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub setup: u32,
    pub name: String,
    pub dimension: usize,
    pub classifier: Option<ClassifierKind>,
    pub resample: ResampleStrategy,
    pub articles: usize,
    pub accuracy: f64,
    pub macro_f1: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: Vec<Vec<usize>>,
    pub folds: Vec<FoldReport>,
    pub predictions: Vec<Prediction>,
    pub config: PipelineConfig,
    pub audit: AuditSummary,
}

fn percent(x: f64) -> f64 {
    100.0 * x
}

impl RunReport {
    pub fn from_outcome(exp: &Experiment, outcome: &SetupOutcome) -> Result<Self> {
        let mut truth = Vec::new();
        let mut predicted = Vec::new();
        let mut predictions = Vec::new();
        let mut folds = Vec::new();
        for fo in &outcome.folds {
            let pred = argmax_rows(&fo.test.probs);
            let t: Vec<usize> = fo.test.articles.iter().map(|&i| exp.targets[i]).collect();
            let m = metrics_from_indices(&t, &pred, &Label::ALL);
            folds.push(FoldReport {
                fold: fo.fold,
                test_size: t.len(),
                accuracy: percent(m.accuracy),
                macro_f1: percent(m.macro_f1),
                selected_l2: fo.selected_l2,
            });
            for ((&a, &ti), &pi) in fo.test.articles.iter().zip(&t).zip(&pred) {
                predictions.push((a, fo.fold, ti, pi));
            }
            truth.extend(t);
            predicted.extend(pred);
        }
        if truth.len() != exp.targets.len() {
            return Err(Error::InvalidArgument(format!(
                "setup {}: pooled predictions cover {} of {} articles",
                outcome.spec.id,
                truth.len(),
                exp.targets.len()
            )));
        }
        predictions.sort_unstable_by_key(|p| p.0);
        let m = metrics_from_indices(&truth, &predicted, &Label::ALL);
        let per_class = m
            .per_class
            .into_iter()
            .map(|c| ClassMetrics {
                precision: percent(c.precision),
                recall: percent(c.recall),
                f1: percent(c.f1),
                ..c
            })
            .collect();
        let classifier = match outcome.spec.kind {
            SetupKind::Baseline => None,
            SetupKind::Single { .. } => Some(outcome.spec.classifier),
            SetupKind::Meta { .. } => Some(ClassifierKind::Softmax),
        };
        Ok(RunReport {
            setup: outcome.spec.id,
            name: outcome.spec.name.clone(),
            dimension: outcome.dimension,
            classifier,
            resample: outcome.spec.resample.strategy,
            articles: truth.len(),
            accuracy: percent(m.accuracy),
            macro_f1: percent(m.macro_f1),
            per_class,
            confusion: m.confusion,
            folds,
            predictions: predictions
                .into_iter()
                .map(|(a, fold, t, p)| Prediction {
                    id: exp.ids[a].clone(),
                    fold,
                    truth: Label::ALL[t],
                    predicted: Label::ALL[p],
                })
                .collect(),
            config: exp.config.clone(),
            audit: outcome.audit.clone(),
        })
    }

    /// One Table-3-style row: setup, name, dimension, accuracy, macro-F1.
    pub fn summary_line(&self) -> String {
        format!(
            "{}\t{}\t{}\t{:.2}\t{:.2}",
            self.setup, self.name, self.dimension, self.accuracy, self.macro_f1
        )
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::InvalidArgument(format!("{}: {other:?}", path.display())),
    }
}

pub fn confusion_csv(report: &RunReport) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["true\\predicted".to_string()];
    header.extend(Label::ALL.iter().map(|l| l.to_string()));
    let mut rows = vec![header];
    for (l, row) in Label::ALL.iter().zip(&report.confusion) {
        let mut r = vec![l.to_string()];
        r.extend(row.iter().map(usize::to_string));
        rows.push(r);
    }
    for r in rows {
        w.write_record(&r).map_err(|e| csv_error(Path::new("confusion.csv"), e))?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidArgument(format!("csv buffer: {e}")))
}

/// Write `report.json`, `confusion.csv` and `summary.txt` into `dir`.
pub fn emit_report(report: &RunReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut json = serde_json::to_vec_pretty(report)?;
    json.push(b'\n');
    write(&dir.join("report.json"), &json)?;
    write(&dir.join("confusion.csv"), &confusion_csv(report)?)?;
    let summary = format!("setup\tname\tdimension\taccuracy\tmacro_f1\n{}\n", report.summary_line());
    write(&dir.join("summary.txt"), summary.as_bytes())
}

/// Combined table with one row per report: setup, name, dimension, accuracy, macro_f1.
pub fn write_table3(reports: &[RunReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["setup", "name", "dimension", "accuracy", "macro_f1"])
        .map_err(|e| csv_error(path, e))?;
    for r in reports {
        w.write_record([
            r.setup.to_string(),
            r.name.clone(),
            r.dimension.to_string(),
            format!("{:.2}", r.accuracy),
            format!("{:.2}", r.macro_f1),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn setup_dir(out: &Path, setup: u32) -> PathBuf {
    out.join(format!("setup_{setup:02}"))
}
