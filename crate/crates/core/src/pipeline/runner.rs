//! Nested cross-validation for single setups, the majority baseline, and the
//! stacked meta-classifier.

use std::collections::HashMap;

use log::info;
use ndarray::{Array2, Axis};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::exec::derive_seed;
use crate::feature_store::Standardizer;
use crate::models::grid::inner_splits;
use crate::models::{
    accuracy_of, fit_mlp, fit_softmax, one_hot, select_l2, Classifier, MlpClassifier, SoftmaxClassifier,
};
use crate::resample::{resample, ResamplePlan, ResampleStrategy};

use super::audit::{training_set, AuditSummary, Posteriors, TrainingSet, Use};
use super::experiment::{hstack, Experiment};
use super::folds::{OuterFold, Split};
use super::setups::{ClassifierKind, SetupKind, SetupSpec};

const K: usize = Label::COUNT;

/// Predictions of one outer fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldOutcome {
    pub fold: usize,
    pub test: Posteriors,
    /// Inner-fold posteriors for the outer-training articles, in
    /// `OuterFold::train` order. Absent for the baseline.
    pub oof: Option<Posteriors>,
    pub selected_l2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SetupOutcome {
    pub spec: SetupSpec,
    pub dimension: usize,
    pub folds: Vec<FoldOutcome>,
    pub audit: AuditSummary,
}

enum Fitted {
    Softmax(SoftmaxClassifier),
    Mlp(Box<MlpClassifier>),
}

impl Fitted {
    fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        match self {
            Fitted::Softmax(m) => m.predict_proba(x),
            Fitted::Mlp(m) => m.predict_proba(x),
        }
    }
}

/// How a classifier is trained on a design matrix.
#[derive(Clone, Copy)]
struct Trainer<'p> {
    kind: ClassifierKind,
    resample: &'p ResamplePlan,
}

// Seed key namespaces.
const KEY_MODEL: u64 = 0x30DE1;
const KEY_RESAMPLE: u64 = 0x5A3;
const OUTER_REFIT: u64 = u64::MAX;

impl<'a> Experiment<'a> {
    fn fit(&self, t: Trainer, x: Array2<f64>, y: Vec<usize>, l2: f64, keys: &[u64]) -> Result<Fitted> {
        let (x, y) = if t.resample.strategy == ResampleStrategy::None {
            (x, y)
        } else {
            let plan = ResamplePlan {
                seed: derive_seed(self.config.seed, &[&[KEY_RESAMPLE], keys].concat()),
                ..t.resample.clone()
            };
            let r = resample(&x, &y, &plan)?;
            (r.x, r.y)
        };
        match t.kind {
            ClassifierKind::Softmax => {
                fit_softmax(&x, &y, K, l2, &self.config.grid.softmax_options()).map(Fitted::Softmax)
            }
            ClassifierKind::Mlp => {
                let options = crate::models::MlpOptions {
                    l2_lambda: l2,
                    ..self.config.mlp
                };
                let seed = derive_seed(self.config.seed, &[&[KEY_MODEL], keys].concat());
                fit_mlp(&x, &y, K, &options, seed).map(|m| Fitted::Mlp(Box::new(m)))
            }
        }
    }

    fn labels_of(&self, idx: &[usize]) -> Vec<usize> {
        idx.iter().map(|&i| self.targets[i]).collect()
    }

    /// Inner splits of an outer fold, replaced by unstratified ones when a
    /// stratified training part would hold a single class.
    fn inner_of(&self, fold: &OuterFold, seed_keys: &[u64]) -> Result<Vec<Split>> {
        let single_class = |s: &Split| {
            let y = self.labels_of(&s.train);
            y.iter().all(|&c| c == y[0])
        };
        if !fold.inner.iter().any(single_class) {
            return Ok(fold.inner.clone());
        }
        let local = inner_splits(
            &self.labels_of(&fold.train),
            self.config.inner_folds,
            derive_seed(self.config.seed, seed_keys),
        )?;
        let map = |v: &[usize]| v.iter().map(|&i| fold.train[i]).collect();
        Ok(local
            .iter()
            .map(|s| Split {
                train: map(&s.train),
                test: map(&s.test),
            })
            .collect())
    }

    /// Grid-search L2 on the inner splits, then refit on the whole outer
    /// training part. The inner predictions at the chosen strength are kept
    /// as out-of-fold posteriors.
    fn nested_fold<D>(&self, spec_id: u32, f: usize, fold: &OuterFold, t: Trainer, design: D) -> Result<FoldOutcome>
    where
        D: Fn(&[usize], &[usize]) -> Result<(Array2<f64>, Array2<f64>)> + Sync,
    {
        let grid = &self.config.grid.l2;
        let splits = self.inner_of(fold, &[spec_id as u64, f as u64])?;
        let per_split = self.config.execution.try_map(&splits.iter().enumerate().collect::<Vec<_>>(), |&(s, split)| {
            let (xt, xv) = design(&split.train, &split.test)?;
            let yt = self.labels_of(&split.train);
            grid.iter()
                .enumerate()
                .map(|(g, &l2)| {
                    let keys = [spec_id as u64, f as u64, s as u64, g as u64];
                    self.fit(t, xt.clone(), yt.clone(), l2, &keys)?.predict_proba(&xv)
                })
                .collect::<Result<Vec<_>>>()
        })?;

        let mut scores = vec![0.0; grid.len()];
        for (split, probs) in splits.iter().zip(&per_split) {
            let yv = self.labels_of(&split.test);
            for (g, p) in probs.iter().enumerate() {
                scores[g] += accuracy_of(p, &yv) / splits.len() as f64;
            }
        }
        let l2 = select_l2(grid, &scores);
        let g = grid.iter().position(|&v| v == l2).expect("selected from grid");

        let position: HashMap<usize, usize> = fold.train.iter().enumerate().map(|(r, &i)| (i, r)).collect();
        let mut oof = Array2::zeros((fold.train.len(), K));
        let mut producers: Vec<Option<TrainingSet>> = vec![None; fold.train.len()];
        for (split, probs) in splits.iter().zip(&per_split) {
            let producer = training_set(split.train.clone());
            for (r, &i) in split.test.iter().enumerate() {
                let row = position[&i];
                oof.row_mut(row).assign(&probs[g].row(r));
                producers[row] = Some(producer.clone());
            }
        }
        let producers = producers
            .into_iter()
            .map(|p| p.expect("inner test parts cover the outer training part"))
            .collect();

        let (xt, xs) = design(&fold.train, &fold.test)?;
        let keys = [spec_id as u64, f as u64, OUTER_REFIT, g as u64];
        let model = self.fit(t, xt, self.labels_of(&fold.train), l2, &keys)?;
        let producer = training_set(fold.train.clone());
        Ok(FoldOutcome {
            fold: f,
            test: Posteriors {
                articles: fold.test.clone(),
                probs: model.predict_proba(&xs)?,
                producers: vec![producer; fold.test.len()],
            },
            oof: Some(Posteriors {
                articles: fold.train.clone(),
                probs: oof,
                producers,
            }),
            selected_l2: Some(l2),
        })
    }

    fn audited(&self, spec: &SetupSpec, folds: Vec<FoldOutcome>, mut audit: AuditSummary) -> SetupOutcome {
        for fo in &folds {
            audit.check(spec.id, fo.fold, &fo.test, Use::Evaluation, &self.ids);
        }
        SetupOutcome {
            dimension: self.dimension(spec),
            spec: spec.clone(),
            folds,
            audit,
        }
    }

    /// Predict each outer-training part's majority label (lowest index on ties).
    pub fn run_baseline(&self, spec: &SetupSpec) -> Result<SetupOutcome> {
        let folds = self
            .plan
            .outer
            .iter()
            .enumerate()
            .map(|(f, fold)| {
                let mut counts = [0usize; K];
                for i in &fold.train {
                    counts[self.targets[*i]] += 1;
                }
                let majority = (0..K).fold(0, |best, c| if counts[c] > counts[best] { c } else { best });
                let producer = training_set(fold.train.clone());
                FoldOutcome {
                    fold: f,
                    test: Posteriors {
                        articles: fold.test.clone(),
                        probs: one_hot(&vec![majority; fold.test.len()], K),
                        producers: vec![producer; fold.test.len()],
                    },
                    oof: None,
                    selected_l2: None,
                }
            })
            .collect();
        Ok(self.audited(spec, folds, AuditSummary::default()))
    }

    /// One classifier over the concatenated feature groups of `spec`.
    pub fn run_setup(&self, spec: &SetupSpec) -> Result<SetupOutcome> {
        let groups = match &spec.kind {
            SetupKind::Single { groups } => groups,
            SetupKind::Baseline => return self.run_baseline(spec),
            SetupKind::Meta { .. } => {
                return Err(Error::InvalidArgument(format!(
                    "setup {} is a meta setup; run it with its bases",
                    spec.id
                )))
            }
        };
        self.check(spec)?;
        info!("setup {} ({}): {} dims", spec.id, spec.name, self.dimension(spec));
        let t = Trainer {
            kind: spec.classifier,
            resample: &spec.resample,
        };
        let jobs: Vec<(usize, &OuterFold)> = self.plan.outer.iter().enumerate().collect();
        let folds = self.config.execution.try_map(&jobs, |&(f, fold)| {
            self.nested_fold(spec.id, f, fold, t, |tr, ap| self.design(groups, tr, ap))
        })?;
        Ok(self.audited(spec, folds, AuditSummary::default()))
    }

    /// Softmax stacked over the base setups' posteriors: out-of-fold ones for
    /// outer-training articles, refit-model ones for test articles.
    pub fn run_meta(&self, spec: &SetupSpec, bases: &[&SetupOutcome]) -> Result<SetupOutcome> {
        let SetupKind::Meta { bases: wanted } = &spec.kind else {
            return Err(Error::InvalidArgument(format!("setup {} is not a meta setup", spec.id)));
        };
        let got: Vec<u32> = bases.iter().map(|b| b.spec.id).collect();
        if &got != wanted {
            return Err(Error::InvalidArgument(format!(
                "meta setup {} expects bases {wanted:?}, got {got:?}",
                spec.id
            )));
        }
        info!("setup {} ({}): {} dims", spec.id, spec.name, self.dimension(spec));
        let mut audit = AuditSummary::default();
        for (f, _) in self.plan.outer.iter().enumerate() {
            for b in bases {
                let fo = &b.folds[f];
                let oof = fo
                    .oof
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument(format!("base setup {} has no posteriors", b.spec.id)))?;
                audit.check(spec.id, f, oof, Use::MetaTraining, &self.ids);
                audit.check(spec.id, f, &fo.test, Use::MetaInput, &self.ids);
            }
        }
        let plain = ResamplePlan::default();
        let t = Trainer {
            kind: ClassifierKind::Softmax,
            resample: &plain,
        };
        let jobs: Vec<(usize, &OuterFold)> = self.plan.outer.iter().enumerate().collect();
        let folds = self.config.execution.try_map(&jobs, |&(f, fold)| {
            // One row per article of this outer fold: OOF posteriors for the
            // training part, refit-model posteriors for the test part.
            let train_part = hstack(&bases.iter().map(|b| b.folds[f].oof.as_ref().unwrap().probs.clone()).collect::<Vec<_>>());
            let test_part = hstack(&bases.iter().map(|b| b.folds[f].test.probs.clone()).collect::<Vec<_>>());
            let mut row_of = HashMap::new();
            for (r, &i) in fold.train.iter().enumerate() {
                row_of.insert(i, r);
            }
            for (r, &i) in fold.test.iter().enumerate() {
                row_of.insert(i, fold.train.len() + r);
            }
            let all = ndarray::concatenate(Axis(0), &[train_part.view(), test_part.view()]).expect("equal widths");
            self.nested_fold(spec.id, f, fold, t, |tr, ap| {
                let pick = |idx: &[usize]| all.select(Axis(0), &idx.iter().map(|i| row_of[i]).collect::<Vec<_>>());
                let (xt, xa) = (pick(tr), pick(ap));
                let s = Standardizer::fit(&xt);
                Ok((s.transform(&xt), s.transform(&xa)))
            })
        })?;
        Ok(self.audited(spec, folds, audit))
    }
}
