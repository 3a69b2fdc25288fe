//! Immutable run context: the dataset, its fold plan, every feature group
//! aligned to dataset order, and fold-local design-matrix construction.

use std::collections::BTreeMap;

use ndarray::{Array2, Axis};

use crate::corpus::{reference_date, Dataset, Label};
use crate::error::{Error, Result};
use crate::feature_store::{registry_group, FeatureStore, Standardizer, LSA_BG, MEDIA, STYLO};
use crate::local_features::{media_matrix, stylo_matrix, tokenize, TokenizedText};
use crate::lsa::LsaModel;

use super::config::PipelineConfig;
use super::folds::{plan_folds, FoldPlan};
use super::setups::{SetupKind, SetupSpec};

pub struct Experiment<'a> {
    pub(crate) dataset: &'a Dataset,
    pub(crate) config: PipelineConfig,
    pub(crate) plan: FoldPlan,
    pub(crate) targets: Vec<usize>,
    pub(crate) ids: Vec<String>,
    groups: BTreeMap<String, Array2<f64>>,
    titles: Vec<TokenizedText>,
    bodies: Vec<TokenizedText>,
}

impl<'a> Experiment<'a> {
    /// Align the store to the dataset, add the native fold-independent groups
    /// when absent, and plan folds.
    pub fn new(dataset: &'a Dataset, store: &FeatureStore, config: PipelineConfig) -> Result<Self> {
        config.grid.validate()?;
        let ids = dataset.ids();
        let mut groups = BTreeMap::new();
        for m in store.iter() {
            if m.group().name == LSA_BG {
                log::warn!("ignoring precomputed `{LSA_BG}`; LSA is fitted inside each training fold");
                continue;
            }
            groups.insert(m.group().name.clone(), m.align(&ids)?.into_rows());
        }
        if !groups.contains_key(STYLO) {
            groups.insert(STYLO.into(), stylo_matrix(dataset, config.execution)?.into_rows());
        }
        if !groups.contains_key(MEDIA) {
            groups.insert(MEDIA.into(), media_matrix(dataset, reference_date())?.into_rows());
        }
        let plan = plan_folds(dataset, config.outer_folds, config.inner_folds, config.seed)?;
        let titles = config.execution.map(dataset.articles(), |a| tokenize(&a.title));
        let bodies = config.execution.map(dataset.articles(), |a| tokenize(&a.body));
        Ok(Experiment {
            dataset,
            targets: dataset.targets(),
            ids,
            config,
            plan,
            groups,
            titles,
            bodies,
        })
    }

    pub fn dataset(&self) -> &Dataset {
        self.dataset
    }

    pub fn plan(&self) -> &FoldPlan {
        &self.plan
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn group_names(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str).chain(std::iter::once(LSA_BG))
    }

    fn group_dim(&self, name: &str) -> usize {
        if name == LSA_BG {
            self.config.lsa_title_dim + self.config.lsa_body_dim
        } else {
            self.groups[name].ncols()
        }
    }

    /// Input width of a setup's classifier.
    pub fn dimension(&self, spec: &SetupSpec) -> usize {
        match &spec.kind {
            SetupKind::Baseline => 0,
            SetupKind::Single { groups } => groups.iter().map(|g| self.group_dim(g)).sum(),
            SetupKind::Meta { bases } => bases.len() * Label::COUNT,
        }
    }

    /// Fail fast when a setup needs a group or translation that is absent.
    pub fn check(&self, spec: &SetupSpec) -> Result<()> {
        for g in spec.groups() {
            if g != LSA_BG && !self.groups.contains_key(g) {
                return Err(Error::MissingGroup(g.clone()));
            }
            let needs_translation = registry_group(g).map_or(g.ends_with("_en"), |r| r.needs_translation());
            if needs_translation {
                let missing: Vec<String> = self
                    .dataset
                    .articles()
                    .iter()
                    .filter(|a| !a.has_translation())
                    .map(|a| a.id.clone())
                    .collect();
                if !missing.is_empty() {
                    return Err(Error::MissingTranslation {
                        group: g.clone(),
                        ids: missing,
                    });
                }
            }
        }
        if spec.groups().is_empty() && matches!(spec.kind, SetupKind::Single { .. }) {
            return Err(Error::InvalidArgument(format!("setup {} lists no feature groups", spec.id)));
        }
        Ok(())
    }

    /// Standardized design matrices for `train` and `apply`, with every
    /// transform (LSA, scaling) fitted on `train` only.
    pub fn design(&self, groups: &[String], train: &[usize], apply: &[usize]) -> Result<(Array2<f64>, Array2<f64>)> {
        let mut train_parts = Vec::with_capacity(groups.len());
        let mut apply_parts = Vec::with_capacity(groups.len());
        for g in groups {
            if g == LSA_BG {
                let (a, b) = self.lsa_design(train, apply)?;
                train_parts.push(a);
                apply_parts.push(b);
            } else {
                let m = self.groups.get(g).ok_or_else(|| Error::MissingGroup(g.clone()))?;
                train_parts.push(m.select(Axis(0), train));
                apply_parts.push(m.select(Axis(0), apply));
            }
        }
        let xt = hstack(&train_parts);
        let xa = hstack(&apply_parts);
        let s = Standardizer::fit(&xt);
        Ok((s.transform(&xt), s.transform(&xa)))
    }

    fn lsa_design(&self, train: &[usize], apply: &[usize]) -> Result<(Array2<f64>, Array2<f64>)> {
        let titles: Vec<&TokenizedText> = train.iter().map(|&i| &self.titles[i]).collect();
        let bodies: Vec<&TokenizedText> = train.iter().map(|&i| &self.bodies[i]).collect();
        let model = LsaModel::fit_with_dims(&titles, &bodies, self.config.lsa_title_dim, self.config.lsa_body_dim)?;
        let project = |idx: &[usize]| {
            let mut out = Array2::zeros((idx.len(), model.dim()));
            for (r, &i) in idx.iter().enumerate() {
                out.row_mut(r).assign(&model.features(&self.titles[i], &self.bodies[i]));
            }
            out
        };
        Ok((project(train), project(apply)))
    }
}

pub(crate) fn hstack(parts: &[Array2<f64>]) -> Array2<f64> {
    let views: Vec<_> = parts.iter().map(|p| p.view()).collect();
    ndarray::concatenate(Axis(1), &views).expect("parts share row counts")
}
