//! Deterministic stratified fold assignment for nested cross-validation.

use std::collections::BTreeMap;

use log::warn;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::exec::rng_for;

/// Indices (into the dataset's article order) of one train/test split.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterFold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    /// Partition of `train`; each inner split's indices are article indices.
    pub inner: Vec<Split>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub seed: u64,
    pub outer: Vec<OuterFold>,
}

/// Fold number for each position. Positions are grouped by label, shuffled
/// within their class, then dealt round-robin with a counter that runs on
/// across classes, so fold sizes differ by at most one and every fold holds
/// `⌊n_c/k⌋` or `⌈n_c/k⌉` members of each class `c`.
pub fn stratified_assignment<R: Rng>(labels: &[usize], k: usize, rng: &mut R) -> Vec<usize> {
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (pos, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(pos);
    }
    let mut fold = vec![0; labels.len()];
    let mut counter = rng.random_range(0..k.max(1));
    for members in by_class.values_mut() {
        members.shuffle(rng);
        for &pos in members.iter() {
            fold[pos] = counter % k;
            counter += 1;
        }
    }
    fold
}

pub fn unstratified_assignment<R: Rng>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut fold = vec![0; n];
    for (i, &pos) in order.iter().enumerate() {
        fold[pos] = i % k;
    }
    fold
}

/// Turn a per-position fold assignment over `members` into `k` splits.
pub fn splits_from_assignment(members: &[usize], assignment: &[usize], k: usize) -> Vec<Split> {
    (0..k)
        .map(|f| {
            let (test, train) = members
                .iter()
                .zip(assignment)
                .partition::<Vec<_>, _>(|(_, &a)| a == f);
            Split {
                train: train.into_iter().map(|(&m, _)| m).collect(),
                test: test.into_iter().map(|(&m, _)| m).collect(),
            }
        })
        .collect()
}

fn warn_sparse_classes(labels: &[usize], k: usize, what: &str) {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let sparse: Vec<usize> = counts.iter().filter(|(_, &c)| c < k).map(|(&l, _)| l).collect();
    if !sparse.is_empty() {
        warn!("{what}: classes {sparse:?} have fewer than {k} samples; stratification is best-effort");
    }
}

/// Stratified `k`-fold splits over positions `0..labels.len()`.
pub fn stratified_splits(labels: &[usize], k: usize, seed: u64, keys: &[u64]) -> Result<Vec<Split>> {
    if k < 2 || labels.len() < k {
        return Err(Error::InvalidArgument(format!(
            "cannot split {} samples into {k} folds",
            labels.len()
        )));
    }
    let mut rng = rng_for(seed, keys);
    let assignment = stratified_assignment(labels, k, &mut rng);
    let members: Vec<usize> = (0..labels.len()).collect();
    Ok(splits_from_assignment(&members, &assignment, k))
}

pub fn plan_folds_for_labels(labels: &[usize], outer: usize, inner: usize, seed: u64) -> Result<FoldPlan> {
    if outer < 2 || inner < 2 {
        return Err(Error::InvalidArgument("need at least 2 outer and 2 inner folds".into()));
    }
    if labels.len() < outer {
        return Err(Error::InvalidArgument(format!(
            "{} articles cannot fill {outer} folds",
            labels.len()
        )));
    }
    warn_sparse_classes(labels, outer, "outer folds");
    let all: Vec<usize> = (0..labels.len()).collect();
    let assignment = stratified_assignment(labels, outer, &mut rng_for(seed, &[0xF01D]));
    let mut folds = Vec::with_capacity(outer);
    for (f, split) in splits_from_assignment(&all, &assignment, outer).into_iter().enumerate() {
        if split.train.len() < inner {
            return Err(Error::InvalidArgument(format!(
                "outer fold {f} has {} training articles, fewer than {inner} inner folds",
                split.train.len()
            )));
        }
        let train_labels: Vec<usize> = split.train.iter().map(|&i| labels[i]).collect();
        warn_sparse_classes(&train_labels, inner, &format!("inner folds of outer fold {f}"));
        let inner_assignment =
            stratified_assignment(&train_labels, inner, &mut rng_for(seed, &[0xF01D, f as u64]));
        let inner_splits = splits_from_assignment(&split.train, &inner_assignment, inner);
        folds.push(OuterFold {
            train: split.train,
            test: split.test,
            inner: inner_splits,
        });
    }
    Ok(FoldPlan { seed, outer: folds })
}

/// Stratified outer/inner plan over the dataset's primary labels.
pub fn plan_folds(d: &Dataset, outer: usize, inner: usize, seed: u64) -> Result<FoldPlan> {
    plan_folds_for_labels(&d.targets(), outer, inner, seed)
}
