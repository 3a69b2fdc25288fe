//! Oversampling of training partitions: random duplication and SMOTE.
//!
//! Outputs keep every original row, unmodified and in order, followed by the
//! new rows grouped by ascending class.

use std::collections::BTreeMap;

use log::warn;
use ndarray::{Array2, ArrayView1};
use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResampleStrategy {
    #[default]
    None,
    Random,
    Smote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResamplePlan {
    pub strategy: ResampleStrategy,
    /// Per-class target counts. `None` raises every present class to the
    /// majority count.
    #[serde(default)]
    pub target: Option<BTreeMap<usize, usize>>,
    pub k_neighbors: usize,
    pub seed: u64,
}

impl Default for ResamplePlan {
    fn default() -> Self {
        ResamplePlan {
            strategy: ResampleStrategy::None,
            target: None,
            k_neighbors: 5,
            seed: 42,
        }
    }
}

impl ResamplePlan {
    pub fn with_strategy(strategy: ResampleStrategy) -> Self {
        ResamplePlan {
            strategy,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub x: Array2<f64>,
    pub y: Vec<usize>,
    /// Rows `0..n_original` are the input rows.
    pub n_original: usize,
}

fn class_members(y: &[usize]) -> BTreeMap<usize, Vec<usize>> {
    let mut m: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in y.iter().enumerate() {
        m.entry(c).or_default().push(i);
    }
    m
}

/// Final per-class counts the plan asks for.
pub fn class_targets(y: &[usize], plan: &ResamplePlan) -> Result<BTreeMap<usize, usize>> {
    let members = class_members(y);
    let mut targets: BTreeMap<usize, usize> = members.iter().map(|(&c, m)| (c, m.len())).collect();
    match &plan.target {
        None => {
            let max = targets.values().copied().max().unwrap_or(0);
            targets.values_mut().for_each(|t| *t = max);
        }
        Some(explicit) => {
            for (&c, &t) in explicit {
                let have = members.get(&c).map_or(0, Vec::len);
                if have == 0 && t > 0 {
                    return Err(Error::EmptyClass(c));
                }
                if t < have {
                    return Err(Error::InvalidArgument(format!(
                        "target {t} for class {c} is below its {have} samples"
                    )));
                }
                if t > 0 {
                    targets.insert(c, t);
                }
            }
        }
    }
    Ok(targets)
}

fn check_shapes(x: &Array2<f64>, y: &[usize]) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "{} rows but {} labels",
            x.nrows(),
            y.len()
        )));
    }
    Ok(())
}

fn assemble(x: &Array2<f64>, y: &[usize], extra_rows: Vec<Vec<f64>>, extra_y: Vec<usize>) -> Resampled {
    let d = x.ncols();
    let mut out = Array2::zeros((x.nrows() + extra_rows.len(), d));
    out.slice_mut(ndarray::s![..x.nrows(), ..]).assign(x);
    for (i, row) in extra_rows.iter().enumerate() {
        out.row_mut(x.nrows() + i).assign(&ArrayView1::from(row.as_slice()));
    }
    let mut labels = y.to_vec();
    labels.extend(extra_y);
    Resampled {
        x: out,
        y: labels,
        n_original: x.nrows(),
    }
}

fn duplicate(x: &Array2<f64>, members: &[usize], n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| x.row(*members.choose(rng).expect("non-empty class")).to_vec())
        .collect()
}

/// Duplicate minority rows uniformly at random, with replacement, up to the targets.
pub fn random_oversample(x: &Array2<f64>, y: &[usize], plan: &ResamplePlan) -> Result<Resampled> {
    check_shapes(x, y)?;
    let targets = class_targets(y, plan)?;
    let members = class_members(y);
    let (mut rows, mut labels) = (Vec::new(), Vec::new());
    for (&c, &t) in &targets {
        let m = &members[&c];
        let need = t - m.len();
        let mut rng = rng_for(plan.seed, &[0x0BE5, c as u64]);
        rows.extend(duplicate(x, m, need, &mut rng));
        labels.extend(std::iter::repeat_n(c, need));
    }
    Ok(assemble(x, y, rows, labels))
}

/// `k` nearest same-class neighbours of each member (Euclidean, ties by index).
fn neighbours(x: &Array2<f64>, members: &[usize], k: usize) -> Vec<Vec<usize>> {
    members
        .iter()
        .map(|&a| {
            let mut d: Vec<(f64, usize)> = members
                .iter()
                .filter(|&&b| b != a)
                .map(|&b| {
                    let dist = x
                        .row(a)
                        .iter()
                        .zip(x.row(b).iter())
                        .map(|(p, q)| (p - q) * (p - q))
                        .sum::<f64>();
                    (dist, b)
                })
                .collect();
            d.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
            d.into_iter().take(k).map(|(_, b)| b).collect()
        })
        .collect()
}

/// SMOTE: each synthetic row is `x + u·(x_nn − x)` for a random class member
/// `x`, one of its `k` nearest same-class neighbours `x_nn`, and `u ~ U[0,1)`.
/// `k` is clamped to `class_size − 1`; singleton classes fall back to
/// duplication.
pub fn smote(x: &Array2<f64>, y: &[usize], plan: &ResamplePlan) -> Result<Resampled> {
    check_shapes(x, y)?;
    if plan.k_neighbors == 0 {
        return Err(Error::InvalidArgument("SMOTE needs k_neighbors >= 1".into()));
    }
    let targets = class_targets(y, plan)?;
    let members = class_members(y);
    let (mut rows, mut labels) = (Vec::new(), Vec::new());
    for (&c, &t) in &targets {
        let m = &members[&c];
        let need = t - m.len();
        if need == 0 {
            continue;
        }
        let mut rng = rng_for(plan.seed, &[0x5307E, c as u64]);
        if m.len() == 1 {
            warn!("class {c} has a single sample; SMOTE falls back to duplication");
            rows.extend(duplicate(x, m, need, &mut rng));
        } else {
            let k = plan.k_neighbors.min(m.len() - 1);
            let nn = neighbours(x, m, k);
            for _ in 0..need {
                let pick = rng.random_range(0..m.len());
                let base = x.row(m[pick]);
                let other = x.row(*nn[pick].choose(&mut rng).expect("k >= 1"));
                let u: f64 = rng.random();
                rows.push(
                    base.iter()
                        .zip(other.iter())
                        .map(|(&a, &b)| a + u * (b - a))
                        .collect(),
                );
            }
        }
        labels.extend(std::iter::repeat_n(c, need));
    }
    Ok(assemble(x, y, rows, labels))
}

pub fn resample(x: &Array2<f64>, y: &[usize], plan: &ResamplePlan) -> Result<Resampled> {
    match plan.strategy {
        ResampleStrategy::None => {
            check_shapes(x, y)?;
            Ok(Resampled {
                x: x.clone(),
                y: y.to_vec(),
                n_original: x.nrows(),
            })
        }
        ResampleStrategy::Random => random_oversample(x, y, plan),
        ResampleStrategy::Smote => smote(x, y, plan),
    }
}

/// Class histogram over `0..n_classes`.
pub fn histogram(y: &[usize], n_classes: usize) -> Vec<usize> {
    let mut h = vec![0; n_classes];
    for &c in y {
        h[c] += 1;
    }
    h
}
