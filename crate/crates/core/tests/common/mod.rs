//! Independent reference implementations shared by the integration tests
//! and the acceptance suite. Nothing here calls into the code under test
//! except to build inputs.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toxnews_core::corpus::Label;
use toxnews_core::exec::Execution;
use toxnews_core::models::HyperGrid;
use toxnews_core::pipeline::PipelineConfig;
use toxnews_core::synthetic::{generate, SyntheticBundle, SyntheticConfig};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small corpus carrying every registry group.
pub fn audit_bundle() -> SyntheticBundle {
    let mut cfg = SyntheticConfig::balanced(7, 3);
    cfg.standard_groups = true;
    generate(&cfg).unwrap()
}

/// One grid value, few optimizer steps, narrow LSA: enough to exercise
/// every code path quickly.
pub fn fast_config(execution: Execution) -> PipelineConfig {
    PipelineConfig {
        grid: HyperGrid {
            l2: vec![1.0],
            max_iterations: 40,
            tolerance: 1e-6,
        },
        lsa_title_dim: 5,
        lsa_body_dim: 20,
        execution,
        ..Default::default()
    }
}

/// Label counts of the original corpus, in `Label::ALL` order: fake news,
/// sensations, hate speech, conspiracies, anti-democratic,
/// pro-authoritarian, defamation, delusion, non-toxic.
pub const REFERENCE_COUNTS: [usize; Label::COUNT] = [62, 30, 20, 53, 16, 8, 12, 20, 96];

// ---------------------------------------------------------------- metrics

pub struct BruteMetrics {
    pub accuracy: f64,
    pub macro_f1: f64,
    pub f1: Vec<f64>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
}

/// Per-class TP/FP/FN by direct enumeration; 0/0 counts as 0.
pub fn brute_metrics(truth: &[usize], pred: &[usize], k: usize) -> BruteMetrics {
    let n = truth.len();
    let correct = (0..n).filter(|&i| truth[i] == pred[i]).count();
    let (mut f1, mut precision, mut recall) = (vec![], vec![], vec![]);
    for c in 0..k {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for i in 0..n {
            match (truth[i] == c, pred[i] == c) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
        let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let r = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        // Equivalent form 2TP / (2TP + FP + FN) avoids sharing code paths.
        let f = if tp == 0 { 0.0 } else { 2.0 * tp as f64 / (2 * tp + fp + fn_) as f64 };
        precision.push(p);
        recall.push(r);
        f1.push(f);
    }
    BruteMetrics {
        accuracy: correct as f64 / n as f64,
        macro_f1: f1.iter().sum::<f64>() / k as f64,
        f1,
        precision,
        recall,
    }
}

// ------------------------------------------------------ finite differences

/// Central differences of `f` at `x` with step `eps`.
pub fn numeric_gradient(x: &[f64], eps: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + eps;
            let up = f(&p);
            p[i] = x[i] - eps;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * eps)
        })
        .collect()
}

/// max |a - n| / max(|a|, |n|, 1e-3): relative error with a floor so
/// components that are zero in both do not dominate.
pub fn max_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(1e-3))
        .fold(0.0, f64::max)
}

// ------------------------------------------------------------ eigen oracle

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues in descending order with matching unit eigenvectors
/// (`vectors[j]` belongs to `values[j]`).
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(i == j)).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap());
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|r| v[r][i]).collect()).collect();
    (values, vectors)
}

/// `AᵀA` of a dense row-major matrix.
pub fn gram_columns(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = a[0].len();
    (0..cols)
        .map(|i| (0..cols).map(|j| a.iter().map(|row| row[i] * row[j]).sum()).collect())
        .collect()
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

// ---------------------------------------------------------- SMOTE oracles

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean distance from `p` to the segment `[a, b]`.
pub fn segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (p.iter().zip(a).zip(&ab).map(|((pi, ai), d)| (pi - ai) * d).sum::<f64>() / len2).clamp(0.0, 1.0)
    };
    let closest: Vec<f64> = a.iter().zip(&ab).map(|(ai, d)| ai + t * d).collect();
    dist2(p, &closest).sqrt()
}

/// Indices of the `k` nearest same-class points of `members[i]`, ties
/// included (every point no farther than the k-th distance).
pub fn knn_with_ties(points: &[Vec<f64>], members: &[usize], i: usize, k: usize) -> Vec<usize> {
    let mut d: Vec<(f64, usize)> = members
        .iter()
        .filter(|&&j| j != i)
        .map(|&j| (dist2(&points[i], &points[j]), j))
        .collect();
    d.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    if d.is_empty() {
        return vec![];
    }
    let kth = d[(k.min(d.len())) - 1].0;
    d.into_iter().filter(|(x, _)| *x <= kth + 1e-12).map(|(_, j)| j).collect()
}
