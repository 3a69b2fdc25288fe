use log::warn;
use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use super::{accuracy_of, fit_softmax, AdamConfig, Classifier, SoftmaxOptions};
use crate::error::{Error, Result};
use crate::exec::{rng_for, Execution};
use crate::pipeline::folds::{splits_from_assignment, stratified_splits, unstratified_assignment, Split};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    /// Candidate L2 strengths, all positive.
    pub l2: Vec<f64>,
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            l2: vec![1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0],
            max_iterations: 2000,
            tolerance: 1e-6,
        }
    }
}

impl HyperGrid {
    pub fn validate(&self) -> Result<()> {
        if self.l2.is_empty() {
            return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
        }
        if self.l2.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument("grid values must be positive and finite".into()));
        }
        Ok(())
    }

    pub fn softmax_options(&self) -> SoftmaxOptions {
        SoftmaxOptions {
            adam: AdamConfig::default(),
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
        }
    }
}

/// Grid value with the highest score; ties go to the larger L2 strength.
pub fn select_l2(grid: &[f64], scores: &[f64]) -> f64 {
    let mut best = 0;
    for i in 1..grid.len() {
        let better = scores[i] > scores[best];
        let tie_stronger = scores[i] == scores[best] && grid[i] > grid[best];
        if better || tie_stronger {
            best = i;
        }
    }
    grid[best]
}

fn has_two_classes(y: &[usize], idx: &[usize]) -> bool {
    idx.iter().any(|&i| y[i] != y[idx[0]])
}

/// Stratified inner splits, falling back to unstratified ones when a
/// stratified training part would hold a single class.
pub(crate) fn inner_splits(y: &[usize], k: usize, seed: u64) -> Result<Vec<Split>> {
    let splits = stratified_splits(y, k, seed, &[0x6121D])?;
    if splits.iter().all(|s| has_two_classes(y, &s.train)) {
        return Ok(splits);
    }
    warn!("degenerate stratified inner folds; falling back to unstratified folds");
    let members: Vec<usize> = (0..y.len()).collect();
    let assignment = unstratified_assignment(y.len(), k, &mut rng_for(seed, &[0x6121D, 1]));
    Ok(splits_from_assignment(&members, &assignment, k))
}

/// Choose the L2 strength maximizing mean inner-fold accuracy of a softmax
/// model on a fixed design matrix.
pub fn grid_search(
    x: &Array2<f64>,
    y: &[usize],
    n_classes: usize,
    grid: &HyperGrid,
    inner_folds: usize,
    seed: u64,
    exec: Execution,
) -> Result<f64> {
    grid.validate()?;
    let splits = inner_splits(y, inner_folds, seed)?;
    let options = grid.softmax_options();
    let jobs: Vec<(usize, usize)> = (0..splits.len())
        .flat_map(|f| (0..grid.l2.len()).map(move |g| (f, g)))
        .collect();
    let accs = exec.try_map(&jobs, |&(f, g)| -> Result<f64> {
        let s = &splits[f];
        let xt = x.select(Axis(0), &s.train);
        let yt: Vec<usize> = s.train.iter().map(|&i| y[i]).collect();
        let model = fit_softmax(&xt, &yt, n_classes, grid.l2[g], &options)?;
        let xv = x.select(Axis(0), &s.test);
        let yv: Vec<usize> = s.test.iter().map(|&i| y[i]).collect();
        Ok(accuracy_of(&model.predict_proba(&xv)?, &yv))
    })?;
    let mut mean = vec![0.0; grid.l2.len()];
    for (&(_, g), acc) in jobs.iter().zip(accs) {
        mean[g] += acc / splits.len() as f64;
    }
    Ok(select_l2(&grid.l2, &mean))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn noisy(seed: u64) -> (Array2<f64>, Vec<usize>) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<usize> = (0..60).map(|i| i % 3).collect();
        let x = Array2::from_shape_fn((60, 4), |(i, j)| {
            let e: f64 = StandardNormal.sample(&mut rng);
            e * 1.5 + if j == y[i] { 1.0 } else { 0.0 }
        });
        (x, y)
    }

    fn small_grid(l2: Vec<f64>) -> HyperGrid {
        HyperGrid { l2, max_iterations: 200, tolerance: 1e-6 }
    }

    #[test]
    fn single_value_grid() {
        let (x, y) = noisy(1);
        let best = grid_search(&x, &y, 3, &small_grid(vec![0.5]), 3, 1, Execution::Sequential).unwrap();
        assert_eq!(best, 0.5);
    }

    #[test]
    fn reproducible_under_fixed_seed() {
        let (x, y) = noisy(2);
        let g = small_grid(vec![1e-3, 1.0, 1e3]);
        let a = grid_search(&x, &y, 3, &g, 5, 9, Execution::Sequential).unwrap();
        let b = grid_search(&x, &y, 3, &g, 5, 9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert!(g.l2.contains(&a));
    }

    #[test]
    fn ties_prefer_stronger_regularization() {
        assert_eq!(select_l2(&[0.1, 1.0, 10.0], &[0.5, 0.7, 0.7]), 10.0);
        assert_eq!(select_l2(&[10.0, 1.0], &[0.7, 0.7]), 10.0);
        assert_eq!(select_l2(&[0.1, 1.0], &[0.9, 0.7]), 0.1);
    }

    #[test]
    fn empty_grid_rejected() {
        let (x, y) = noisy(3);
        assert!(grid_search(&x, &y, 3, &small_grid(vec![]), 3, 1, Execution::Sequential).is_err());
    }

    #[test]
    fn degenerate_stratification_falls_back() {
        // two classes, one with a single member: stratified inner training
        // parts stay two-class except where the singleton is held out
        let y = vec![0, 0, 0, 0, 0, 1];
        let splits = inner_splits(&y, 2, 5).unwrap();
        assert_eq!(splits.len(), 2);
    }
}
