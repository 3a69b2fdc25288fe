//! Classifiers: multinomial logistic regression (the main model) and a small
//! feed-forward network, both trained with Adam, plus L2 grid search.

mod adam;
pub(crate) mod grid;
mod mlp;
mod softmax;

use ndarray::Array2;

pub use adam::{Adam, AdamConfig};
pub use grid::{grid_search, select_l2, HyperGrid};
pub use mlp::{
    fit_mlp, fit_mlp_traced, mlp_loss, mlp_objective, parameter_count, DropoutMasks,
    MlpClassifier, MlpGradients, MlpOptions, HIDDEN1, HIDDEN2,
};
pub use softmax::{fit_softmax, softmax_objective, SoftmaxClassifier, SoftmaxOptions};

use crate::error::{Error, Result};

pub trait Classifier {
    /// `N × K` class posteriors; rows sum to 1.
    fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>>;

    fn predict(&self, x: &Array2<f64>) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.predict_proba(x)?))
    }
}

/// Index of the first maximum in each row.
pub fn argmax_rows(m: &Array2<f64>) -> Vec<usize> {
    m.rows()
        .into_iter()
        .map(|r| {
            r.iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) })
                .0
        })
        .collect()
}

pub fn log_softmax_rows(mut logits: Array2<f64>) -> Array2<f64> {
    for mut row in logits.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let lse = max + row.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
        row.mapv_inplace(|v| v - lse);
    }
    logits
}

pub fn softmax_rows(logits: Array2<f64>) -> Array2<f64> {
    let mut p = logits;
    for mut row in p.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let s = row.sum();
        row /= s;
    }
    p
}

pub fn one_hot(y: &[usize], n_classes: usize) -> Array2<f64> {
    let mut t = Array2::zeros((y.len(), n_classes));
    for (i, &c) in y.iter().enumerate() {
        t[[i, c]] = 1.0;
    }
    t
}

pub(crate) fn check_training_data(x: &Array2<f64>, y: &[usize], n_classes: usize) -> Result<()> {
    if x.nrows() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "{} rows but {} targets",
            x.nrows(),
            y.len()
        )));
    }
    if y.len() < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    if let Some(&c) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::InvalidArgument(format!("class {c} outside 0..{n_classes}")));
    }
    if y.iter().all(|&c| c == y[0]) {
        return Err(Error::SingleClass);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite input".into()));
    }
    Ok(())
}

/// Fraction of rows whose argmax equals the target.
pub fn accuracy_of(probs: &Array2<f64>, y: &[usize]) -> f64 {
    let hits = argmax_rows(probs).iter().zip(y).filter(|(p, t)| p == t).count();
    hits as f64 / y.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softmax_rows_sum_to_one_even_for_huge_logits() {
        let p = softmax_rows(array![[1000.0, 0.0, -1000.0], [3.0, 3.0, 3.0]]);
        assert!(p.sum_axis(ndarray::Axis(1)).iter().all(|s| (s - 1.0).abs() < 1e-12));
        assert_eq!(argmax_rows(&p), vec![0, 0]);
    }
}
