//! Multinomial logistic regression trained full-batch with Adam.

use std::path::Path;

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig};
use super::{check_training_data, log_softmax_rows, one_hot, softmax_rows, Classifier};
use crate::error::{Error, Result};

const DUMP_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxOptions {
    pub adam: AdamConfig,
    pub max_iterations: usize,
    /// Stop once the full gradient norm drops below this.
    pub tolerance: f64,
}

impl Default for SoftmaxOptions {
    fn default() -> Self {
        SoftmaxOptions {
            adam: AdamConfig::default(),
            max_iterations: 2000,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SoftmaxClassifier {
    /// `K × d`.
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub l2_lambda: f64,
    /// Iterations actually run by the optimizer.
    pub iterations: usize,
}

#[derive(Serialize, Deserialize)]
struct SoftmaxDump {
    version: u32,
    model: SoftmaxClassifier,
}

impl SoftmaxClassifier {
    pub fn zeros(n_classes: usize, dim: usize, l2_lambda: f64) -> Self {
        SoftmaxClassifier {
            weights: Array2::zeros((n_classes, dim)),
            bias: Array1::zeros(n_classes),
            l2_lambda,
            iterations: 0,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn logits(&self, x: &Array2<f64>) -> Array2<f64> {
        x.dot(&self.weights.t()) + &self.bias
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let dump = SoftmaxDump {
            version: DUMP_VERSION,
            model: self.clone(),
        };
        std::fs::write(path, serde_json::to_vec(&dump)?).map_err(|e| Error::io(path, e))
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let dump: SoftmaxDump = serde_json::from_slice(&bytes)?;
        if dump.version != DUMP_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported model dump version {}",
                dump.version
            )));
        }
        Ok(dump.model)
    }
}

impl Classifier for SoftmaxClassifier {
    fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "input has {} columns, model expects {}",
                x.ncols(),
                self.dim()
            )));
        }
        Ok(softmax_rows(self.logits(x)))
    }
}

/// Mean cross-entropy plus `(l2/2)·‖W‖²` and its gradient with respect to
/// weights and bias. The bias is not regularized.
pub fn softmax_objective(
    model: &SoftmaxClassifier,
    x: &Array2<f64>,
    targets: &Array2<f64>,
) -> (f64, Array2<f64>, Array1<f64>) {
    let n = x.nrows() as f64;
    let log_probs = log_softmax_rows(model.logits(x));
    let ce = -(&log_probs * targets).sum() / n;
    let probs = log_probs.mapv(f64::exp);
    let penalty = 0.5 * model.l2_lambda * model.weights.iter().map(|w| w * w).sum::<f64>();
    let delta = (probs - targets) / n;
    let grad_w = delta.t().dot(x) + &(&model.weights * model.l2_lambda);
    let grad_b = delta.sum_axis(Axis(0));
    (ce + penalty, grad_w, grad_b)
}

/// Fit from zero initialization. The objective is convex and the optimizer
/// deterministic, so no seed is involved.
pub fn fit_softmax(
    x: &Array2<f64>,
    y: &[usize],
    n_classes: usize,
    l2_lambda: f64,
    options: &SoftmaxOptions,
) -> Result<SoftmaxClassifier> {
    check_training_data(x, y, n_classes)?;
    let targets = one_hot(y, n_classes);
    let mut model = SoftmaxClassifier::zeros(n_classes, x.ncols(), l2_lambda);
    let mut adam = Adam::new(options.adam, &[model.weights.len(), model.bias.len()]);
    for it in 0..options.max_iterations {
        let (_, gw, gb) = softmax_objective(&model, x, &targets);
        let norm = (gw.iter().chain(gb.iter()).map(|g| g * g).sum::<f64>()).sqrt();
        if norm < options.tolerance {
            break;
        }
        adam.step(
            &mut [
                model.weights.as_slice_mut().expect("standard layout"),
                model.bias.as_slice_mut().expect("standard layout"),
            ],
            &[
                gw.as_slice().expect("standard layout"),
                gb.as_slice().expect("standard layout"),
            ],
        );
        model.iterations = it + 1;
    }
    Ok(model)
}
