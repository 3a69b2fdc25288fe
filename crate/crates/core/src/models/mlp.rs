//! Feed-forward network: d → 64 (ReLU) → 32 (tanh) → K (softmax), inverted
//! dropout after each hidden layer during training, Adam on mini-batches.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::adam::{Adam, AdamConfig};
use super::{check_training_data, log_softmax_rows, one_hot, softmax_rows, Classifier};
use crate::error::{Error, Result};

pub const HIDDEN1: usize = 64;
pub const HIDDEN2: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpOptions {
    pub epochs: usize,
    pub learning_rate: f64,
    pub dropout_rate: f64,
    pub batch_size: usize,
    /// Weight decay on the three weight matrices (biases excluded).
    pub l2_lambda: f64,
}

impl Default for MlpOptions {
    fn default() -> Self {
        MlpOptions {
            epochs: 100,
            learning_rate: 1e-3,
            dropout_rate: 0.35,
            batch_size: 32,
            l2_lambda: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpClassifier {
    /// `d × 64`.
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    /// `64 × 32`.
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    /// `32 × K`.
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
    pub dropout_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpGradients {
    pub w1: Array2<f64>,
    pub b1: Array1<f64>,
    pub w2: Array2<f64>,
    pub b2: Array1<f64>,
    pub w3: Array2<f64>,
    pub b3: Array1<f64>,
}

/// Dropout masks already scaled by `1/(1-p)`.
pub struct DropoutMasks {
    pub hidden1: Array2<f64>,
    pub hidden2: Array2<f64>,
}

pub fn parameter_count(input_dim: usize, n_classes: usize) -> usize {
    (input_dim * HIDDEN1 + HIDDEN1) + (HIDDEN1 * HIDDEN2 + HIDDEN2) + (HIDDEN2 * n_classes + n_classes)
}

fn glorot(rng: &mut ChaCha8Rng, fan_in: usize, fan_out: usize) -> Array2<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    Array2::from_shape_simple_fn((fan_in, fan_out), || rng.random_range(-limit..limit))
}

struct Forward {
    h1: Array2<f64>,
    h1_drop: Array2<f64>,
    h2: Array2<f64>,
    h2_drop: Array2<f64>,
    logits: Array2<f64>,
}

impl MlpClassifier {
    pub fn init(input_dim: usize, n_classes: usize, dropout_rate: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        MlpClassifier {
            w1: glorot(&mut rng, input_dim, HIDDEN1),
            b1: Array1::zeros(HIDDEN1),
            w2: glorot(&mut rng, HIDDEN1, HIDDEN2),
            b2: Array1::zeros(HIDDEN2),
            w3: glorot(&mut rng, HIDDEN2, n_classes),
            b3: Array1::zeros(n_classes),
            dropout_rate,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w1.nrows()
    }

    pub fn n_classes(&self) -> usize {
        self.w3.ncols()
    }

    pub fn parameter_count(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + self.b2.len() + self.w3.len() + self.b3.len()
    }

    fn forward(&self, x: &Array2<f64>, masks: Option<&DropoutMasks>) -> Forward {
        let h1 = (x.dot(&self.w1) + &self.b1).mapv(|v| v.max(0.0));
        let h1_drop = match masks {
            Some(m) => &h1 * &m.hidden1,
            None => h1.clone(),
        };
        let h2 = (h1_drop.dot(&self.w2) + &self.b2).mapv(f64::tanh);
        let h2_drop = match masks {
            Some(m) => &h2 * &m.hidden2,
            None => h2.clone(),
        };
        let logits = h2_drop.dot(&self.w3) + &self.b3;
        Forward {
            h1,
            h1_drop,
            h2,
            h2_drop,
            logits,
        }
    }

    fn sample_masks(&self, rows: usize, rng: &mut ChaCha8Rng) -> DropoutMasks {
        let keep = 1.0 - self.dropout_rate;
        let mut mask = |cols: usize| {
            Array2::from_shape_simple_fn((rows, cols), || {
                if rng.random::<f64>() < keep {
                    1.0 / keep
                } else {
                    0.0
                }
            })
        };
        DropoutMasks {
            hidden1: mask(HIDDEN1),
            hidden2: mask(HIDDEN2),
        }
    }
}

impl Classifier for MlpClassifier {
    fn predict_proba(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::InvalidArgument(format!(
                "input has {} columns, network expects {}",
                x.ncols(),
                self.input_dim()
            )));
        }
        Ok(softmax_rows(self.forward(x, None).logits))
    }
}

/// Mean cross-entropy plus `(l2/2)·Σ‖W‖²` and its gradient. Passing masks
/// reproduces a training-time forward pass.
pub fn mlp_objective(
    model: &MlpClassifier,
    x: &Array2<f64>,
    targets: &Array2<f64>,
    l2_lambda: f64,
    masks: Option<&DropoutMasks>,
) -> (f64, MlpGradients) {
    let n = x.nrows() as f64;
    let f = model.forward(x, masks);
    let log_probs = log_softmax_rows(f.logits);
    let sq = |w: &Array2<f64>| w.iter().map(|v| v * v).sum::<f64>();
    let loss = -(&log_probs * targets).sum() / n
        + 0.5 * l2_lambda * (sq(&model.w1) + sq(&model.w2) + sq(&model.w3));

    let d_logits = (log_probs.mapv(f64::exp) - targets) / n;
    let w3 = f.h2_drop.t().dot(&d_logits) + &(&model.w3 * l2_lambda);
    let b3 = d_logits.sum_axis(Axis(0));

    let mut d_h2 = d_logits.dot(&model.w3.t());
    if let Some(m) = masks {
        d_h2 *= &m.hidden2;
    }
    let d_z2 = d_h2 * &f.h2.mapv(|t| 1.0 - t * t);
    let w2 = f.h1_drop.t().dot(&d_z2) + &(&model.w2 * l2_lambda);
    let b2 = d_z2.sum_axis(Axis(0));

    let mut d_h1 = d_z2.dot(&model.w2.t());
    if let Some(m) = masks {
        d_h1 *= &m.hidden1;
    }
    let d_z1 = d_h1 * &f.h1.mapv(|h| if h > 0.0 { 1.0 } else { 0.0 });
    let w1 = x.t().dot(&d_z1) + &(&model.w1 * l2_lambda);
    let b1 = d_z1.sum_axis(Axis(0));

    (loss, MlpGradients { w1, b1, w2, b2, w3, b3 })
}

/// Loss without dropout, used for monitoring.
pub fn mlp_loss(model: &MlpClassifier, x: &Array2<f64>, y: &[usize], l2_lambda: f64) -> f64 {
    mlp_objective(model, x, &one_hot(y, model.n_classes()), l2_lambda, None).0
}

pub fn fit_mlp(
    x: &Array2<f64>,
    y: &[usize],
    n_classes: usize,
    options: &MlpOptions,
    seed: u64,
) -> Result<MlpClassifier> {
    fit_mlp_traced(x, y, n_classes, options, seed).map(|(m, _)| m)
}

/// Like [`fit_mlp`], also returning the full-data loss after each epoch.
pub fn fit_mlp_traced(
    x: &Array2<f64>,
    y: &[usize],
    n_classes: usize,
    options: &MlpOptions,
    seed: u64,
) -> Result<(MlpClassifier, Vec<f64>)> {
    check_training_data(x, y, n_classes)?;
    if !(0.0..1.0).contains(&options.dropout_rate) || options.batch_size == 0 {
        return Err(Error::InvalidArgument(
            "dropout rate must be in [0, 1) and batch size positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut model = MlpClassifier::init(x.ncols(), n_classes, options.dropout_rate, rng.random());
    let targets = one_hot(y, n_classes);
    let sizes = [
        model.w1.len(),
        model.b1.len(),
        model.w2.len(),
        model.b2.len(),
        model.w3.len(),
        model.b3.len(),
    ];
    let mut adam = Adam::new(
        AdamConfig {
            learning_rate: options.learning_rate,
            ..AdamConfig::default()
        },
        &sizes,
    );
    let mut order: Vec<usize> = (0..x.nrows()).collect();
    let mut history = Vec::with_capacity(options.epochs);
    for _ in 0..options.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(options.batch_size) {
            let xb = x.select(Axis(0), batch);
            let tb = targets.select(Axis(0), batch);
            let masks = model.sample_masks(batch.len(), &mut rng);
            let (_, g) = mlp_objective(&model, &xb, &tb, options.l2_lambda, Some(&masks));
            adam.step(
                &mut [
                    model.w1.as_slice_mut().unwrap(),
                    model.b1.as_slice_mut().unwrap(),
                    model.w2.as_slice_mut().unwrap(),
                    model.b2.as_slice_mut().unwrap(),
                    model.w3.as_slice_mut().unwrap(),
                    model.b3.as_slice_mut().unwrap(),
                ],
                &[
                    g.w1.as_slice().unwrap(),
                    g.b1.as_slice().unwrap(),
                    g.w2.as_slice().unwrap(),
                    g.b2.as_slice().unwrap(),
                    g.w3.as_slice().unwrap(),
                    g.b3.as_slice().unwrap(),
                ],
            );
        }
        history.push(mlp_objective(&model, x, &targets, options.l2_lambda, None).0);
    }
    Ok((model, history))
}
