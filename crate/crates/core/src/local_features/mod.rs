//! Fold-independent native features: whitespace tokenization, the fifteen
//! stylometric counts over title and body, and the six publisher features.

mod media;
mod stylometry;
mod tokenize;

pub use media::{media_features, MediaVector, MEDIA_DIM};
pub use stylometry::{stylometric_features, StyloVector, STYLO_DIM, STYLO_NAMES};
pub use tokenize::{tokenize, TokenizedText};

use chrono::NaiveDate;
use ndarray::Array2;

use crate::corpus::Dataset;
use crate::error::Result;
use crate::exec::Execution;
use crate::feature_store::{registry_group, FeatureMatrix, MEDIA, STYLO};

fn stack(rows: Vec<Vec<f64>>, dim: usize) -> Array2<f64> {
    let n = rows.len();
    Array2::from_shape_vec((n, dim), rows.into_iter().flatten().collect()).expect("fixed width rows")
}

/// Stylometric vectors for every article, in dataset order.
pub fn stylo_matrix(d: &Dataset, exec: Execution) -> Result<FeatureMatrix> {
    let rows = exec.map(d.articles(), |a| stylometric_features(&a.title, &a.body).to_vec());
    FeatureMatrix::new(registry_group(STYLO).expect("registered"), d.ids(), stack(rows, STYLO_DIM))
}

/// Publisher vectors for every article, in dataset order.
pub fn media_matrix(d: &Dataset, reference_date: NaiveDate) -> Result<FeatureMatrix> {
    let rows = d
        .articles()
        .iter()
        .map(|a| media_features(d.medium_of(a), reference_date).map(|v| v.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    FeatureMatrix::new(registry_group(MEDIA).expect("registered"), d.ids(), stack(rows, MEDIA_DIM))
}
