//! Latent semantic analysis: TF-IDF document vectors projected through a
//! truncated SVD, fitted separately for titles and bodies.

mod sparse;
mod svd;
mod tfidf;

use std::path::Path;

use log::info;
use ndarray::Array1;
use serde::{Deserialize, Serialize};

pub use sparse::{SparseMatrix, SparseVec};
pub use svd::{fit_svd, SvdProjector};
pub use tfidf::{fit_tfidf, smoothed_idf, term, TfIdfModel};

use crate::corpus::Article;
use crate::error::{Error, Result};
use crate::local_features::{tokenize, TokenizedText};

pub const TITLE_DIM: usize = 15;
pub const BODY_DIM: usize = 200;
pub const LSA_DIM: usize = TITLE_DIM + BODY_DIM;

const DUMP_VERSION: u32 = 1;

/// One TF-IDF + SVD channel with a fixed nominal output width. When the
/// training fold is too small for the nominal rank, trailing outputs are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsaChannel {
    pub tfidf: TfIdfModel,
    pub svd: SvdProjector,
    pub dim: usize,
}

impl LsaChannel {
    pub fn fit(docs: &[&TokenizedText], dim: usize, what: &str) -> Result<Self> {
        let owned: Vec<TokenizedText> = docs.iter().map(|&d| d.clone()).collect();
        let tfidf = fit_tfidf(&owned)?;
        let matrix = tfidf.transform_all(&owned);
        let k = dim.min(matrix.nrows()).min(matrix.ncols);
        if k < dim {
            info!(
                "{what}: LSA rank clamped from {dim} to {k} ({} documents, {} terms)",
                matrix.nrows(),
                matrix.ncols
            );
        }
        let svd = if k == 0 {
            SvdProjector::empty(matrix.ncols)
        } else {
            fit_svd(&matrix, k)?
        };
        Ok(LsaChannel { tfidf, svd, dim })
    }

    pub fn project(&self, doc: &TokenizedText) -> Array1<f64> {
        let z = self.svd.project(&self.tfidf.transform(doc));
        let mut out = Array1::zeros(self.dim);
        out.slice_mut(ndarray::s![..z.len()]).assign(&z);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsaModel {
    pub title: LsaChannel,
    pub body: LsaChannel,
}

#[derive(Serialize, Deserialize)]
struct LsaDump {
    version: u32,
    model: LsaModel,
}

impl LsaModel {
    /// Fit on pre-tokenized `(title, body)` pairs of the training articles only.
    pub fn fit(titles: &[&TokenizedText], bodies: &[&TokenizedText]) -> Result<Self> {
        Self::fit_with_dims(titles, bodies, TITLE_DIM, BODY_DIM)
    }

    pub fn fit_with_dims(
        titles: &[&TokenizedText],
        bodies: &[&TokenizedText],
        title_dim: usize,
        body_dim: usize,
    ) -> Result<Self> {
        Ok(LsaModel {
            title: LsaChannel::fit(titles, title_dim, "title")?,
            body: LsaChannel::fit(bodies, body_dim, "body")?,
        })
    }

    pub fn dim(&self) -> usize {
        self.title.dim + self.body.dim
    }

    pub fn features(&self, title: &TokenizedText, body: &TokenizedText) -> Array1<f64> {
        let mut out = Array1::zeros(self.dim());
        out.slice_mut(ndarray::s![..self.title.dim])
            .assign(&self.title.project(title));
        out.slice_mut(ndarray::s![self.title.dim..])
            .assign(&self.body.project(body));
        out
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer(
            std::io::BufWriter::new(file),
            &LsaDump {
                version: DUMP_VERSION,
                model: self.clone(),
            },
        )?;
        Ok(())
    }

    pub fn load_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let dump: LsaDump = serde_json::from_reader(std::io::BufReader::new(file))?;
        if dump.version != DUMP_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported LSA dump version {}",
                dump.version
            )));
        }
        Ok(dump.model)
    }
}

/// Title and body projection of one article.
pub fn lsa_features(article: &Article, model: &LsaModel) -> Array1<f64> {
    model.features(&tokenize(&article.title), &tokenize(&article.body))
}
