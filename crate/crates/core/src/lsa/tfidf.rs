use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::sparse::{SparseMatrix, SparseVec};
use crate::error::{Error, Result};
use crate::local_features::TokenizedText;

/// Vocabulary term for a token: lowercased with leading and trailing
/// non-alphanumeric characters removed. Pure punctuation yields `None`.
pub fn term(token: &str) -> Option<String> {
    let trimmed = token.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
    pub document_count: usize,
}

/// Smoothed IDF: `ln((1 + n) / (1 + df)) + 1`.
pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0
}

pub fn fit_tfidf(docs: &[TokenizedText]) -> Result<TfIdfModel> {
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let doc_terms: Vec<BTreeSet<String>> = docs
        .iter()
        .map(|d| d.tokens.iter().filter_map(|t| term(t)).collect())
        .collect();
    let all: BTreeSet<&String> = doc_terms.iter().flatten().collect();
    let vocabulary: BTreeMap<String, usize> = all
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let mut df = vec![0usize; vocabulary.len()];
    for terms in &doc_terms {
        for t in terms {
            df[vocabulary[t]] += 1;
        }
    }
    let idf = df.iter().map(|&d| smoothed_idf(docs.len(), d)).collect();
    Ok(TfIdfModel {
        vocabulary,
        idf,
        document_count: docs.len(),
    })
}

impl TfIdfModel {
    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    /// Raw counts times IDF, L2-normalized. Out-of-vocabulary terms are dropped.
    pub fn transform(&self, doc: &TokenizedText) -> SparseVec {
        let pairs = doc
            .tokens
            .iter()
            .filter_map(|t| term(t))
            .filter_map(|t| self.vocabulary.get(&t).map(|&i| (i, self.idf[i])))
            .collect();
        let mut v = SparseVec::from_pairs(pairs);
        let norm = v.norm();
        if norm > 0.0 {
            v.values.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    pub fn transform_all(&self, docs: &[TokenizedText]) -> SparseMatrix {
        SparseMatrix::new(docs.iter().map(|d| self.transform(d)).collect(), self.dim())
    }
}
