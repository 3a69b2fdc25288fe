//! Named fixed-dimension feature groups: the registry of known groups,
//! ingestion of externally computed vectors, id alignment, concatenation and
//! train-fold standardization.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::corpus::{read_jsonl, write_jsonl};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSource {
    Native,
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGroup {
    pub name: String,
    pub expected_dim: usize,
    pub source: FeatureSource,
}

impl FeatureGroup {
    pub fn new(name: impl Into<String>, expected_dim: usize, source: FeatureSource) -> Self {
        FeatureGroup {
            name: name.into(),
            expected_dim,
            source,
        }
    }

    /// Groups computed on English translations.
    pub fn needs_translation(&self) -> bool {
        self.name.ends_with("_en")
    }
}

pub const BERT_BG: &str = "bert_bg";
pub const BERT_EN: &str = "bert_en";
pub const ELMO_EN: &str = "elmo_en";
pub const USE_EN: &str = "use_en";
pub const XLM_BG: &str = "xlm_bg";
pub const NELA_EN: &str = "nela_en";
pub const LSA_BG: &str = "lsa_bg";
pub const STYLO: &str = "stylo";
pub const MEDIA: &str = "media";

/// The standard groups with their title+body dimensions.
pub fn registry() -> Vec<FeatureGroup> {
    use FeatureSource::*;
    vec![
        FeatureGroup::new(BERT_BG, 768 + 768, External),
        FeatureGroup::new(BERT_EN, 768 + 768, External),
        FeatureGroup::new(ELMO_EN, 1024 + 1024, External),
        FeatureGroup::new(USE_EN, 512 + 512, External),
        FeatureGroup::new(XLM_BG, 1024 + 1024, External),
        FeatureGroup::new(NELA_EN, 129 + 129, External),
        FeatureGroup::new(LSA_BG, crate::lsa::LSA_DIM, Native),
        FeatureGroup::new(STYLO, crate::local_features::STYLO_DIM, Native),
        FeatureGroup::new(MEDIA, crate::local_features::MEDIA_DIM, Native),
    ]
}

pub fn registry_group(name: &str) -> Option<FeatureGroup> {
    registry().into_iter().find(|g| g.name == name)
}

/// Per-article dense vectors for one group, validated on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    group: FeatureGroup,
    ids: Vec<String>,
    rows: Array2<f64>,
}

impl FeatureMatrix {
    pub fn new(group: FeatureGroup, ids: Vec<String>, rows: Array2<f64>) -> Result<Self> {
        if rows.nrows() != ids.len() {
            return Err(Error::InvalidArgument(format!(
                "group `{}`: {} ids but {} rows",
                group.name,
                ids.len(),
                rows.nrows()
            )));
        }
        if rows.ncols() != group.expected_dim {
            return Err(Error::DimensionMismatch {
                group: group.name.clone(),
                id: ids.first().cloned().unwrap_or_default(),
                expected: group.expected_dim,
                found: rows.ncols(),
            });
        }
        let mut seen = HashSet::new();
        for (id, row) in ids.iter().zip(rows.rows()) {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite {
                    group: group.name.clone(),
                    id: id.clone(),
                });
            }
        }
        Ok(FeatureMatrix { group, ids, rows })
    }

    pub fn group(&self) -> &FeatureGroup {
        &self.group
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rows(&self) -> &Array2<f64> {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn into_rows(self) -> Array2<f64> {
        self.rows
    }

    /// Rows reordered to `ids`; fails listing every id this group lacks.
    pub fn align(&self, ids: &[String]) -> Result<FeatureMatrix> {
        let pos: HashMap<&str, usize> = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let missing: Vec<String> = ids
            .iter()
            .filter(|id| !pos.contains_key(id.as_str()))
            .cloned()
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingIds {
                group: self.group.name.clone(),
                ids: missing,
            });
        }
        let idx: Vec<usize> = ids.iter().map(|id| pos[id.as_str()]).collect();
        Ok(FeatureMatrix {
            group: self.group.clone(),
            ids: ids.to_vec(),
            rows: self.rows.select(Axis(0), &idx),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorRecord {
    pub id: String,
    pub vector: Vec<f64>,
}

/// Companion manifest of a vector file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub group: String,
    pub dim: usize,
    pub articles: usize,
    pub producer: String,
    /// Vector file, relative to the manifest's directory. Defaults to the
    /// manifest path with `.manifest.json` replaced by `.jsonl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vectors: Option<String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn vectors_path(&self, manifest_path: &Path) -> PathBuf {
        let dir = manifest_path.parent().unwrap_or_else(|| Path::new("."));
        match &self.vectors {
            Some(rel) => dir.join(rel),
            None => {
                let name = manifest_path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let stem = name
                    .strip_suffix(".manifest.json")
                    .or_else(|| name.strip_suffix(".json"))
                    .unwrap_or(&name);
                dir.join(format!("{stem}.jsonl"))
            }
        }
    }

    /// The group this manifest declares: the registry entry when the name is
    /// known, otherwise a custom external group of the declared dimension.
    pub fn feature_group(&self) -> FeatureGroup {
        registry_group(&self.group)
            .unwrap_or_else(|| FeatureGroup::new(&self.group, self.dim, FeatureSource::External))
    }
}

/// Read a vector-JSONL file, validating every row against `group`.
pub fn ingest_vectors(path: &Path, group: &FeatureGroup) -> Result<FeatureMatrix> {
    let records: Vec<VectorRecord> = read_jsonl(path)?;
    let mut data = Vec::with_capacity(records.len() * group.expected_dim);
    let mut ids = Vec::with_capacity(records.len());
    for r in records {
        if r.vector.len() != group.expected_dim {
            return Err(Error::DimensionMismatch {
                group: group.name.clone(),
                id: r.id,
                expected: group.expected_dim,
                found: r.vector.len(),
            });
        }
        data.extend_from_slice(&r.vector);
        ids.push(r.id);
    }
    let rows = Array2::from_shape_vec((ids.len(), group.expected_dim), data)
        .expect("row lengths checked");
    FeatureMatrix::new(group.clone(), ids, rows)
}

/// Load the vectors behind a manifest. The manifest's `dim` must agree with
/// the registry for known groups.
pub fn ingest_manifest(manifest_path: &Path) -> Result<FeatureMatrix> {
    let manifest = Manifest::load(manifest_path)?;
    let group = manifest.feature_group();
    if manifest.dim != group.expected_dim {
        return Err(Error::DimensionMismatch {
            group: group.name.clone(),
            id: format!("<manifest {}>", manifest_path.display()),
            expected: group.expected_dim,
            found: manifest.dim,
        });
    }
    ingest_vectors(&manifest.vectors_path(manifest_path), &group)
}

/// Write `<dir>/<group>.jsonl` and `<dir>/<group>.manifest.json`.
pub fn write_group(dir: &Path, matrix: &FeatureMatrix, producer: &str) -> Result<PathBuf> {
    let name = &matrix.group.name;
    let records: Vec<VectorRecord> = matrix
        .ids
        .iter()
        .zip(matrix.rows.rows())
        .map(|(id, row)| VectorRecord {
            id: id.clone(),
            vector: row.to_vec(),
        })
        .collect();
    write_jsonl(&dir.join(format!("{name}.jsonl")), &records)?;
    let manifest = Manifest {
        group: name.clone(),
        dim: matrix.dim(),
        articles: matrix.len(),
        producer: producer.to_string(),
        vectors: None,
    };
    let manifest_path = dir.join(format!("{name}.manifest.json"));
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&manifest_path, text).map_err(|e| Error::io(&manifest_path, e))?;
    Ok(manifest_path)
}

/// Horizontal concatenation in the given group order, rows aligned to `ids`.
pub fn concat_groups(groups: &[&FeatureMatrix], ids: &[String]) -> Result<FeatureMatrix> {
    if groups.is_empty() {
        return Err(Error::InvalidArgument("no groups to concatenate".into()));
    }
    let aligned = groups
        .iter()
        .map(|g| g.align(ids))
        .collect::<Result<Vec<_>>>()?;
    let views: Vec<_> = aligned.iter().map(|m| m.rows.view()).collect();
    let rows = ndarray::concatenate(Axis(1), &views).expect("row counts agree after alignment");
    let name = aligned
        .iter()
        .map(|m| m.group.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    let source = if aligned.iter().all(|m| m.group.source == FeatureSource::Native) {
        FeatureSource::Native
    } else {
        FeatureSource::External
    };
    let group = FeatureGroup::new(name, rows.ncols(), source);
    FeatureMatrix::new(group, ids.to_vec(), rows)
}

/// Per-column z-scoring statistics from a training partition. Columns with
/// zero spread map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Array1<f64>,
    pub std: Array1<f64>,
}

impl Standardizer {
    pub fn fit(train: &Array2<f64>) -> Self {
        let n = train.nrows().max(1) as f64;
        let mean = train.sum_axis(Axis(0)) / n;
        let mut var = Array1::<f64>::zeros(train.ncols());
        for row in train.rows() {
            var.zip_mut_with(&(&row - &mean), |v, d| *v += d * d);
        }
        let std = var.mapv(|v| (v / n).sqrt());
        Standardizer { mean, std }
    }

    pub fn transform(&self, x: &Array2<f64>) -> Array2<f64> {
        let mut out = x - &self.mean;
        for mut row in out.rows_mut() {
            row.zip_mut_with(&self.std, |v, &s| *v = if s > 0.0 { *v / s } else { 0.0 });
        }
        out
    }
}

pub fn standardize(
    train: &FeatureMatrix,
    apply_to: &FeatureMatrix,
) -> Result<(FeatureMatrix, FeatureMatrix)> {
    if train.dim() != apply_to.dim() || train.group.name != apply_to.group.name {
        return Err(Error::InvalidArgument(format!(
            "cannot standardize `{}` ({}) with statistics of `{}` ({})",
            apply_to.group.name,
            apply_to.dim(),
            train.group.name,
            train.dim()
        )));
    }
    let s = Standardizer::fit(&train.rows);
    let a = FeatureMatrix::new(train.group.clone(), train.ids.clone(), s.transform(&train.rows))?;
    let b = FeatureMatrix::new(
        apply_to.group.clone(),
        apply_to.ids.clone(),
        s.transform(&apply_to.rows),
    )?;
    Ok((a, b))
}

/// Matrices keyed by group name.
#[derive(Debug, Clone, Default)]
pub struct FeatureStore {
    groups: BTreeMap<String, FeatureMatrix>,
}

impl FeatureStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, m: FeatureMatrix) {
        self.groups.insert(m.group.name.clone(), m);
    }

    pub fn get(&self, name: &str) -> Option<&FeatureMatrix> {
        self.groups.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.groups.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = &FeatureMatrix> {
        self.groups.values()
    }
}
