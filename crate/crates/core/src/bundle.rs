//! Loading a corpus together with its feature files, and a non-failing
//! validation pass that collects every problem instead of stopping at the
//! first.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::corpus::{load_dataset, Dataset};
use crate::error::{Error, Result};
use crate::feature_store::{ingest_manifest, registry, FeatureSource, FeatureStore, LSA_BG};

/// Load the corpus and every manifest, aligning each group to the corpus.
pub fn load_bundle(articles: &Path, media: &Path, manifests: &[PathBuf]) -> Result<(Dataset, FeatureStore)> {
    let dataset = load_dataset(articles, media)?;
    let ids = dataset.ids();
    let mut store = FeatureStore::new();
    for m in manifests {
        let matrix = ingest_manifest(m)?;
        if store.contains(&matrix.group().name) {
            return Err(Error::DuplicateId(matrix.group().name.clone()));
        }
        store.insert(matrix.align(&ids)?);
    }
    Ok((dataset, store))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// Vectors present for every article.
    Complete,
    /// Computed from the corpus itself.
    Native,
    /// Fitted inside each training fold at run time.
    FoldLocal,
    Partial,
    Absent,
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub group: String,
    pub expected_dim: usize,
    pub found_dim: Option<usize>,
    pub articles: usize,
    pub coverage: Coverage,
}

/// One problem, machine readable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Issue {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub found: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ids: Vec<String>,
}

impl Issue {
    pub fn from_error(e: &Error, path: Option<&Path>) -> Self {
        let mut issue = Issue {
            kind: "",
            message: e.to_string(),
            path: path.map(Path::to_path_buf),
            group: None,
            expected: None,
            found: None,
            ids: Vec::new(),
        };
        issue.kind = match e {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::UnresolvedMedium { article_ids } => {
                issue.ids = article_ids.clone();
                "unresolved_medium"
            }
            Error::DuplicateId(id) => {
                issue.ids = vec![id.clone()];
                "duplicate_id"
            }
            Error::EmptyText(id) | Error::InvalidRecord { id, .. } => {
                issue.ids = vec![id.clone()];
                "invalid_record"
            }
            Error::UnknownLabel(_) => "unknown_label",
            Error::DimensionMismatch {
                group,
                id,
                expected,
                found,
            } => {
                issue.group = Some(group.clone());
                issue.expected = Some(*expected);
                issue.found = Some(*found);
                issue.ids = vec![id.clone()];
                "dimension_mismatch"
            }
            Error::NonFinite { group, id } => {
                issue.group = Some(group.clone());
                issue.ids = vec![id.clone()];
                "non_finite"
            }
            Error::MissingIds { group, ids } => {
                issue.group = Some(group.clone());
                issue.ids = ids.clone();
                "missing_ids"
            }
            Error::MissingGroup(group) => {
                issue.group = Some(group.clone());
                "missing_group"
            }
            Error::MissingTranslation { group, ids } => {
                issue.group = Some(group.clone());
                issue.ids = ids.clone();
                "missing_translation"
            }
            Error::EmptyCorpus => "empty_corpus",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SingleClass | Error::EmptyClass(_) => "training",
            Error::Json(_) => "json",
        };
        issue
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub articles: usize,
    pub coverage: Vec<CoverageRow>,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Check the corpus and every manifest, recording all problems found.
pub fn validate_bundle(articles: &Path, media: &Path, manifests: &[PathBuf]) -> ValidationReport {
    let mut issues = Vec::new();
    let dataset = match load_dataset(articles, media) {
        Ok(d) => Some(d),
        Err(e) => {
            issues.push(Issue::from_error(&e, None));
            None
        }
    };
    let ids = dataset.as_ref().map(Dataset::ids).unwrap_or_default();
    let n = ids.len();
    let mut rows: Vec<CoverageRow> = Vec::new();
    let mut seen = HashSet::new();

    for path in manifests {
        let matrix = match ingest_manifest(path) {
            Ok(m) => m,
            Err(e) => {
                let issue = Issue::from_error(&e, Some(path));
                if let Some(group) = &issue.group {
                    rows.push(CoverageRow {
                        group: group.clone(),
                        expected_dim: issue.expected.unwrap_or(0),
                        found_dim: issue.found,
                        articles: 0,
                        coverage: Coverage::Invalid,
                    });
                    seen.insert(group.clone());
                }
                issues.push(issue);
                continue;
            }
        };
        let group = matrix.group().clone();
        if !seen.insert(group.name.clone()) {
            issues.push(Issue::from_error(&Error::DuplicateId(group.name.clone()), Some(path)));
            continue;
        }
        let present: HashSet<&str> = matrix.ids().iter().map(String::as_str).collect();
        let covered = ids.iter().filter(|id| present.contains(id.as_str())).count();
        let coverage = if dataset.is_none() {
            Coverage::Invalid
        } else if covered == n {
            Coverage::Complete
        } else {
            Coverage::Partial
        };
        if dataset.is_some() {
            if let Err(e) = matrix.align(&ids) {
                issues.push(Issue::from_error(&e, Some(path)));
            }
            if group.needs_translation() {
                let missing: Vec<String> = dataset
                    .as_ref()
                    .map(|d| {
                        d.articles()
                            .iter()
                            .filter(|a| !a.has_translation())
                            .map(|a| a.id.clone())
                            .collect()
                    })
                    .unwrap_or_default();
                if !missing.is_empty() {
                    issues.push(Issue::from_error(
                        &Error::MissingTranslation {
                            group: group.name.clone(),
                            ids: missing,
                        },
                        Some(path),
                    ));
                }
            }
        }
        rows.push(CoverageRow {
            group: group.name.clone(),
            expected_dim: group.expected_dim,
            found_dim: Some(matrix.dim()),
            articles: covered,
            coverage,
        });
    }

    for g in registry() {
        if seen.contains(&g.name) {
            continue;
        }
        let (coverage, articles, found) = match g.source {
            FeatureSource::Native if g.name == LSA_BG => (Coverage::FoldLocal, n, None),
            FeatureSource::Native => (Coverage::Native, n, Some(g.expected_dim)),
            FeatureSource::External => (Coverage::Absent, 0, None),
        };
        rows.push(CoverageRow {
            group: g.name,
            expected_dim: g.expected_dim,
            found_dim: found,
            articles,
            coverage,
        });
    }
    let order = |name: &str| registry().iter().position(|g| g.name == name).unwrap_or(usize::MAX);
    rows.sort_by(|a, b| order(&a.group).cmp(&order(&b.group)).then_with(|| a.group.cmp(&b.group)));
    ValidationReport {
        articles: n,
        coverage: rows,
        issues,
    }
}
