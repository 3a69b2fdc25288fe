use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lsa::{BODY_DIM, TITLE_DIM};
use crate::models::{HyperGrid, MlpOptions};
use crate::resample::ResampleStrategy;

use super::setups::ClassifierKind;

/// Settings shared by every setup of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub outer_folds: usize,
    pub inner_folds: usize,
    pub grid: HyperGrid,
    pub mlp: MlpOptions,
    pub lsa_title_dim: usize,
    pub lsa_body_dim: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            outer_folds: 5,
            inner_folds: 5,
            grid: HyperGrid::default(),
            mlp: MlpOptions::default(),
            lsa_title_dim: TITLE_DIM,
            lsa_body_dim: BODY_DIM,
            execution: Execution::default(),
        }
    }
}

/// JSON run configuration. Relative paths resolve against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub articles: Option<PathBuf>,
    pub media: Option<PathBuf>,
    pub features: Vec<PathBuf>,
    pub setups: String,
    pub resample: ResampleStrategy,
    pub k_neighbors: usize,
    pub classifier: ClassifierKind,
    pub pipeline: PipelineConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            articles: None,
            media: None,
            features: Vec::new(),
            setups: "all".into(),
            resample: ResampleStrategy::None,
            k_neighbors: 5,
            classifier: ClassifierKind::Softmax,
            pipeline: PipelineConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        cfg.articles.as_mut().map(resolve);
        cfg.media.as_mut().map(resolve);
        cfg.features.iter_mut().for_each(resolve);
        Ok(cfg)
    }
}
