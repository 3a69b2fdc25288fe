//! The fourteen experimental setups and setup-selection parsing.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_store::{BERT_BG, BERT_EN, ELMO_EN, LSA_BG, MEDIA, NELA_EN, STYLO, USE_EN, XLM_BG};
use crate::resample::ResamplePlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    #[default]
    Softmax,
    Mlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetupKind {
    /// Predict the training fold's majority label.
    Baseline,
    /// One classifier over the concatenation of the listed groups.
    Single { groups: Vec<String> },
    /// Softmax over the out-of-fold posteriors of the listed setups.
    Meta { bases: Vec<u32> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetupSpec {
    pub id: u32,
    pub name: String,
    pub kind: SetupKind,
    pub classifier: ClassifierKind,
    pub resample: ResamplePlan,
}

impl SetupSpec {
    pub fn baseline(id: u32) -> Self {
        SetupSpec {
            id,
            name: "Baseline".into(),
            kind: SetupKind::Baseline,
            classifier: ClassifierKind::Softmax,
            resample: ResamplePlan::default(),
        }
    }

    pub fn single(id: u32, name: &str, groups: &[&str]) -> Self {
        SetupSpec {
            id,
            name: name.into(),
            kind: SetupKind::Single {
                groups: groups.iter().map(|g| g.to_string()).collect(),
            },
            classifier: ClassifierKind::Softmax,
            resample: ResamplePlan::default(),
        }
    }

    pub fn meta(id: u32, name: &str, bases: &[u32]) -> Self {
        SetupSpec {
            id,
            name: name.into(),
            kind: SetupKind::Meta {
                bases: bases.to_vec(),
            },
            classifier: ClassifierKind::Softmax,
            resample: ResamplePlan::default(),
        }
    }

    pub fn groups(&self) -> &[String] {
        match &self.kind {
            SetupKind::Single { groups } => groups,
            _ => &[],
        }
    }
}

pub const META_BASES: [u32; 9] = [2, 3, 4, 5, 7, 8, 9, 10, 12];

pub fn table3_setups() -> Vec<SetupSpec> {
    let bulgarian = [BERT_BG, XLM_BG, STYLO, LSA_BG];
    let english = [USE_EN, NELA_EN, BERT_EN, ELMO_EN];
    let all: Vec<&str> = bulgarian.iter().chain(&english).chain(&[MEDIA]).copied().collect();
    vec![
        SetupSpec::baseline(1),
        SetupSpec::single(2, "BERT(title), BERT(text) [bg]", &[BERT_BG]),
        SetupSpec::single(3, "XLM(title), XLM(text)", &[XLM_BG]),
        SetupSpec::single(4, "Styl(title), Styl(text)", &[STYLO]),
        SetupSpec::single(5, "LSA(title), LSA(text)", &[LSA_BG]),
        SetupSpec::single(6, "Bulgarian combined", &bulgarian),
        SetupSpec::single(7, "USE(title), USE(text)", &[USE_EN]),
        SetupSpec::single(8, "NELA(title), NELA(text)", &[NELA_EN]),
        SetupSpec::single(9, "BERT(title), BERT(text) [en]", &[BERT_EN]),
        SetupSpec::single(10, "ElMO(title), ElMO(text)", &[ELMO_EN]),
        SetupSpec::single(11, "English combined", &english),
        SetupSpec::single(12, "Media meta", &[MEDIA]),
        SetupSpec::single(13, "All combined", &all),
        SetupSpec::meta(14, "Meta classifier", &META_BASES),
    ]
}

/// Parse `all` or a comma list of ids and inclusive ranges, e.g. `1,5-7,14`.
pub fn parse_selection(s: &str, available: &[u32]) -> Result<Vec<u32>> {
    let known: BTreeSet<u32> = available.iter().copied().collect();
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(known.into_iter().collect());
    }
    let bad = |part: &str| Error::InvalidArgument(format!("bad setup selection `{part}`"));
    let mut out = BTreeSet::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (lo, hi) = match part.split_once('-') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad(part))?, b.trim().parse().map_err(|_| bad(part))?),
            None => {
                let v: u32 = part.parse().map_err(|_| bad(part))?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(bad(part));
        }
        for id in lo..=hi {
            if !known.contains(&id) {
                return Err(Error::InvalidArgument(format!("unknown setup {id}")));
            }
            out.insert(id);
        }
    }
    if out.is_empty() {
        return Err(bad(s));
    }
    Ok(out.into_iter().collect())
}

/// The selection plus every base a selected meta setup depends on, in id order.
pub fn with_dependencies(selected: &[u32], specs: &[SetupSpec]) -> Result<Vec<u32>> {
    let mut all: BTreeSet<u32> = selected.iter().copied().collect();
    for &id in selected {
        let spec = specs
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown setup {id}")))?;
        if let SetupKind::Meta { bases } = &spec.kind {
            for b in bases {
                let base = specs
                    .iter()
                    .find(|s| s.id == *b)
                    .ok_or_else(|| Error::InvalidArgument(format!("meta base {b} is not defined")))?;
                if !matches!(base.kind, SetupKind::Single { .. }) {
                    return Err(Error::InvalidArgument(format!(
                        "meta base {b} must be a single-classifier setup"
                    )));
                }
                all.insert(*b);
            }
        }
    }
    Ok(all.into_iter().collect())
}
