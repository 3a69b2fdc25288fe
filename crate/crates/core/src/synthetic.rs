//! Seeded synthetic corpora with controllable class signal, used by tests,
//! benchmarks and demos. Nothing here resembles real news content.

use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use ndarray::{Array1, Array2};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corpus::{reference_date, Article, Dataset, Label, Medium};
use crate::error::{Error, Result};
use crate::exec::rng_for;
use crate::feature_store::{registry, write_group, FeatureGroup, FeatureMatrix, FeatureSource, FeatureStore};

/// Name of the low-dimensional informative group.
pub const SIGNAL: &str = "signal";

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    /// Articles per label, in `Label::ALL` order.
    pub per_class: [usize; Label::COUNT],
    pub seed: u64,
    /// Width of the `signal` group; 0 omits it.
    pub signal_dim: usize,
    /// Distance of each class mean from the origin in the signal space, in
    /// noise standard deviations.
    pub separation: f64,
    /// Also emit every external registry group at its registry width.
    pub standard_groups: bool,
    /// Signal-to-noise factor of the registry groups.
    pub standard_strength: f64,
    pub media: usize,
    pub translations: bool,
    /// Tokens of class-specific vocabulary per body sentence.
    pub topical_words: usize,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            per_class: [50; Label::COUNT],
            seed: 42,
            signal_dim: 20,
            separation: 6.0,
            standard_groups: false,
            standard_strength: 1.0,
            media: 12,
            translations: true,
            topical_words: 2,
        }
    }
}

impl SyntheticConfig {
    pub fn balanced(per_class: usize, seed: u64) -> Self {
        SyntheticConfig {
            per_class: [per_class; Label::COUNT],
            seed,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticBundle {
    pub dataset: Dataset,
    pub store: FeatureStore,
}

/// File locations written by [`SyntheticBundle::write`].
#[derive(Debug, Clone, PartialEq)]
pub struct BundlePaths {
    pub articles: PathBuf,
    pub media: PathBuf,
    pub manifests: Vec<PathBuf>,
}

const SHARED: [&str; 12] = [
    "и", "на", "за", "от", "the", "report", "today", "people", "city", "said", "new", "time",
];

fn topical(class: usize, j: usize) -> String {
    format!("т{class}дума{j}")
}

fn sentence(rng: &mut ChaCha8Rng, class: usize, len: usize, topical_words: usize, end: char) -> String {
    let mut words: Vec<String> = (0..len)
        .map(|_| SHARED.choose(rng).expect("non-empty").to_string())
        .collect();
    for _ in 0..topical_words {
        let pos = rng.random_range(0..=words.len());
        words.insert(pos, topical(class, rng.random_range(0..8)));
    }
    if rng.random_bool(0.3) {
        words[0] = words[0].to_uppercase();
    }
    let mut s = words.join(" ");
    s.push(end);
    s
}

fn text(rng: &mut ChaCha8Rng, class: usize, sentences: usize, topical_words: usize) -> String {
    // Sensational classes shout more.
    let bang = matches!(Label::ALL[class], Label::Sensations | Label::HateSpeech);
    (0..sentences)
        .map(|_| {
            let end = if bang && rng.random_bool(0.5) { '!' } else { '.' };
            let len = rng.random_range(4..12);
            sentence(rng, class, len, topical_words, end)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn media_pool(n: usize, rng: &mut ChaCha8Rng) -> Vec<Medium> {
    (0..n)
        .map(|i| Medium {
            id: format!("medium-{i:02}"),
            has_editor: rng.random_bool(0.6),
            has_responsible_person: rng.random_bool(0.5),
            bg_server: rng.random_bool(0.7),
            alexa_rank: rng.random_bool(0.8).then(|| rng.random_range(1..2_000_000)),
            has_domain_person: rng.random_bool(0.5),
            created_date: reference_date()
                .checked_sub_days(Days::new(rng.random_range(30..8000)))
                .unwrap_or(NaiveDate::MIN),
        })
        .collect()
}

fn class_mean(class: usize, dim: usize, separation: f64) -> Array1<f64> {
    let mut m = Array1::zeros(dim);
    m[class % dim] = separation;
    if dim > Label::COUNT {
        m[Label::COUNT + class % (dim - Label::COUNT)] += 0.5 * separation;
    }
    m
}

/// Latent class samples: the class mean plus unit Gaussian noise.
fn latent(targets: &[usize], dim: usize, separation: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let mut z = Array2::zeros((targets.len(), dim));
    for (mut row, &c) in z.rows_mut().into_iter().zip(targets) {
        let mean = class_mean(c, dim, separation);
        for (v, m) in row.iter_mut().zip(&mean) {
            let e: f64 = StandardNormal.sample(rng);
            *v = m + e;
        }
    }
    z
}

/// Random linear lift of the latent samples into `dim` columns plus unit noise.
fn lifted(z: &Array2<f64>, dim: usize, strength: f64, rng: &mut ChaCha8Rng) -> Array2<f64> {
    let k = z.ncols();
    let scale = strength / (k as f64).sqrt();
    let a = Array2::from_shape_fn((k, dim), |_| {
        let e: f64 = StandardNormal.sample(rng);
        e * scale
    });
    let mut out = z.dot(&a);
    out.mapv_inplace(|v| {
        let e: f64 = StandardNormal.sample(rng);
        v + e
    });
    out
}

pub fn generate(cfg: &SyntheticConfig) -> Result<SyntheticBundle> {
    if cfg.per_class.iter().sum::<usize>() == 0 {
        return Err(Error::EmptyCorpus);
    }
    if cfg.media == 0 {
        return Err(Error::InvalidArgument("synthetic corpus needs at least one medium".into()));
    }
    let mut rng = rng_for(cfg.seed, &[0x5E7]);
    let media = media_pool(cfg.media, &mut rng);

    let mut classes: Vec<usize> = cfg
        .per_class
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .collect();
    classes.shuffle(&mut rng);

    let articles: Vec<Article> = classes
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let mut labels = vec![Label::ALL[c]];
            if rng.random_bool(0.15) {
                let extra = Label::ALL[rng.random_range(0..Label::COUNT)];
                if extra != labels[0] && extra != Label::NonToxic && labels[0] != Label::NonToxic {
                    labels.push(extra);
                }
            }
            let title = text(&mut rng, c, 1, 1);
            let n_sentences = rng.random_range(3..9);
            let body = text(&mut rng, c, n_sentences, cfg.topical_words);
            let (title_en, body_en) = if cfg.translations {
                (Some(format!("en {title}")), Some(format!("en {body}")))
            } else {
                (None, None)
            };
            Article {
                id: format!("syn-{i:05}"),
                title,
                body,
                title_en,
                body_en,
                labels,
                medium_id: media[rng.random_range(0..media.len())].id.clone(),
            }
        })
        .collect();
    let dataset = Dataset::new(articles, media)?;
    let ids = dataset.ids();

    let mut store = FeatureStore::new();
    let latent_dim = cfg.signal_dim.max(Label::COUNT);
    if cfg.signal_dim > 0 {
        let z = latent(&classes, cfg.signal_dim, cfg.separation, &mut rng_for(cfg.seed, &[0x516]));
        let group = FeatureGroup::new(SIGNAL, cfg.signal_dim, FeatureSource::External);
        store.insert(FeatureMatrix::new(group, ids.clone(), z)?);
    }
    if cfg.standard_groups {
        for (g, group) in registry()
            .into_iter()
            .filter(|g| g.source == FeatureSource::External)
            .enumerate()
        {
            let mut grng = rng_for(cfg.seed, &[0x57D, g as u64]);
            let z = latent(&classes, latent_dim, cfg.separation, &mut grng);
            let rows = lifted(&z, group.expected_dim, cfg.standard_strength, &mut grng);
            store.insert(FeatureMatrix::new(group, ids.clone(), rows)?);
        }
    }
    Ok(SyntheticBundle { dataset, store })
}

impl SyntheticBundle {
    /// Write `articles.jsonl`, `media.jsonl` and one vector file plus
    /// manifest per stored group into `dir`.
    pub fn write(&self, dir: &Path) -> Result<BundlePaths> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let articles = dir.join("articles.jsonl");
        let media = dir.join("media.jsonl");
        self.dataset.save(&articles, &media)?;
        let manifests = self
            .store
            .iter()
            .map(|m| write_group(dir, m, "synthetic"))
            .collect::<Result<Vec<_>>>()?;
        Ok(BundlePaths {
            articles,
            media,
            manifests,
        })
    }
}
