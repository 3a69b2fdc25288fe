//! News toxicity classification over a nine-label scheme.
//!
//! The crate covers the full experimental pipeline: corpus ingestion and
//! validation, native features (stylometry, publisher metadata, LSA),
//! ingestion of externally computed embedding groups, softmax regression and
//! a small feed-forward network trained with Adam, oversampling ablations,
//! and a nested cross-validation driver that produces per-setup reports and a
//! stacked meta-classifier over out-of-fold posteriors.
//!
//! Independent work units (outer folds, inner folds, grid values, setups) run
//! on rayon when the `parallel` feature is enabled. Results never depend on
//! scheduling: every random stream is seeded from a `(setup, fold, ...)` key.

pub mod bundle;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod feature_store;
pub mod local_features;
pub mod lsa;
pub mod models;
pub mod pipeline;
pub mod resample;
pub mod synthetic;

pub use corpus::{Article, Dataset, Label, Medium};
pub use error::{Error, Result};
pub use exec::Execution;
