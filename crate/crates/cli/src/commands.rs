use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use toxnews_core::bundle::{load_bundle, validate_bundle, Coverage};
use toxnews_core::corpus::{load_dataset, reference_date};
use toxnews_core::feature_store::write_group;
use toxnews_core::local_features::{media_matrix, stylo_matrix};
use toxnews_core::pipeline::{
    parse_selection, run_setups, table3_setups, write_run, ClassifierKind, Experiment, RunConfig, SetupKind,
};
use toxnews_core::resample::{ResamplePlan, ResampleStrategy};
use toxnews_core::synthetic::{generate, SyntheticConfig};
use toxnews_core::{Error, Execution};

use crate::{ClassifierArg, ResampleArg, RunArgs};

const PRODUCER: &str = concat!("toxnews ", env!("CARGO_PKG_VERSION"));

pub enum CliError {
    Usage(String),
    Core(Error),
    AuditFailed(usize),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::AuditFailed(n) => write!(f, "leakage audit found {n} violation(s)"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(1),
            CliError::Core(e) if e.is_validation() => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}

type CliResult = Result<ExitCode, CliError>;

pub fn validate(articles: &Path, media: &Path, features: &[PathBuf], json: bool) -> CliResult {
    let report = validate_bundle(articles, media, features);
    if json {
        println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
    } else {
        println!("articles: {}", report.articles);
        println!("{:<14} {:>8} {:>8} {:>9}  status", "group", "expected", "found", "articles");
        for row in &report.coverage {
            let found = row.found_dim.map_or("-".to_string(), |d| d.to_string());
            let status = match row.coverage {
                Coverage::Complete => "ok",
                Coverage::Native => "native",
                Coverage::FoldLocal => "fitted per fold",
                Coverage::Partial => "partial",
                Coverage::Absent => "absent",
                Coverage::Invalid => "invalid",
            };
            println!(
                "{:<14} {:>8} {:>8} {:>9}  {status}",
                row.group, row.expected_dim, found, row.articles
            );
        }
        if !report.is_valid() {
            // Machine-readable issue list on stdout after the table.
            println!("{}", serde_json::to_string_pretty(&report.issues).map_err(Error::from)?);
        }
    }
    Ok(ExitCode::from(if report.is_valid() { 0 } else { 1 }))
}

pub fn featurize(articles: &Path, media: &Path, out: &Path) -> CliResult {
    let dataset = load_dataset(articles, media)?;
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.to_path_buf(),
        source: e,
    })?;
    for m in [
        stylo_matrix(&dataset, Execution::default())?,
        media_matrix(&dataset, reference_date())?,
    ] {
        let path = write_group(out, &m, PRODUCER)?;
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn merge_args(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut cfg = match &args.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &args.articles {
        cfg.articles = Some(p.clone());
    }
    if let Some(p) = &args.media {
        cfg.media = Some(p.clone());
    }
    if !args.features.is_empty() {
        cfg.features = args.features.clone();
    }
    if let Some(s) = args.seed {
        cfg.pipeline.seed = s;
    }
    if let Some(s) = &args.setups {
        cfg.setups = s.clone();
    }
    if let Some(r) = args.resample {
        cfg.resample = match r {
            ResampleArg::None => ResampleStrategy::None,
            ResampleArg::Random => ResampleStrategy::Random,
            ResampleArg::Smote => ResampleStrategy::Smote,
        };
    }
    if let Some(c) = args.classifier {
        cfg.classifier = match c {
            ClassifierArg::Softmax => ClassifierKind::Softmax,
            ClassifierArg::Mlp => ClassifierKind::Mlp,
        };
    }
    cfg.pipeline.execution = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    Ok(cfg)
}

pub fn run(args: RunArgs) -> CliResult {
    let cfg = merge_args(&args)?;
    let (Some(articles), Some(media)) = (&cfg.articles, &cfg.media) else {
        return Err(CliError::Usage(
            "--articles and --media are required (directly or via --config)".into(),
        ));
    };
    let (dataset, store) = load_bundle(articles, media, &cfg.features)?;

    let mut specs = table3_setups();
    for s in &mut specs {
        if matches!(s.kind, SetupKind::Single { .. }) {
            s.classifier = cfg.classifier;
            s.resample = ResamplePlan {
                strategy: cfg.resample,
                k_neighbors: cfg.k_neighbors,
                seed: cfg.pipeline.seed,
                target: None,
            };
        }
    }
    let available: Vec<u32> = specs.iter().map(|s| s.id).collect();
    let selected = parse_selection(&cfg.setups, &available)?;

    let exp = Experiment::new(&dataset, &store, cfg.pipeline.clone())?;
    let result = run_setups(&exp, &specs, &selected)?;
    write_run(&result, &args.out)?;
    println!("setup\tname\tdimension\taccuracy\tmacro_f1");
    for r in &result.reports {
        println!("{}", r.summary_line());
    }
    if !result.audit.violations.is_empty() {
        return Err(CliError::AuditFailed(result.audit.violations.len()));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn synthesize(out: &Path, per_class: usize, seed: u64, standard_groups: bool) -> CliResult {
    let mut cfg = SyntheticConfig::balanced(per_class, seed);
    cfg.standard_groups = standard_groups;
    let paths = generate(&cfg)?.write(out)?;
    println!("{}", paths.articles.display());
    println!("{}", paths.media.display());
    for m in &paths.manifests {
        println!("{}", m.display());
    }
    Ok(ExitCode::SUCCESS)
}
