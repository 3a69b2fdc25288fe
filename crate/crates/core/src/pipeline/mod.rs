//! Nested cross-validation over the fourteen setups, stacking, metrics and
//! reports.

pub mod audit;
pub mod config;
pub mod experiment;
pub mod folds;
pub mod metrics;
pub mod report;
pub mod runner;
pub mod setups;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub use audit::{AuditSummary, Posteriors, Use, Violation};
pub use config::{PipelineConfig, RunConfig};
pub use experiment::Experiment;
pub use folds::{plan_folds, FoldPlan, OuterFold, Split};
pub use metrics::{compute_metrics, ClassMetrics, Metrics};
pub use report::{emit_report, setup_dir, write_table3, FoldReport, Prediction, RunReport};
pub use runner::{FoldOutcome, SetupOutcome};
pub use setups::{parse_selection, table3_setups, with_dependencies, ClassifierKind, SetupKind, SetupSpec};

/// Reports for the selected setups plus the audit of everything that ran,
/// including meta bases that were not selected.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSet {
    pub reports: Vec<RunReport>,
    pub audit: AuditSummary,
}

/// Run `selected` setups of `specs`, auto-running the bases of meta setups.
/// Every setup is checked for missing groups before any training starts.
pub fn run_setups(exp: &Experiment, specs: &[SetupSpec], selected: &[u32]) -> Result<RunSet> {
    let ids = with_dependencies(selected, specs)?;
    let chosen: Vec<&SetupSpec> = ids
        .iter()
        .map(|id| specs.iter().find(|s| s.id == *id).expect("resolved ids exist"))
        .collect();
    for s in &chosen {
        exp.check(s)?;
    }
    let plain: Vec<&SetupSpec> = chosen.iter().copied().filter(|s| !matches!(s.kind, SetupKind::Meta { .. })).collect();
    let mut outcomes = exp.config.execution.try_map(&plain, |s| exp.run_setup(s))?;
    for s in chosen.iter().filter(|s| matches!(s.kind, SetupKind::Meta { .. })) {
        let SetupKind::Meta { bases } = &s.kind else { unreachable!() };
        let base_outcomes: Vec<&SetupOutcome> = bases
            .iter()
            .map(|b| outcomes.iter().find(|o| o.spec.id == *b).expect("bases ran first"))
            .collect();
        let meta = exp.run_meta(s, &base_outcomes)?;
        outcomes.push(meta);
    }
    outcomes.sort_by_key(|o| o.spec.id);
    let mut audit = AuditSummary::default();
    let mut reports = Vec::new();
    for o in &outcomes {
        audit.merge(o.audit.clone());
        if selected.contains(&o.spec.id) {
            reports.push(RunReport::from_outcome(exp, o)?);
        }
    }
    Ok(RunSet { reports, audit })
}

/// Per-setup report directories, `table3.csv` and `audit.json` under `out`.
pub fn write_run(run: &RunSet, out: &Path) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    for r in &run.reports {
        emit_report(r, &setup_dir(out, r.setup))?;
    }
    write_table3(&run.reports, &out.join("table3.csv"))?;
    let path = out.join("audit.json");
    let mut json = serde_json::to_vec_pretty(&run.audit)?;
    json.push(b'\n');
    fs::write(&path, json).map_err(|e| Error::io(&path, e))
}
