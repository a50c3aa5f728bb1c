use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{ExperimentReport, LabConfig, Outcome, Suite};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFiles {
    pub report: PathBuf,
    pub truncation: PathBuf,
    pub matsaev: PathBuf,
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::File { path: path.to_path_buf(), source })
}

/// Every suite in order, then report.json, truncation.csv and matsaev.csv in `out_dir`.
pub fn run_report(cfg: &LabConfig, out_dir: &Path) -> Result<(ExperimentReport, ReportFiles)> {
    cfg.validate()?;
    fs::create_dir_all(out_dir).map_err(|source| Error::File { path: out_dir.to_path_buf(), source })?;
    let started = Instant::now();
    let mut outcome = Outcome::default();
    for suite in Suite::ALL {
        outcome.merge(suite.name(), suite.run(cfg)?);
    }
    let inputs = serde_json::json!({ "suites": Suite::ALL.iter().map(|s| s.name()).collect::<Vec<_>>() });
    let report = ExperimentReport::new("report", cfg, &inputs, outcome, started);
    let files = ReportFiles {
        report: out_dir.join("report.json"),
        truncation: out_dir.join("truncation.csv"),
        matsaev: out_dir.join("matsaev.csv"),
    };
    let table = |name: &str| report.tables.get(name).map(|t| t.to_csv()).unwrap_or_default();
    write(&files.truncation, &table("truncation.truncation"))?;
    write(&files.matsaev, &table("matsaev.matsaev"))?;
    write(&files.report, &serde_json::to_string_pretty(&report)?)?;
    Ok((report, files))
}
