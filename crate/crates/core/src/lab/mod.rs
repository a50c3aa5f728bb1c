//! Seeded experiment batteries and their JSON/CSV reports.

mod batteries;
mod dec;
mod report;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::Exponent;
use crate::random::{rng_stream, LabRng};
use crate::sdp::SdpOptions;

pub use batteries::{
    cb_below_dec, cocycle_invariance, dec_axioms, matsaev_battery, modulus_blocks, multiplier_estimates,
    projections, property_p_battery, schur_dec_identity, selfadjoint_forms, transpose_norms, truncation_battery,
    unitary_rows,
};
pub use dec::{dec_norm_experiment, DecWitness, MapInput};
pub use report::{run_report, ReportFiles};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabConfig {
    pub seed: u64,
    /// Overrides every battery's default sample count.
    pub trials: Option<usize>,
    pub restarts: usize,
    pub sdp: SdpOptions,
    pub quick: bool,
    /// Multiplies every assertion tolerance.
    pub tol_scale: f64,
    /// Extra exponent for the estimate batteries.
    pub p: Option<Exponent>,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { seed: 0, trials: None, restarts: 64, sdp: SdpOptions::default(), quick: false, tol_scale: 1.0, p: None }
    }
}

impl LabConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(Error::Invalid(format!("tolerance scale {} must be positive", self.tol_scale)));
        }
        if self.trials == Some(0) {
            return Err(Error::Invalid("trials must be positive".into()));
        }
        if !(self.sdp.tol_abs > 0.0 && self.sdp.tol_rel > 0.0 && self.sdp.max_iter > 0) {
            return Err(Error::Invalid("SDP tolerances and iteration cap must be positive".into()));
        }
        Ok(())
    }

    /// `full` normally, a small fixed count in quick mode, or the explicit override.
    pub fn count(&self, full: usize) -> usize {
        match self.trials {
            Some(t) => t,
            None if self.quick => full.min(5),
            None => full,
        }
    }

    pub fn tol(&self, base: f64) -> f64 {
        base * self.tol_scale
    }

    pub(crate) fn stream(&self, battery: u64) -> LabRng {
        rng_stream(self.seed, battery)
    }
}

/// One checked statement, aggregated over its trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    /// The statement being tested, in words.
    pub anchor: String,
    pub passed: bool,
    pub trials: usize,
    pub failures: usize,
    /// Largest observed discrepancy (floored at 0), in the units of `tolerance`.
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
    /// First failing instance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

pub(crate) struct Check {
    a: Assertion,
}

impl Check {
    pub(crate) fn new(name: &str, anchor: &str, tolerance: f64) -> Self {
        Check {
            a: Assertion {
                name: name.into(),
                anchor: anchor.into(),
                passed: true,
                trials: 0,
                failures: 0,
                worst: 0.0,
                tolerance,
                detail: String::new(),
                witness: None,
            },
        }
    }

    pub(crate) fn worst(&self) -> f64 {
        self.a.worst
    }

    pub(crate) fn tolerance(&self) -> f64 {
        self.a.tolerance
    }

    /// Passes when `discrepancy ≤ tolerance`; NaN fails.
    pub(crate) fn record(&mut self, discrepancy: f64, witness: impl FnOnce() -> serde_json::Value) {
        self.a.trials += 1;
        let ok = discrepancy <= self.a.tolerance;
        if discrepancy.is_nan() || discrepancy > self.a.worst {
            self.a.worst = discrepancy;
        }
        if !ok {
            self.a.failures += 1;
            self.a.passed = false;
            if self.a.witness.is_none() {
                self.a.witness = Some(witness());
            }
        }
    }

    pub(crate) fn record_bool(&mut self, ok: bool, witness: impl FnOnce() -> serde_json::Value) {
        self.record(if ok { 0.0 } else { f64::INFINITY }, witness);
    }

    pub(crate) fn finish(mut self, detail: impl Into<String>) -> Assertion {
        if self.a.trials == 0 {
            self.a.passed = false;
        }
        self.a.detail = detail.into();
        self.a
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<serde_json::Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<serde_json::Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|v| match v {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// What a battery produces before it is wrapped into a report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub scalars: BTreeMap<String, f64>,
    pub tables: BTreeMap<String, Table>,
    pub assertions: Vec<Assertion>,
}

impl Outcome {
    pub fn scalar(&mut self, name: impl Into<String>, value: f64) {
        self.scalars.insert(name.into(), value);
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn merge(&mut self, prefix: &str, other: Outcome) {
        for (k, v) in other.scalars {
            self.scalars.insert(format!("{prefix}.{k}"), v);
        }
        for (k, v) in other.tables {
            self.tables.insert(format!("{prefix}.{k}"), v);
        }
        self.assertions.extend(other.assertions);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    /// SHA-256 of the canonical JSON of the command, parameters and input files.
    pub inputs_digest: String,
    pub parameters: serde_json::Value,
    pub seed: u64,
    pub results: BTreeMap<String, f64>,
    pub tables: BTreeMap<String, Table>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
    pub wall_time_s: f64,
}

impl ExperimentReport {
    pub fn new(command: &str, cfg: &LabConfig, inputs: &serde_json::Value, outcome: Outcome, started: Instant) -> Self {
        let parameters = serde_json::to_value(cfg).expect("config serializes");
        let canonical = serde_json::json!({ "command": command, "parameters": parameters, "inputs": inputs });
        ExperimentReport {
            command: command.into(),
            inputs_digest: sha256_hex(canonical.to_string().as_bytes()),
            parameters,
            seed: cfg.seed,
            passed: outcome.passed(),
            results: outcome.scalars,
            tables: outcome.tables,
            assertions: outcome.assertions,
            wall_time_s: started.elapsed().as_secs_f64(),
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.passed)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    DecAxioms,
    Projections,
    Cocycle,
    SchurDec,
    Modulus,
    PropertyP,
    Matsaev,
    Truncation,
    UnitaryRow,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::UnitaryRow,
        Suite::DecAxioms,
        Suite::Projections,
        Suite::Cocycle,
        Suite::SchurDec,
        Suite::Modulus,
        Suite::PropertyP,
        Suite::Matsaev,
        Suite::Truncation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DecAxioms => "dec-axioms",
            Suite::Projections => "projections",
            Suite::Cocycle => "cocycle",
            Suite::SchurDec => "schur-dec",
            Suite::Modulus => "modulus",
            Suite::PropertyP => "property-p",
            Suite::Matsaev => "matsaev",
            Suite::Truncation => "truncation",
            Suite::UnitaryRow => "unitary-row",
        }
    }

    pub fn run(self, cfg: &LabConfig) -> Result<Outcome> {
        cfg.validate()?;
        match self {
            Suite::UnitaryRow => unitary_rows(cfg),
            Suite::DecAxioms => {
                let mut out = transpose_norms(cfg)?;
                out.merge("cb", cb_below_dec(cfg)?);
                out.merge("axioms", dec_axioms(cfg)?);
                out.merge("selfadjoint", selfadjoint_forms(cfg)?);
                Ok(out)
            }
            Suite::Projections => projections(cfg),
            Suite::Cocycle => cocycle_invariance(cfg),
            Suite::SchurDec => {
                let mut out = schur_dec_identity(cfg)?;
                out.merge("estimates", multiplier_estimates(cfg)?);
                Ok(out)
            }
            Suite::Modulus => modulus_blocks(cfg),
            Suite::PropertyP => property_p_battery(cfg),
            Suite::Matsaev => matsaev_battery(cfg),
            Suite::Truncation => truncation_battery(cfg),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown suite {s:?}")))
    }
}

/// Runs one suite and wraps it into a report.
pub fn run_suite(suite: Suite, cfg: &LabConfig) -> Result<ExperimentReport> {
    let started = Instant::now();
    let outcome = suite.run(cfg)?;
    let inputs = serde_json::json!({ "suite": suite.name() });
    Ok(ExperimentReport::new(&format!("verify {suite}"), cfg, &inputs, outcome, started))
}
