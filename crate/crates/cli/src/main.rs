use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use decomp_lab::error::Error;
use decomp_lab::group::GroupFile;
use decomp_lab::lab::{dec_norm_experiment, run_report, run_suite, ExperimentReport, LabConfig, MapInput, Suite};
use decomp_lab::linalg::Exponent;
use decomp_lab::sdp::SdpOptions;

#[derive(Parser)]
#[command(name = "decomp-lab", version, about = "Decomposable and cb norms of maps on matrix algebras")]
struct Cli {
    /// Schatten exponent (a number in [1, inf) or `inf`).
    #[arg(long, global = true, value_parser = parse_exponent)]
    p: Option<Exponent>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the trial count of every battery.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Random restarts of the norm estimators.
    #[arg(long, global = true, default_value_t = 64)]
    restarts: usize,
    /// Relative duality-gap target; the absolute target is a tenth of it.
    #[arg(long, global = true)]
    sdp_tol: Option<f64>,
    #[arg(long, global = true)]
    sdp_maxiter: Option<usize>,
    /// Small trial counts and dimensions.
    #[arg(long, global = true)]
    quick: bool,
    /// Multiply every assertion tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// dec and cb norm of a map or multiplier symbol stored as JSON.
    DecNorm {
        map_file: PathBuf,
        /// Group file, needed for Fourier symbols.
        #[arg(long)]
        group: Option<PathBuf>,
    },
    /// Run one invariant battery.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// Run every battery and write report.json, truncation.csv and matsaev.csv.
    Report,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// 3 for solver failures, 2 for everything else that stops a command early.
fn error_code(e: &Error) -> u8 {
    match e {
        Error::Solver { .. } | Error::NoConvergence(_) | Error::Infeasible => 3,
        _ => 2,
    }
}

impl Cli {
    fn config(&self) -> LabConfig {
        let mut sdp = SdpOptions::default();
        if let Some(tol) = self.sdp_tol {
            sdp.tol_rel = tol;
            sdp.tol_abs = tol / 10.0;
        }
        if let Some(k) = self.sdp_maxiter {
            sdp.max_iter = k;
        }
        LabConfig {
            seed: self.seed,
            trials: self.trials,
            restarts: self.restarts,
            sdp,
            quick: self.quick,
            tol_scale: self.tol_scale,
            p: self.p,
        }
    }
}

fn read_json(path: &Path) -> Result<serde_json::Value, Error> {
    let text = fs::read_to_string(path).map_err(|source| Error::File { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|source| Error::File { path: path.to_owned(), source })
}

fn create_dir(dir: &Path) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|source| Error::File { path: dir.to_owned(), source })
}

fn print_assertions(report: &ExperimentReport) {
    for a in &report.assertions {
        let mark = if a.passed { "PASS" } else { "FAIL" };
        println!(
            "{mark} {}: {}/{} worst {:.3e} (tol {:.1e}) {}",
            a.name,
            a.trials - a.failures,
            a.trials,
            a.worst,
            a.tolerance,
            a.detail
        );
    }
}

/// Failing witnesses go to stderr so stdout stays one line per assertion.
fn report_failures(report: &ExperimentReport) -> u8 {
    let mut code = 0;
    for a in report.failed() {
        code = 1;
        let witness = a.witness.clone().unwrap_or(serde_json::Value::Null);
        eprintln!("failed: {} [{}]", a.name, a.anchor);
        eprintln!("witness: {}", serde_json::to_string(&witness).unwrap_or_default());
    }
    code
}

fn dec_norm(cli: &Cli, map_file: &Path, group: Option<&Path>) -> Result<u8, Error> {
    let map_json = read_json(map_file)?;
    let mut inputs = serde_json::json!({ "map": map_json });
    let algebra = match group {
        Some(g) => {
            let gj = read_json(g)?;
            inputs["group"] = gj.clone();
            Some(serde_json::from_value::<GroupFile>(gj)?.build()?)
        }
        None => None,
    };
    let input = MapInput::from_json(&map_json, algebra)?;
    let p = cli.p.unwrap_or(Exponent::Infinity);
    let cfg = cli.config();
    let (report, witness) = dec_norm_experiment(&input, p, &cfg, &inputs)?;

    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    create_dir(&out)?;
    let stem = map_file.file_stem().and_then(|s| s.to_str()).unwrap_or("map");
    let witness_path = out.join(format!("{stem}.witness.json"));
    let report_path = out.join(format!("{stem}.report.json"));
    write_json(&witness_path, &witness)?;
    write_json(&report_path, &report)?;

    println!("dec = {:.9}", report.results["dec"]);
    println!("cb = {:.9}", report.results["cb"]);
    if let Some(e) = report.results.get("estimate_at_p") {
        println!("estimate at p = {p}: {e:.9}");
    }
    println!("witness: {}", witness_path.display());
    println!("report: {}", report_path.display());
    print_assertions(&report);
    Ok(report_failures(&report))
}

fn verify(cli: &Cli, suite: Suite) -> Result<u8, Error> {
    let report = run_suite(suite, &cli.config())?;
    print_assertions(&report);
    if let Some(out) = &cli.out {
        create_dir(out)?;
        let path = out.join(format!("verify-{suite}.json"));
        write_json(&path, &report)?;
        println!("report: {}", path.display());
    }
    Ok(report_failures(&report))
}

fn report(cli: &Cli) -> Result<u8, Error> {
    let out = cli.out.clone().ok_or_else(|| Error::Invalid("report needs --out DIR".into()))?;
    let started = Instant::now();
    let (report, files) = run_report(&cli.config(), &out)?;
    let failed = report.failed().count();
    println!(
        "{} assertions, {} failed, {:.1} s",
        report.assertions.len(),
        failed,
        started.elapsed().as_secs_f64()
    );
    for a in report.failed() {
        println!("FAIL {}: {}", a.name, a.detail);
    }
    for f in [&files.report, &files.truncation, &files.matsaev] {
        println!("wrote {}", f.display());
    }
    Ok(report_failures(&report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::DecNorm { map_file, group } => dec_norm(&cli, map_file, group.as_deref()),
        Command::Verify { suite } => verify(&cli, *suite),
        Command::Report => report(&cli),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
