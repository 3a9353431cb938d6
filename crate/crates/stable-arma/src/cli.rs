//! Command-line interface: `simulate`, `fit`, `mc`, `diagnose` and `replay`.
//!
//! Every command except `replay` writes a [`RunManifest`] next to its
//! outputs. Exit status is 0 on success, 2 for bad input or configuration and
//! 3 for numerical failure.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use stable_arma_core::arma::{arma_innovations, fit_mhr, ArmaEstimate};
use stable_arma_core::diagnostics::{ks_pvalue_battery, qq_data, residual_autocovariation};
use stable_arma_core::garch::{fit_arma_garch, garch_standard_errors, BootstrapSe, GarchEstimate, PipelineOptions};
use stable_arma_core::models::{VolatilityDriver, DEFAULT_BURNIN};
use stable_arma_core::montecarlo::{simulate_model, Estimator, McConfig, McTruth, MecfStart, Model};
use stable_arma_core::stable::{estimate_sas_params, StableParams};
use stable_arma_core::RngSeed;

use crate::error::{CliError, CliResult};
use crate::io::{file_sha256, fmt_f64, read_json, read_series, write_json, write_series, write_table, InputSeries};
use crate::manifest::{manifest_beside, manifest_in, FileDigest, RunManifest, MANIFEST_SCHEMA_VERSION};
use crate::report::{render_report, ReportFormat};
use crate::runner::{run_mc_parallel, worker_count};

pub const FIT_SCHEMA_VERSION: u32 = 1;

/// Child streams of the command seed.
const KS_STREAM: u64 = 1;
const QQ_STREAM: u64 = 2;
const BOOTSTRAP_STREAM: u64 = 3;

/// NCV lags reported in the fit summary.
const FIT_NCV_LAGS: usize = 10;

#[derive(Parser, Debug)]
#[command(
    name = "stable-arma",
    version,
    about = "Simulate, fit and diagnose ARMA and ARMA-GARCH models driven by symmetric stable noise"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Simulate one series of model M1-M4 to a `value` CSV.
    Simulate(SimulateArgs),
    /// Fit ARMA (MHR) and optionally SαS-GARCH(1,1) (MECF) to a CSV series.
    Fit(FitArgs),
    /// Monte Carlo study: mean and RMSE of each estimator over replications.
    Mc(McArgs),
    /// Residual diagnostics for a fitted series.
    Diagnose(DiagnoseArgs),
    /// Re-run a command from its manifest and verify the outputs.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Fit(_) => "fit",
            Command::Mc(_) => "mc",
            Command::Diagnose(_) => "diagnose",
            Command::Replay(_) => "replay",
        }
    }

    /// Same command with every path made absolute.
    pub fn absolutized(mut self) -> CliResult<Self> {
        let abs = |p: &mut PathBuf| -> CliResult<()> {
            *p = std::path::absolute(&*p)?;
            Ok(())
        };
        match &mut self {
            Command::Simulate(a) => abs(&mut a.out)?,
            Command::Fit(a) => {
                abs(&mut a.input)?;
                abs(&mut a.out)?;
            }
            Command::Mc(a) => {
                if let Some(c) = a.config.as_mut() {
                    abs(c)?;
                }
                abs(&mut a.out)?;
            }
            Command::Diagnose(a) => {
                abs(&mut a.input)?;
                abs(&mut a.fit)?;
                abs(&mut a.out)?;
            }
            Command::Replay(a) => abs(&mut a.manifest)?,
        }
        Ok(self)
    }
}

/// Model and generating parameters. Which coefficients are required depends
/// on the model: θ₁ always, φ₁ for M2/M4, c, a₁, b₁ for M3/M4.
#[derive(Args, Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelArgs {
    /// M1 (MA(1)), M2 (ARMA(1,1)), M3 (MA(1)-GARCH(1,1)) or M4 (ARMA(1,1)-GARCH(1,1)).
    #[arg(long, value_parser = parse_model)]
    pub model: Option<Model>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub a1: Option<f64>,
    #[arg(long)]
    pub b1: Option<f64>,
    /// Stability index of the noise, in (1, 2].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Series length.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Discarded leading samples [default: 500].
    #[arg(long)]
    pub burnin: Option<usize>,
    /// What drives the volatility recursion: `innovation` or `observation`.
    #[arg(long, value_parser = parse_driver)]
    pub driver: Option<VolatilityDriver>,
}

impl ModelArgs {
    fn any_set(&self) -> bool {
        *self != ModelArgs::default()
    }

    fn config(&self, reps: usize) -> CliResult<McConfig> {
        let missing = |flag: &str| CliError::input(format!("--{flag} is required"));
        let model = self.model.ok_or_else(|| missing("model"))?;
        let truth = McTruth {
            theta: self.theta.ok_or_else(|| missing("theta"))?,
            phi: self.phi,
            c: self.c,
            a1: self.a1,
            b1: self.b1,
        };
        let alpha = self.alpha.ok_or_else(|| missing("alpha"))?;
        let n = self.n.ok_or_else(|| missing("n"))?;
        let seed = self.seed.ok_or_else(|| missing("seed"))?;
        let mut config = McConfig::new(model, truth, alpha, n, reps, RngSeed(seed));
        config.burnin = self.burnin.unwrap_or(DEFAULT_BURNIN);
        config.driver = self.driver.unwrap_or_default();
        Ok(config)
    }
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitArgs {
    /// CSV with a `value` column, or an `adj_close` column that is turned
    /// into log returns.
    #[arg(long)]
    pub input: PathBuf,
    /// AR order.
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    /// MA order.
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    /// Also fit SαS-GARCH(1,1) to the ARMA innovations.
    #[arg(long)]
    pub garch: bool,
    /// Long-AR order of the MHR first step.
    #[arg(long)]
    pub ar_order: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Parametric-bootstrap replicates for GARCH standard errors (0 skips).
    #[arg(long, default_value_t = 0)]
    pub bootstrap: usize,
    /// KS battery trials in the summary.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Output JSON report.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McArgs {
    /// TOML or JSON Monte Carlo config; excludes the model flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Replications [default: 200].
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated subset of MHR, LAD, LS, MECF [default: all that apply].
    #[arg(long, value_delimiter = ',', value_parser = parse_estimator)]
    pub estimators: Option<Vec<Estimator>>,
    #[arg(long)]
    pub ar_order: Option<usize>,
    /// MECF start: `truth` or `pipeline`.
    #[arg(long, value_parser = parse_mecf_start)]
    pub mecf_start: Option<MecfStart>,
    /// Report formats to write [default: all].
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Vec<ReportFormat>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseArgs {
    /// The series that was fitted.
    #[arg(long)]
    pub input: PathBuf,
    /// JSON report written by `fit`.
    #[arg(long)]
    pub fit: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 20)]
    pub max_lag: usize,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,
}

fn parse_model(s: &str) -> Result<Model, String> {
    match s.to_ascii_uppercase().as_str() {
        "M1" => Ok(Model::M1),
        "M2" => Ok(Model::M2),
        "M3" => Ok(Model::M3),
        "M4" => Ok(Model::M4),
        _ => Err(format!("unknown model {s:?}; expected M1, M2, M3 or M4")),
    }
}

fn parse_estimator(s: &str) -> Result<Estimator, String> {
    match s.trim().to_ascii_uppercase().as_str() {
        "MHR" => Ok(Estimator::Mhr),
        "LAD" => Ok(Estimator::Lad),
        "LS" => Ok(Estimator::Ls),
        "MECF" => Ok(Estimator::Mecf),
        _ => Err(format!("unknown estimator {s:?}")),
    }
}

fn parse_mecf_start(s: &str) -> Result<MecfStart, String> {
    match s {
        "truth" => Ok(MecfStart::Truth),
        "pipeline" => Ok(MecfStart::Pipeline),
        _ => Err(format!("unknown MECF start {s:?}; expected truth or pipeline")),
    }
}

fn parse_driver(s: &str) -> Result<VolatilityDriver, String> {
    match s {
        "innovation" => Ok(VolatilityDriver::Innovation),
        "observation" => Ok(VolatilityDriver::Observation),
        _ => Err(format!("unknown driver {s:?}; expected innovation or observation")),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputSummary {
    pub path: PathBuf,
    pub column: String,
    pub rows: usize,
    /// Length of the fitted series.
    pub n: usize,
    pub log_returns: bool,
}

/// Five-number summary of KS p-values plus the share below 0.05.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PValueSummary {
    pub trials: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub below_0_05: f64,
}

impl PValueSummary {
    pub fn of(p: &[f64]) -> Self {
        let mut s = p.to_vec();
        s.sort_by(f64::total_cmp);
        let q = |f: f64| {
            let pos = f * (s.len() - 1) as f64;
            let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
            s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
        };
        PValueSummary {
            trials: s.len(),
            min: s[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: s[s.len() - 1],
            below_0_05: s.iter().filter(|v| **v < 0.05).count() as f64 / s.len() as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    /// NCV of the final residuals at lags 1, 2, ...
    pub ncv: Vec<f64>,
    pub ks: PValueSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema_version: u32,
    pub input: InputSummary,
    pub p: usize,
    pub q: usize,
    pub garch_requested: bool,
    pub seed: u64,
    pub arma: Option<ArmaEstimate>,
    pub garch: Option<GarchEstimate>,
    pub bootstrap: Option<BootstrapSe>,
    /// Stable law fitted to the final residuals (standardized when a GARCH
    /// part was fitted).
    pub residual_stable: Option<StableParams>,
    pub diagnostics: Option<FitDiagnostics>,
    /// Set when the fit failed part way; the fields above hold what finished.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseSummary {
    pub schema_version: u32,
    pub n: usize,
    pub seed: u64,
    pub stable: StableParams,
    pub ks: PValueSummary,
    /// Largest |NCV| over the reported lags and the ±2/√n band.
    pub max_abs_ncv: f64,
    pub ncv_band: f64,
}

/// What a command produced. `status` carries a failure that happened after
/// some outputs were written; the manifest is still recorded.
struct Run {
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    seeds: Vec<u64>,
    config: Option<serde_json::Value>,
    workers: Option<usize>,
    manifest: PathBuf,
    status: CliResult<()>,
}

impl Run {
    fn new(manifest: PathBuf) -> Self {
        Run {
            inputs: Vec::new(),
            outputs: Vec::new(),
            seeds: Vec::new(),
            config: None,
            workers: None,
            manifest,
            status: Ok(()),
        }
    }

    fn exit_code(&self) -> u8 {
        self.status.as_ref().err().map_or(0, CliError::exit_code)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<String> = args.into_iter().map(|a| a.into().to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn dispatch(command: Command, argv: &[String]) -> CliResult<()> {
    let command = command.absolutized()?;
    if let Command::Replay(a) = &command {
        return replay(&a.manifest);
    }
    let start = Instant::now();
    let run = execute(&command)?;
    let digests = |paths: &[PathBuf]| paths.iter().map(|p| FileDigest::of(p)).collect::<CliResult<Vec<_>>>();
    let manifest = RunManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        command: command.name().into(),
        invocation: command.clone(),
        config: run.config.clone(),
        argv: argv.to_vec(),
        seeds: run.seeds.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        inputs: digests(&run.inputs)?,
        outputs: digests(&run.outputs)?,
        workers: run.workers,
        exit_code: run.exit_code(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
    };
    manifest.write(&run.manifest)?;
    run.status
}

fn execute(command: &Command) -> CliResult<Run> {
    match command {
        Command::Simulate(a) => simulate(a),
        Command::Fit(a) => fit(a),
        Command::Mc(a) => mc(a),
        Command::Diagnose(a) => diagnose(a),
        Command::Replay(_) => Err(CliError::input("a manifest cannot record a replay")),
    }
}

/// Re-runs the recorded invocation and checks every output digest.
pub fn replay(manifest_path: &Path) -> CliResult<()> {
    let m = RunManifest::read(manifest_path)?;
    for input in &m.inputs {
        if file_sha256(&input.path)? != input.sha256 {
            return Err(CliError::input(format!("{} changed since the recorded run", input.path.display())));
        }
    }
    let run = execute(&m.invocation)?;
    if run.exit_code() != m.exit_code {
        return Err(CliError::numerical(format!(
            "exit status {} differs from the recorded {}",
            run.exit_code(),
            m.exit_code
        )));
    }
    let recorded: Vec<&PathBuf> = m.outputs.iter().map(|o| &o.path).collect();
    if run.outputs.iter().collect::<Vec<_>>() != recorded {
        return Err(CliError::numerical("the re-run produced a different set of outputs"));
    }
    for out in &m.outputs {
        if file_sha256(&out.path)? != out.sha256 {
            return Err(CliError::numerical(format!("{} differs from the recorded run", out.path.display())));
        }
    }
    println!("reproduced {} output(s) of `{}` byte for byte", m.outputs.len(), m.command);
    Ok(())
}

fn simulate(a: &SimulateArgs) -> CliResult<Run> {
    let config = a.model.config(1)?;
    config.validate_model().map_err(CliError::input)?;
    let series = simulate_model(&config, config.master_seed).map_err(CliError::input)?;
    write_series(&a.out, series.values(), None)?;
    println!("wrote {} values to {}", series.len(), a.out.display());
    let mut run = Run::new(manifest_beside(&a.out));
    run.outputs.push(a.out.clone());
    run.seeds.push(config.master_seed.0);
    Ok(run)
}

fn fit(a: &FitArgs) -> CliResult<Run> {
    if a.trials == 0 {
        return Err(CliError::input("--trials must be at least 1"));
    }
    if a.bootstrap == 1 {
        return Err(CliError::input("--bootstrap needs at least 2 replicates"));
    }
    let series = read_series(&a.input)?;
    let mut report = FitReport {
        schema_version: FIT_SCHEMA_VERSION,
        input: InputSummary {
            path: a.input.clone(),
            column: series.column.clone(),
            rows: series.rows,
            n: series.values.len(),
            log_returns: series.log_returns,
        },
        p: a.p,
        q: a.q,
        garch_requested: a.garch,
        seed: a.seed,
        arma: None,
        garch: None,
        bootstrap: None,
        residual_stable: None,
        diagnostics: None,
        error: None,
    };
    let status = fit_into(&mut report, &series.values, a);
    if let Err(e) = &status {
        report.error = Some(e.to_string());
    }
    write_json(&a.out, &report)?;
    if let Some(arma) = &report.arma {
        println!("ARMA({}, {}) MHR: phi = {:?}, theta = {:?}", a.p, a.q, arma.phi, arma.theta);
    }
    if let Some(g) = &report.garch {
        println!("GARCH(1, 1) MECF: c = {}, a1 = {}, b1 = {}, alpha = {}", g.c_hat, g.a1_hat, g.b1_hat, g.alpha_hat);
    }
    let mut run = Run::new(manifest_beside(&a.out));
    run.inputs.push(a.input.clone());
    run.outputs.push(a.out.clone());
    run.seeds.push(a.seed);
    run.status = status;
    Ok(run)
}

fn fail(stage: &'static str) -> impl Fn(stable_arma_core::Error) -> CliError {
    move |e| CliError::numerical(format!("{stage}: {e}"))
}

fn fit_into(report: &mut FitReport, x: &[f64], a: &FitArgs) -> CliResult<()> {
    let seed = RngSeed(a.seed);
    let arma = fit_mhr(x, a.p, a.q, a.ar_order).map_err(fail("ARMA fit failed"))?;
    report.arma = Some(arma.clone());
    let residuals = if a.garch {
        let options = PipelineOptions { ar_order: a.ar_order, seed, ..PipelineOptions::default() };
        let (_, mut garch) = fit_arma_garch(x, a.p, a.q, &options).map_err(fail("GARCH fit failed"))?;
        report.garch = Some(garch.clone());
        if !garch.converged {
            return Err(CliError::numerical("GARCH fit failed: the optimizer did not converge"));
        }
        if a.bootstrap > 0 {
            let se = garch_standard_errors(x.len(), &garch, a.bootstrap, seed.child(BOOTSTRAP_STREAM), &options.mecf)
                .map_err(fail("bootstrap failed"))?;
            garch.std_errors = Some(se.std_errors);
            report.garch = Some(garch.clone());
            report.bootstrap = Some(se);
        }
        garch.standardize(&arma.residuals).map_err(fail("standardization failed"))?.0
    } else {
        arma.residuals.clone()
    };
    let stable = estimate_sas_params(&residuals).map_err(fail("stable fit of the residuals failed"))?;
    report.residual_stable = Some(stable);
    let p =
        ks_pvalue_battery(&residuals, &stable, a.trials, seed.child(KS_STREAM)).map_err(fail("KS battery failed"))?;
    let ncv = residual_autocovariation(&residuals, FIT_NCV_LAGS.min(residuals.len() - 1))
        .map_err(fail("residual autocovariation failed"))?;
    report.diagnostics = Some(FitDiagnostics { ncv, ks: PValueSummary::of(&p) });
    Ok(())
}

fn read_mc_config(path: &Path) -> CliResult<McConfig> {
    let text = fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn mc(a: &McArgs) -> CliResult<Run> {
    let mut run = Run::new(manifest_in(&a.out));
    let config = match &a.config {
        Some(path) => {
            let flags_given = a.model.any_set()
                || a.reps.is_some()
                || a.estimators.is_some()
                || a.ar_order.is_some()
                || a.mecf_start.is_some();
            if flags_given {
                return Err(CliError::input("--config excludes the model and estimator flags"));
            }
            run.inputs.push(path.clone());
            read_mc_config(path)?
        }
        None => {
            let mut c = a.model.config(a.reps.unwrap_or(200))?;
            c.estimators = a.estimators.clone().unwrap_or_default();
            c.ar_order = a.ar_order;
            c.mecf_start = a.mecf_start.unwrap_or_default();
            c
        }
    };
    config.validate().map_err(|e| CliError::input(format!("invalid config: {e}")))?;
    let workers = worker_count()?;
    let report = run_mc_parallel(&config, workers).map_err(CliError::numerical)?;
    fs::create_dir_all(&a.out)?;
    let formats: Vec<ReportFormat> =
        ReportFormat::ALL.into_iter().filter(|f| a.format.is_empty() || a.format.contains(f)).collect();
    for f in formats {
        let path = a.out.join(format!("report.{}", f.extension()));
        fs::write(&path, render_report(&report, f))?;
        run.outputs.push(path);
    }
    print!("{}", render_report(&report, ReportFormat::Markdown));
    run.seeds.push(config.master_seed.0);
    run.config = Some(serde_json::to_value(&config)?);
    run.workers = Some(workers);
    if report.failed {
        run.status = Err(CliError::numerical("more than 5% of the replications of some estimator failed"));
    }
    Ok(run)
}

fn with_dates(dates: Option<&Vec<String>>, t: usize, mut row: Vec<String>) -> Vec<String> {
    if let Some(d) = dates {
        row.insert(0, d[t].clone());
    }
    row
}

fn diagnose(a: &DiagnoseArgs) -> CliResult<Run> {
    if !a.fit.is_file() {
        return Err(CliError::input(format!("fit report {} not found", a.fit.display())));
    }
    let fit: FitReport = read_json(&a.fit)?;
    if fit.schema_version != FIT_SCHEMA_VERSION {
        return Err(CliError::input(format!("unsupported fit schema version {}", fit.schema_version)));
    }
    let arma = fit.arma.as_ref().ok_or_else(|| CliError::input("fit report has no ARMA estimate"))?;
    let series: InputSeries = read_series(&a.input)?;
    let x = &series.values;
    let n = x.len();
    if n != fit.input.n {
        return Err(CliError::input(format!("series has {n} values but the fit used {}", fit.input.n)));
    }
    if a.trials == 0 {
        return Err(CliError::input("--trials must be at least 1"));
    }
    if a.max_lag == 0 || a.max_lag >= n {
        return Err(CliError::input(format!("--max-lag must be in 1..{n}")));
    }
    let num = CliError::numerical;
    let residuals = arma_innovations(x, &arma.phi, &arma.theta);
    let (standardized, volatility) = match &fit.garch {
        Some(g) => g.standardize(&residuals).map_err(num)?,
        None => (residuals.clone(), vec![1.0; n]),
    };
    let stable = estimate_sas_params(&standardized).map_err(num)?;
    let seed = RngSeed(a.seed);
    let p = ks_pvalue_battery(&standardized, &stable, a.trials, seed.child(KS_STREAM)).map_err(num)?;
    let qq = qq_data(&standardized, &stable, seed.child(QQ_STREAM)).map_err(num)?;
    let ncv = residual_autocovariation(&standardized, a.max_lag).map_err(num)?;
    let band = 2.0 / (n as f64).sqrt();

    fs::create_dir_all(&a.out)?;
    let dates = series.dates.as_ref();
    let dated = |cols: &[&'static str]| -> Vec<&'static str> {
        dates.map(|_| "date").into_iter().chain(cols.iter().copied()).collect()
    };
    let mut run = Run::new(manifest_in(&a.out));
    let mut emit = |name: &str| {
        let path = a.out.join(name);
        run.outputs.push(path.clone());
        path
    };
    write_table(
        &emit("residuals.csv"),
        &dated(&["t", "residual"]),
        residuals.iter().enumerate().map(|(t, e)| with_dates(dates, t, vec![t.to_string(), fmt_f64(*e)])),
    )?;
    write_table(
        &emit("standardized_residuals.csv"),
        &dated(&["t", "standardized", "volatility"]),
        standardized
            .iter()
            .zip(&volatility)
            .enumerate()
            .map(|(t, (e, s))| with_dates(dates, t, vec![t.to_string(), fmt_f64(*e), fmt_f64(*s)])),
    )?;
    write_table(
        &emit("autocovariation.csv"),
        &["lag", "ncv", "band_lower", "band_upper"],
        ncv.iter().enumerate().map(|(k, v)| vec![(k + 1).to_string(), fmt_f64(*v), fmt_f64(-band), fmt_f64(band)]),
    )?;
    write_table(&emit("qq.csv"), &["empirical", "reference"], qq.iter().map(|(e, r)| vec![fmt_f64(*e), fmt_f64(*r)]))?;
    write_table(
        &emit("ks_pvalues.csv"),
        &["trial", "p_value"],
        p.iter().enumerate().map(|(t, v)| vec![t.to_string(), fmt_f64(*v)]),
    )?;
    let summary = DiagnoseSummary {
        schema_version: FIT_SCHEMA_VERSION,
        n,
        seed: a.seed,
        stable,
        ks: PValueSummary::of(&p),
        max_abs_ncv: ncv.iter().fold(0.0, |m, v| m.max(v.abs())),
        ncv_band: band,
    };
    write_json(&emit("summary.json"), &summary)?;
    println!(
        "KS battery: median p = {:.4} over {} trials; stable fit alpha = {:.4}; wrote {}",
        summary.ks.median,
        a.trials,
        stable.alpha,
        a.out.display()
    );
    run.inputs.extend([a.input.clone(), a.fit.clone()]);
    run.seeds.push(a.seed);
    Ok(run)
}
