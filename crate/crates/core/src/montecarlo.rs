//! Replication harness for the M1-M4 designs.
//!
//! Replication r simulates from `master_seed.child(r)` and fits every
//! requested estimator. Aggregation sorts outcomes by replication index, so
//! any execution order gives the same report.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // needed when std is absent from the crate graph
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::arma::{fit_arma_m, fit_mhr, ArmaEstimate, MLoss};
use crate::garch::{fit_garch_mecf, EcfMode, MecfOptions, MecfStarts, PIPELINE_INIT};
use crate::models::{
    check_garch_stationarity, simulate_arma_sas_garch_with, simulate_sas_arma, ArmaSpec, GarchSpec, StationarityStatus,
    VolatilityDriver, DEFAULT_BURNIN,
};
use crate::stable::estimate_sas_params;
use crate::{Error, Result, RngSeed, SeriesSample};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Share of failed replications above which a run is marked failed.
pub const MAX_FAILURE_RATE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    /// SαS-MA(1).
    M1,
    /// SαS-ARMA(1,1).
    M2,
    /// MA(1)-SαS-GARCH(1,1).
    M3,
    /// ARMA(1,1)-SαS-GARCH(1,1).
    M4,
}

impl Model {
    pub fn has_ar(self) -> bool {
        matches!(self, Model::M2 | Model::M4)
    }

    pub fn has_garch(self) -> bool {
        matches!(self, Model::M3 | Model::M4)
    }

    pub fn default_estimators(self) -> Vec<Estimator> {
        let mut v = vec![Estimator::Mhr, Estimator::Lad, Estimator::Ls];
        if self.has_garch() {
            v.push(Estimator::Mecf);
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Estimator {
    Mhr,
    Lad,
    Ls,
    Mecf,
}

impl Estimator {
    pub fn label(self) -> &'static str {
        match self {
            Estimator::Mhr => "MHR",
            Estimator::Lad => "LAD",
            Estimator::Ls => "LS",
            Estimator::Mecf => "MECF",
        }
    }
}

/// Where the MECF optimizer starts in a replication.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MecfStart {
    /// The generating (c, a₁, b₁), single start.
    #[default]
    Truth,
    /// The data pipeline's multi-start search from (0.001, 0.1, 0.8).
    Pipeline,
}

/// Generating coefficients; which fields are required depends on the model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct McTruth {
    pub theta: f64,
    #[serde(default)]
    pub phi: Option<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub a1: Option<f64>,
    #[serde(default)]
    pub b1: Option<f64>,
}

impl McTruth {
    fn garch(&self) -> Option<[f64; 3]> {
        Some([self.c?, self.a1?, self.b1?])
    }
}

fn default_burnin() -> usize {
    DEFAULT_BURNIN
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub model: Model,
    pub truth: McTruth,
    pub alpha: f64,
    pub n: usize,
    pub reps: usize,
    pub master_seed: RngSeed,
    #[serde(default = "default_burnin")]
    pub burnin: usize,
    /// Empty means the model's default set.
    #[serde(default)]
    pub estimators: Vec<Estimator>,
    #[serde(default)]
    pub ar_order: Option<usize>,
    #[serde(default)]
    pub mecf_start: MecfStart,
    #[serde(default)]
    pub driver: VolatilityDriver,
    #[serde(default)]
    pub ecf_mode: EcfMode,
}

impl McConfig {
    pub fn new(model: Model, truth: McTruth, alpha: f64, n: usize, reps: usize, master_seed: RngSeed) -> Self {
        McConfig {
            model,
            truth,
            alpha,
            n,
            reps,
            master_seed,
            burnin: DEFAULT_BURNIN,
            estimators: Vec::new(),
            ar_order: None,
            mecf_start: MecfStart::default(),
            driver: VolatilityDriver::default(),
            ecf_mode: EcfMode::default(),
        }
    }

    /// Requested estimators, sorted and deduplicated.
    pub fn estimator_set(&self) -> Vec<Estimator> {
        let mut v = if self.estimators.is_empty() { self.model.default_estimators() } else { self.estimators.clone() };
        v.sort();
        v.dedup();
        v
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidInput("reps must be at least 1".into()));
        }
        if self.n < 100 {
            return Err(Error::InvalidInput(alloc::format!("n must be at least 100, got {}", self.n)));
        }
        self.validate_model()?;
        if self.estimator_set().contains(&Estimator::Mecf) && !self.model.has_garch() {
            return Err(Error::InvalidInput("MECF needs a GARCH model".into()));
        }
        Ok(())
    }

    /// Checks the model, its coefficients and α, ignoring n, reps and the
    /// estimator set.
    pub fn validate_model(&self) -> Result<()> {
        if !(self.alpha > 1.0 && self.alpha <= 2.0) {
            return Err(Error::domain("alpha", self.alpha));
        }
        if !(self.truth.theta.abs() < 1.0) {
            return Err(Error::domain("theta", self.truth.theta));
        }
        match (self.model.has_ar(), self.truth.phi) {
            (true, Some(phi)) if phi.abs() < 1.0 => {}
            (true, Some(phi)) => return Err(Error::domain("phi", phi)),
            (true, None) => return Err(Error::InvalidInput("model needs phi".into())),
            (false, Some(_)) => return Err(Error::InvalidInput("phi given for a model without AR part".into())),
            (false, None) => {}
        }
        match (self.model.has_garch(), self.truth.garch()) {
            (true, Some([c, a1, b1])) => {
                let spec = GarchSpec::garch11(c, a1, b1)?;
                let check = check_garch_stationarity(&spec, self.alpha)?;
                if check.status != StationarityStatus::Stationary {
                    return Err(Error::NonStationary { margin: check.margin });
                }
            }
            (true, None) => return Err(Error::InvalidInput("model needs c, a1 and b1".into())),
            (false, Some(_)) => {
                return Err(Error::InvalidInput("GARCH coefficients given for a model without GARCH".into()))
            }
            (false, None) => {
                if self.truth.c.is_some() || self.truth.a1.is_some() || self.truth.b1.is_some() {
                    return Err(Error::InvalidInput("GARCH coefficients given for a model without GARCH".into()));
                }
            }
        }
        Ok(())
    }

    fn arma_spec(&self) -> Result<ArmaSpec> {
        ArmaSpec::new(self.truth.phi.into_iter().collect(), vec![self.truth.theta])
    }

    fn p(&self) -> usize {
        usize::from(self.model.has_ar())
    }

    /// (name, true value) of the parameters an estimator reports.
    pub fn parameters(&self, estimator: Estimator) -> Vec<(&'static str, f64)> {
        match estimator {
            Estimator::Mecf => {
                let [c, a1, b1] = self.truth.garch().unwrap_or([f64::NAN; 3]);
                vec![("c", c), ("a1", a1), ("b1", b1)]
            }
            _ => {
                let mut v = Vec::new();
                if let Some(phi) = self.truth.phi {
                    v.push(("phi1", phi));
                }
                v.push(("theta1", self.truth.theta));
                v
            }
        }
    }

    /// Label of the α̂ column: step-2 residuals for M1/M2, the simulated
    /// noise for M3/M4.
    pub fn alpha_source(&self) -> &'static str {
        if self.model.has_garch() {
            "alpha_noise"
        } else {
            "alpha_residuals"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOutcome {
    pub estimator: Estimator,
    /// Estimates in the order of [`McConfig::parameters`]; `None` on failure.
    pub values: Option<Vec<f64>>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: usize,
    pub seed: RngSeed,
    pub outcomes: Vec<EstimatorOutcome>,
    pub alpha_hat: Option<f64>,
}

/// One series of the configured model. Needs only the model fields, so it
/// works for lengths below the Monte Carlo minimum.
pub fn simulate_model(config: &McConfig, seed: RngSeed) -> Result<SeriesSample> {
    let arma = config.arma_spec()?;
    match config.truth.garch() {
        Some([c, a1, b1]) if config.model.has_garch() => {
            let garch = GarchSpec::garch11(c, a1, b1)?;
            simulate_arma_sas_garch_with(&arma, &garch, config.alpha, config.n, config.burnin, seed, config.driver)
        }
        _ => simulate_sas_arma(&arma, config.alpha, 1.0, config.n, config.burnin, seed),
    }
}

fn arma_values(est: &ArmaEstimate) -> Vec<f64> {
    est.phi.iter().chain(&est.theta).copied().collect()
}

fn outcome(estimator: Estimator, r: Result<Vec<f64>>) -> EstimatorOutcome {
    match r {
        Ok(values) => EstimatorOutcome { estimator, values: Some(values), error: None },
        Err(e) => EstimatorOutcome { estimator, values: None, error: Some(e.to_string()) },
    }
}

/// Simulates and fits replication `index`. Never fails: errors and
/// non-converged fits are recorded as failed outcomes.
pub fn run_replication(config: &McConfig, index: usize) -> Replication {
    let seed = config.master_seed.child(index as u64);
    let estimators = config.estimator_set();
    let series = match simulate_model(config, seed) {
        Ok(s) => s,
        Err(e) => {
            let msg = alloc::format!("simulation failed: {e}");
            return Replication {
                index,
                seed,
                outcomes: estimators
                    .iter()
                    .map(|&estimator| EstimatorOutcome { estimator, values: None, error: Some(msg.clone()) })
                    .collect(),
                alpha_hat: None,
            };
        }
    };
    let x = series.values();
    let (p, q) = (config.p(), 1);
    let mhr = fit_mhr(x, p, q, config.ar_order);

    let mut outcomes = Vec::with_capacity(estimators.len());
    for &estimator in &estimators {
        let r = match estimator {
            Estimator::Mhr => mhr.clone().map(|e| arma_values(&e)),
            Estimator::Lad | Estimator::Ls => {
                let loss = if estimator == Estimator::Lad { MLoss::Lad } else { MLoss::Ls };
                fit_arma_m(x, p, q, loss).and_then(|e| {
                    if e.flags.converged {
                        Ok(arma_values(&e))
                    } else {
                        Err(Error::Degenerate("M-estimator did not converge"))
                    }
                })
            }
            Estimator::Mecf => fit_mecf(config, &series, mhr.as_ref().map_err(Clone::clone), seed),
        };
        outcomes.push(outcome(estimator, r));
    }

    let alpha_hat = if config.model.has_garch() {
        series.noise.as_deref().and_then(|e| estimate_sas_params(e).ok()).map(|p| p.alpha)
    } else {
        mhr.as_ref().ok().and_then(|m| estimate_sas_params(&m.step2_residuals).ok()).map(|p| p.alpha)
    };
    Replication { index, seed, outcomes, alpha_hat }
}

fn fit_mecf(
    config: &McConfig,
    series: &SeriesSample,
    mhr: core::result::Result<&ArmaEstimate, Error>,
    seed: RngSeed,
) -> Result<Vec<f64>> {
    let mhr = mhr?;
    let noise = series.noise.as_deref().ok_or(Error::InvalidInput("simulated noise unavailable".into()))?;
    let alpha_hat = estimate_sas_params(noise)?.alpha.min(2.0);
    let truth = config.truth.garch().ok_or(Error::InvalidInput("model needs c, a1 and b1".into()))?;
    let (init, starts) = match config.mecf_start {
        MecfStart::Truth => (truth, MecfStarts::InitOnly),
        MecfStart::Pipeline => (PIPELINE_INIT, MecfStarts::Multi),
    };
    let options = MecfOptions { mode: config.ecf_mode, starts, ..MecfOptions::default() };
    let est = fit_garch_mecf(&mhr.residuals, alpha_hat, init, seed.child(7), &options)?;
    if !est.converged {
        return Err(Error::Degenerate("MECF optimizer did not converge"));
    }
    Ok(est.params().to_vec())
}

/// `sqrt(mean((v − truth)²))`.
pub fn rmse(values: &[f64], truth: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("RMSE of an empty vector".into()));
    }
    Ok((values.iter().map(|v| (v - truth) * (v - truth)).sum::<f64>() / values.len() as f64).sqrt())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSummary {
    /// Estimator label, or `alpha` for the α̂ row.
    pub estimator: String,
    pub parameter: String,
    pub truth: f64,
    pub mean: f64,
    pub rmse: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureCount {
    pub estimator: String,
    pub failed: usize,
    pub attempted: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub schema_version: u32,
    pub config: McConfig,
    pub rows: Vec<ParamSummary>,
    pub failures: Vec<FailureCount>,
    /// More than [`MAX_FAILURE_RATE`] of the replications of some estimator
    /// failed.
    pub failed: bool,
}

impl McReport {
    pub fn row(&self, estimator: &str, parameter: &str) -> Option<&ParamSummary> {
        self.rows.iter().find(|r| r.estimator == estimator && r.parameter == parameter)
    }
}

/// Mean and RMSE per estimator and parameter over the successful
/// replications, plus failure counts.
pub fn aggregate(config: &McConfig, replications: &[Replication]) -> McReport {
    let mut reps: Vec<&Replication> = replications.iter().collect();
    reps.sort_by_key(|r| r.index);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut failed = false;
    for estimator in config.estimator_set() {
        let params = config.parameters(estimator);
        let values: Vec<&Vec<f64>> = reps
            .iter()
            .filter_map(|r| r.outcomes.iter().find(|o| o.estimator == estimator))
            .filter_map(|o| o.values.as_ref())
            .filter(|v| v.len() == params.len())
            .collect();
        let failed_count = reps.len() - values.len();
        failed |= failed_count as f64 > MAX_FAILURE_RATE * reps.len() as f64;
        failures.push(FailureCount {
            estimator: estimator.label().into(),
            failed: failed_count,
            attempted: reps.len(),
        });
        if values.is_empty() {
            continue;
        }
        for (i, (name, truth)) in params.iter().enumerate() {
            let column: Vec<f64> = values.iter().map(|v| v[i]).collect();
            rows.push(ParamSummary {
                estimator: estimator.label().into(),
                parameter: (*name).into(),
                truth: *truth,
                mean: mean(&column),
                rmse: rmse(&column, *truth).unwrap_or(f64::NAN),
                count: column.len(),
            });
        }
    }
    let alphas: Vec<f64> = reps.iter().filter_map(|r| r.alpha_hat).collect();
    if !alphas.is_empty() {
        rows.push(ParamSummary {
            estimator: "alpha".into(),
            parameter: config.alpha_source().into(),
            truth: config.alpha,
            mean: mean(&alphas),
            rmse: rmse(&alphas, config.alpha).unwrap_or(f64::NAN),
            count: alphas.len(),
        });
    }
    McReport { schema_version: REPORT_SCHEMA_VERSION, config: config.clone(), rows, failures, failed }
}

/// Serial Monte Carlo run.
pub fn run_mc(config: &McConfig) -> Result<McReport> {
    config.validate()?;
    let reps: Vec<Replication> = (0..config.reps).map(|r| run_replication(config, r)).collect();
    Ok(aggregate(config, &reps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rmse_examples() {
        assert_eq!(rmse(&[0.5, 0.5], 0.5).unwrap(), 0.0);
        assert!((rmse(&[0.0, 1.0], 0.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((rmse(&[0.3], 0.1).unwrap() - 0.2).abs() < 1e-15);
        assert!(rmse(&[], 0.0).is_err());
    }

    fn m1() -> McConfig {
        McConfig::new(Model::M1, McTruth { theta: 0.3, ..McTruth::default() }, 1.7, 300, 1, RngSeed(5))
    }

    #[test]
    fn validation() {
        assert!(m1().validate().is_ok());
        let mut c = m1();
        c.reps = 0;
        assert!(c.validate().is_err());
        let mut c = m1();
        c.n = 99;
        assert!(c.validate().is_err());
        let mut c = m1();
        c.truth.phi = Some(0.5);
        assert!(c.validate().is_err());
        let mut c = m1();
        c.model = Model::M3;
        assert!(c.validate().is_err());
        c.truth.c = Some(1.0);
        c.truth.a1 = Some(1.0);
        c.truth.b1 = Some(0.99);
        assert!(matches!(c.validate(), Err(Error::NonStationary { .. })));
        let mut c = m1();
        c.estimators = vec![Estimator::Mecf];
        assert!(c.validate().is_err());
    }

    #[test]
    fn single_replication_arithmetic() {
        let config = m1();
        let report = run_mc(&config).unwrap();
        let rep = run_replication(&config, 0);
        for o in &rep.outcomes {
            let v = o.values.as_ref().unwrap()[0];
            let row = report.row(o.estimator.label(), "theta1").unwrap();
            assert_eq!(row.mean, v);
            assert_eq!(row.rmse, (v - 0.3).abs());
            assert_eq!(row.count, 1);
        }
        assert!(!report.failed);
    }

    #[test]
    fn aggregation_ignores_order() {
        let mut config = m1();
        config.reps = 4;
        config.estimators = vec![Estimator::Mhr];
        let reps: Vec<Replication> = (0..4).map(|r| run_replication(&config, r)).collect();
        let reversed: Vec<Replication> = reps.iter().rev().cloned().collect();
        assert_eq!(aggregate(&config, &reps), aggregate(&config, &reversed));
        assert_eq!(aggregate(&config, &reps), run_mc(&config).unwrap());
    }

    #[test]
    fn failures_are_counted() {
        let config = McConfig { reps: 20, estimators: vec![Estimator::Mhr], ..m1() };
        let mut reps: Vec<Replication> = (0..20).map(|r| run_replication(&config, r)).collect();
        reps[3].outcomes[0] = EstimatorOutcome { estimator: Estimator::Mhr, values: None, error: Some("x".into()) };
        let report = aggregate(&config, &reps);
        assert_eq!(report.failures[0].failed, 1);
        assert_eq!(report.row("MHR", "theta1").unwrap().count, 19);
        assert!(!report.failed);
        reps[4].outcomes[0].values = None;
        assert!(aggregate(&config, &reps).failed);
    }
}
