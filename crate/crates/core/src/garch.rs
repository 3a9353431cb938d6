//! MECF estimation of SαS-GARCH(1,1) and the ARMA-GARCH pipeline.
//!
//! The volatility filter is `σ′ⱼ = c + a₁|X_{j−1}| + b₁σ′_{j−1}` with
//! `σ′₋₁ = c/(1 − b₁)` and no ARCH input at j = 0, so the first value is the
//! same fixed point. Standardized residuals are `ε̂ⱼ = Xⱼ/σ′ⱼ`.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // needed when std is absent from the crate graph
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::arma::{fit_mhr, ArmaEstimate};
use crate::models::{simulate_sas_garch, GarchSpec};
use crate::optim::{minimize_box, BoxOptions};
use crate::stable::{clamp_alpha_for_arma, draw_standard_sas, estimate_sas_params, lambda_abs_moment};
use crate::{Error, Result, RngSeed};

/// Shortest series accepted by [`fit_garch_mecf`].
pub const MIN_GARCH_LEN: usize = 200;

/// Start used by the data pipeline: (c, a₁, b₁) = (0.001, 0.1, 0.8).
pub const PIPELINE_INIT: [f64; 3] = [0.001, 0.1, 0.8];

/// Below this â₁ the volatility is treated as constant and b₁ as
/// unidentified.
pub const A1_IDENTIFICATION_FLOOR: f64 = 1e-3;

/// Relative slack within which the constant-volatility fit is preferred
/// over a GARCH fit with negligible â₁.
const PARSIMONY_SLACK: f64 = 1e-3;

/// Box for (c, a₁, b₁).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GarchBounds {
    pub lower: [f64; 3],
    pub upper: [f64; 3],
}

impl Default for GarchBounds {
    fn default() -> Self {
        GarchBounds { lower: [1e-6, 0.0, 0.0], upper: [1e3, 5.0, 0.999] }
    }
}

impl GarchBounds {
    pub fn contains(&self, p: &[f64; 3]) -> bool {
        (0..3).all(|i| p[i] >= self.lower[i] && p[i] <= self.upper[i])
    }

    fn validate(&self) -> Result<()> {
        let ok = (0..3).all(|i| self.lower[i] <= self.upper[i])
            && self.lower[0] > 0.0
            && self.lower[1] >= 0.0
            && self.lower[2] >= 0.0
            && self.upper[2] < 1.0
            && self.upper.iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput("GARCH bounds must satisfy 0 < c, 0 ≤ a₁, 0 ≤ b₁ < 1".into()))
        }
    }
}

/// How the empirical cosine average is formed from the residuals ε̂ and the
/// reference draws Y.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EcfMode {
    /// `Σⱼ |exp(−|ε̂ⱼ|^α̂) − (1/n)Σₖ cos(ε̂ⱼYₖ)|`: empirical cf of Y at each ε̂ⱼ.
    PointwiseReference,
    /// `Σⱼ |exp(−|ε̂ⱼ|^α̂) − (1/n)Σₖ cos(ε̂ₖYₖ)|`: one scalar paired average.
    Paired,
    /// `Σⱼ |exp(−|Yⱼ|^α̂) − (1/n)Σₖ cos(Yⱼε̂ₖ)|`: empirical cf of the residuals
    /// compared with the SαS(α̂) cf at the reference draws.
    #[default]
    ResidualEcf,
}

/// Reference sample and α̂ held fixed while the objective is minimized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MecfContext {
    reference: Vec<f64>,
    /// `exp(−|Yⱼ|^α̂)`, cached for [`EcfMode::ResidualEcf`].
    reference_cf: Vec<f64>,
    reference_max: f64,
    pub alpha_hat: f64,
    pub seed: RngSeed,
    pub mode: EcfMode,
}

impl MecfContext {
    /// Draws Y₁..Yₙ iid SαS(α̂, 1) from `seed`.
    pub fn new(n: usize, alpha_hat: f64, seed: RngSeed, mode: EcfMode) -> Result<Self> {
        if !(alpha_hat > 0.0 && alpha_hat <= 2.0) {
            return Err(Error::domain("alpha_hat", alpha_hat));
        }
        if n == 0 {
            return Err(Error::InvalidInput("reference sample must be nonempty".into()));
        }
        let mut rng = seed.stream();
        let reference: Vec<f64> = (0..n).map(|_| draw_standard_sas(&mut rng, alpha_hat)).collect();
        Ok(Self::assemble(reference, alpha_hat, seed, mode))
    }

    /// Uses a caller-supplied reference sample.
    pub fn from_reference(reference: Vec<f64>, alpha_hat: f64, mode: EcfMode) -> Result<Self> {
        if !(alpha_hat > 0.0 && alpha_hat <= 2.0) {
            return Err(Error::domain("alpha_hat", alpha_hat));
        }
        if reference.is_empty() {
            return Err(Error::InvalidInput("reference sample must be nonempty".into()));
        }
        crate::ensure_finite(&reference, "reference sample")?;
        Ok(Self::assemble(reference, alpha_hat, RngSeed(0), mode))
    }

    fn assemble(reference: Vec<f64>, alpha_hat: f64, seed: RngSeed, mode: EcfMode) -> Self {
        let reference_cf = reference.iter().map(|y| (-y.abs().powf(alpha_hat)).exp()).collect();
        let reference_max = crate::trig::max_abs(&reference);
        MecfContext { reference, reference_cf, reference_max, alpha_hat, seed, mode }
    }

    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    /// Objective on already standardized residuals.
    pub fn discrepancy(&self, eps: &[f64]) -> f64 {
        let alpha = self.alpha_hat;
        match self.mode {
            EcfMode::PointwiseReference => {
                let m = self.reference.len() as f64;
                let y_max = self.reference_max;
                eps.iter()
                    .map(|&e| {
                        let emp = crate::trig::sum_cos_scaled(e, &self.reference, y_max) / m;
                        ((-e.abs().powf(alpha)).exp() - emp).abs()
                    })
                    .sum()
            }
            EcfMode::Paired => {
                let m = eps.len().min(self.reference.len());
                let emp: f64 =
                    eps.iter().zip(&self.reference).map(|(e, y)| crate::trig::cos(e * y)).sum::<f64>() / m as f64;
                eps.iter().map(|&e| ((-e.abs().powf(alpha)).exp() - emp).abs()).sum()
            }
            EcfMode::ResidualEcf => {
                let n = eps.len() as f64;
                let e_max = crate::trig::max_abs(eps);
                self.reference
                    .iter()
                    .zip(&self.reference_cf)
                    .map(|(&y, &cf)| {
                        let emp = crate::trig::sum_cos_scaled(y, eps, e_max) / n;
                        (cf - emp).abs()
                    })
                    .sum()
            }
        }
    }
}

fn check_params(c: f64, a1: f64, b1: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::domain("c", c));
    }
    if !(a1 >= 0.0 && a1.is_finite()) {
        return Err(Error::domain("a1", a1));
    }
    if !(0.0..1.0).contains(&b1) {
        return Err(Error::domain("b1", b1));
    }
    Ok(())
}

fn filter_into(x: &[f64], c: f64, a1: f64, b1: f64, eps: &mut [f64], sigma: Option<&mut [f64]>) {
    let mut s = c / (1.0 - b1);
    let mut prev = 0.0f64;
    let mut sigma = sigma;
    for (j, &xj) in x.iter().enumerate() {
        s = c + a1 * prev.abs() + b1 * s;
        eps[j] = xj / s;
        if let Some(path) = sigma.as_deref_mut() {
            path[j] = s;
        }
        prev = xj;
    }
}

/// Standardized residuals ε̂ and the volatility path σ′ (every σ′ⱼ ≥ c).
pub fn garch_residual_recursion(x: &[f64], c: f64, a1: f64, b1: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_params(c, a1, b1)?;
    let mut eps = vec![0.0; x.len()];
    let mut sigma = vec![0.0; x.len()];
    filter_into(x, c, a1, b1, &mut eps, Some(&mut sigma));
    Ok((eps, sigma))
}

/// MECF objective `f(c, a₁, b₁)`; always ≥ 0. A non-finite value (parameter
/// blow-up) is an error.
pub fn mecf_objective(x: &[f64], c: f64, a1: f64, b1: f64, ctx: &MecfContext) -> Result<f64> {
    check_params(c, a1, b1)?;
    crate::ensure_finite(x, "series")?;
    let mut eps = vec![0.0; x.len()];
    filter_into(x, c, a1, b1, &mut eps, None);
    let f = ctx.discrepancy(&eps);
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::NonFinite("MECF objective"))
    }
}

/// Which starting points [`fit_garch_mecf`] uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MecfStarts {
    /// The given init, a method-of-moments start, a seeded perturbation of
    /// the init and a constant-volatility start; the lowest objective wins.
    #[default]
    Multi,
    /// Only the given init.
    InitOnly,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MecfOptions {
    pub mode: EcfMode,
    pub starts: MecfStarts,
    pub bounds: GarchBounds,
    #[serde(skip, default)]
    pub optimizer: BoxOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GarchEstimate {
    pub c_hat: f64,
    pub a1_hat: f64,
    pub b1_hat: f64,
    pub alpha_hat: f64,
    pub objective_value: f64,
    pub converged: bool,
    pub std_errors: Option<[f64; 3]>,
    /// False when â₁ is negligible: c and b₁ then only enter through
    /// c/(1 − b₁) and the fit is reported in constant-volatility form.
    pub b1_identified: bool,
    pub mode: EcfMode,
}

impl GarchEstimate {
    pub fn params(&self) -> [f64; 3] {
        [self.c_hat, self.a1_hat, self.b1_hat]
    }

    pub fn spec(&self) -> Result<GarchSpec> {
        GarchSpec::garch11(self.c_hat, self.a1_hat, self.b1_hat)
    }

    /// σ′-filtered residuals of `x` at the fitted parameters.
    pub fn standardize(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        garch_residual_recursion(x, self.c_hat, self.a1_hat, self.b1_hat)
    }
}

/// Method-of-moments-style start: b₁ = 0.8, a₁ = 0.05 and c matching
/// `E|X| = λ c / (1 − b₁ − λ a₁)`.
pub fn moment_start(x: &[f64], alpha_hat: f64) -> [f64; 3] {
    let (b0, a0) = (0.8, 0.05);
    let lambda = lambda_abs_moment(clamp_alpha_for_arma(alpha_hat).0).unwrap_or(1.0);
    let mean_abs = x.iter().map(|v| v.abs()).sum::<f64>() / x.len().max(1) as f64;
    let denom = (1.0 - b0 - lambda * a0).max(0.05);
    [mean_abs * denom / lambda, a0, b0]
}

fn clamp_into(p: [f64; 3], bounds: &GarchBounds) -> [f64; 3] {
    core::array::from_fn(|i| p[i].clamp(bounds.lower[i], bounds.upper[i]))
}

fn perturbed_start(init: [f64; 3], bounds: &GarchBounds, seed: RngSeed) -> [f64; 3] {
    let mut rng = seed.stream();
    let mut p = init;
    p[0] *= (0.5 * rng.normal()).exp();
    p[1] = (p[1] + 0.05 * rng.normal()).abs();
    p[2] += 0.1 * rng.normal();
    clamp_into(p, bounds)
}

struct Objective<'a> {
    x: &'a [f64],
    ctx: &'a MecfContext,
    eps: Vec<f64>,
}

impl Objective<'_> {
    fn eval(&mut self, p: &[f64]) -> f64 {
        let (c, a1, b1) = (p[0], p[1], p[2]);
        if !(c > 0.0 && a1 >= 0.0 && (0.0..1.0).contains(&b1)) {
            return f64::INFINITY;
        }
        filter_into(self.x, c, a1, b1, &mut self.eps, None);
        let f = self.ctx.discrepancy(&self.eps);
        if f.is_finite() {
            f
        } else {
            f64::INFINITY
        }
    }
}

/// MECF fit of GARCH(1,1) to `x` with α̂ held fixed. The returned point lies
/// in `bounds` and its objective is no larger than at `init`.
pub fn fit_garch_mecf(
    x: &[f64],
    alpha_hat: f64,
    init: [f64; 3],
    seed: RngSeed,
    options: &MecfOptions,
) -> Result<GarchEstimate> {
    if x.len() < MIN_GARCH_LEN {
        return Err(Error::InvalidInput(alloc::format!(
            "GARCH fit needs at least {MIN_GARCH_LEN} values, got {}",
            x.len()
        )));
    }
    crate::ensure_finite(x, "series")?;
    let bounds = &options.bounds;
    bounds.validate()?;
    if !bounds.contains(&init) {
        return Err(Error::InvalidInput(alloc::format!("GARCH init {init:?} outside bounds")));
    }
    let ctx = MecfContext::new(x.len(), alpha_hat, seed, options.mode)?;
    let mut obj = Objective { x, ctx: &ctx, eps: vec![0.0; x.len()] };

    let mut starts = vec![init];
    if options.starts == MecfStarts::Multi {
        starts.push(clamp_into(moment_start(x, alpha_hat), bounds));
        starts.push(perturbed_start(init, bounds, seed.child(1)));
        // The nested constant-volatility model, so the fit is never worse
        // than a₁ = b₁ = 0 at the best level.
        let mean_abs = x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64;
        starts.push(clamp_into([mean_abs, 0.0, 0.0], bounds));
    }

    let mut best: Option<([f64; 3], f64, bool)> = None;
    let mut best_any = ([f64::NAN; 3], f64::INFINITY);
    for start in starts {
        let m = minimize_box(|p| obj.eval(p), &start, &bounds.lower, &bounds.upper, &options.optimizer);
        let p = [m.x[0], m.x[1], m.x[2]];
        if m.value < best_any.1 || best_any.0[0].is_nan() {
            best_any = (p, m.value);
        }
        if m.value.is_finite() && best.is_none_or(|(_, v, _)| m.value < v) {
            best = Some((p, m.value, m.converged));
        }
    }
    let Some((mut p, mut value, converged)) = best else {
        return Err(Error::AllStartsFailed { best: best_any.0, best_value: best_any.1 });
    };

    // With â₁ negligible, c and b₁ are only identified through c/(1 − b₁).
    // Prefer the nested constant-volatility fit when it is essentially as good.
    let mut b1_identified = p[1] >= A1_IDENTIFICATION_FLOOR;
    if !b1_identified {
        let level = (p[0] / (1.0 - p[2])).clamp(bounds.lower[0], bounds.upper[0]);
        let fixed_lower = [bounds.lower[0], bounds.lower[1], bounds.lower[2]];
        let fixed_upper = [bounds.upper[0], bounds.lower[1], bounds.lower[2]];
        let m = minimize_box(
            |q| obj.eval(q),
            &[level, bounds.lower[1], bounds.lower[2]],
            &fixed_lower,
            &fixed_upper,
            &options.optimizer,
        );
        if m.value.is_finite() && m.value <= value * (1.0 + PARSIMONY_SLACK) {
            let init_value = obj.eval(&init);
            if m.value <= init_value {
                p = [m.x[0], m.x[1], m.x[2]];
                value = m.value;
            }
        }
        b1_identified = false;
    }

    Ok(GarchEstimate {
        c_hat: p[0],
        a1_hat: p[1],
        b1_hat: p[2],
        alpha_hat,
        objective_value: value,
        converged,
        std_errors: None,
        b1_identified,
        mode: options.mode,
    })
}

/// α̂ of `eps` clamped to [1.01, 2].
fn alpha_of(eps: &[f64]) -> Result<f64> {
    Ok(clamp_alpha_for_arma(estimate_sas_params(eps)?.alpha).0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub ar_order: Option<usize>,
    pub init: [f64; 3],
    pub mecf: MecfOptions,
    /// Re-estimate α̂ from the fitted standardized residuals and refit once.
    pub reestimate_alpha: bool,
    pub seed: RngSeed,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            ar_order: None,
            init: PIPELINE_INIT,
            mecf: MecfOptions::default(),
            reestimate_alpha: true,
            seed: RngSeed(0),
        }
    }
}

/// MHR fit of ARMA(p_A, q_A), then MECF on the MHR innovations with α̂ from
/// the standardized residuals at the initial parameters.
pub fn fit_arma_garch(
    x: &[f64],
    p: usize,
    q: usize,
    options: &PipelineOptions,
) -> Result<(ArmaEstimate, GarchEstimate)> {
    if x.is_empty() {
        return Err(Error::InvalidInput("empty series".into()));
    }
    let arma = fit_mhr(x, p, q, options.ar_order)?;
    let resid = &arma.residuals;
    let [c0, a0, b0] = options.init;
    let (eps0, _) = garch_residual_recursion(resid, c0, a0, b0)?;
    let alpha0 = alpha_of(&eps0)?;
    let mut garch = fit_garch_mecf(resid, alpha0, options.init, options.seed, &options.mecf)?;
    if options.reestimate_alpha {
        let (eps1, _) = garch.standardize(resid)?;
        let alpha1 = alpha_of(&eps1)?;
        let refine = MecfOptions { starts: MecfStarts::InitOnly, ..options.mecf };
        let refit = fit_garch_mecf(resid, alpha1, garch.params(), options.seed, &refine)?;
        garch = GarchEstimate { b1_identified: refit.b1_identified && garch.b1_identified, ..refit };
    }
    Ok((arma, garch))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSe {
    pub std_errors: [f64; 3],
    pub t_values: [f64; 3],
    pub replicates: usize,
    pub failures: usize,
}

/// Parametric-bootstrap standard errors: `b` series of the same length are
/// simulated from the fitted SαS-GARCH(1,1), each refitted from the fitted
/// point with α̂ taken from its simulated noise, and the per-parameter
/// standard deviations reported.
pub fn garch_standard_errors(
    n: usize,
    est: &GarchEstimate,
    b: usize,
    seed: RngSeed,
    options: &MecfOptions,
) -> Result<BootstrapSe> {
    if !est.converged {
        return Err(Error::InvalidInput("standard errors need a converged fit".into()));
    }
    if b < 2 {
        return Err(Error::InvalidInput("bootstrap needs at least 2 replicates".into()));
    }
    let spec = est.spec()?;
    let refit = MecfOptions { starts: MecfStarts::InitOnly, ..*options };
    let mut draws: Vec<[f64; 3]> = Vec::with_capacity(b);
    let mut failures = 0;
    for r in 0..b {
        let child = seed.child(r as u64);
        let fit = simulate_sas_garch(&spec, est.alpha_hat, n, crate::models::DEFAULT_BURNIN, child).and_then(|s| {
            let alpha = s.noise.as_deref().map(alpha_of).unwrap_or(Ok(est.alpha_hat))?;
            fit_garch_mecf(s.values(), alpha, clamp_into(est.params(), &options.bounds), child.child(1), &refit)
        });
        match fit {
            Ok(g) => draws.push(g.params()),
            Err(_) => failures += 1,
        }
    }
    if draws.len() < 2 {
        return Err(Error::Degenerate("fewer than two bootstrap refits succeeded"));
    }
    let k = draws.len() as f64;
    let mut se = [0.0; 3];
    for (i, s) in se.iter_mut().enumerate() {
        let mean = draws.iter().map(|d| d[i]).sum::<f64>() / k;
        *s = (draws.iter().map(|d| (d[i] - mean) * (d[i] - mean)).sum::<f64>() / (k - 1.0)).sqrt();
    }
    let est_p = est.params();
    let t_values = core::array::from_fn(|i| if se[i] > 0.0 { est_p[i] / se[i] } else { f64::INFINITY });
    Ok(BootstrapSe { std_errors: se, t_values, replicates: draws.len(), failures })
}
