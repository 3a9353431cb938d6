//! Symmetric α-stable primitives.
//!
//! Characteristic function of SαS(α, σ): `exp(−(σ|t|)^α)` (for α = 1 this is
//! `exp(−σ|t|)`, the same expression). σ = 1 and α = 2 is N(0, 2).

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
#[allow(unused_imports)] // needed when std is absent from the crate graph
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::quantile_table::{alpha_from_nu, upper_quartile};
use crate::{Error, Result, RngSeed, SeriesMeta, SeriesSample, StreamRng, TrueParams};

/// Index α, skewness β, scale σ and shift δ of a stable law (S1 form).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub delta: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, delta: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_sigma(sigma)?;
        if !(-1.0..=1.0).contains(&beta) {
            return Err(Error::domain("beta", beta));
        }
        if !delta.is_finite() {
            return Err(Error::domain("delta", delta));
        }
        Ok(StableParams { alpha, beta, sigma, delta })
    }

    /// SαS law: β = δ = 0.
    pub fn sas(alpha: f64, sigma: f64) -> Result<Self> {
        Self::new(alpha, 0.0, sigma, 0.0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.beta == 0.0 && self.delta == 0.0
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("sigma", sigma))
    }
}

/// Characteristic function of SαS(α, σ) at `t`.
pub fn cf_sas(t: f64, alpha: f64, sigma: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_sigma(sigma)?;
    Ok(cf_sas_unchecked(t, alpha, sigma))
}

#[inline]
pub(crate) fn cf_sas_unchecked(t: f64, alpha: f64, sigma: f64) -> f64 {
    if alpha == 1.0 {
        (-sigma * t.abs()).exp()
    } else {
        (-(sigma * t.abs()).powf(alpha)).exp()
    }
}

/// One standard SαS(α, 1) draw by the Chambers-Mallows-Stuck transform.
#[inline]
pub(crate) fn draw_standard_sas(rng: &mut StreamRng, alpha: f64) -> f64 {
    let v = PI * (rng.uniform_open() - 0.5);
    let w = rng.exp1();
    if alpha == 1.0 {
        return v.tan();
    }
    let cos_v = v.cos();
    (alpha * v).sin() / cos_v.powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// One draw from a general stable law (S1 form), CMS with skewness.
pub(crate) fn draw_stable(rng: &mut StreamRng, p: &StableParams) -> f64 {
    if p.beta == 0.0 {
        return p.sigma * draw_standard_sas(rng, p.alpha) + p.delta;
    }
    let v = PI * (rng.uniform_open() - 0.5);
    let w = rng.exp1();
    let (alpha, beta) = (p.alpha, p.beta);
    if alpha == 1.0 {
        let a = FRAC_PI_2 + beta * v;
        let x = (a * v.tan() - beta * (FRAC_PI_2 * w * v.cos() / a).ln()) / FRAC_PI_2;
        p.sigma * x + beta * p.sigma * p.sigma.ln() / FRAC_PI_2 + p.delta
    } else {
        let tan_pa = (FRAC_PI_2 * alpha).tan();
        let b = (beta * tan_pa).atan() / alpha;
        let s = (1.0 + beta * beta * tan_pa * tan_pa).powf(1.0 / (2.0 * alpha));
        let x = s * (alpha * (v + b)).sin() / v.cos().powf(1.0 / alpha)
            * ((v - alpha * (v + b)).cos() / w).powf((1.0 - alpha) / alpha);
        p.sigma * x + p.delta
    }
}

/// `n` iid SαS(α, σ) draws, deterministic in `seed`.
pub fn sample_sas(n: usize, alpha: f64, sigma: f64, seed: RngSeed) -> Result<SeriesSample> {
    check_alpha(alpha)?;
    check_sigma(sigma)?;
    if n == 0 {
        return Err(Error::InvalidInput("sample size must be at least 1".into()));
    }
    let mut rng = seed.stream();
    let values: Vec<f64> = (0..n).map(|_| sigma * draw_standard_sas(&mut rng, alpha)).collect();
    let meta = SeriesMeta {
        model: "iid-sas".into(),
        seed: Some(seed.0),
        burnin: 0,
        true_params: Some(TrueParams { alpha, sigma, ..TrueParams::default() }),
    };
    SeriesSample::with_meta(values, meta)
}

/// `n` iid draws from a general stable law; used for KS and QQ reference
/// samples from fitted (possibly slightly skewed) parameters.
pub fn sample_stable(n: usize, params: &StableParams, seed: RngSeed) -> Result<Vec<f64>> {
    StableParams::new(params.alpha, params.beta, params.sigma, params.delta)?;
    let mut rng = seed.stream();
    Ok((0..n).map(|_| draw_stable(&mut rng, params)).collect())
}

/// λ(α) = E|ε| for standard SαS noise: `2 Γ(1 − 1/α) / π`, α ∈ (1, 2].
pub fn lambda_abs_moment(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::domain("alpha", alpha));
    }
    Ok(2.0 * libm::tgamma(1.0 - 1.0 / alpha) / PI)
}

/// Lower bound applied to α̂ before it is handed to routines that need a
/// finite first moment.
pub const ALPHA_FLOOR_FOR_ARMA: f64 = 1.01;

/// Clamps α̂ into [1.01, 2]; the flag is set when clamping changed the value.
pub fn clamp_alpha_for_arma(alpha: f64) -> (f64, bool) {
    let clamped = alpha.clamp(ALPHA_FLOOR_FOR_ARMA, 2.0);
    (clamped, clamped != alpha)
}

/// Minimum sample length accepted by [`estimate_sas_params`].
pub const MIN_FIT_LEN: usize = 100;

const KW_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];

fn sample_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn ecf(z: &[f64], t: f64) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for &x in z {
        re += (t * x).cos();
        im += (t * x).sin();
    }
    let n = z.len() as f64;
    (re / n, im / n)
}

/// Least-squares slope and intercept of `y` on `x`.
fn simple_regression(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits (α, β, σ, δ) to a sample.
///
/// Quantile initialization (tail ratio ν for α, interquartile range for σ,
/// median for δ) followed by two passes of regression of
/// `ln(−ln|φ̂(t)|²)` on `ln t` over t ∈ {0.1, …, 1.0} for the standardized
/// data. β and δ come from a regression of `arg φ̂(t)` on `t` and
/// `tan(πα/2) t^α`; they stay near zero for symmetric data.
pub fn estimate_sas_params(sample: &[f64]) -> Result<StableParams> {
    if sample.len() < MIN_FIT_LEN {
        return Err(Error::InvalidInput(alloc::format!(
            "stable fit needs at least {MIN_FIT_LEN} values, got {}",
            sample.len()
        )));
    }
    crate::ensure_finite(sample, "stable fit input")?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let q = |p| sample_quantile(&sorted, p);
    let iqr = q(0.75) - q(0.25);
    if !(iqr > 0.0) {
        return Err(Error::Degenerate("sample has zero interquartile range"));
    }
    let mut alpha = alpha_from_nu((q(0.95) - q(0.05)) / iqr);
    let mut sigma = iqr / (2.0 * upper_quartile(alpha));
    let mut delta = q(0.5);

    let log_t: Vec<f64> = KW_GRID.iter().map(|t| t.ln()).collect();
    let mut z: Vec<f64> = sample.iter().map(|x| (x - delta) / sigma).collect();
    for _ in 0..2 {
        let mut xs = Vec::with_capacity(KW_GRID.len());
        let mut ys = Vec::with_capacity(KW_GRID.len());
        for (&t, &lt) in KW_GRID.iter().zip(&log_t) {
            let (re, im) = ecf(&z, t);
            let m2 = re * re + im * im;
            if m2 > 0.0 && m2 < 1.0 {
                xs.push(lt);
                ys.push((-m2.ln()).ln());
            }
        }
        if xs.len() < 3 {
            break;
        }
        let (slope, intercept) = simple_regression(&xs, &ys);
        if !slope.is_finite() || !intercept.is_finite() {
            break;
        }
        alpha = slope.clamp(0.1, 2.0);
        let scale = ((intercept - core::f64::consts::LN_2) / alpha).exp();
        sigma *= scale;
        for v in z.iter_mut() {
            *v /= scale;
        }
    }

    // Skewness and location from the phase of the ECF.
    let tan_pa = (FRAC_PI_2 * alpha).tan();
    let mut sum_tt = 0.0;
    let mut sum_tu = 0.0;
    let mut sum_uu = 0.0;
    let mut sum_tp = 0.0;
    let mut sum_up = 0.0;
    for &t in KW_GRID.iter() {
        let (re, im) = ecf(&z, t);
        let phase = im.atan2(re);
        let u = tan_pa * t.powf(alpha);
        sum_tt += t * t;
        sum_tu += t * u;
        sum_uu += u * u;
        sum_tp += t * phase;
        sum_up += u * phase;
    }
    let det = sum_tt * sum_uu - sum_tu * sum_tu;
    let identifiable = alpha < 1.99 && (alpha - 1.0).abs() > 0.02 && det.abs() > 1e-10 * sum_tt * sum_uu;
    let (shift, beta) = if identifiable {
        let shift = (sum_tp * sum_uu - sum_up * sum_tu) / det;
        let beta = (sum_tt * sum_up - sum_tu * sum_tp) / det;
        (shift, beta.clamp(-1.0, 1.0))
    } else {
        (sum_tp / sum_tt, 0.0)
    };
    delta += sigma * shift;

    if !(alpha.is_finite() && sigma.is_finite() && sigma > 0.0 && delta.is_finite()) {
        return Err(Error::NonFinite("stable fit estimates"));
    }
    Ok(StableParams { alpha, beta, sigma, delta })
}
