//! Residual diagnostics: log returns, two-sample Kolmogorov-Smirnov tests,
//! QQ pairs and residual autocovariation.

use alloc::vec::Vec;
#[allow(unused_imports)] // needed when std is absent from the crate graph
use num_traits::Float;

use serde::{Deserialize, Serialize};

use crate::arma::{arma_innovations, ArmaEstimate};
use crate::dependence::ncv;
use crate::garch::GarchEstimate;
use crate::stable::{sample_stable, StableParams};
use crate::{Error, Result, RngSeed, SeriesMeta, SeriesSample};

/// `rₜ = ln(pₜ / pₜ₋₁)`.
pub fn log_returns(prices: &[f64]) -> Result<SeriesSample> {
    if prices.len() < 2 {
        return Err(Error::InvalidInput("log returns need at least two prices".into()));
    }
    if let Some(&bad) = prices.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
        return Err(Error::domain("price", bad));
    }
    let r = prices.windows(2).map(|w| (w[1] / w[0]).ln()).collect();
    SeriesSample::with_meta(r, SeriesMeta { model: "log-returns".into(), ..SeriesMeta::default() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    s
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} exp(−2k²λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 0.2 {
        // The alternating series converges slowly here and Q is 1 to double
        // precision.
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample KS test: exact `D = sup |F₁ − F₂|` and the asymptotic p-value
/// `Q(√nₑ D)` with `nₑ = n₁n₂/(n₁ + n₂)`.
pub fn ks_two_sample(s1: &[f64], s2: &[f64]) -> Result<KsResult> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::InvalidInput("KS test needs two nonempty samples".into()));
    }
    if s1.iter().chain(s2).any(|v| v.is_nan()) {
        return Err(Error::NonFinite("KS sample"));
    }
    let (a, b) = (sorted(s1), sorted(s2));
    let (n1, n2) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n1 && j < n2 {
        let v = if a[i] <= b[j] { a[i] } else { b[j] };
        while i < n1 && a[i] == v {
            i += 1;
        }
        while j < n2 && b[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    // Past the end of one sample the other CDF only moves towards it.
    if i < n1 || j < n2 {
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 + n2) as f64;
    Ok(KsResult { statistic: d, p_value: kolmogorov_sf(ne.sqrt() * d), n1, n2 })
}

/// p-values of `trials` KS tests of `residuals` against fresh same-length
/// samples from `fitted`; trial t uses `seed.child(t)`.
pub fn ks_pvalue_battery(residuals: &[f64], fitted: &StableParams, trials: usize, seed: RngSeed) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::InvalidInput("battery needs at least one trial".into()));
    }
    (0..trials)
        .map(|t| {
            let reference = sample_stable(residuals.len(), fitted, seed.child(t as u64))?;
            Ok(ks_two_sample(residuals, &reference)?.p_value)
        })
        .collect()
}

/// `ncv(residuals, k)` for k = 1..=max_lag.
pub fn residual_autocovariation(residuals: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= residuals.len() {
        return Err(Error::InvalidInput(alloc::format!(
            "max lag {max_lag} must be below the series length {}",
            residuals.len()
        )));
    }
    (1..=max_lag).map(|k| ncv(residuals, k as isize)).collect()
}

/// Sorted residuals paired with the same-rank order statistics of a seeded
/// reference sample from `fitted`.
pub fn qq_data(residuals: &[f64], fitted: &StableParams, seed: RngSeed) -> Result<Vec<(f64, f64)>> {
    if residuals.len() < 10 {
        return Err(Error::InvalidInput("QQ data needs at least 10 residuals".into()));
    }
    let reference = sorted(&sample_stable(residuals.len(), fitted, seed)?);
    Ok(sorted(residuals).into_iter().zip(reference).collect())
}

/// `ε̂ₜ = êₜ / σ̂′ₜ`: ARMA innovations of `x` filtered by the fitted volatility.
pub fn standardized_residuals(x: &[f64], arma: &ArmaEstimate, garch: &GarchEstimate) -> Result<Vec<f64>> {
    let e = arma_innovations(x, &arma.phi, &arma.theta);
    crate::ensure_finite(&e, "ARMA innovations")?;
    Ok(garch.standardize(&e)?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::sample_sas;

    #[test]
    fn log_return_examples() {
        let r = log_returns(&[1.0, core::f64::consts::E]).unwrap();
        assert!((r.values()[0] - 1.0).abs() < 1e-15);
        let r = log_returns(&[100.0, 110.0, 99.0]).unwrap();
        assert_eq!(r.values(), &[(1.1f64).ln(), (0.9f64).ln()]);
        assert!(log_returns(&[3.0; 5]).unwrap().values().iter().all(|v| *v == 0.0));
        assert!(log_returns(&[1.0, 0.0]).is_err());
        assert!(log_returns(&[1.0]).is_err());
    }

    #[test]
    fn ks_trivial_cases() {
        let s = [0.3, -1.0, 2.0, 2.0];
        let r = ks_two_sample(&s, &s).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        assert_eq!(ks_two_sample(&[0.0, 1.0], &[10.0, 11.0]).unwrap().statistic, 1.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn kolmogorov_reference_values() {
        // Q(1.36) ≈ 0.0495 and Q(1.63) ≈ 0.0098 are the usual 5% / 1% points.
        assert!((kolmogorov_sf(1.358_099) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(1.627_624) - 0.01).abs() < 1e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(5.0) < 1e-20);
    }

    #[test]
    fn ks_null_rejection_rate() {
        let mut accepted = 0;
        for t in 0..100 {
            let a = sample_sas(500, 1.7, 1.0, RngSeed(40_000 + 2 * t)).unwrap();
            let b = sample_sas(500, 1.7, 1.0, RngSeed(40_001 + 2 * t)).unwrap();
            if ks_two_sample(a.values(), b.values()).unwrap().p_value > 0.05 {
                accepted += 1;
            }
        }
        assert!(accepted >= 90, "{accepted}/100");
    }

    #[test]
    fn autocovariation_contract() {
        assert!(residual_autocovariation(&[1.0, -2.0], 2).is_err());
        let v = residual_autocovariation(&[1.0, -2.0, 3.0], 1).unwrap();
        assert!((v[0] + 5.0 / 6.0).abs() < 1e-15);
    }
}
