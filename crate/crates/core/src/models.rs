//! Simulators for SαS-ARMA, SαS-GARCH and ARMA-SαS-GARCH processes.
//!
//! Pre-sample values of X and e are zero and the volatility recursion starts
//! from σ′₀ = c / (1 − Σbⱼ). The first `burnin` generated values are dropped.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::stable::{draw_standard_sas, lambda_abs_moment};
use crate::{Error, Result, RngSeed, SeriesMeta, SeriesSample, TrueParams};

pub const DEFAULT_BURNIN: usize = 500;

/// AR coefficients φ₁..φₚ and MA coefficients θ₁..θ_q of
/// `X_t = Σφᵢ X_{t−i} + Σθⱼ e_{t−j} + e_t`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmaSpec {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
}

/// Whether φ(z) = 1 − φ₁z − … and θ(z) = 1 + θ₁z + … are free of zeros on
/// the closed unit disc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootCheck {
    pub causal: bool,
    pub invertible: bool,
}

impl ArmaSpec {
    pub fn new(phi: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        if !phi.iter().chain(&theta).all(|v| v.is_finite()) {
            return Err(Error::NonFinite("ARMA coefficients"));
        }
        Ok(ArmaSpec { phi, theta })
    }

    pub fn ma1(theta: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![theta])
    }

    pub fn arma11(phi: f64, theta: f64) -> Result<Self> {
        Self::new(vec![phi], vec![theta])
    }

    pub fn p(&self) -> usize {
        self.phi.len()
    }

    pub fn q(&self) -> usize {
        self.theta.len()
    }

    pub fn root_check(&self) -> RootCheck {
        let neg_theta: Vec<f64> = self.theta.iter().map(|t| -t).collect();
        RootCheck { causal: spectral_radius(&self.phi) < 1.0, invertible: spectral_radius(&neg_theta) < 1.0 }
    }
}

/// Largest root modulus of z^k − c₁z^{k−1} − … − c_k. The polynomial
/// 1 − c₁z − … − c_k z^k has no zeros in |z| ≤ 1 iff this is below 1.
pub(crate) fn spectral_radius(coeffs: &[f64]) -> f64 {
    let k = coeffs.len();
    if k == 0 {
        return 0.0;
    }
    let companion = DMatrix::from_fn(k, k, |i, j| {
        if i == 0 {
            coeffs[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion.complex_eigenvalues().iter().map(|z| libm::hypot(z.re, z.im)).fold(0.0, f64::max)
}

/// Intercept c and ARCH/GARCH coefficients of
/// `σ′_t = c + Σaᵢ|e_{t−i}| + Σbⱼσ′_{t−j}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GarchSpec {
    pub c: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl GarchSpec {
    pub fn new(c: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::domain("c", c));
        }
        if let Some(&bad) = a.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::domain("a", bad));
        }
        if let Some(&bad) = b.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::domain("b", bad));
        }
        Ok(GarchSpec { c, a, b })
    }

    pub fn garch11(c: f64, a1: f64, b1: f64) -> Result<Self> {
        Self::new(c, vec![a1], vec![b1])
    }

    /// σ′₀ = c / (1 − Σbⱼ), or c when Σbⱼ ≥ 1.
    pub fn initial_volatility(&self) -> f64 {
        let sb: f64 = self.b.iter().sum();
        if sb < 1.0 {
            self.c / (1.0 - sb)
        } else {
            self.c
        }
    }
}

/// Which absolute values feed the volatility recursion of an ARMA-GARCH
/// process: the innovations eₜ (the model definition) or the observations Xₜ
/// (the form written for the M3/M4 simulation designs).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VolatilityDriver {
    #[default]
    Innovation,
    Observation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationarityStatus {
    Stationary,
    NonStationary,
    /// λ(α) is infinite for α ≤ 1, so the condition cannot be evaluated.
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityCheck {
    pub status: StationarityStatus,
    /// 1 − (λΣaᵢ + Σbⱼ); NaN when undetermined.
    pub margin: f64,
}

impl StationarityCheck {
    pub fn is_stationary(&self) -> bool {
        self.status == StationarityStatus::Stationary
    }
}

/// Strict-stationarity condition of SαS-GARCH: `b₁ + λ(α)a₁ < 1` for
/// GARCH(1,1); `λΣaᵢ + Σbⱼ ≤ 1` with c > 0 when either order exceeds 1.
pub fn check_garch_stationarity(spec: &GarchSpec, alpha: f64) -> Result<StationarityCheck> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::domain("alpha", alpha));
    }
    GarchSpec::new(spec.c, spec.a.clone(), spec.b.clone())?;
    let sa: f64 = spec.a.iter().sum();
    let sb: f64 = spec.b.iter().sum();
    let lambda = if sa == 0.0 {
        0.0
    } else if alpha > 1.0 {
        lambda_abs_moment(alpha)?
    } else {
        return Ok(StationarityCheck { status: StationarityStatus::Undetermined, margin: f64::NAN });
    };
    let margin = 1.0 - (lambda * sa + sb);
    let higher_order = spec.a.len() >= 2 || spec.b.len() >= 2;
    let ok = if higher_order { margin >= 0.0 } else { margin > 0.0 };
    let status = if ok { StationarityStatus::Stationary } else { StationarityStatus::NonStationary };
    Ok(StationarityCheck { status, margin })
}

struct Paths {
    x: Vec<f64>,
    noise: Vec<f64>,
    innovations: Vec<f64>,
    volatility: Vec<f64>,
}

#[inline]
fn arma_step(phi: &[f64], theta: &[f64], x: &[f64], e: &[f64], t: usize, e_t: f64) -> f64 {
    let mut v = e_t;
    for (i, p) in phi.iter().enumerate() {
        if t > i {
            v += p * x[t - 1 - i];
        }
    }
    for (j, th) in theta.iter().enumerate() {
        if t > j {
            v += th * e[t - 1 - j];
        }
    }
    v
}

fn run_recursion(
    arma: &ArmaSpec,
    garch: Option<&GarchSpec>,
    alpha: f64,
    scale: f64,
    total: usize,
    seed: RngSeed,
    driver: VolatilityDriver,
) -> Paths {
    let mut rng = seed.stream();
    let mut x = vec![0.0f64; total];
    let mut e = vec![0.0f64; total];
    let mut noise = vec![0.0; total];
    let mut vol = vec![scale; total];
    let sigma0 = garch.map(GarchSpec::initial_volatility).unwrap_or(scale);
    for t in 0..total {
        let eps = draw_standard_sas(&mut rng, alpha);
        noise[t] = eps;
        let s = match garch {
            None => scale,
            Some(g) => {
                let driving = match driver {
                    VolatilityDriver::Innovation => &e,
                    VolatilityDriver::Observation => &x,
                };
                let mut s = g.c;
                for (i, a) in g.a.iter().enumerate() {
                    if t > i {
                        s += a * driving[t - 1 - i].abs();
                    }
                }
                for (j, b) in g.b.iter().enumerate() {
                    s += b * if t > j { vol[t - 1 - j] } else { sigma0 };
                }
                s
            }
        };
        vol[t] = s;
        e[t] = s * eps;
        x[t] = arma_step(&arma.phi, &arma.theta, &x, &e, t, e[t]);
    }
    Paths { x, noise, innovations: e, volatility: vol }
}

fn finish(paths: Paths, burnin: usize, meta: SeriesMeta) -> Result<SeriesSample> {
    let mut s = SeriesSample::with_meta(paths.x[burnin..].to_vec(), meta)?;
    s.noise = Some(paths.noise[burnin..].to_vec());
    s.innovations = Some(paths.innovations[burnin..].to_vec());
    s.volatility = Some(paths.volatility[burnin..].to_vec());
    Ok(s)
}

fn check_arma_alpha(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::domain("alpha", alpha))
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidInput("series length must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// SαS-ARMA(p, q) with noise SαS(α, σ), α ∈ (1, 2].
pub fn simulate_sas_arma(
    spec: &ArmaSpec,
    alpha: f64,
    sigma: f64,
    n: usize,
    burnin: usize,
    seed: RngSeed,
) -> Result<SeriesSample> {
    check_arma_alpha(alpha)?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain("sigma", sigma));
    }
    check_len(n)?;
    let spec = ArmaSpec::new(spec.phi.clone(), spec.theta.clone())?;
    let paths = run_recursion(&spec, None, alpha, sigma, n + burnin, seed, VolatilityDriver::Innovation);
    let meta = SeriesMeta {
        model: "sas-arma".into(),
        seed: Some(seed.0),
        burnin,
        true_params: Some(TrueParams {
            alpha,
            sigma,
            phi: spec.phi.clone(),
            theta: spec.theta.clone(),
            ..TrueParams::default()
        }),
    };
    finish(paths, burnin, meta)
}

fn require_stationary(garch: &GarchSpec, alpha: f64) -> Result<()> {
    let check = check_garch_stationarity(garch, alpha)?;
    if check.status == StationarityStatus::NonStationary {
        return Err(Error::NonStationary { margin: check.margin });
    }
    Ok(())
}

/// SαS-GARCH(p, q): `X_t = σ′_t ε_t`. Allowed for α ∈ (0, 2]; for α ≤ 1 the
/// stationarity check is undetermined and not enforced.
pub fn simulate_sas_garch(
    spec: &GarchSpec,
    alpha: f64,
    n: usize,
    burnin: usize,
    seed: RngSeed,
) -> Result<SeriesSample> {
    check_len(n)?;
    require_stationary(spec, alpha)?;
    let paths =
        run_recursion(&ArmaSpec::default(), Some(spec), alpha, 1.0, n + burnin, seed, VolatilityDriver::Innovation);
    let meta = SeriesMeta {
        model: "sas-garch".into(),
        seed: Some(seed.0),
        burnin,
        true_params: Some(TrueParams {
            alpha,
            sigma: 1.0,
            c: Some(spec.c),
            a: spec.a.clone(),
            b: spec.b.clone(),
            ..TrueParams::default()
        }),
    };
    finish(paths, burnin, meta)
}

/// ARMA(p_A, q_A)-SαS-GARCH(p_G, q_G) with the volatility driven by |eₜ|.
pub fn simulate_arma_sas_garch(
    arma: &ArmaSpec,
    garch: &GarchSpec,
    alpha: f64,
    n: usize,
    burnin: usize,
    seed: RngSeed,
) -> Result<SeriesSample> {
    simulate_arma_sas_garch_with(arma, garch, alpha, n, burnin, seed, VolatilityDriver::Innovation)
}

pub fn simulate_arma_sas_garch_with(
    arma: &ArmaSpec,
    garch: &GarchSpec,
    alpha: f64,
    n: usize,
    burnin: usize,
    seed: RngSeed,
    driver: VolatilityDriver,
) -> Result<SeriesSample> {
    check_arma_alpha(alpha)?;
    check_len(n)?;
    let arma = ArmaSpec::new(arma.phi.clone(), arma.theta.clone())?;
    require_stationary(garch, alpha)?;
    let paths = run_recursion(&arma, Some(garch), alpha, 1.0, n + burnin, seed, driver);
    let meta = SeriesMeta {
        model: match driver {
            VolatilityDriver::Innovation => "arma-sas-garch".into(),
            VolatilityDriver::Observation => "arma-sas-garch-observation-driven".into(),
        },
        seed: Some(seed.0),
        burnin,
        true_params: Some(TrueParams {
            alpha,
            sigma: 1.0,
            phi: arma.phi.clone(),
            theta: arma.theta.clone(),
            c: Some(garch.c),
            a: garch.a.clone(),
            b: garch.b.clone(),
        }),
    };
    finish(paths, burnin, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::sample_sas;

    #[test]
    fn white_noise_model_is_the_noise() {
        let s = simulate_sas_arma(&ArmaSpec::default(), 1.5, 1.0, 200, 0, RngSeed(3)).unwrap();
        let raw = sample_sas(200, 1.5, 1.0, RngSeed(3)).unwrap();
        assert_eq!(s.values(), raw.values());
        assert_eq!(s.noise.as_deref(), Some(raw.values()));
    }

    #[test]
    fn ma1_gaussian_autocorrelation() {
        let s = simulate_sas_arma(&ArmaSpec::ma1(0.5).unwrap(), 2.0, 1.0, 10_000, 500, RngSeed(17)).unwrap();
        let x = s.values();
        let n = x.len() as f64;
        let m = x.iter().sum::<f64>() / n;
        let c0: f64 = x.iter().map(|v| (v - m) * (v - m)).sum();
        let c1: f64 = x.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
        assert!((c1 / c0 - 0.4).abs() < 0.05, "rho1 = {}", c1 / c0);
    }

    #[test]
    fn arma_is_deterministic_and_alpha_checked() {
        let spec = ArmaSpec::arma11(0.5, 0.01).unwrap();
        let a = simulate_sas_arma(&spec, 1.55, 1.0, 300, 100, RngSeed(1)).unwrap();
        let b = simulate_sas_arma(&spec, 1.55, 1.0, 300, 100, RngSeed(1)).unwrap();
        assert_eq!(a, b);
        assert!(simulate_sas_arma(&spec, 1.0, 1.0, 10, 0, RngSeed(1)).is_err());
        assert!(simulate_sas_arma(&spec, 1.5, 1.0, 0, 0, RngSeed(1)).is_err());
    }

    #[test]
    fn constant_volatility_garch() {
        let g = GarchSpec::garch11(0.7, 0.0, 0.0).unwrap();
        let s = simulate_sas_garch(&g, 1.6, 100, 20, RngSeed(4)).unwrap();
        let noise = s.noise.as_ref().unwrap();
        for (x, e) in s.values().iter().zip(noise) {
            assert_eq!(*x, 0.7 * e);
        }
    }

    #[test]
    fn volatility_bounded_below_by_c() {
        let g = GarchSpec::garch11(0.05, 0.04, 0.9).unwrap();
        let s = simulate_sas_garch(&g, 1.4, 1000, 500, RngSeed(5)).unwrap();
        assert!(s.volatility.as_ref().unwrap().iter().all(|v| *v >= 0.05));
        let s = simulate_arma_sas_garch_with(
            &ArmaSpec::arma11(0.4, 0.1).unwrap(),
            &GarchSpec::garch11(0.01, 0.02, 0.7).unwrap(),
            1.55,
            1000,
            500,
            RngSeed(6),
            VolatilityDriver::Observation,
        )
        .unwrap();
        assert!(s.volatility.as_ref().unwrap().iter().all(|v| *v >= 0.01));
    }

    #[test]
    fn trivial_garch_nests_arma() {
        let arma = ArmaSpec::arma11(0.4, 0.1).unwrap();
        let g = GarchSpec::garch11(1.0, 0.0, 0.0).unwrap();
        let a = simulate_arma_sas_garch(&arma, &g, 1.55, 500, 100, RngSeed(9)).unwrap();
        let b = simulate_sas_arma(&arma, 1.55, 1.0, 500, 100, RngSeed(9)).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn stationarity_examples() {
        let g = GarchSpec::garch11(1.0, 0.0, 0.5).unwrap();
        for alpha in [0.5, 1.0, 1.5, 2.0] {
            let c = check_garch_stationarity(&g, alpha).unwrap();
            assert!(c.is_stationary());
            assert_eq!(c.margin, 0.5);
        }
        let g = GarchSpec::garch11(0.05, 0.04, 0.9).unwrap();
        assert!(check_garch_stationarity(&g, 1.4).unwrap().is_stationary());
        let g = GarchSpec::garch11(1.0, 1.0, 0.99).unwrap();
        let c = check_garch_stationarity(&g, 1.5).unwrap();
        assert_eq!(c.status, StationarityStatus::NonStationary);
        assert!(c.margin < 0.0);
        assert!(matches!(simulate_sas_garch(&g, 1.5, 10, 0, RngSeed(1)), Err(Error::NonStationary { .. })));
        let g = GarchSpec::garch11(0.01, 0.02, 0.7).unwrap();
        assert_eq!(check_garch_stationarity(&g, 0.9).unwrap().status, StationarityStatus::Undetermined);
        assert!(simulate_sas_garch(&g, 0.9, 50, 0, RngSeed(1)).is_ok());
        assert!(check_garch_stationarity(&g, 2.5).is_err());
    }

    #[test]
    fn higher_order_condition_is_not_strict() {
        // λ(2)·a + Σb = 1 exactly is allowed for order > 1.
        let lam = lambda_abs_moment(2.0).unwrap();
        let g = GarchSpec::new(0.1, vec![0.5 / lam, 0.0], vec![0.5]).unwrap();
        let c = check_garch_stationarity(&g, 2.0).unwrap();
        assert!(c.margin.abs() < 1e-12);
    }

    #[test]
    fn invalid_specs() {
        assert!(GarchSpec::garch11(0.0, 0.1, 0.1).is_err());
        assert!(GarchSpec::garch11(1.0, -0.1, 0.1).is_err());
        assert!(ArmaSpec::new(vec![f64::NAN], vec![]).is_err());
    }

    #[test]
    fn root_checks() {
        assert_eq!(ArmaSpec::arma11(0.5, 0.3).unwrap().root_check(), RootCheck { causal: true, invertible: true });
        assert!(!ArmaSpec::arma11(1.2, 0.3).unwrap().root_check().causal);
        assert!(!ArmaSpec::ma1(-1.5).unwrap().root_check().invertible);
        // 1 - 1.5z + 0.56z^2 = (1-0.7z)(1-0.8z)
        assert!(ArmaSpec::new(vec![1.5, -0.56], vec![]).unwrap().root_check().causal);
    }
}
