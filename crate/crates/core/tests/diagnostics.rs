use proptest::prelude::*;
use stable_arma_core::diagnostics::{
    ks_pvalue_battery, ks_two_sample, qq_data, residual_autocovariation, standardized_residuals,
};
use stable_arma_core::garch::{fit_arma_garch, PipelineOptions};
use stable_arma_core::models::{simulate_arma_sas_garch, ArmaSpec, GarchSpec};
use stable_arma_core::stable::{estimate_sas_params, sample_sas, sample_stable, StableParams};
use stable_arma_core::RngSeed;

fn ks_by_definition(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.iter().filter(|v| **v <= x).count() as f64 / s.len() as f64;
    a.iter().chain(b).fold(0.0, |d: f64, &x| d.max((cdf(a, x) - cdf(b, x)).abs()))
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() / 2;
    if s.len().is_multiple_of(2) {
        (s[m - 1] + s[m]) / 2.0
    } else {
        s[m]
    }
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    // half-integers give many ties between and within the samples
    prop::collection::vec(prop_oneof![(-8i32..=8).prop_map(|v| v as f64 / 2.0), -10.0f64..10.0], 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn ks_statistic_matches_definition(a in sample(), b in sample()) {
        let r = ks_two_sample(&a, &b).unwrap();
        prop_assert_eq!(r.statistic, ks_by_definition(&a, &b));
        prop_assert!((0.0..=1.0).contains(&r.p_value));
    }
}

proptest! {
    #[test]
    fn ks_statistic_ignores_increasing_transforms(
        a in prop::collection::vec(-40i32..=40, 1..50),
        b in prop::collection::vec(-40i32..=40, 1..50),
    ) {
        let to_f = |v: &[i32], f: &dyn Fn(f64) -> f64| v.iter().map(|x| f(*x as f64)).collect::<Vec<f64>>();
        let d = ks_two_sample(&to_f(&a, &|x| x), &to_f(&b, &|x| x)).unwrap().statistic;
        let cubic = |x: f64| x * x * x + 3.0 * x;
        let expo = |x: f64| (x / 8.0).exp();
        prop_assert_eq!(d, ks_two_sample(&to_f(&a, &cubic), &to_f(&b, &cubic)).unwrap().statistic);
        prop_assert_eq!(d, ks_two_sample(&to_f(&a, &expo), &to_f(&b, &expo)).unwrap().statistic);
    }

    #[test]
    fn ks_is_symmetric(a in sample(), b in sample()) {
        let (ab, ba) = (ks_two_sample(&a, &b).unwrap(), ks_two_sample(&b, &a).unwrap());
        prop_assert_eq!(ab.statistic, ba.statistic);
        prop_assert_eq!(ab.p_value, ba.p_value);
    }
}

#[test]
fn battery_accepts_draws_from_the_fitted_law() {
    let fitted = StableParams::sas(1.7, 1.0).unwrap();
    let res = sample_stable(1000, &fitted, RngSeed(61)).unwrap();
    let p = ks_pvalue_battery(&res, &fitted, 100, RngSeed(62)).unwrap();
    assert_eq!(p.len(), 100);
    assert!(median(&p) > 0.05, "median {}", median(&p));
}

#[test]
fn battery_rejects_uniform_residuals() {
    let fitted = StableParams::sas(1.7, 1.0).unwrap();
    let mut rng = RngSeed(63).stream();
    let res: Vec<f64> = (0..1000).map(|_| 4.0 * rng.uniform_open() - 2.0).collect();
    let p = ks_pvalue_battery(&res, &fitted, 100, RngSeed(64)).unwrap();
    assert!(median(&p) < 0.05, "median {}", median(&p));
}

#[test]
fn battery_is_seed_deterministic() {
    let fitted = StableParams::sas(1.5, 1.0).unwrap();
    let res = sample_stable(300, &fitted, RngSeed(1)).unwrap();
    let a = ks_pvalue_battery(&res, &fitted, 1, RngSeed(9)).unwrap();
    assert_eq!(a, ks_pvalue_battery(&res, &fitted, 1, RngSeed(9)).unwrap());
    assert!(ks_pvalue_battery(&res, &fitted, 0, RngSeed(9)).is_err());
}

#[test]
fn qq_of_the_reference_sample_is_the_diagonal() {
    let fitted = StableParams::sas(1.6, 1.0).unwrap();
    let res = sample_stable(500, &fitted, RngSeed(70)).unwrap();
    let qq = qq_data(&res, &fitted, RngSeed(70)).unwrap();
    assert_eq!(qq.len(), res.len());
    assert!(qq.iter().all(|(x, y)| x == y));
    assert!(qq_data(&res[..9], &fitted, RngSeed(70)).is_err());
}

#[test]
fn qq_shows_tail_departure_of_gaussian_residuals() {
    let mut rng = RngSeed(71).stream();
    let res: Vec<f64> = (0..1000).map(|_| rng.normal()).collect();
    let fitted = StableParams::sas(1.5, std::f64::consts::FRAC_1_SQRT_2).unwrap();
    let qq = qq_data(&res, &fitted, RngSeed(72)).unwrap();
    let iqr = qq[749].0 - qq[249].0;
    let top = qq[900..].iter().map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(top / iqr > 1.0, "top-decile departure {top}, IQR {iqr}");
}

#[test]
fn gaussian_autocovariation_null_rate() {
    // For Gaussian noise sd(ncv) ≈ √(π/2)/√n, so the ±2/√n band holds about
    // 89% of the lags, and 5/√n is a four-sigma bound.
    let n = 1000;
    let root_n = (n as f64).sqrt();
    let mut values = Vec::new();
    for seed in 0..100 {
        let s = sample_sas(n, 2.0, 1.0, RngSeed(300 + seed)).unwrap();
        let v = residual_autocovariation(s.values(), 10).unwrap();
        assert_eq!(v.len(), 10);
        values.extend(v);
    }
    let outside = values.iter().filter(|x| x.abs() > 2.0 / root_n).count() as f64 / values.len() as f64;
    assert!((0.07..0.15).contains(&outside), "{outside} outside ±2/√n");
    assert!(values.iter().all(|x| x.abs() < 5.0 / root_n));
}

#[test]
fn heavy_tailed_autocovariation_centres_on_zero() {
    let mut all = Vec::new();
    for seed in 0..20 {
        let s = sample_sas(1000, 1.5, 1.0, RngSeed(400 + seed)).unwrap();
        all.extend(residual_autocovariation(s.values(), 10).unwrap());
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    assert!(mean.abs() < 0.02, "mean {mean}");
    let mut abs: Vec<f64> = all.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    assert!(abs[abs.len() / 2] < 2.0 / 1000f64.sqrt(), "median |ncv| {}", abs[abs.len() / 2]);
}

#[test]
fn standardized_residuals_round_trip() {
    let arma = ArmaSpec::ma1(0.3).unwrap();
    let garch = GarchSpec::garch11(0.1, 0.05, 0.8).unwrap();
    let s = simulate_arma_sas_garch(&arma, &garch, 1.65, 1000, 500, RngSeed(81)).unwrap();
    let options = PipelineOptions { seed: RngSeed(82), ..PipelineOptions::default() };
    let (a, g) = fit_arma_garch(s.values(), 0, 1, &options).unwrap();
    let eps = standardized_residuals(s.values(), &a, &g).unwrap();
    assert_eq!(eps.len(), 1000);
    let fitted = estimate_sas_params(&eps).unwrap();
    assert!((fitted.alpha - 1.65).abs() <= 0.05, "{fitted:?}");
    let p = ks_pvalue_battery(&eps, &fitted, 100, RngSeed(83)).unwrap();
    assert!(median(&p) > 0.05, "median {}", median(&p));
}
