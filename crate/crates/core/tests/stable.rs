use proptest::prelude::*;
use stable_arma_core::stable::{cf_sas, estimate_sas_params, lambda_abs_moment, sample_sas, StableParams};
use stable_arma_core::RngSeed;

/// sup over t ∈ {0.1, …, 3.0} of |φ̂(t) − exp(−t^α)|, complex modulus.
fn ecf_sup(sample: &[f64], alpha: f64) -> f64 {
    let n = sample.len() as f64;
    (1..=30)
        .map(|i| {
            let t = i as f64 * 0.1;
            let re = sample.iter().map(|x| (t * x).cos()).sum::<f64>() / n;
            let im = sample.iter().map(|x| (t * x).sin()).sum::<f64>() / n;
            (re - (-t.powf(alpha)).exp()).hypot(im)
        })
        .fold(0.0, f64::max)
}

#[test]
fn cms_sampler_matches_cf() {
    for (i, alpha) in [1.2, 1.5, 1.8, 2.0].into_iter().enumerate() {
        let s = sample_sas(100_000, alpha, 1.0, RngSeed(31 + i as u64)).unwrap();
        let d = ecf_sup(s.values(), alpha);
        assert!(d <= 0.01, "alpha {alpha}: sup-norm {d}");
    }
}

#[test]
fn lambda_at_two_is_gaussian_mean_abs() {
    // SαS(2, 1) is N(0, 2), whose mean absolute value is 2/√π.
    let l = lambda_abs_moment(2.0).unwrap();
    assert!((l - 2.0 / std::f64::consts::PI.sqrt()).abs() < 1e-12);
}

#[test]
fn lambda_matches_sample_mean_abs() {
    let s = sample_sas(400_000, 1.9, 1.0, RngSeed(77)).unwrap();
    let m = s.values().iter().map(|v| v.abs()).sum::<f64>() / s.len() as f64;
    let l = lambda_abs_moment(1.9).unwrap();
    assert!((m / l - 1.0).abs() < 0.02, "{m} vs {l}");
}

#[test]
fn fitted_params_of_long_samples() {
    for (i, alpha) in [1.3, 1.6, 1.9].into_iter().enumerate() {
        let s = sample_sas(20_000, alpha, 2.0, RngSeed(500 + i as u64)).unwrap();
        let p = estimate_sas_params(s.values()).unwrap();
        assert!((p.alpha - alpha).abs() < 0.05, "alpha {alpha}: {p:?}");
        assert!((p.sigma / 2.0 - 1.0).abs() < 0.05, "alpha {alpha}: {p:?}");
        assert!(p.beta.abs() < 0.15 && p.delta.abs() < 0.1, "alpha {alpha}: {p:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn cf_is_even_bounded_and_scale_free(t in -50.0f64..50.0, alpha in 0.1f64..=2.0, sigma in 0.01f64..10.0) {
        let v = cf_sas(t, alpha, sigma).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert_eq!(v, cf_sas(-t, alpha, sigma).unwrap());
        let unit = cf_sas(sigma * t, alpha, 1.0).unwrap();
        prop_assert!((v - unit).abs() <= 1e-12);
    }

    #[test]
    fn cf_decreases_in_abs_t(t in 0.0f64..20.0, dt in 0.0f64..5.0, alpha in 0.1f64..=2.0) {
        prop_assert!(cf_sas(t + dt, alpha, 1.0).unwrap() <= cf_sas(t, alpha, 1.0).unwrap());
    }

    #[test]
    fn sampler_scales_exactly(seed in any::<u64>(), alpha in 0.3f64..=2.0, sigma in 0.1f64..10.0) {
        let unit = sample_sas(64, alpha, 1.0, RngSeed(seed)).unwrap();
        let scaled = sample_sas(64, alpha, sigma, RngSeed(seed)).unwrap();
        for (u, s) in unit.values().iter().zip(scaled.values()) {
            prop_assert_eq!(sigma * u, *s);
        }
    }

    #[test]
    fn sampler_rejects_bad_alpha(alpha in prop_oneof![-5.0f64..=0.0, 2.0001f64..10.0]) {
        prop_assert!(sample_sas(10, alpha, 1.0, RngSeed(1)).is_err());
        prop_assert!(StableParams::sas(alpha, 1.0).is_err());
    }
}
