use proptest::prelude::*;
use stable_arma_core::arma::fit_ar_myw;
use stable_arma_core::dependence::{build_ncv_system, ncv};
use stable_arma_core::models::{simulate_sas_arma, ArmaSpec};
use stable_arma_core::RngSeed;

/// Definition with 1-based indices, summed in increasing t.
fn ncv_definition(x: &[f64], k: isize) -> f64 {
    let n = x.len() as isize;
    let sign = |v: f64| {
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    let mut num = 0.0;
    for t in 1..=n {
        if (1..=n).contains(&(t - k)) {
            num += x[(t - 1) as usize] * sign(x[(t - k - 1) as usize]);
        }
    }
    num / x.iter().map(|v| v.abs()).sum::<f64>()
}

fn series() -> impl Strategy<Value = Vec<f64>> {
    // zeros and small integers give exact ties and sign(0) terms
    prop::collection::vec(prop_oneof![Just(0.0), (-3i32..=3).prop_map(f64::from), -1e3f64..1e3], 2..60)
        .prop_filter("not all zero", |v| v.iter().any(|x| *x != 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 1000, ..ProptestConfig::default() })]

    #[test]
    fn ncv_matches_definition(x in series(), lag in any::<prop::sample::Index>()) {
        let n = x.len();
        let k = lag.index(2 * n - 1) as isize - (n as isize - 1);
        prop_assert_eq!(ncv(&x, k).unwrap(), ncv_definition(&x, k));
    }
}

proptest! {
    #[test]
    fn ncv_ignores_sign_flip_and_is_bounded(x in series(), lag in any::<prop::sample::Index>()) {
        let n = x.len();
        let k = lag.index(n) as isize;
        let flipped: Vec<f64> = x.iter().map(|v| -v).collect();
        let v = ncv(&x, k).unwrap();
        prop_assert_eq!(v, ncv(&flipped, k).unwrap());
        prop_assert!(v.abs() <= 1.0);
    }

    #[test]
    fn ncv_is_scale_invariant(x in series(), c in 1e-3f64..1e3, lag in any::<prop::sample::Index>()) {
        let k = lag.index(x.len()) as isize;
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let (a, b) = (ncv(&x, k).unwrap(), ncv(&scaled, k).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn system_entries_are_ncv_values(x in series(), order in 1usize..5) {
        prop_assume!(x.len() > order);
        let sys = build_ncv_system(&x, order).unwrap();
        for i in 0..order {
            prop_assert_eq!(sys.lambda[i], ncv(&x, i as isize + 1).unwrap());
            for j in 0..order {
                prop_assert_eq!(sys.matrix[(i, j)], ncv(&x, i as isize - j as isize).unwrap());
            }
        }
    }
}

#[test]
fn modified_yule_walker_recovers_ar2() {
    let spec = ArmaSpec::new(vec![0.5, -0.3], vec![]).unwrap();
    let s = simulate_sas_arma(&spec, 1.7, 1.0, 20_000, 500, RngSeed(4)).unwrap();
    let fit = fit_ar_myw(s.values(), 2).unwrap();
    assert!((fit.phi[0] - 0.5).abs() < 0.03 && (fit.phi[1] + 0.3).abs() < 0.03, "{:?}", fit.phi);
}
