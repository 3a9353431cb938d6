use nalgebra::DMatrix;
use proptest::prelude::*;
use stable_arma_core::arma::{fit_arma_m, fit_mhr, lad_regression, m_objective, MLoss};
use stable_arma_core::models::{simulate_sas_arma, ArmaSpec};
use stable_arma_core::stable::sample_sas;
use stable_arma_core::RngSeed;

fn l1(y: &[f64], x: &DMatrix<f64>, beta: &[f64]) -> f64 {
    (0..y.len()).map(|i| (y[i] - (0..beta.len()).map(|j| x[(i, j)] * beta[j]).sum::<f64>()).abs()).sum()
}

/// Random regression with an intercept, `cols − 1` Gaussian regressors and
/// SαS(1.5) errors.
fn instance(seed: u64, rows: usize, cols: usize) -> (Vec<f64>, DMatrix<f64>) {
    let mut rng = RngSeed(seed).stream();
    let x = DMatrix::from_fn(rows, cols, |_, j| if j == 0 { 1.0 } else { rng.normal() });
    let e = sample_sas(rows, 1.5, 1.0, RngSeed(seed).child(1)).unwrap();
    let y = (0..rows).map(|i| (0..cols).map(|j| x[(i, j)] * 0.5).sum::<f64>() + e.values()[i]).collect();
    (y, x)
}

#[test]
fn lad_no_coordinate_step_improves() {
    for seed in 0..100u64 {
        let rows = 20 + (seed as usize * 7) % 41;
        let cols = 1 + seed as usize % 3;
        let (y, x) = instance(seed, rows, cols);
        let fit = lad_regression(&y, &x).unwrap();
        let base = l1(&y, &x, &fit.coef);
        assert!((base - fit.objective).abs() <= 1e-12 * (1.0 + base));
        for j in 0..cols {
            for h in [1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
                for dir in [-1.0, 1.0] {
                    let mut b = fit.coef.clone();
                    b[j] += dir * h;
                    let gain = base - l1(&y, &x, &b);
                    assert!(gain <= 1e-7 * (1.0 + base), "seed {seed}: step {} on {j} gains {gain}", dir * h);
                }
            }
        }
    }
}

#[test]
fn lad_beats_ols_in_l1() {
    for seed in 200..220u64 {
        let (y, x) = instance(seed, 80, 3);
        let fit = lad_regression(&y, &x).unwrap();
        let ols = stable_arma_core::arma::least_squares(&y, &x).unwrap();
        assert!(fit.objective <= l1(&y, &x, &ols) + 1e-12);
    }
}

#[test]
fn mhr_is_consistent_for_arma11() {
    let spec = ArmaSpec::arma11(0.5, 0.3).unwrap();
    let s = simulate_sas_arma(&spec, 1.6, 1.0, 20_000, 500, RngSeed(12)).unwrap();
    let est = fit_mhr(s.values(), 1, 1, None).unwrap();
    assert!((est.phi[0] - 0.5).abs() < 0.03 && (est.theta[0] - 0.3).abs() < 0.03, "{est:?}");
    assert!(est.flags.causal && est.flags.invertible);
}

#[test]
fn m_estimators_do_not_lose_to_the_truth() {
    let spec = ArmaSpec::arma11(0.4, 0.2).unwrap();
    for seed in 0..5 {
        let s = simulate_sas_arma(&spec, 1.7, 1.0, 1000, 500, RngSeed(40 + seed)).unwrap();
        for loss in [MLoss::Lad, MLoss::Ls] {
            let est = fit_arma_m(s.values(), 1, 1, loss).unwrap();
            let at_est = m_objective(s.values(), 1, &[est.phi[0], est.theta[0]], loss);
            let at_truth = m_objective(s.values(), 1, &[0.4, 0.2], loss);
            assert!(at_est <= at_truth * (1.0 + 1e-9), "{loss:?} seed {seed}: {at_est} > {at_truth}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn lad_is_regression_equivariant(seed in 0u64..10_000, shift in prop::array::uniform2(-5.0f64..5.0)) {
        let (y, x) = instance(seed, 40, 2);
        let moved: Vec<f64> = (0..40).map(|i| y[i] + x[(i, 0)] * shift[0] + x[(i, 1)] * shift[1]).collect();
        let a = lad_regression(&y, &x).unwrap();
        let b = lad_regression(&moved, &x).unwrap();
        // Same L1 optimum up to the solver tolerance.
        prop_assert!((a.objective - b.objective).abs() <= 1e-6 * (1.0 + a.objective));
    }

    #[test]
    fn mhr_needs_a_long_ar_above_the_orders(p in 0usize..3, q in 1usize..3, a in 1usize..3) {
        prop_assume!(a <= p.max(q));
        let s = sample_sas(500, 1.8, 1.0, RngSeed(1)).unwrap();
        prop_assert!(fit_mhr(s.values(), p, q, Some(a)).is_err());
    }
}
