//! Normalized autocovariation (NCV), the dependence measure used in place of
//! autocovariance for infinite-variance series, and the linear system
//! λ = ΛΦ built from it.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::{sign, Error, Result};

/// Sample NCV at lag `k`:
/// `Σ_{t=l}^{r} x_t·sign(x_{t−k}) / Σ_{t=1}^{N} |x_t|` with `l = max(1, 1+k)`,
/// `r = min(N, N+k)` (1-based). Negative lags are allowed.
pub fn ncv(x: &[f64], k: isize) -> Result<f64> {
    let n = x.len();
    if n < 2 {
        return Err(Error::InvalidInput("ncv needs at least 2 values".into()));
    }
    if k.unsigned_abs() >= n {
        return Err(Error::InvalidInput(alloc::format!("lag {k} out of range for length {n}")));
    }
    let denom: f64 = x.iter().map(|v| v.abs()).sum();
    if denom == 0.0 {
        return Err(Error::Degenerate("ncv of an all-zero series"));
    }
    Ok(ncv_numerator(x, k) / denom)
}

fn ncv_numerator(x: &[f64], k: isize) -> f64 {
    let n = x.len() as isize;
    // 0-based: t runs over max(0, k) ..= min(n-1, n-1+k)
    let lo = k.max(0);
    let hi = (n - 1).min(n - 1 + k);
    let mut acc = 0.0;
    let mut t = lo;
    while t <= hi {
        acc += x[t as usize] * sign(x[(t - k) as usize]);
        t += 1;
    }
    acc
}

/// Vector λ (λᵢ = NCV at lag i) and matrix Λ (entry (i, j) = NCV at lag i − j)
/// of the modified Yule-Walker equations of order `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct NcvSystem {
    pub lambda: DVector<f64>,
    pub matrix: DMatrix<f64>,
}

impl NcvSystem {
    pub fn order(&self) -> usize {
        self.lambda.len()
    }
}

pub fn build_ncv_system(x: &[f64], a: usize) -> Result<NcvSystem> {
    if a == 0 {
        return Err(Error::InvalidInput("system order must be at least 1".into()));
    }
    if x.len() <= a {
        return Err(Error::InvalidInput(alloc::format!("series length {} must exceed system order {a}", x.len())));
    }
    let denom: f64 = x.iter().map(|v| v.abs()).sum();
    if denom == 0.0 {
        return Err(Error::Degenerate("ncv of an all-zero series"));
    }
    // lags -(a-1) ..= a, stored at offset a-1
    let a_i = a as isize;
    let mut by_lag = vec![0.0; 2 * a];
    for k in -(a_i - 1)..=a_i {
        by_lag[(k + a_i - 1) as usize] = ncv_numerator(x, k) / denom;
    }
    let at = |k: isize| by_lag[(k + a_i - 1) as usize];
    let lambda = DVector::from_fn(a, |i, _| at(i as isize + 1));
    let matrix = DMatrix::from_fn(a, a, |i, j| at(i as isize - j as isize));
    Ok(NcvSystem { lambda, matrix })
}

/// NCV values for lags `1..=max_lag`.
pub fn ncv_profile(x: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    (1..=max_lag).map(|k| ncv(x, k as isize)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stable::sample_sas;
    use crate::RngSeed;

    #[test]
    fn lag_zero_is_one() {
        assert_eq!(ncv(&[0.3, -2.0, 5.5, 0.0], 0).unwrap(), 1.0);
    }

    #[test]
    fn hand_example() {
        let x = [1.0, -2.0, 3.0];
        assert!((ncv(&x, 1).unwrap() + 5.0 / 6.0).abs() < 1e-15);
        // lag -1: t = 1..2 (1-based): x1·sign(x2) + x2·sign(x3) = -1 - 2
        assert!((ncv(&x, -1).unwrap() + 3.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(ncv(&[0.0, 0.0, 0.0], 1), Err(Error::Degenerate(_))));
        assert!(ncv(&[1.0], 0).is_err());
        assert!(ncv(&[1.0, 2.0], 2).is_err());
        assert!(ncv(&[1.0, 2.0], -2).is_err());
    }

    #[test]
    fn small_systems() {
        let x = [1.0, -2.0, 3.0];
        let s1 = build_ncv_system(&x, 1).unwrap();
        assert_eq!(s1.matrix[(0, 0)], 1.0);
        assert_eq!(s1.lambda[0], ncv(&x, 1).unwrap());
        let s2 = build_ncv_system(&x, 2).unwrap();
        assert_eq!(s2.matrix[(1, 0)], ncv(&x, 1).unwrap());
        assert_eq!(s2.matrix[(0, 1)], ncv(&x, -1).unwrap());
        assert_eq!(s2.matrix[(1, 1)], 1.0);
        assert_eq!(s2.lambda[1], ncv(&x, 2).unwrap());
        assert!(build_ncv_system(&x, 3).is_err());
        assert!(build_ncv_system(&x, 0).is_err());
    }

    #[test]
    fn iid_noise_is_uncorrelated() {
        let s = sample_sas(10_000, 1.5, 1.0, RngSeed(8)).unwrap();
        assert!(ncv(s.values(), 5).unwrap().abs() <= 0.05);
        let sys = build_ncv_system(s.values(), 5).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(sys.matrix[(i, j)].abs() <= 0.05);
                }
            }
        }
    }
}
