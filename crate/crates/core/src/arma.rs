//! ARMA coefficient estimation under SαS noise.
//!
//! [`fit_mhr`] is the modified Hannan-Rissanen estimator:
//! 1. long AR(a) fit from the NCV Yule-Walker system λ = ΛΦ,
//! 2. residuals ε̂ₜ = Xₜ − Σφ̂ᵢX_{t−i} for t = a+1..n,
//! 3. LAD regression of Xₜ on (X_{t−1..t−p}, ε̂_{t−1..t−q}) over
//!    t = a+1+q..n.
//!
//! [`fit_arma_m`] gives the LAD and LS M-estimators used for comparison.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // needed when std is absent from the crate graph
use num_traits::Float;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dependence::{build_ncv_system, NcvSystem};
use crate::models::ArmaSpec;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::{Error, Result, RngSeed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ArmaMethod {
    Mhr,
    Lad,
    Ls,
}

/// Loss of an M-estimator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum MLoss {
    Lad,
    Ls,
}

/// Condition number above which Λ̂ is regularized.
pub const MAX_CONDITION: f64 = 1e12;
const RIDGE: f64 = 1e-8;

/// Long-AR order: ⌈log₁₀ n⌉ capped at n/20 (and at least 1). Callers raise
/// it to max(p, q) + 1 where needed.
pub fn default_ar_order(n: usize) -> usize {
    let by_log = (n.max(1) as f64).log10().ceil() as usize;
    by_log.min(n / 20).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArFit {
    pub phi: Vec<f64>,
    /// 1-norm condition estimate of Λ̂ (∞ if singular).
    pub condition: f64,
    /// Set when Λ̂ + 1e-8·I was solved instead of Λ̂.
    pub regularized: bool,
}

/// Solves λ = ΛΦ, falling back to (Λ + 1e-8·I)Φ = λ when Λ is
/// near-singular.
pub fn solve_ncv_system(sys: &NcvSystem) -> Result<ArFit> {
    let a = sys.order();
    let lu = sys.matrix.clone().lu();
    let condition = match lu.try_inverse() {
        Some(inv) => one_norm(&sys.matrix) * one_norm(&inv),
        None => f64::INFINITY,
    };
    let (solution, regularized) = if condition.is_finite() && condition <= MAX_CONDITION {
        (sys.matrix.clone().lu().solve(&sys.lambda), false)
    } else {
        let ridged = &sys.matrix + DMatrix::<f64>::identity(a, a) * RIDGE;
        (ridged.lu().solve(&sys.lambda), true)
    };
    let phi = solution.ok_or(Error::RankDeficient)?;
    if !phi.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("AR coefficients"));
    }
    Ok(ArFit { phi: phi.iter().copied().collect(), condition, regularized })
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

fn check_not_constant(x: &[f64]) -> Result<()> {
    crate::ensure_finite(x, "series")?;
    let first = x.first().copied().unwrap_or(0.0);
    if x.iter().all(|v| *v == first) {
        return Err(Error::Degenerate("constant series"));
    }
    Ok(())
}

/// Step 1: AR(a) coefficients from the modified Yule-Walker equations.
pub fn fit_ar_myw(x: &[f64], a: usize) -> Result<ArFit> {
    if a == 0 {
        return Err(Error::InvalidInput("AR order must be at least 1".into()));
    }
    if x.len() < 10 * a {
        return Err(Error::InvalidInput(alloc::format!(
            "AR({a}) fit needs at least {} values, got {}",
            10 * a,
            x.len()
        )));
    }
    check_not_constant(x)?;
    solve_ncv_system(&build_ncv_system(x, a)?)
}

/// Step 2: ε̂ₜ = Xₜ − Σφ̂ᵢX_{t−i} for t = a+1..n (length n − a).
pub fn ar_residuals(x: &[f64], phi: &[f64]) -> Result<Vec<f64>> {
    let a = phi.len();
    if a >= x.len() {
        return Err(Error::InvalidInput(alloc::format!("AR order {a} must be below series length {}", x.len())));
    }
    Ok((a..x.len())
        .map(|t| {
            let mut r = x[t];
            for (i, p) in phi.iter().enumerate() {
                r -= p * x[t - 1 - i];
            }
            r
        })
        .collect())
}

/// Ordinary least squares through a thin QR factorization.
pub fn least_squares(y: &[f64], design: &DMatrix<f64>) -> Result<Vec<f64>> {
    let (rows, cols) = design.shape();
    if cols == 0 || rows < cols || y.len() != rows {
        return Err(Error::InvalidInput(alloc::format!(
            "least squares with {rows}x{cols} design and {} responses",
            y.len()
        )));
    }
    let qr = design.clone().qr();
    let r = qr.r();
    let max_diag = (0..cols).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let tol = f64::EPSILON * rows as f64 * max_diag;
    if max_diag == 0.0 || (0..cols).any(|i| r[(i, i)].abs() <= tol) {
        return Err(Error::RankDeficient);
    }
    let qty = qr.q().transpose() * DVector::from_column_slice(y);
    let beta = r.solve_upper_triangular(&qty).ok_or(Error::RankDeficient)?;
    Ok(beta.iter().copied().collect())
}

fn l1_objective(y: &[f64], design: &DMatrix<f64>, beta: &[f64]) -> f64 {
    (0..y.len())
        .map(|i| {
            let fit: f64 = beta.iter().enumerate().map(|(j, b)| design[(i, j)] * b).sum();
            (y[i] - fit).abs()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadFit {
    pub coef: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

const LAD_WEIGHT_FLOOR: f64 = 1e-8;
const LAD_TOL: f64 = 1e-8;
const LAD_MAX_ITER: usize = 200;

/// Least absolute deviation regression by iteratively reweighted least
/// squares started from the OLS fit. Returns the best iterate seen, so the
/// objective never exceeds the OLS objective.
pub fn lad_regression(y: &[f64], design: &DMatrix<f64>) -> Result<LadFit> {
    let mut beta = least_squares(y, design)?;
    let mut best = (beta.clone(), l1_objective(y, design, &beta));
    let (rows, cols) = design.shape();
    let mut weighted = design.clone();
    let mut wy = vec![0.0; rows];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < LAD_MAX_ITER {
        iterations += 1;
        for i in 0..rows {
            let fit: f64 = (0..cols).map(|j| design[(i, j)] * beta[j]).sum();
            let w = 1.0 / (y[i] - fit).abs().max(LAD_WEIGHT_FLOOR).sqrt();
            for j in 0..cols {
                weighted[(i, j)] = design[(i, j)] * w;
            }
            wy[i] = y[i] * w;
        }
        let next = least_squares(&wy, &weighted)?;
        let obj = l1_objective(y, design, &next);
        if obj < best.1 {
            best = (next.clone(), obj);
        }
        let change = next.iter().zip(&beta).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        beta = next;
        if change < LAD_TOL {
            converged = true;
            break;
        }
    }
    Ok(LadFit { coef: best.0, objective: best.1, iterations, converged })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmaFlags {
    /// Λ̂ was regularized in Step 1 (MHR only).
    pub regularized: bool,
    /// LAD (MHR) or simplex (M-estimators) reported convergence.
    pub converged: bool,
    pub causal: bool,
    pub invertible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArmaEstimate {
    pub method: ArmaMethod,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    /// Innovations of the fitted ARMA recursion (zero pre-sample), length n.
    pub residuals: Vec<f64>,
    /// Step-2 long-AR residuals (MHR only), length n − a.
    pub step2_residuals: Vec<f64>,
    /// a of Step 1 (0 for M-estimators).
    pub ar_order_used: usize,
    /// Rows of the Step-3 regression, n − a − q (0 for M-estimators).
    pub regression_rows: usize,
    pub flags: ArmaFlags,
}

impl ArmaEstimate {
    pub fn spec(&self) -> ArmaSpec {
        ArmaSpec { phi: self.phi.clone(), theta: self.theta.clone() }
    }
}

/// eₜ = Xₜ − Σφᵢ X_{t−i} − Σθⱼ e_{t−j}, with zero pre-sample values.
pub fn arma_innovations(x: &[f64], phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len()];
    for t in 0..x.len() {
        let mut v = x[t];
        for (i, p) in phi.iter().enumerate() {
            if t > i {
                v -= p * x[t - 1 - i];
            }
        }
        for (j, th) in theta.iter().enumerate() {
            if t > j {
                v -= th * e[t - 1 - j];
            }
        }
        e[t] = v;
    }
    e
}

#[allow(clippy::too_many_arguments)]
fn finish_estimate(
    method: ArmaMethod,
    x: &[f64],
    p: usize,
    coef: &[f64],
    step2_residuals: Vec<f64>,
    ar_order_used: usize,
    regression_rows: usize,
    regularized: bool,
    converged: bool,
) -> ArmaEstimate {
    let phi = coef[..p].to_vec();
    let theta = coef[p..].to_vec();
    let roots = ArmaSpec { phi: phi.clone(), theta: theta.clone() }.root_check();
    let residuals = arma_innovations(x, &phi, &theta);
    ArmaEstimate {
        method,
        phi,
        theta,
        residuals,
        step2_residuals,
        ar_order_used,
        regression_rows,
        flags: ArmaFlags { regularized, converged, causal: roots.causal, invertible: roots.invertible },
    }
}

/// Modified Hannan-Rissanen estimate of an ARMA(p, q). `ar_order` defaults
/// to [`default_ar_order`]; it must exceed max(p, q) (a = p is accepted for
/// pure AR models).
pub fn fit_mhr(x: &[f64], p: usize, q: usize, ar_order: Option<usize>) -> Result<ArmaEstimate> {
    if p + q == 0 {
        return Err(Error::InvalidInput("p + q must be at least 1".into()));
    }
    let n = x.len();
    let a = ar_order.unwrap_or_else(|| default_ar_order(n).max(p.max(q) + 1));
    let order_ok = if q == 0 { a >= p } else { a > p.max(q) };
    if !order_ok {
        return Err(Error::InvalidInput(alloc::format!("AR order {a} must exceed max(p, q) = {}", p.max(q))));
    }
    if n < a + q + 50 {
        return Err(Error::InvalidInput(alloc::format!("series of length {n} too short for a = {a}, q = {q}")));
    }
    check_not_constant(x)?;

    let ar = fit_ar_myw(x, a)?;
    let eps = ar_residuals(x, &ar.phi)?;

    let first = a + q;
    let rows = n - first;
    let design = DMatrix::from_fn(rows, p + q, |r, c| {
        let t = first + r;
        if c < p {
            x[t - 1 - c]
        } else {
            eps[t - 1 - (c - p) - a]
        }
    });
    let lad = lad_regression(&x[first..], &design)?;
    Ok(finish_estimate(ArmaMethod::Mhr, x, p, &lad.coef, eps, a, rows, ar.regularized, lad.converged))
}

/// Σρ(eₜ(β)) over the zero-initialized innovation recursion; +∞ on blow-up.
pub fn m_objective(x: &[f64], p: usize, beta: &[f64], loss: MLoss) -> f64 {
    let (phi, theta) = beta.split_at(p);
    let e = arma_innovations(x, phi, theta);
    let total: f64 = match loss {
        MLoss::Lad => e.iter().map(|v| v.abs()).sum(),
        MLoss::Ls => e.iter().map(|v| v * v).sum(),
    };
    if total.is_finite() {
        total
    } else {
        f64::INFINITY
    }
}

const M_RESTART_SEED: RngSeed = RngSeed(0x4D45_5354_5254);

/// LAD or LS M-estimator by simplex search from five starts: zero, the MHR
/// estimate and three seeded perturbations of it.
pub fn fit_arma_m(x: &[f64], p: usize, q: usize, loss: MLoss) -> Result<ArmaEstimate> {
    if p + q == 0 {
        return Err(Error::InvalidInput("p + q must be at least 1".into()));
    }
    if x.len() < p + q + 50 {
        return Err(Error::InvalidInput(alloc::format!("series of length {} too short", x.len())));
    }
    check_not_constant(x)?;
    let dim = p + q;
    let anchor = fit_mhr(x, p, q, None).ok().map(|m| [m.phi, m.theta].concat());
    let mut starts = vec![vec![0.0; dim]];
    let centre = anchor.clone().unwrap_or_else(|| vec![0.0; dim]);
    if let Some(a) = anchor {
        starts.push(a);
    }
    let mut rng = M_RESTART_SEED.stream();
    for _ in 0..3 {
        starts.push(centre.iter().map(|c| c + 0.4 * (rng.uniform_open() - 0.5)).collect());
    }
    let opts = NelderMeadOptions { initial_step: 0.1, xtol: 1e-7, ftol: 1e-12, max_evals: 1500 * dim };
    let objective = |b: &[f64]| m_objective(x, p, b, loss);
    let mut best = None::<crate::optim::Minimum>;
    for s in &starts {
        let first = nelder_mead(objective, s, &opts);
        // one restart from the reported point guards against simplex collapse
        let m = nelder_mead(objective, &first.x, &NelderMeadOptions { initial_step: 0.02, ..opts });
        let m = if m.value <= first.value { m } else { first };
        if best.as_ref().is_none_or(|b| m.value < b.value) {
            best = Some(m);
        }
    }
    let best = best.expect("at least one start");
    if !best.value.is_finite() {
        return Err(Error::NonFinite("M-estimator objective"));
    }
    let method = match loss {
        MLoss::Lad => ArmaMethod::Lad,
        MLoss::Ls => ArmaMethod::Ls,
    };
    Ok(finish_estimate(method, x, p, &best.x, Vec::new(), 0, 0, false, best.converged))
}
