//! Small derivative-free and quasi-Newton minimizers.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub iterations: usize,
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMeadOptions {
    /// Absolute offset used to build the initial simplex.
    pub initial_step: f64,
    pub xtol: f64,
    pub ftol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { initial_step: 0.1, xtol: 1e-8, ftol: 1e-12, max_evals: 4000 }
    }
}

/// Nelder-Mead simplex search. NaN objective values count as +∞.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        sanitize(f(x))
    };
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();
    let mut iterations = 0;
    let mut converged = false;
    while evals < opts.max_evals {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread =
            simplex[1..].iter().flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max);
        let fspread = (values[n] - values[0]).abs();
        if spread <= opts.xtol && fspread <= opts.ftol.max(opts.ftol * values[0].abs()) {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (w - c)).collect() };
        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(-0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(0.5);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = simplex[0].iter().zip(&simplex[i]).map(|(b, v)| b + 0.5 * (v - b)).collect();
                    values[i] = eval(&shrunk, &mut evals);
                    simplex[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Minimum { x: simplex[best].clone(), value: values[best], evals, iterations, converged }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoxOptions {
    pub max_iter: usize,
    /// Stop when `max |P(x − g) − x| ≤ pgtol` (projected gradient).
    pub pgtol: f64,
    /// Stop when the relative reduction of f drops below `factr · ε_machine`.
    pub factr: f64,
    /// Central-difference step is `rel_step · max(1, |xᵢ|)`.
    pub rel_step: f64,
}

impl Default for BoxOptions {
    fn default() -> Self {
        BoxOptions { max_iter: 100, pgtol: 0.0, factr: 1e7, rel_step: 1e-6 }
    }
}

/// Largest first trial step, relative to max(|x|∞, 10⁻³), taken along the
/// steepest-descent direction.
const FIRST_STEP: f64 = 0.1;

fn project(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, l), u) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*l, *u);
    }
}

fn numeric_gradient<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &[f64],
    fx: f64,
    lower: &[f64],
    upper: &[f64],
    rel_step: f64,
    evals: &mut usize,
) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let h = rel_step * x[i].abs().max(1.0);
        let up = (x[i] + h).min(upper[i]);
        let dn = (x[i] - h).max(lower[i]);
        probe[i] = up;
        let fu = if up > x[i] {
            *evals += 1;
            sanitize(f(&probe))
        } else {
            fx
        };
        probe[i] = dn;
        let fd = if dn < x[i] {
            *evals += 1;
            sanitize(f(&probe))
        } else {
            fx
        };
        probe[i] = x[i];
        let width = up - dn;
        g[i] = if width > 0.0 && fu.is_finite() && fd.is_finite() { (fu - fd) / width } else { 0.0 };
    }
    g
}

/// Box-constrained quasi-Newton minimization: projected BFGS with a dense
/// inverse-Hessian estimate, central-difference gradients and projected
/// Armijo backtracking. The returned point is always feasible and never
/// worse than the (projected) start.
pub fn minimize_box<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    lower: &[f64],
    upper: &[f64],
    opts: &BoxOptions,
) -> Minimum {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lower, upper);
    let mut evals = 1;
    let mut fx = sanitize(f(&x));
    if !fx.is_finite() {
        return Minimum { x, value: fx, evals, iterations: 0, converged: false };
    }
    let mut g = numeric_gradient(&mut f, &x, fx, lower, upper, opts.rel_step, &mut evals);
    let identity = |h: &mut Vec<f64>| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = 1.0;
        }
    };
    let mut h = vec![0.0; n * n];
    identity(&mut h);
    let mut fresh = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let pg = (0..n).map(|i| ((x[i] - g[i]).clamp(lower[i], upper[i]) - x[i]).abs()).fold(0.0, f64::max);
        if pg <= opts.pgtol {
            converged = true;
            break;
        }
        let free: Vec<bool> =
            (0..n).map(|i| !((x[i] <= lower[i] && g[i] > 0.0) || (x[i] >= upper[i] && g[i] < 0.0))).collect();
        let mut d = vec![0.0; n];
        for i in (0..n).filter(|&i| free[i]) {
            d[i] = -(0..n).filter(|&j| free[j]).map(|j| h[i * n + j] * g[j]).sum::<f64>();
        }
        let slope: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
        if !(slope < 0.0) {
            if fresh {
                break;
            }
            identity(&mut h);
            fresh = true;
            continue;
        }

        // Without curvature information the raw gradient step can leap across
        // the box; cap it relative to the current point.
        let mut t = if fresh {
            let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (FIRST_STEP * xmax.max(1e-3) / dmax).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..60 {
            let mut xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            project(&mut xn, lower, upper);
            evals += 1;
            let fnew = sanitize(f(&xn));
            let decrease: f64 = g.iter().zip(xn.iter().zip(&x)).map(|(gi, (a, b))| gi * (a - b)).sum();
            if fnew.is_finite() && fnew <= fx + 1e-4 * decrease && xn != x {
                accepted = Some((xn, fnew));
                break;
            }
            t *= 0.5;
        }
        let Some((xn, fnew)) = accepted else {
            if fresh {
                break;
            }
            identity(&mut h);
            fresh = true;
            continue;
        };

        let reduction = fx - fnew;
        let gn = numeric_gradient(&mut f, &xn, fnew, lower, upper, opts.rel_step, &mut evals);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        if sy > 1e-10 * libm::sqrt(ss * yy) {
            if fresh {
                let gamma = sy / yy;
                h.iter_mut().for_each(|v| *v *= gamma);
            }
            let rho = 1.0 / sy;
            // H ← (I − ρsyᵀ) H (I − ρysᵀ) + ρssᵀ
            let hy: Vec<f64> = (0..n).map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum()).collect();
            let yhy: f64 = y.iter().zip(&hy).map(|(a, b)| a * b).sum();
            for i in 0..n {
                for j in 0..n {
                    h[i * n + j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
        x = xn;
        fx = fnew;
        g = gn;
        let scale = fx.abs().max((fx + reduction).abs()).max(1.0);
        if reduction <= opts.factr * f64::EPSILON * scale {
            converged = true;
            break;
        }
    }
    Minimum { x, value: fx, evals, iterations, converged }
}
