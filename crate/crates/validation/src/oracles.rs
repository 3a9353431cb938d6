//! Reference computations written straight from the definitions, sharing no
//! code with the library under test.

/// Sample NCV at lag `k`, 1-based as in its definition:
/// `Σ_{t: 1 ≤ t−k ≤ N} x_t·sign(x_{t−k}) / Σ_t |x_t|`.
pub fn ncv_brute_force(x: &[f64], k: isize) -> f64 {
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
        let s = t - k;
        if (1..=n).contains(&s) {
            num += x[(t - 1) as usize] * sign(x[(s - 1) as usize]);
        }
    }
    let den: f64 = x.iter().map(|v| v.abs()).sum();
    num / den
}

fn ecdf(sample: &[f64], x: f64) -> f64 {
    sample.iter().filter(|v| **v <= x).count() as f64 / sample.len() as f64
}

/// Two-sample KS distance by evaluating both empirical CDFs at every pooled
/// point.
pub fn ks_brute_force(a: &[f64], b: &[f64]) -> f64 {
    a.iter().chain(b).fold(0.0, |d: f64, &x| d.max((ecdf(a, x) - ecdf(b, x)).abs()))
}

/// `Σ |yᵢ − xᵢ·β|` with the design given row by row.
pub fn l1_loss(y: &[f64], rows: &[Vec<f64>], beta: &[f64]) -> f64 {
    y.iter().zip(rows).map(|(yi, xi)| (yi - xi.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>()).abs()).sum()
}

/// Largest decrease of the L1 loss found by stepping each coordinate of
/// `beta` by ±h for each `h` in `steps`. Zero (or negative) at a minimizer.
pub fn l1_descent_found(y: &[f64], rows: &[Vec<f64>], beta: &[f64], steps: &[f64]) -> f64 {
    let base = l1_loss(y, rows, beta);
    let mut best = f64::NEG_INFINITY;
    for j in 0..beta.len() {
        for &h in steps {
            for dir in [-1.0, 1.0] {
                let mut b = beta.to_vec();
                b[j] += dir * h;
                best = best.max(base - l1_loss(y, rows, &b));
            }
        }
    }
    best
}

/// `sup_t |φ̂(t) − exp(−|t|^α)|` over `grid`, with φ̂ the complex empirical
/// characteristic function.
pub fn ecf_sup_distance(sample: &[f64], alpha: f64, grid: &[f64]) -> f64 {
    let n = sample.len() as f64;
    grid.iter()
        .map(|&t| {
            let re = sample.iter().map(|x| (t * x).cos()).sum::<f64>() / n;
            let im = sample.iter().map(|x| (t * x).sin()).sum::<f64>() / n;
            let target = (-t.abs().powf(alpha)).exp();
            (re - target).hypot(im)
        })
        .fold(0.0, f64::max)
}

/// Pearson correlation.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma) * (x - ma)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb) * (y - mb)).sum();
    cov / (va * vb).sqrt()
}
