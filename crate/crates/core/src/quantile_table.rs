//! Quantile summaries of standard SαS laws (σ = 1, β = 0) used by the
//! quantile initializer in [`crate::stable::estimate_sas_params`].
//!
//! Columns: α, ν(α) = q₀.₉₅ / q₀.₇₅, q₀.₇₅. For a symmetric law ν equals the
//! McCulloch ratio (q₀.₉₅ − q₀.₀₅) / (q₀.₇₅ − q₀.₂₅).

const TABLE: [(f64, f64, f64); 31] = [
    (0.50, 44.635218, 1.283830),
    (0.55, 31.565586, 1.214566),
    (0.60, 23.612189, 1.162104),
    (0.65, 18.439617, 1.121650),
    (0.70, 14.893767, 1.090064),
    (0.75, 12.357522, 1.065201),
    (0.80, 10.479083, 1.045535),
    (0.85, 9.047016, 1.029946),
    (0.90, 7.928492, 1.017583),
    (0.95, 7.036866, 1.007780),
    (1.00, 6.313752, 1.000000),
    (1.05, 5.718676, 0.993810),
    (1.10, 5.222869, 0.988852),
    (1.15, 4.805423, 0.984839),
    (1.20, 4.450851, 0.981537),
    (1.25, 4.147494, 0.978764),
    (1.30, 3.886470, 0.976379),
    (1.35, 3.660946, 0.974273),
    (1.40, 3.465625, 0.972367),
    (1.45, 3.296352, 0.970602),
    (1.50, 3.149795, 0.968933),
    (1.55, 3.023170, 0.967331),
    (1.60, 2.914029, 0.965774),
    (1.65, 2.820128, 0.964246),
    (1.70, 2.739382, 0.962738),
    (1.75, 2.669882, 0.961243),
    (1.80, 2.609914, 0.959756),
    (1.85, 2.557985, 0.958277),
    (1.90, 2.512818, 0.956803),
    (1.95, 2.473342, 0.955335),
    (2.00, 2.438664, 0.953873),
];

/// α whose tail ratio ν(α) equals `nu`, clamped to the table range [0.5, 2].
pub(crate) fn alpha_from_nu(nu: f64) -> f64 {
    let (first, last) = (TABLE[0], TABLE[TABLE.len() - 1]);
    if !(nu < first.1) {
        return first.0;
    }
    if nu <= last.1 {
        return last.0;
    }
    // ν is strictly decreasing in α.
    for w in TABLE.windows(2) {
        let (a0, n0, _) = w[0];
        let (a1, n1, _) = w[1];
        if nu <= n0 && nu >= n1 {
            return a0 + (a1 - a0) * (n0 - nu) / (n0 - n1);
        }
    }
    last.0
}

/// Upper quartile of the standard SαS law with index `alpha`.
pub(crate) fn upper_quartile(alpha: f64) -> f64 {
    let a = alpha.clamp(TABLE[0].0, TABLE[TABLE.len() - 1].0);
    for w in TABLE.windows(2) {
        let (a0, _, q0) = w[0];
        let (a1, _, q1) = w[1];
        if a <= a1 {
            return q0 + (q1 - q0) * (a - a0) / (a1 - a0);
        }
    }
    TABLE[TABLE.len() - 1].2
}
