//! Acceptance tolerances at desk scale (200 replications of length 1000).

use crate::reference::Cell;

pub const DESK_REPS: usize = 200;
pub const DESK_N: usize = 1000;

/// Half-width of the band around a published mean:
/// `max(0.006, 3·RMSE/√200)`.
pub fn mean_tolerance(expected: Cell) -> f64 {
    (3.0 * expected.rmse / (DESK_REPS as f64).sqrt()).max(0.006)
}

pub const RMSE_RATIO_RANGE: (f64, f64) = (0.6, 1.5);

/// Outcome of a single comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(label: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { label: label.into(), passed, detail: detail.into() }
    }
}

pub fn check_mean(label: &str, observed: f64, expected: Cell) -> Check {
    let tol = mean_tolerance(expected);
    let passed = (observed - expected.mean).abs() <= tol;
    Check::new(format!("{label} mean"), passed, format!("{observed:.4} vs {:.4} ± {tol:.4}", expected.mean))
}

pub fn check_rmse(label: &str, observed: f64, expected: Cell) -> Check {
    let ratio = observed / expected.rmse;
    let (lo, hi) = RMSE_RATIO_RANGE;
    Check::new(
        format!("{label} RMSE"),
        (lo..=hi).contains(&ratio),
        format!("{observed:.4} vs {:.4} (ratio {ratio:.2}, allowed {lo}-{hi})", expected.rmse),
    )
}

/// |observed − target| ≤ tol.
pub fn check_within(label: &str, observed: f64, target: f64, tol: f64) -> Check {
    Check::new(label, (observed - target).abs() <= tol, format!("{observed:.4} vs {target:.4} ± {tol}"))
}
