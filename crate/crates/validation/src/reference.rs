//! Published Monte Carlo cells: mean and RMSE over 1000 replications of
//! length 1000.

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub mean: f64,
    pub rmse: f64,
}

const fn cell(mean: f64, rmse: f64) -> Cell {
    Cell { mean, rmse }
}

/// SαS-MA(1) row: θ̂₁ by each estimator plus α̂ from the residuals.
#[derive(Clone, Copy, Debug)]
pub struct Ma1Row {
    pub theta: f64,
    pub alpha: f64,
    pub lad: Cell,
    pub ls: Cell,
    pub mhr: Cell,
    pub alpha_hat: Cell,
}

pub const MA1_ROWS: [Ma1Row; 3] = [
    Ma1Row {
        theta: 0.01,
        alpha: 1.50,
        lad: cell(0.0100, 0.0152),
        ls: cell(0.0096, 0.0283),
        mhr: cell(0.0098, 0.0153),
        alpha_hat: cell(1.5011, 0.0529),
    },
    Ma1Row {
        theta: 0.10,
        alpha: 1.65,
        lad: cell(0.0997, 0.0216),
        ls: cell(0.0991, 0.0269),
        mhr: cell(0.0990, 0.0218),
        alpha_hat: cell(1.6552, 0.0524),
    },
    Ma1Row {
        theta: 0.50,
        alpha: 1.95,
        lad: cell(0.4987, 0.0362),
        ls: cell(0.4990, 0.0306),
        mhr: cell(0.4911, 0.0372),
        alpha_hat: cell(1.9500, 0.0310),
    },
];

/// SαS-ARMA(1,1) row: MHR (φ̂₁, θ̂₁).
#[derive(Clone, Copy, Debug)]
pub struct Arma11Row {
    pub phi: f64,
    pub theta: f64,
    pub alpha: f64,
    pub mhr_phi: Cell,
    pub mhr_theta: Cell,
}

pub const ARMA11_ROWS: [Arma11Row; 2] = [
    Arma11Row { phi: 0.50, theta: 0.01, alpha: 1.55, mhr_phi: cell(0.5004, 0.0275), mhr_theta: cell(0.0088, 0.0316) },
    Arma11Row { phi: 0.90, theta: 0.20, alpha: 1.75, mhr_phi: cell(0.8982, 0.0129), mhr_theta: cell(0.1951, 0.0315) },
];

/// MA(1)-SαS-GARCH(1,1) row for θ̂₁ (MHR). The GARCH coefficients are
/// those of the matching row of the MECF table.
#[derive(Clone, Copy, Debug)]
pub struct Ma1GarchThetaRow {
    pub theta: f64,
    pub c: f64,
    pub a1: f64,
    pub b1: f64,
    pub alpha: f64,
    pub mhr: Cell,
}

pub const MA1_GARCH_THETA_ROW: Ma1GarchThetaRow =
    Ma1GarchThetaRow { theta: 0.30, c: 0.10, a1: 0.05, b1: 0.8, alpha: 1.65, mhr: cell(0.2989, 0.0382) };

/// MA(1)-SαS-GARCH(1,1) row for (ĉ, â₁, b̂₁) (MECF) and α̂ from the noise.
#[derive(Clone, Copy, Debug)]
pub struct GarchRow {
    pub theta: f64,
    pub phi: Option<f64>,
    pub c: f64,
    pub a1: f64,
    pub b1: f64,
    pub alpha: f64,
    pub c_hat: Cell,
    pub a1_hat: Cell,
    pub b1_hat: Cell,
    pub alpha_hat: Cell,
}

pub const MA1_GARCH_ROW: GarchRow = GarchRow {
    theta: 0.20,
    phi: None,
    c: 0.05,
    a1: 0.04,
    b1: 0.9,
    alpha: 1.40,
    c_hat: cell(0.0499, 0.0032),
    a1_hat: cell(0.0399, 0.0032),
    b1_hat: cell(0.9060, 0.0246),
    alpha_hat: cell(1.4017, 0.0511),
};

pub const ARMA11_GARCH_ROW: GarchRow = GarchRow {
    theta: 0.2,
    phi: Some(0.9),
    c: 0.50,
    a1: 0.06,
    b1: 0.8,
    alpha: 1.75,
    c_hat: cell(0.5016, 0.0308),
    a1_hat: cell(0.0605, 0.0030),
    b1_hat: cell(0.8133, 0.0263),
    alpha_hat: cell(1.7542, 0.0495),
};

/// MHR (θ̂₁, φ̂₁) on the ARMA(1,1)-SαS-GARCH(1,1) design of
/// [`ARMA11_GARCH_ROW`].
pub const ARMA11_GARCH_MHR: (Cell, Cell) = (cell(0.1912, 0.0482), cell(0.8964, 0.0172));
