use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Generating parameters recorded alongside simulated data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrueParams {
    pub alpha: f64,
    pub sigma: f64,
    #[serde(default)]
    pub phi: Vec<f64>,
    #[serde(default)]
    pub theta: Vec<f64>,
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default)]
    pub a: Vec<f64>,
    #[serde(default)]
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesMeta {
    pub model: String,
    pub seed: Option<u64>,
    pub burnin: usize,
    pub true_params: Option<TrueParams>,
}

/// An ordered real-valued series. Simulators also attach the driving noise
/// εₜ, the innovations eₜ = σ′ₜεₜ and the volatility path σ′ₜ.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SeriesSample {
    values: Vec<f64>,
    pub meta: SeriesMeta,
    pub noise: Option<Vec<f64>>,
    pub innovations: Option<Vec<f64>>,
    pub volatility: Option<Vec<f64>>,
}

impl SeriesSample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_meta(values, SeriesMeta::default())
    }

    pub fn with_meta(values: Vec<f64>, meta: SeriesMeta) -> Result<Self> {
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("series values"));
        }
        Ok(SeriesSample { values, meta, noise: None, innovations: None, volatility: None })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl AsRef<[f64]> for SeriesSample {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}
