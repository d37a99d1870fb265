use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpsaError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    Gaussian,
}

/// Additive measurement noise. `sigma` is a standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    pub sigma: f64,
}

impl NoiseModel {
    pub const NONE: NoiseModel = NoiseModel {
        kind: NoiseKind::None,
        sigma: 0.0,
    };

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(SpsaError::Argument(format!(
                "noise standard deviation must be nonnegative, got {sigma}"
            )));
        }
        Ok(NoiseModel {
            kind: NoiseKind::Gaussian,
            sigma,
        })
    }

    /// Standard deviation actually applied; zero for [`NoiseKind::None`].
    pub fn effective_sigma(&self) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::Gaussian => self.sigma,
        }
    }

    /// One noise draw. A zero standard deviation consumes no randomness, so
    /// `None` and `Gaussian(0)` are indistinguishable.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let s = self.effective_sigma();
        if s == 0.0 {
            return 0.0;
        }
        let z: f64 = rng.sample(StandardNormal);
        s * z
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        NoiseModel::NONE
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            NoiseKind::None => f.write_str("none"),
            NoiseKind::Gaussian => write!(f, "gaussian(sigma={})", self.sigma),
        }
    }
}
