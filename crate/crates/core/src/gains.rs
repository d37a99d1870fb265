//! Gain sequences for the step size `a_k` and the perturbation size `c_k`.
//!
//! ```text
//! a_k = a / (k + 1 + A)^alpha                 standard
//! a_k = a (1 + rho_k) / (k + 1 + A)^alpha     rho-adaptive
//! c_k = c / (k + 1)^gamma                     both modes
//! ```
//!
//! Iterations are counted from zero, so `c_0 = c`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpsaError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMode {
    #[default]
    Standard,
    /// Step size scaled by `1 + rho_k`, so the measured half-step of SPSA1-A
    /// has the same length as a plain SPSA step.
    RhoAdaptive,
}

impl FromStr for GainMode {
    type Err = SpsaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "standard" => Ok(GainMode::Standard),
            "rho_adaptive" | "rho-adaptive" => Ok(GainMode::RhoAdaptive),
            other => Err(SpsaError::Argument(format!("unknown gain mode `{other}`"))),
        }
    }
}

impl fmt::Display for GainMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GainMode::Standard => "standard",
            GainMode::RhoAdaptive => "rho_adaptive",
        })
    }
}

/// The constants `(a, A, c, alpha, gamma)` plus the mode flag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GainSchedule {
    pub a: f64,
    pub big_a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub mode: GainMode,
}

impl GainSchedule {
    pub fn new(a: f64, big_a: f64, c: f64, alpha: f64, gamma: f64) -> Result<Self> {
        let s = GainSchedule {
            a,
            big_a,
            c,
            alpha,
            gamma,
            mode: GainMode::Standard,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn with_mode(mut self, mode: GainMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SpsaError::Configuration(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        positive("a", self.a)?;
        positive("c", self.c)?;
        positive("alpha", self.alpha)?;
        positive("gamma", self.gamma)?;
        if !(self.big_a.is_finite() && self.big_a >= 0.0) {
            return Err(SpsaError::Configuration(format!(
                "A must be nonnegative, got {}",
                self.big_a
            )));
        }
        Ok(())
    }

    /// `(a_k, c_k)` for iteration `k`. In rho-adaptive mode `rho_k` must be
    /// supplied and finite; in standard mode it is ignored.
    pub fn gains(&self, k: u64, rho_k: Option<f64>) -> Result<(f64, f64)> {
        let base = self.base_step(k);
        let a_k = match self.mode {
            GainMode::Standard => base,
            GainMode::RhoAdaptive => match rho_k {
                Some(r) if r.is_finite() && r >= 0.0 => base * (1.0 + r),
                Some(r) => {
                    return Err(SpsaError::Configuration(format!(
                        "rho-adaptive gain needs a finite nonnegative rho_k, got {r}"
                    )))
                }
                None => {
                    return Err(SpsaError::Configuration(
                        "rho-adaptive gain requires rho_k".into(),
                    ))
                }
            },
        };
        Ok((a_k, self.perturbation(k)))
    }

    /// `a / (k + 1 + A)^alpha`, the step size before any rho scaling.
    pub fn base_step(&self, k: u64) -> f64 {
        self.a / (k as f64 + 1.0 + self.big_a).powf(self.alpha)
    }

    pub fn perturbation(&self, k: u64) -> f64 {
        self.c / (k as f64 + 1.0).powf(self.gamma)
    }

    /// Conditions on `(alpha, gamma)` under which the power-law gains violate
    /// `sum a_k = inf` or `sum (a_k / c_k)^2 < inf`.
    pub fn assumption_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.alpha > 1.0 {
            out.push(format!("alpha = {} > 1 makes sum a_k finite", self.alpha));
        }
        if 2.0 * (self.alpha - self.gamma) <= 1.0 {
            out.push(format!(
                "2(alpha - gamma) = {} <= 1 makes sum (a_k/c_k)^2 diverge",
                2.0 * (self.alpha - self.gamma)
            ));
        }
        out
    }

    pub fn satisfies_gain_conditions(&self) -> bool {
        self.assumption_violations().is_empty()
    }
}
