//! Gradient estimators built from noisy function measurements.
//!
//! | estimator | measurements | direction weight |
//! |-----------|--------------|------------------|
//! | SPSA      | 2            | `1 / xi_i`       |
//! | SPSA1     | 1            | `1 / xi_i`       |
//! | FDSA      | `2n`         | coordinate axes  |
//! | RDSA      | 2            | `d_i`            |

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpsaError};
use crate::objective::MeasuredObjective;

/// A symmetric Bernoulli direction in `{-1, +1}^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perturbation(Vec<i8>);

impl Perturbation {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(SpsaError::Argument("perturbation needs n >= 1".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(SpsaError::Argument(format!(
                "perturbation components must be +-1, got {signs:?}"
            )));
        }
        Ok(Perturbation(signs))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.0.iter().map(|&s| s as f64).collect()
    }

    /// `d . v`
    pub fn dot(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(&s, x)| s as f64 * x).sum()
    }

    /// Element-wise reciprocal; a sign vector is its own inverse.
    pub fn inverse(&self) -> Vec<f64> {
        self.to_vec()
    }
}

impl fmt::Display for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| format!("{s:+}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Each component independently `+-1` with probability 1/2.
pub fn sample_perturbation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Perturbation> {
    if n == 0 {
        return Err(SpsaError::Argument("perturbation needs n >= 1".into()));
    }
    let mut signs = Vec::with_capacity(n);
    let mut bits = 0u64;
    for i in 0..n {
        if i % 64 == 0 {
            bits = rng.next_u64();
        }
        signs.push(if bits & 1 == 1 { 1 } else { -1 });
        bits >>= 1;
    }
    Ok(Perturbation(signs))
}

/// Element-wise reciprocal with a fast path for sign vectors.
pub fn reciprocal(v: &[f64]) -> Vec<f64> {
    if v.iter().all(|x| x.abs() == 1.0) {
        v.to_vec()
    } else {
        v.iter().map(|x| 1.0 / x).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientEstimate {
    pub g_hat: Vec<f64>,
    /// Direction the estimate was built on; empty for FDSA.
    pub direction: Vec<f64>,
    pub measurements_used: u64,
    pub y_plus: Option<f64>,
    pub y_minus: Option<f64>,
}

impl GradientEstimate {
    pub fn sup_norm(&self) -> f64 {
        self.g_hat.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.g_hat.iter().all(|v| *v == 0.0)
    }
}

/// Divisor of the one-measurement estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spsa1Divisor {
    /// `f(x + c xi) / (2c)`
    #[default]
    TwoC,
    /// `f(x + c xi) / c`
    C,
}

impl FromStr for Spsa1Divisor {
    type Err = SpsaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2c" => Ok(Spsa1Divisor::TwoC),
            "c" => Ok(Spsa1Divisor::C),
            other => Err(SpsaError::Argument(format!(
                "spsa1 divisor must be `2c` or `c`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for Spsa1Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Spsa1Divisor::TwoC => "2c",
            Spsa1Divisor::C => "c",
        })
    }
}

/// Distribution of RDSA search directions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum DirectionLaw {
    #[default]
    Bernoulli,
    Gaussian,
    /// Uniform on the unit sphere scaled by `sqrt(n)`, so `E[d d'] = I`.
    Sphere,
}

impl DirectionLaw {
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        match self {
            DirectionLaw::Bernoulli => Ok(sample_perturbation(n, rng)?.to_vec()),
            DirectionLaw::Gaussian | DirectionLaw::Sphere => {
                if n == 0 {
                    return Err(SpsaError::Argument("direction needs n >= 1".into()));
                }
                let mut d: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
                if *self == DirectionLaw::Sphere {
                    let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                    let s = (n as f64).sqrt() / norm;
                    d.iter_mut().for_each(|v| *v *= s);
                }
                Ok(d)
            }
        }
    }
}

fn check_c(c_k: f64) -> Result<()> {
    if c_k.is_finite() && c_k > 0.0 {
        Ok(())
    } else {
        Err(SpsaError::Argument(format!(
            "c_k must be positive, got {c_k}"
        )))
    }
}

fn shifted(x: &[f64], step: f64, d: &[f64]) -> Vec<f64> {
    x.iter().zip(d).map(|(x, d)| x + step * d).collect()
}

fn check_direction(x: &[f64], d: &[f64]) -> Result<()> {
    if x.len() != d.len() {
        return Err(SpsaError::Argument(format!(
            "direction has dimension {}, point has {}",
            d.len(),
            x.len()
        )));
    }
    Ok(())
}

/// Two-sided difference along `d`, returning `(y+, y-, (y+ - y-) / 2c)`.
fn two_sided(
    obj: &mut MeasuredObjective<'_>,
    x: &[f64],
    c_k: f64,
    d: &[f64],
) -> Result<(f64, f64, f64)> {
    check_c(c_k)?;
    check_direction(x, d)?;
    let y_plus = obj.measure(&shifted(x, c_k, d))?;
    let y_minus = obj.measure(&shifted(x, -c_k, d))?;
    Ok((y_plus, y_minus, (y_plus - y_minus) / (2.0 * c_k)))
}

/// `[f(x + c xi) - f(x - c xi)] / (2c) * xi^-1`
pub fn spsa_gradient(
    obj: &mut MeasuredObjective<'_>,
    x: &[f64],
    c_k: f64,
    xi: &Perturbation,
) -> Result<GradientEstimate> {
    let before = obj.measurements();
    let d = xi.to_vec();
    let (y_plus, y_minus, slope) = two_sided(obj, x, c_k, &d)?;
    let g_hat = xi.inverse().into_iter().map(|w| slope * w).collect();
    debug_assert_eq!(obj.measurements() - before, 2);
    Ok(GradientEstimate {
        g_hat,
        direction: d,
        measurements_used: 2,
        y_plus: Some(y_plus),
        y_minus: Some(y_minus),
    })
}

/// The SPSA estimate along an arbitrary direction with nonzero components.
pub fn spsa_gradient_along(
    obj: &mut MeasuredObjective<'_>,
    x: &[f64],
    c_k: f64,
    direction: &[f64],
) -> Result<GradientEstimate> {
    if direction.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(SpsaError::Argument(
            "simultaneous perturbation needs finite nonzero components".into(),
        ));
    }
    let (y_plus, y_minus, slope) = two_sided(obj, x, c_k, direction)?;
    Ok(GradientEstimate {
        g_hat: reciprocal(direction)
            .into_iter()
            .map(|w| slope * w)
            .collect(),
        direction: direction.to_vec(),
        measurements_used: 2,
        y_plus: Some(y_plus),
        y_minus: Some(y_minus),
    })
}

/// One-measurement estimate `f(x + c xi) / (divisor) * xi^-1`.
pub fn spsa1_gradient(
    obj: &mut MeasuredObjective<'_>,
    x: &[f64],
    c_k: f64,
    xi: &Perturbation,
    divisor: Spsa1Divisor,
) -> Result<GradientEstimate> {
    check_c(c_k)?;
    let d = xi.to_vec();
    check_direction(x, &d)?;
    let before = obj.measurements();
    let y_plus = obj.measure(&shifted(x, c_k, &d))?;
    let scale = match divisor {
        Spsa1Divisor::TwoC => 2.0 * c_k,
        Spsa1Divisor::C => c_k,
    };
    let slope = y_plus / scale;
    debug_assert_eq!(obj.measurements() - before, 1);
    Ok(GradientEstimate {
        g_hat: xi.inverse().into_iter().map(|w| slope * w).collect(),
        direction: d,
        measurements_used: 1,
        y_plus: Some(y_plus),
        y_minus: None,
    })
}

/// Central differences along each coordinate axis; `2n` measurements.
pub fn fdsa_gradient(
    obj: &mut MeasuredObjective<'_>,
    x: &[f64],
    c_k: f64,
) -> Result<GradientEstimate> {
    check_c(c_k)?;
    let n = obj.dim();
    crate::objective::check_dim(n, x)?;
    let before = obj.measurements();
    let mut g_hat = Vec::with_capacity(n);
    let mut probe = x.to_vec();
    for i in 0..n {
        probe[i] = x[i] + c_k;
        let y_plus = obj.measure(&probe)?;
        probe[i] = x[i] - c_k;
        let y_minus = obj.measure(&probe)?;
        probe[i] = x[i];
        g_hat.push((y_plus - y_minus) / (2.0 * c_k));
    }
    let used = 2 * n as u64;
    debug_assert_eq!(obj.measurements() - before, used);
    Ok(GradientEstimate {
        g_hat,
        direction: Vec::new(),
        measurements_used: used,
        y_plus: None,
        y_minus: None,
    })
}

/// `[f(x + c d) - f(x - c d)] / (2c) * d`; the direction multiplies.
pub fn rdsa_gradient(
    obj: &mut MeasuredObjective<'_>,
    x: &[f64],
    c_k: f64,
    direction: &[f64],
) -> Result<GradientEstimate> {
    let before = obj.measurements();
    let (y_plus, y_minus, slope) = two_sided(obj, x, c_k, direction)?;
    debug_assert_eq!(obj.measurements() - before, 2);
    Ok(GradientEstimate {
        g_hat: direction.iter().map(|d| slope * d).collect(),
        direction: direction.to_vec(),
        measurements_used: 2,
        y_plus: Some(y_plus),
        y_minus: Some(y_minus),
    })
}
