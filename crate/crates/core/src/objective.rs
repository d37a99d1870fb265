//! Objectives and the measurement gateway.
//!
//! Algorithms never see an [`Objective`] directly; they go through a
//! [`MeasuredObjective`], which adds noise and counts every measurement.
//! [`MeasuredObjective::true_value`] is for the harness only and is never
//! counted.

use nalgebra::DMatrix;

use crate::error::{Result, SpsaError};
use crate::noise::NoiseModel;
use crate::seed::{RandomSource, Stream};

/// A deterministic function `R^n -> R`, optionally with analytic derivatives.
pub trait Objective: Send + Sync {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Optimal value; the error of an iterate is `|f(x) - f_star|`.
    fn f_star(&self) -> f64 {
        0.0
    }

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        None
    }

    /// Third partial derivative `d^3 f / dx_i dx_j dx_k`.
    fn third(&self, _x: &[f64], _i: usize, _j: usize, _k: usize) -> Option<f64> {
        None
    }
}

/// Wraps a closure as an [`Objective`] with no derivatives.
pub struct FnObjective<F> {
    name: String,
    n: usize,
    f: F,
    f_star: f64,
}

impl<F> FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, n: usize, f: F) -> Self {
        FnObjective {
            name: name.into(),
            n,
            f,
            f_star: 0.0,
        }
    }

    pub fn with_f_star(mut self, f_star: f64) -> Self {
        self.f_star = f_star;
        self
    }
}

impl<F> Objective for FnObjective<F>
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn f_star(&self) -> f64 {
        self.f_star
    }
}

pub(crate) fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() != expected {
        return Err(SpsaError::Argument(format!(
            "point has dimension {}, objective expects {expected}",
            x.len()
        )));
    }
    Ok(())
}

/// `f(x) + eps` with a measurement counter.
///
/// Single-threaded: it owns a mutable counter and noise stream. Build one per
/// replication.
pub struct MeasuredObjective<'p> {
    problem: &'p dyn Objective,
    noise: NoiseModel,
    counter: u64,
    rng: RandomSource,
}

impl<'p> MeasuredObjective<'p> {
    /// Noise draws come from the [`Stream::Noise`] stream of `seed`.
    pub fn new(problem: &'p dyn Objective, noise: NoiseModel, seed: u64) -> Self {
        MeasuredObjective {
            problem,
            noise,
            counter: 0,
            rng: RandomSource::stream(seed, Stream::Noise),
        }
    }

    pub fn noiseless(problem: &'p dyn Objective) -> Self {
        Self::new(problem, NoiseModel::NONE, 0)
    }

    pub fn problem(&self) -> &'p dyn Objective {
        self.problem
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn measurements(&self) -> u64 {
        self.counter
    }

    /// One noisy measurement. The counter advances even when the value turns
    /// out non-finite; the measurement was still spent.
    pub fn measure(&mut self, x: &[f64]) -> Result<f64> {
        check_dim(self.problem.dim(), x)?;
        self.counter += 1;
        let fx = self.problem.value(x);
        if !fx.is_finite() {
            return Err(SpsaError::Evaluation {
                x: x.to_vec(),
                value: fx,
            });
        }
        Ok(fx + self.noise.sample(&mut self.rng))
    }

    /// Noiseless `f(x)`; does not touch the counter or the noise stream.
    pub fn true_value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.problem.dim(), x)?;
        Ok(self.problem.value(x))
    }

    /// `|f(x) - f_star|`, uncounted.
    pub fn true_error(&self, x: &[f64]) -> Result<f64> {
        Ok((self.true_value(x)? - self.problem.f_star()).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::BenchmarkProblem;

    fn sphere2() -> FnObjective<impl Fn(&[f64]) -> f64 + Send + Sync> {
        FnObjective::new("sphere", 2, |x: &[f64]| x.iter().map(|v| v * v).sum())
    }

    #[test]
    fn measure_counts_once() {
        let p = sphere2();
        let mut obj = MeasuredObjective::noiseless(&p);
        assert_eq!(obj.measurements(), 0);
        assert_eq!(obj.measure(&[1.0, 1.0]).unwrap(), 2.0);
        assert_eq!(obj.measurements(), 1);
    }

    #[test]
    fn dimension_mismatch() {
        let p = sphere2();
        let mut obj = MeasuredObjective::noiseless(&p);
        assert!(matches!(obj.measure(&[1.0]), Err(SpsaError::Argument(_))));
        assert!(obj.true_value(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn non_finite_is_evaluation_error() {
        let p = FnObjective::new("log", 1, |x: &[f64]| x[0].ln());
        let mut obj = MeasuredObjective::noiseless(&p);
        match obj.measure(&[-1.0]) {
            Err(SpsaError::Evaluation { x, .. }) => assert_eq!(x, vec![-1.0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn same_seed_same_values() {
        let p = sphere2();
        let noise = NoiseModel::gaussian(0.3).unwrap();
        let mut a = MeasuredObjective::new(&p, noise, 99);
        let mut b = MeasuredObjective::new(&p, noise, 99);
        let va: Vec<f64> = (0..50).map(|_| a.measure(&[0.5, 0.1]).unwrap()).collect();
        let vb: Vec<f64> = (0..50).map(|_| b.measure(&[0.5, 0.1]).unwrap()).collect();
        assert_eq!(va, vb);
        assert!(va.windows(2).any(|w| w[0] != w[1]));
    }

    #[test]
    fn zero_sigma_matches_none() {
        let p = sphere2();
        let mut a = MeasuredObjective::new(&p, NoiseModel::gaussian(0.0).unwrap(), 1);
        let mut b = MeasuredObjective::new(&p, NoiseModel::NONE, 1);
        for i in 0..10 {
            let x = [i as f64 * 0.1, 1.0];
            assert_eq!(a.measure(&x).unwrap(), b.measure(&x).unwrap());
        }
    }

    #[test]
    fn gaussian_mean_is_unbiased() {
        // standard error of the mean is 0.01 / 1000 = 1e-5
        let p = sphere2();
        let mut obj = MeasuredObjective::new(&p, NoiseModel::gaussian(0.01).unwrap(), 2024);
        let n = 1_000_000;
        let mut sum = 0.0;
        for _ in 0..n {
            sum += obj.measure(&[0.3, -0.4]).unwrap();
        }
        let mean = sum / n as f64;
        assert!((mean - 0.25).abs() < 3e-5, "{mean}");
        assert_eq!(obj.measurements(), n);
    }

    #[test]
    fn true_value_is_free() {
        let p = BenchmarkProblem::Rosenbrock;
        let mut obj = MeasuredObjective::new(&p, NoiseModel::gaussian(0.01).unwrap(), 3);
        assert_eq!(obj.true_value(&[1.0, 1.0]).unwrap(), 0.0);
        let v = obj.true_value(&[-1.2, 1.0]).unwrap();
        assert!((v - 24.2).abs() < 1e-12);
        assert_eq!(obj.measurements(), 0);
        obj.measure(&[0.0, 0.0]).unwrap();
        obj.true_value(&[0.0, 0.0]).unwrap();
        assert_eq!(obj.measurements(), 1);
    }
}
