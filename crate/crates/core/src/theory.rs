//! Asymptotic normality of the scaled SPSA1-A error.
//!
//! With `a_k = a/(k+1+A)^alpha` and `c_k = c/(k+1)^gamma`, the scaled error
//! `k^(beta/2) (x_k - x*)`, `beta = alpha - 2 gamma`, is asymptotically
//! Gaussian. [`predict_asymptotics`] computes the limiting mean and
//! covariance, and [`empirical_scaled_errors`] summarizes a simulated
//! ensemble for comparison.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SpsaError};
use crate::gains::GainSchedule;
use crate::noise::NoiseModel;
use crate::objective::{check_dim, MeasuredObjective, Objective};
use crate::seed::child_seed;
use crate::spsa1a::{run, Algorithm, RunConfig};

/// Absolute tolerance for the boundary cases `alpha = 1` and
/// `3 gamma - alpha/2 = 0`; schedules are usually typed as decimals.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Fewest replications for which sample moments are reported.
pub const MIN_REPLICATIONS: usize = 30;

#[derive(Clone, Debug, Serialize)]
pub struct NormalityPrediction {
    pub beta: f64,
    pub beta_plus: f64,
    pub mu: Vec<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub covariance: DMatrix<f64>,
    /// Eigenvalues of `a H(x*)`, ascending.
    pub lambda: Vec<f64>,
    /// Diagonal of `M` in the eigenbasis, aligned with `lambda`.
    pub m_diag: Vec<f64>,
    pub t: Vec<f64>,
}

impl NormalityPrediction {
    pub fn covariance_trace(&self) -> f64 {
        self.covariance.trace()
    }
}

fn serialize_matrix<S: serde::Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
    let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
    serde::Serialize::serialize(&rows, s)
}

/// `Var(eps+ - eps-)` for independent measurement noise.
pub fn sigma2_of_noise(noise: &NoiseModel) -> f64 {
    let s = noise.effective_sigma();
    2.0 * s * s
}

fn hypothesis(msg: String) -> SpsaError {
    SpsaError::Hypothesis(msg)
}

/// Limiting mean and covariance of `k^(beta/2)(x_k - x*)`.
///
/// `third(i, j, l)` returns the third partial derivative at `x*`. The
/// covariance is `V diag(M) V'` where the columns of `V` are eigenvectors of
/// `a H(x*)`.
pub fn predict_asymptotics<F>(
    schedule: &GainSchedule,
    sigma2: f64,
    hessian: &DMatrix<f64>,
    third: F,
) -> Result<NormalityPrediction>
where
    F: Fn(usize, usize, usize) -> f64,
{
    let GainSchedule {
        a, c, alpha, gamma, ..
    } = *schedule;
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return Err(SpsaError::Argument(format!(
            "sigma2 must be nonnegative, got {sigma2}"
        )));
    }
    if alpha > 1.0 + BOUNDARY_TOL {
        return Err(hypothesis(format!("alpha <= 1 violated: alpha = {alpha}")));
    }
    let beta = alpha - 2.0 * gamma;
    if beta <= 0.0 {
        return Err(hypothesis(format!(
            "beta = alpha - 2 gamma > 0 violated: beta = {beta}"
        )));
    }
    let bias_order = 3.0 * gamma - alpha / 2.0;
    if bias_order < -BOUNDARY_TOL {
        return Err(hypothesis(format!(
            "3 gamma - alpha/2 >= 0 violated: 3 gamma - alpha/2 = {bias_order}"
        )));
    }
    let alpha_is_one = (alpha - 1.0).abs() <= BOUNDARY_TOL;
    let beta_plus = if alpha_is_one { beta } else { 0.0 };

    let n = hessian.nrows();
    if hessian.ncols() != n || n == 0 {
        return Err(SpsaError::Argument(format!(
            "hessian must be square, got {}x{}",
            hessian.nrows(),
            hessian.ncols()
        )));
    }
    let asym = (hessian - hessian.transpose()).amax();
    if asym > 1e-9 * hessian.amax().max(1.0) {
        return Err(SpsaError::Argument(format!(
            "hessian is not symmetric (max gap {asym})"
        )));
    }

    let eig = SymmetricEigen::new(hessian * a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lambda: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = lambda.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if lambda[0] <= 1e-10 * scale {
        return Err(SpsaError::NotApplicable(format!(
            "H(x*) is not positive definite: smallest eigenvalue of aH is {:e}",
            lambda[0]
        )));
    }
    if alpha_is_one && beta >= 2.0 * lambda[0] {
        return Err(hypothesis(format!(
            "beta < 2 min lambda violated: beta = {beta}, 2 min lambda = {}",
            2.0 * lambda[0]
        )));
    }

    let kappa = 0.25 * a * a * sigma2 / (c * c);
    let m_diag: Vec<f64> = lambda
        .iter()
        .map(|l| kappa / (2.0 * l - beta_plus))
        .collect();
    let v = DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    let covariance =
        &v * DMatrix::from_diagonal(&DVector::from_vec(m_diag.clone())) * v.transpose();
    let covariance = (&covariance + covariance.transpose()) * 0.5;

    let t: Vec<f64> = (0..n)
        .map(|l| {
            let cross: f64 = (0..n).filter(|&i| i != l).map(|i| third(i, i, l)).sum();
            -a * c * c * (third(l, l, l) + 3.0 * cross) / 6.0
        })
        .collect();
    let mu = if bias_order.abs() <= BOUNDARY_TOL {
        let shifted = hessian * a - DMatrix::identity(n, n) * (0.5 * beta_plus);
        shifted
            .lu()
            .solve(&DVector::from_vec(t.clone()))
            .ok_or_else(|| SpsaError::NotApplicable("aH - beta+/2 I is singular".into()))?
            .iter()
            .copied()
            .collect()
    } else {
        vec![0.0; n]
    };

    Ok(NormalityPrediction {
        beta,
        beta_plus,
        mu,
        covariance,
        lambda,
        m_diag,
        t,
    })
}

/// [`predict_asymptotics`] with derivatives taken from `problem` at `x_star`.
pub fn predict_for(
    problem: &dyn Objective,
    x_star: &[f64],
    schedule: &GainSchedule,
    sigma2: f64,
) -> Result<NormalityPrediction> {
    check_dim(problem.dim(), x_star)?;
    let missing =
        || SpsaError::NotApplicable(format!("{} has no analytic derivatives", problem.name()));
    let h = problem.hessian(x_star).ok_or_else(missing)?;
    problem.third(x_star, 0, 0, 0).ok_or_else(missing)?;
    predict_asymptotics(schedule, sigma2, &h, |i, j, l| {
        problem.third(x_star, i, j, l).unwrap_or(0.0)
    })
}

/// Scaled final errors of an ensemble and their sample moments.
#[derive(Clone, Debug, Serialize)]
pub struct ScaledErrors {
    /// One row `k^(beta/2)(x_k - x*)` per replication.
    #[serde(serialize_with = "serialize_matrix")]
    pub samples: DMatrix<f64>,
    pub mean: Vec<f64>,
    /// Unbiased sample covariance.
    #[serde(serialize_with = "serialize_matrix")]
    pub covariance: DMatrix<f64>,
    /// Standardized skewness per coordinate; zero for a coordinate with no
    /// spread.
    pub skewness: Vec<f64>,
    pub excess_kurtosis: Vec<f64>,
}

impl ScaledErrors {
    pub fn covariance_trace(&self) -> f64 {
        self.covariance.trace()
    }
}

pub fn empirical_scaled_errors(
    finals: &[Vec<f64>],
    x_star: &[f64],
    beta: f64,
    k: u64,
) -> Result<ScaledErrors> {
    if finals.len() < MIN_REPLICATIONS {
        return Err(SpsaError::InsufficientSamples {
            needed: MIN_REPLICATIONS,
            got: finals.len(),
        });
    }
    let n = x_star.len();
    for x in finals {
        check_dim(n, x)?;
    }
    let r = finals.len();
    let scale = (k as f64).powf(beta / 2.0);
    let samples = DMatrix::from_fn(r, n, |i, j| scale * (finals[i][j] - x_star[j]));
    let mean: Vec<f64> = (0..n).map(|j| samples.column(j).mean()).collect();
    let centered = DMatrix::from_fn(r, n, |i, j| samples[(i, j)] - mean[j]);
    let covariance = centered.transpose() * &centered / (r as f64 - 1.0);

    let mut skewness = Vec::with_capacity(n);
    let mut excess_kurtosis = Vec::with_capacity(n);
    for j in 0..n {
        let col = centered.column(j);
        let m2 = col.iter().map(|v| v * v).sum::<f64>() / r as f64;
        let m3 = col.iter().map(|v| v * v * v).sum::<f64>() / r as f64;
        let m4 = col.iter().map(|v| v.powi(4)).sum::<f64>() / r as f64;
        if m2 > 0.0 {
            skewness.push(m3 / m2.powf(1.5));
            excess_kurtosis.push(m4 / (m2 * m2) - 3.0);
        } else {
            skewness.push(0.0);
            excess_kurtosis.push(0.0);
        }
    }
    Ok(ScaledErrors {
        samples,
        mean,
        covariance,
        skewness,
        excess_kurtosis,
    })
}

/// Final iterates of `replications` independent runs of `template`, each
/// stopped at exactly `template.max_iterations`. Replication `r` uses seed
/// `child_seed(master_seed, algorithm index, r)`.
pub fn simulate_final_iterates(
    problem: &dyn Objective,
    noise: NoiseModel,
    template: &RunConfig,
    replications: usize,
    master_seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let alg_index = Algorithm::ALL
        .iter()
        .position(|a| *a == template.algorithm)
        .unwrap_or(0) as u64;
    (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let seed = child_seed(master_seed, alg_index, rep);
            let mut cfg = template.clone().with_seed(seed);
            cfg.error_threshold = None;
            cfg.replication = rep;
            let mut obj = MeasuredObjective::new(problem, noise, seed);
            let trace = run(&cfg, &mut obj)?;
            Ok(trace.final_x)
        })
        .collect()
}

/// Prediction next to the ensemble it is meant to describe.
#[derive(Clone, Debug, Serialize)]
pub struct NormalityReport {
    pub prediction: NormalityPrediction,
    pub empirical: ScaledErrors,
    pub iterations: u64,
    pub predicted_trace: f64,
    pub empirical_trace: f64,
    /// `empirical_trace / predicted_trace - 1`.
    pub relative_trace_gap: f64,
}

/// Predicts, simulates and compares in one go. The problem's optimum is
/// `x_star` and the run uses SPSA1-A unless `template` says otherwise.
pub fn normality_report(
    problem: &dyn Objective,
    x_star: &[f64],
    noise: NoiseModel,
    template: &RunConfig,
    replications: usize,
    master_seed: u64,
) -> Result<NormalityReport> {
    let prediction = predict_for(problem, x_star, &template.schedule, sigma2_of_noise(&noise))?;
    if replications < MIN_REPLICATIONS {
        return Err(SpsaError::InsufficientSamples {
            needed: MIN_REPLICATIONS,
            got: replications,
        });
    }
    let finals = simulate_final_iterates(problem, noise, template, replications, master_seed)?;
    let k = template.max_iterations;
    let empirical = empirical_scaled_errors(&finals, x_star, prediction.beta, k)?;
    let predicted_trace = prediction.covariance_trace();
    let empirical_trace = empirical.covariance_trace();
    Ok(NormalityReport {
        iterations: k,
        predicted_trace,
        empirical_trace,
        relative_trace_gap: empirical_trace / predicted_trace - 1.0,
        prediction,
        empirical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::BenchmarkProblem;

    fn schedule(a: f64, c: f64, alpha: f64, gamma: f64) -> GainSchedule {
        GainSchedule::new(a, 0.0, c, alpha, gamma).unwrap()
    }

    #[test]
    fn identity_hessian_hand_value() {
        let p = predict_asymptotics(
            &schedule(1.0, 1.0, 1.0, 1.0 / 6.0),
            1.0,
            &DMatrix::identity(3, 3),
            |_, _, _| 0.0,
        )
        .unwrap();
        assert!((p.beta - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.beta, p.beta_plus);
        for m in &p.m_diag {
            assert!((m - 3.0 / 16.0).abs() < 1e-14);
        }
        assert!((p.covariance_trace() - 9.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn quartic_bias_term() {
        let q = BenchmarkProblem::Quartic;
        let s = schedule(0.5, 0.2, 1.0, 1.0 / 6.0);
        let p = predict_for(&q, &[0.0; 5], &s, 2e-4).unwrap();
        for (t, mu) in p.t.iter().zip(&p.mu) {
            assert!((t + 0.1 * 0.5 * 0.04).abs() < 1e-15);
            // aH = I, beta+ = 2/3
            assert!((mu - t / (1.0 - 1.0 / 3.0)).abs() < 1e-15);
        }
        let off = schedule(0.5, 0.2, 1.0, 0.2);
        assert!(predict_for(&q, &[0.0; 5], &off, 2e-4)
            .unwrap()
            .mu
            .iter()
            .all(|m| *m == 0.0));
    }

    #[test]
    fn alpha_below_one_has_no_shift() {
        let p = predict_asymptotics(
            &schedule(1.0, 1.0, 0.9, 0.15),
            1.0,
            &DMatrix::identity(2, 2),
            |_, _, _| 0.0,
        )
        .unwrap();
        assert_eq!(p.beta_plus, 0.0);
        assert!((p.m_diag[0] - 0.125).abs() < 1e-15);
    }

    #[test]
    fn refusals_name_the_inequality() {
        let h = DMatrix::identity(2, 2);
        let z = |_: usize, _: usize, _: usize| 0.0;
        let msg = |r: Result<NormalityPrediction>| match r {
            Err(SpsaError::Hypothesis(m)) => m,
            other => panic!("{other:?}"),
        };
        assert!(msg(predict_asymptotics(
            &schedule(1.0, 1.0, 0.4, 0.2),
            1.0,
            &h,
            z
        ))
        .contains("beta"));
        assert!(msg(predict_asymptotics(
            &schedule(1.0, 1.0, 1.0, 0.1),
            1.0,
            &h,
            z
        ))
        .contains("3 gamma"));
        assert!(msg(predict_asymptotics(
            &schedule(0.2, 1.0, 1.0, 1.0 / 6.0),
            1.0,
            &h,
            z
        ))
        .contains("min lambda"));
        assert!(msg(predict_asymptotics(
            &schedule(1.0, 1.0, 1.2, 0.2),
            1.0,
            &h,
            z
        ))
        .contains("alpha <= 1"));
        let indefinite = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            predict_asymptotics(&schedule(1.0, 1.0, 1.0, 1.0 / 6.0), 1.0, &indefinite, z),
            Err(SpsaError::NotApplicable(_))
        ));
    }

    #[test]
    fn powell_singular_is_refused() {
        let p = BenchmarkProblem::PowellSingular;
        let r = predict_for(&p, &[0.0; 4], &schedule(1.0, 0.1, 1.0, 1.0 / 6.0), 1.0);
        assert!(matches!(r, Err(SpsaError::NotApplicable(_))), "{r:?}");
    }

    #[test]
    fn sigma2_values() {
        assert_eq!(sigma2_of_noise(&NoiseModel::NONE), 0.0);
        assert_eq!(sigma2_of_noise(&NoiseModel::gaussian(0.0).unwrap()), 0.0);
        assert!((sigma2_of_noise(&NoiseModel::gaussian(0.01).unwrap()) - 2e-4).abs() < 1e-18);
    }

    #[test]
    fn scaled_errors_trivia() {
        let finals = vec![vec![1.0, 2.0]; 40];
        let e = empirical_scaled_errors(&finals, &[1.0, 2.0], 1.0, 100).unwrap();
        assert!(e.samples.iter().all(|v| *v == 0.0));
        assert_eq!(e.skewness, vec![0.0, 0.0]);

        let finals: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 * 0.01]).collect();
        let a = empirical_scaled_errors(&finals, &[0.0], 1.0, 100).unwrap();
        let b = empirical_scaled_errors(&finals, &[0.0], 1.0, 200).unwrap();
        for (x, y) in a.samples.iter().zip(b.samples.iter()) {
            assert!((y - x * 2f64.sqrt()).abs() < 1e-12);
        }
        // evenly spaced values are symmetric
        assert!(a.skewness[0].abs() < 1e-12);

        assert!(matches!(
            empirical_scaled_errors(&finals[..29], &[0.0], 1.0, 100),
            Err(SpsaError::InsufficientSamples {
                needed: 30,
                got: 29
            })
        ));
    }
}
