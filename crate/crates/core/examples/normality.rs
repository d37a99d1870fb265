// Predicted limiting covariance of the scaled SPSA1-A error on the quartic
// against a simulated ensemble, and the refusal on a singular Hessian.

use spsa::bench::BenchmarkProblem;
use spsa::theory::{normality_report, predict_for, sigma2_of_noise};
use spsa::{Algorithm, GainMode, GainSchedule, NoiseModel, RunConfig};

pub fn run_example() -> spsa::Result<()> {
    let quartic = BenchmarkProblem::Quartic;
    let schedule =
        GainSchedule::new(0.5, 20.0, 0.01, 1.0, 1.0 / 6.0)?.with_mode(GainMode::Standard);
    let noise = NoiseModel::gaussian(0.1)?;
    let template = RunConfig::new(Algorithm::Spsa1a, schedule, quartic.default_x0(), 3_000);
    let report = normality_report(&quartic, &[0.0; 5], noise, &template, 60, 9)?;

    let p = &report.prediction;
    println!("beta = {:.4}, eigenvalues of aH = {:?}", p.beta, p.lambda);
    println!("predicted mean {:.3e} per coordinate", p.mu[0]);
    println!(
        "covariance trace: predicted {:.2}, simulated {:.2} at k = {}",
        report.predicted_trace, report.empirical_trace, report.iterations
    );
    let skew: Vec<String> = report
        .empirical
        .skewness
        .iter()
        .map(|s| format!("{s:+.2}"))
        .collect();
    println!("skewness [{}]", skew.join(", "));

    let powell = BenchmarkProblem::PowellSingular;
    match predict_for(&powell, &[0.0; 4], &schedule, sigma2_of_noise(&noise)) {
        Err(e) => println!("powell singular: {e}"),
        Ok(_) => unreachable!("the Powell Hessian is singular at the optimum"),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
