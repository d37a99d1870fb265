// One gradient estimate from each estimator at the same point, with the
// measurements it cost.

use spsa::bench::BenchmarkProblem;
use spsa::estimators::{
    fdsa_gradient, rdsa_gradient, sample_perturbation, spsa1_gradient, spsa_gradient, DirectionLaw,
    Spsa1Divisor,
};
use spsa::{MeasuredObjective, NoiseModel, Objective, RandomSource};

fn show(name: &str, g: &[f64], used: u64) {
    let g: Vec<String> = g.iter().map(|v| format!("{v:+9.3}")).collect();
    println!("{name:<6} [{}]  {used} measurement(s)", g.join(" "));
}

pub fn run_example() -> spsa::Result<()> {
    let problem = BenchmarkProblem::Rosenbrock;
    let x = problem.default_x0();
    let mut obj = MeasuredObjective::new(&problem, NoiseModel::gaussian(0.01)?, 3);
    let mut rng = RandomSource::new(3);
    let c = 0.05;

    show("exact", &problem.gradient(&x).expect("analytic"), 0);
    let xi = sample_perturbation(2, &mut rng)?;
    let e = spsa_gradient(&mut obj, &x, c, &xi)?;
    show("SPSA", &e.g_hat, e.measurements_used);
    let e = spsa1_gradient(&mut obj, &x, c, &xi, Spsa1Divisor::TwoC)?;
    show("SPSA1", &e.g_hat, e.measurements_used);
    let e = fdsa_gradient(&mut obj, &x, c)?;
    show("FDSA", &e.g_hat, e.measurements_used);
    let d = DirectionLaw::Gaussian.sample(2, &mut rng)?;
    let e = rdsa_gradient(&mut obj, &x, c, &d)?;
    show("RDSA", &e.g_hat, e.measurements_used);

    // SPSA is unbiased up to O(c^2); averaging many estimates shows it
    let mut mean = [0.0; 2];
    let reps = 20_000;
    for _ in 0..reps {
        let xi = sample_perturbation(2, &mut rng)?;
        let e = spsa_gradient(&mut obj, &x, c, &xi)?;
        mean[0] += e.g_hat[0] / reps as f64;
        mean[1] += e.g_hat[1] / reps as f64;
    }
    show("mean", &mean, obj.measurements());
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
