// Sampling a sign vector uniformly from the descent side of an estimate and
// checking that its mean is rho_k times the estimate.

use spsa::estimators::sample_perturbation;
use spsa::spsa1a::{descent_side_accepts, rho_constant, rho_k, sample_descent_side};
use spsa::RandomSource;

pub fn run_example() -> spsa::Result<()> {
    let draws = 200_000;
    let mut rng = RandomSource::new(7);
    for n in [2usize, 3, 5] {
        let xi = sample_perturbation(n, &mut rng)?;
        let g: Vec<f64> = xi.to_vec().iter().map(|s| 1.5 * s).collect();
        let rho = rho_constant(n)?;
        let expected: Vec<f64> = g.iter().map(|v| rho_k(&rho, &g) * v).collect();

        let mut sum = vec![0.0; n];
        for _ in 0..draws {
            let d = sample_descent_side(&g, &mut rng)?;
            assert!(descent_side_accepts(&d, &g));
            for (s, v) in sum.iter_mut().zip(d.to_vec()) {
                *s += v;
            }
        }
        let mean: Vec<String> = sum
            .iter()
            .map(|s| format!("{:+.4}", s / draws as f64))
            .collect();
        let want: Vec<String> = expected.iter().map(|v| format!("{v:+.4}")).collect();
        println!(
            "n = {n}: mean [{}], rho_k g [{}]",
            mean.join(", "),
            want.join(", ")
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
