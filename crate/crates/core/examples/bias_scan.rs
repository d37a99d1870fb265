// Bias of the averaged SPSA1-A direction on the quartic shrinks like c^2,
// and vanishes on a quadratic.

use spsa::bench::{BenchmarkProblem, Sphere};
use spsa::oracles::bias_scan;
use spsa::Objective;

pub fn run_example() -> spsa::Result<()> {
    let draws = 100_000;
    let c_values = [0.4, 0.2, 0.1, 0.05];

    let quartic = BenchmarkProblem::Quartic;
    let x = quartic.default_x0();
    let scan = bias_scan(&quartic, &x, &c_values, draws, 11)?;
    println!("{}: {draws} draws per c", quartic.name());
    for r in &scan.rows {
        println!(
            "  c = {:<5} |bias| = {:.3e} +- {:.1e}",
            r.c, r.bias_norm, r.norm_std_err
        );
    }
    println!("  slope {:.3}", scan.slope.unwrap_or(f64::NAN));

    let sphere = Sphere { n: 3 };
    let scan = bias_scan(&sphere, &[1.0, -2.0, 0.5], &c_values, draws, 11)?;
    println!("{}:", sphere.name());
    for r in &scan.rows {
        println!(
            "  c = {:<5} |bias| = {:.3e} +- {:.1e}",
            r.c, r.bias_norm, r.norm_std_err
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
