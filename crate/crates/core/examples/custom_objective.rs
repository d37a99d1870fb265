// Minimizing a user-supplied function with SPSA1-A and reading the trace.

use spsa::{
    run, Algorithm, FnObjective, GainSchedule, MeasuredObjective, NoiseModel, Point, RunConfig,
};

pub fn run_example() -> spsa::Result<()> {
    // shifted, badly scaled quadratic with its minimum at (1, -2)
    let f = FnObjective::new("shifted", 2, |x: &[f64]| {
        (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2)
    });
    let mut obj = MeasuredObjective::new(&f, NoiseModel::gaussian(0.001)?, 5);
    let schedule = GainSchedule::new(0.05, 50.0, 0.1, 0.602, 0.101)?;
    let config = RunConfig::new(
        Algorithm::Spsa1a,
        schedule,
        Point::new(vec![4.0, 3.0])?,
        3000,
    )
    .with_seed(5)
    .with_threshold(1e-3);
    let trace = run(&config, &mut obj)?;
    let last = trace.last().expect("k = 0 is always recorded");
    println!(
        "{:?} after {} iterations and {} measurements: x = {:.4?}, error {:.2e}",
        trace.termination, last.iteration, last.measurements, trace.final_x, last.error
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
