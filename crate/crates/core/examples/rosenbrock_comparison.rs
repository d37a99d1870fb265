// SPSA against SPSA1-A on the Rosenbrock function with the T1 gains:
// measurements needed to bring f below 0.01, and the mean error curve.

use spsa::bench::{preset, TableId};
use spsa::harness::{run_experiment, AlgorithmSetup, ExperimentConfig};
use spsa::{Algorithm, GainMode, NoiseModel};

pub fn run_example() -> spsa::Result<()> {
    let replications = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(10);
    let p = preset(TableId::T1);
    let setup = |algorithm, mode| AlgorithmSetup {
        algorithm,
        schedule: p.schedule().with_mode(mode),
        preset: Some(TableId::T1),
    };
    let config = ExperimentConfig {
        problem: p.problem,
        algorithms: vec![
            setup(Algorithm::Spsa, GainMode::Standard),
            setup(Algorithm::Spsa1a, GainMode::RhoAdaptive),
        ],
        noise: NoiseModel::gaussian(0.01)?,
        x0: p.problem.default_x0(),
        max_iterations: p.max_iterations,
        thresholds: vec![0.01],
        replications,
        master_seed: 1,
        workers: None,
        spsa1_divisor: Default::default(),
        out_dir: None,
    };
    let summary = run_experiment(&config)?;
    for a in &summary.algorithms {
        let r = summary
            .result(a.setup.algorithm, 0.01)
            .expect("one threshold");
        println!(
            "{:<8} reached f < 0.01 in {:.0}% of runs, mean {} measurements",
            a.setup.algorithm.label(),
            100.0 * r.reached_fraction,
            r.mean_measurements
                .map_or("--".into(), |m| format!("{m:.0}"))
        );
        let rows = &a.curve.rows;
        for i in (0..rows.len()).step_by((rows.len() / 5).max(1)) {
            println!(
                "    {:>6} measurements: mean error {:.4e}",
                rows[i].measurements, rows[i].mean_error
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
