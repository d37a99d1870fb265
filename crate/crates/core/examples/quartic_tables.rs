// Measurements to reach 1e-2 and 1e-3 on the quartic for SPSA, SPSA1 and
// SPSA1-A with the T4 and T5 gains.
//
// The default is a small run; pass `full` for 50 replications and the
// reference iteration cap of 1e5.

use spsa::bench::{preset, TableId};
use spsa::harness::{render_table, run_experiment, AlgorithmSetup, ExperimentConfig};
use spsa::{Algorithm, GainMode, NoiseModel};

pub fn run_example() -> spsa::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let (replications, cap) = if full { (50, 100_000) } else { (5, 20_000) };
    for table in [TableId::T4, TableId::T5] {
        let p = preset(table);
        let config = ExperimentConfig {
            problem: p.problem,
            algorithms: p
                .algorithms
                .iter()
                .map(|&algorithm| AlgorithmSetup {
                    algorithm,
                    schedule: p.schedule().with_mode(match algorithm {
                        Algorithm::Spsa1a => GainMode::RhoAdaptive,
                        _ => GainMode::Standard,
                    }),
                    preset: Some(table),
                })
                .collect(),
            noise: NoiseModel::gaussian(0.01)?,
            x0: p.problem.default_x0(),
            max_iterations: cap,
            thresholds: vec![1e-2, 1e-3],
            replications,
            master_seed: 4,
            workers: None,
            spsa1_divisor: Default::default(),
            out_dir: None,
        };
        println!(
            "{table}: a = {}, A = {}, c = {}, M = {cap}, {replications} runs",
            p.a, p.big_a, p.c
        );
        print!("{}", render_table(&run_experiment(&config)?));
        println!();
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> spsa::Result<()> {
    run_example()
}
