//! Seeded multi-replication experiments, their persisted traces and summary
//! tables.
//!
//! Replication `r` of the `i`-th configured algorithm runs with seed
//! `child_seed(master_seed, i, r)`, so the whole summary is a function of the
//! config alone. Replications run in parallel; every reduction happens
//! afterwards in replication order.

pub mod config;
mod output;

use std::fmt;
use std::path::Path;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

pub use config::{AlgorithmSetup, ConfigEcho, ExperimentConfig};
pub use output::{
    prepare_output_dir, read_trace_csv, render_table, trace_file_name, write_curve_csv,
    write_summary_json, write_trace_csv, CURVE_HEADER, TRACE_HEADER,
};

use crate::error::{Result, SpsaError};
use crate::objective::MeasuredObjective;
use crate::seed::child_seed;
use crate::spsa1a::{run, Algorithm, RunConfig};
use crate::trace::{IterateTrace, Termination};

/// Measurements needed to reach a threshold, or the limit marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Reached {
    At(u64),
    /// Never reached before the run ended; rendered as `--`.
    Limit,
}

impl Reached {
    pub fn count(self) -> Option<u64> {
        match self {
            Reached::At(m) => Some(m),
            Reached::Limit => None,
        }
    }
}

impl fmt::Display for Reached {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reached::At(m) => write!(f, "{m}"),
            Reached::Limit => f.write_str("--"),
        }
    }
}

pub fn measurements_to_threshold(trace: &IterateTrace, threshold: f64) -> Reached {
    trace
        .measurements_to_threshold(threshold)
        .map_or(Reached::Limit, Reached::At)
}

/// Median with the limit marker ordered above every count. An even-sized
/// sample whose middle pair contains the marker has the marker as median.
pub fn median_reached(values: &[Reached]) -> Reached {
    if values.is_empty() {
        return Reached::Limit;
    }
    let mut v = values.to_vec();
    v.sort();
    let n = v.len();
    if n % 2 == 1 {
        return v[n / 2];
    }
    match (v[n / 2 - 1], v[n / 2]) {
        (Reached::At(a), Reached::At(b)) => Reached::At((a + b) / 2),
        _ => Reached::Limit,
    }
}

fn median_value(values: &[Reached]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort();
    let n = v.len();
    if n == 0 {
        return None;
    }
    if n % 2 == 1 {
        return v[n / 2].count().map(|m| m as f64);
    }
    Some((v[n / 2 - 1].count()? as f64 + v[n / 2].count()? as f64) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplicationOutcome {
    pub replication: u64,
    pub seed: u64,
    pub iterations: u64,
    pub measurements: u64,
    pub final_error: f64,
    pub termination: Termination,
    /// One entry per configured threshold.
    #[serde(skip)]
    pub reached: Vec<Reached>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveRow {
    pub measurements: u64,
    pub mean_error: f64,
    pub median_error: f64,
    pub stderr: f64,
}

/// Per-iteration error statistics across non-diverged replications. A run
/// that stopped at its threshold contributes its last error to later rows.
#[derive(Clone, Debug, PartialEq)]
pub struct MeanCurve {
    pub algorithm: Algorithm,
    pub rows: Vec<CurveRow>,
}

fn serialize_opt<S: Serializer>(v: &Option<f64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_f64(*x),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub algorithm: Algorithm,
    pub threshold: f64,
    /// Mean over the replications that reached the threshold.
    #[serde(serialize_with = "serialize_opt")]
    pub mean_measurements: Option<f64>,
    /// Median over all replications, unreached ones counting as infinite;
    /// `null` when that median is the limit marker.
    #[serde(serialize_with = "serialize_opt")]
    pub median_measurements: Option<f64>,
    pub reached_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct AlgorithmResult {
    pub setup: AlgorithmSetup,
    pub replications: Vec<ReplicationOutcome>,
    pub curve: MeanCurve,
}

impl AlgorithmResult {
    pub fn reached(&self, threshold_index: usize) -> Vec<Reached> {
        self.replications
            .iter()
            .map(|r| r.reached[threshold_index])
            .collect()
    }

    pub fn diverged(&self) -> usize {
        self.replications
            .iter()
            .filter(|r| r.termination == Termination::Diverged)
            .count()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonSummary {
    pub config_echo: ConfigEcho,
    pub results: Vec<ThresholdResult>,
    pub seed: u64,
    #[serde(skip)]
    pub algorithms: Vec<AlgorithmResult>,
}

impl ComparisonSummary {
    pub fn algorithm(&self, algorithm: Algorithm) -> Option<&AlgorithmResult> {
        self.algorithms
            .iter()
            .find(|a| a.setup.algorithm == algorithm)
    }

    pub fn result(&self, algorithm: Algorithm, threshold: f64) -> Option<&ThresholdResult> {
        self.results
            .iter()
            .find(|r| r.algorithm == algorithm && r.threshold == threshold)
    }
}

struct RepRun {
    outcome: ReplicationOutcome,
    errors: Vec<f64>,
}

fn run_replication(config: &ExperimentConfig, index: usize, rep: u64) -> Result<RepRun> {
    let setup = &config.algorithms[index];
    let seed = child_seed(config.master_seed, index as u64, rep);
    let mut run_cfg = RunConfig::new(
        setup.algorithm,
        setup.schedule,
        config.x0.clone(),
        config.max_iterations,
    )
    .with_seed(seed);
    run_cfg.replication = rep;
    run_cfg.spsa1_divisor = config.spsa1_divisor;
    run_cfg.error_threshold = config.thresholds.last().copied();
    let mut obj = MeasuredObjective::new(&config.problem, config.noise, seed);
    let trace = match run(&run_cfg, &mut obj) {
        Ok(t) => t,
        Err(SpsaError::Divergence { trace, .. }) => *trace,
        Err(e) => return Err(e),
    };
    if let Some(dir) = &config.out_dir {
        write_trace_csv(&dir.join(trace_file_name(setup.algorithm, rep)), &trace)?;
    }
    let last = trace.last().copied();
    Ok(RepRun {
        outcome: ReplicationOutcome {
            replication: rep,
            seed,
            iterations: trace.iterations(),
            measurements: last.map_or(0, |r| r.measurements),
            final_error: last.map_or(f64::NAN, |r| r.error),
            termination: trace.termination,
            reached: config
                .thresholds
                .iter()
                .map(|t| measurements_to_threshold(&trace, *t))
                .collect(),
        },
        errors: trace.records.iter().map(|r| r.error).collect(),
    })
}

fn mean_curve(algorithm: Algorithm, cost: u64, runs: &[RepRun]) -> MeanCurve {
    let kept: Vec<&[f64]> = runs
        .iter()
        .filter(|r| r.outcome.termination != Termination::Diverged && !r.errors.is_empty())
        .map(|r| r.errors.as_slice())
        .collect();
    let len = kept.iter().map(|e| e.len()).max().unwrap_or(0);
    let mut rows = Vec::with_capacity(len);
    let mut column = Vec::with_capacity(kept.len());
    for k in 0..len {
        column.clear();
        column.extend(kept.iter().map(|e| e[k.min(e.len() - 1)]));
        let n = column.len() as f64;
        let mean = column.iter().sum::<f64>() / n;
        let stderr = if column.len() > 1 {
            let var = column.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            0.0
        };
        column.sort_by(f64::total_cmp);
        let mid = column.len() / 2;
        let median = if column.len() % 2 == 1 {
            column[mid]
        } else {
            (column[mid - 1] + column[mid]) / 2.0
        };
        rows.push(CurveRow {
            measurements: k as u64 * cost,
            mean_error: mean,
            median_error: median,
            stderr,
        });
    }
    MeanCurve { algorithm, rows }
}

/// Runs every configured algorithm for every replication.
///
/// With `config.out_dir` set, the directory is checked for writability
/// before anything runs, and receives one trace CSV per replication, one
/// mean-curve CSV per algorithm and `summary.json`. A diverging replication
/// keeps its partial trace and does not stop the others.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ComparisonSummary> {
    config.validate()?;
    if let Some(dir) = &config.out_dir {
        prepare_output_dir(dir)?;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = config.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| SpsaError::Configuration(format!("cannot start worker pool: {e}")))?;

    let n = config.problem.n();
    let mut algorithms = Vec::with_capacity(config.algorithms.len());
    let mut results = Vec::new();
    for (index, setup) in config.algorithms.iter().enumerate() {
        let runs: Vec<RepRun> = pool.install(|| {
            (0..config.replications as u64)
                .into_par_iter()
                .map(|rep| run_replication(config, index, rep))
                .collect::<Result<Vec<_>>>()
        })?;
        let curve = mean_curve(
            setup.algorithm,
            setup.algorithm.cost_per_iteration(n),
            &runs,
        );
        let replications: Vec<ReplicationOutcome> = runs.into_iter().map(|r| r.outcome).collect();
        let result = AlgorithmResult {
            setup: *setup,
            replications,
            curve,
        };
        for (ti, &threshold) in config.thresholds.iter().enumerate() {
            let reached = result.reached(ti);
            let hits: Vec<u64> = reached.iter().filter_map(|r| r.count()).collect();
            results.push(ThresholdResult {
                algorithm: setup.algorithm,
                threshold,
                mean_measurements: (!hits.is_empty())
                    .then(|| hits.iter().map(|&m| m as f64).sum::<f64>() / hits.len() as f64),
                median_measurements: median_value(&reached),
                reached_fraction: hits.len() as f64 / reached.len() as f64,
            });
        }
        algorithms.push(result);
    }

    let summary = ComparisonSummary {
        config_echo: config.echo(),
        results,
        seed: config.master_seed,
        algorithms,
    };
    if let Some(dir) = &config.out_dir {
        for a in &summary.algorithms {
            write_curve_csv(
                &dir.join(format!("curve_{}.csv", a.setup.algorithm.id())),
                &a.curve,
            )?;
        }
        write_summary_json(&dir.join("summary.json"), &summary)?;
    }
    Ok(summary)
}

/// Runs `config` with its output directory replaced by `dir`.
pub fn run_experiment_into(config: &ExperimentConfig, dir: &Path) -> Result<ComparisonSummary> {
    let mut c = config.clone();
    c.out_dir = Some(dir.to_path_buf());
    run_experiment(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::TraceRecord;

    #[test]
    fn threshold_markers() {
        let mut t = IterateTrace::new(0);
        t.records.push(TraceRecord {
            iteration: 0,
            measurements: 0,
            error: 0.0,
        });
        assert_eq!(measurements_to_threshold(&t, 0.01), Reached::At(0));
        t.records[0].error = 1.0;
        assert_eq!(measurements_to_threshold(&t, 0.01), Reached::Limit);
        assert_eq!(Reached::Limit.to_string(), "--");
    }

    #[test]
    fn medians_treat_marker_as_infinite() {
        use Reached::*;
        assert_eq!(median_reached(&[At(5), Limit, At(1)]), At(5));
        assert_eq!(median_reached(&[Limit, Limit, At(1)]), Limit);
        assert_eq!(median_reached(&[At(2), At(4), Limit, Limit]), Limit);
        assert_eq!(median_reached(&[At(2), At(4), At(6), Limit]), At(5));
        assert_eq!(median_value(&[At(2), At(5), At(6), Limit]), Some(5.5));
        assert_eq!(median_value(&[At(2), Limit]), None);
    }
}
