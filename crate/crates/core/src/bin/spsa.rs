use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spsa::bench::{preset, BenchmarkProblem, TableId};
use spsa::harness::{render_table, run_experiment, AlgorithmSetup, ExperimentConfig};
use spsa::oracles::{bias_scan, verify_rho};
use spsa::theory::normality_report;
use spsa::{
    Algorithm, GainMode, GainSchedule, NoiseModel, Objective, Point, Result, RunConfig, SpsaError,
};

#[derive(Parser)]
#[command(
    name = "spsa",
    version,
    about = "Simultaneous perturbation stochastic approximation experiments"
)]
struct Cli {
    /// Experiment config file (key = value lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overrides the config
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for traces, curves and summaries
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of replications, overrides the config
    #[arg(long, global = true)]
    replications: Option<usize>,
    /// Print nothing on success
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from --config
    Run,
    /// Compare algorithms on a config or a gain preset
    Compare(CompareArgs),
    /// Check the closed-form rho against enumeration
    VerifyRho {
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
    /// Estimate the bias of the averaged direction for several c
    BiasScan(BiasArgs),
    /// Predict the limiting distribution and compare with simulation
    Normality(NormalityArgs),
}

#[derive(Args)]
struct CompareArgs {
    /// Preset table id, used when no --config is given
    #[arg(long)]
    preset: Option<TableId>,
    #[arg(long, default_value_t = 0.01)]
    noise_sigma: f64,
    /// Comma-separated thresholds, strictly decreasing
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3")]
    thresholds: Vec<f64>,
    #[arg(long)]
    max_iterations: Option<u64>,
}

#[derive(Args)]
struct BiasArgs {
    #[arg(long, default_value = "quartic")]
    problem: BenchmarkProblem,
    /// Evaluation point; defaults to the problem's starting point
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    #[arg(long = "c", value_delimiter = ',', default_value = "0.4,0.2,0.1,0.05")]
    c_values: Vec<f64>,
}

#[derive(Args)]
struct NormalityArgs {
    #[arg(long, default_value = "quartic")]
    problem: BenchmarkProblem,
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long = "big-a", default_value_t = 20.0)]
    big_a: f64,
    #[arg(long, default_value_t = 0.01)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Defaults to 1/6
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    noise_sigma: f64,
    #[arg(long, default_value_t = 10_000)]
    iterations: u64,
    #[arg(long, default_value = "standard")]
    gain_mode: GainMode,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| SpsaError::Configuration("--config is required".into()))?;
    let config = ExperimentConfig::from_file(path)?;
    overrides(cli, config)
}

fn overrides(cli: &Cli, mut config: ExperimentConfig) -> Result<ExperimentConfig> {
    if let Some(s) = cli.seed {
        config.master_seed = s;
    }
    if let Some(r) = cli.replications {
        config.replications = r;
    }
    config.out_dir = cli.out.clone();
    config.validate()?;
    Ok(config)
}

fn preset_config(cli: &Cli, args: &CompareArgs) -> Result<ExperimentConfig> {
    let table = args
        .preset
        .ok_or_else(|| SpsaError::Configuration("compare needs --config or --preset".into()))?;
    let p = preset(table);
    let config = ExperimentConfig {
        problem: p.problem,
        algorithms: p
            .algorithms
            .iter()
            .map(|&algorithm| AlgorithmSetup {
                algorithm,
                schedule: p.schedule().with_mode(if algorithm == Algorithm::Spsa1a {
                    GainMode::RhoAdaptive
                } else {
                    GainMode::Standard
                }),
                preset: Some(table),
            })
            .collect(),
        noise: NoiseModel::gaussian(args.noise_sigma)?,
        x0: p.problem.default_x0(),
        max_iterations: args.max_iterations.unwrap_or(p.max_iterations),
        thresholds: args.thresholds.clone(),
        replications: 50,
        master_seed: 0,
        workers: None,
        spsa1_divisor: Default::default(),
        out_dir: None,
    };
    overrides(cli, config)
}

fn say(cli: &Cli, text: impl AsRef<str>) {
    if !cli.quiet {
        print!("{}", text.as_ref());
    }
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run => {
            let config = load_config(cli)?;
            let summary = run_experiment(&config)?;
            say(cli, render_table(&summary));
        }
        Command::Compare(args) => {
            let config = match cli.config {
                Some(_) => load_config(cli)?,
                None => preset_config(cli, args)?,
            };
            let summary = run_experiment(&config)?;
            say(
                cli,
                format!(
                    "{} ({} replications)\n",
                    config.problem, config.replications
                ),
            );
            say(cli, render_table(&summary));
        }
        Command::VerifyRho { max_n } => {
            let rows = verify_rho(*max_n)?;
            let mut text = format!(
                "{:>3} {:>14} {:>14} {:>8} {:>8} {:>8} {:>8}  match\n",
                "n", "closed form", "enumeration", "|D|", "formula", "sum", "formula"
            );
            for r in &rows {
                text.push_str(&format!(
                    "{:>3} {:>14} {:>14} {:>8} {:>8} {:>8} {:>8}  {}\n",
                    r.n,
                    r.closed_form,
                    r.brute_force,
                    r.cardinality,
                    r.cardinality_formula,
                    r.signed_sum,
                    r.signed_sum_formula,
                    if r.matches { "yes" } else { "NO" }
                ));
            }
            say(cli, text);
            if let Some(r) = rows.iter().find(|r| !r.matches) {
                return Err(SpsaError::Configuration(format!(
                    "rho mismatch at n = {}",
                    r.n
                )));
            }
        }
        Command::BiasScan(args) => {
            let problem = args.problem;
            let x = match &args.x {
                Some(v) => Point::new(v.clone())?,
                None => problem.default_x0(),
            };
            let reps = cli.replications.unwrap_or(1_000_000);
            let scan = bias_scan(&problem, &x, &args.c_values, reps, cli.seed.unwrap_or(0))?;
            let mut text = format!("{problem} at {x}, {reps} draws per c\n");
            text.push_str(&format!(
                "{:>8} {:>12} {:>12} {:>12}\n",
                "c", "|bias|", "std err", "raw |bias|"
            ));
            for r in &scan.rows {
                let raw = r.raw_bias.iter().map(|v| v * v).sum::<f64>().sqrt();
                text.push_str(&format!(
                    "{:>8} {:>12.4e} {:>12.4e} {:>12.4e}\n",
                    r.c, r.bias_norm, r.norm_std_err, raw
                ));
            }
            match scan.slope {
                Some(s) => text.push_str(&format!("log-log slope {s:.3}\n")),
                None => text.push_str("log-log slope undefined\n"),
            }
            say(cli, text);
            if let Some(dir) = &cli.out {
                write_json(dir, "bias_scan.json", &scan)?;
            }
        }
        Command::Normality(args) => {
            let gamma = args.gamma.unwrap_or(1.0 / 6.0);
            let schedule = GainSchedule::new(args.a, args.big_a, args.c, args.alpha, gamma)?
                .with_mode(args.gain_mode);
            let problem = args.problem;
            let template = RunConfig::new(
                Algorithm::Spsa1a,
                schedule,
                problem.default_x0(),
                args.iterations,
            );
            let reps = cli.replications.unwrap_or(200);
            let noise = NoiseModel::gaussian(args.noise_sigma)?;
            let report = normality_report(
                &problem,
                &problem.x_star(),
                noise,
                &template,
                reps,
                cli.seed.unwrap_or(0),
            )?;
            let p = &report.prediction;
            let mut text = format!(
                "{} with {}, {reps} replications to k = {}\n",
                problem.name(),
                schedule_text(&schedule),
                args.iterations
            );
            text.push_str(&format!(
                "beta = {:.6}, beta+ = {:.6}\n",
                p.beta, p.beta_plus
            ));
            text.push_str(&format!("lambda(aH) = {:?}\n", p.lambda));
            text.push_str(&format!("predicted mean = {:?}\n", p.mu));
            text.push_str(&format!("empirical mean = {:?}\n", report.empirical.mean));
            text.push_str(&format!(
                "covariance trace: predicted {:.4}, empirical {:.4} ({:+.1}%)\n",
                report.predicted_trace,
                report.empirical_trace,
                100.0 * report.relative_trace_gap
            ));
            text.push_str(&format!("skewness = {:?}\n", report.empirical.skewness));
            text.push_str(&format!(
                "excess kurtosis = {:?}\n",
                report.empirical.excess_kurtosis
            ));
            say(cli, text);
            if let Some(dir) = &cli.out {
                write_json(dir, "normality.json", &report)?;
            }
        }
    }
    Ok(())
}

fn schedule_text(s: &GainSchedule) -> String {
    format!(
        "a={} A={} c={} alpha={} gamma={:.5} ({})",
        s.a, s.big_a, s.c, s.alpha, s.gamma, s.mode
    )
}

fn write_json<T: serde::Serialize>(dir: &std::path::Path, name: &str, value: &T) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| SpsaError::io(dir, e))?;
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| SpsaError::Configuration(format!("cannot serialize: {e}")))?;
    std::fs::write(&path, text + "\n").map_err(|e| SpsaError::io(&path, e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
