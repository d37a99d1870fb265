//! Experiment configuration files.
//!
//! One `key = value` pair per line; `#` starts a comment. Lists are comma
//! separated. Example:
//!
//! ```text
//! problem = quartic
//! algorithms = spsa, spsa1, spsa1a
//! preset = T4
//! noise_sigma = 0.01
//! thresholds = 1e-2, 1e-3
//! replications = 50
//! ```
//!
//! `preset` is either one table id applied to every algorithm or a list of
//! `algorithm:table` pairs. Explicit `a`, `A`, `c`, `alpha`, `gamma` override
//! the preset for every algorithm; without a preset all five are required.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::bench::{preset, BenchmarkProblem, TableId};
use crate::error::{Result, SpsaError};
use crate::estimators::Spsa1Divisor;
use crate::gains::{GainMode, GainSchedule};
use crate::noise::NoiseModel;
use crate::point::Point;
use crate::spsa1a::Algorithm;

pub const KEYS: [&str; 17] = [
    "problem",
    "algorithms",
    "preset",
    "a",
    "A",
    "c",
    "alpha",
    "gamma",
    "gain_mode",
    "spsa1_divisor",
    "noise_sigma",
    "x0",
    "max_iterations",
    "thresholds",
    "replications",
    "master_seed",
    "workers",
];

pub const DEFAULT_REPLICATIONS: usize = 50;

/// One algorithm of an experiment with its resolved gains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlgorithmSetup {
    pub algorithm: Algorithm,
    pub schedule: GainSchedule,
    pub preset: Option<TableId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: BenchmarkProblem,
    pub algorithms: Vec<AlgorithmSetup>,
    pub noise: NoiseModel,
    pub x0: Point,
    pub max_iterations: u64,
    /// Strictly decreasing. Runs stop once the last one is reached.
    pub thresholds: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
    pub spsa1_divisor: Spsa1Divisor,
    pub out_dir: Option<PathBuf>,
}

/// Everything that determines the results, in the order it was resolved.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub problem: BenchmarkProblem,
    pub algorithms: Vec<AlgorithmSetup>,
    pub noise_sigma: f64,
    pub x0: Vec<f64>,
    pub max_iterations: u64,
    pub thresholds: Vec<f64>,
    pub replications: usize,
    pub master_seed: u64,
    pub spsa1_divisor: Spsa1Divisor,
}

struct Raw {
    path: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
}

impl Raw {
    fn err(&self, line: usize, message: impl Into<String>) -> SpsaError {
        SpsaError::Parse {
            path: self.path.clone(),
            line,
            message: message.into(),
        }
    }

    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|e| self.err(line, format!("{key}: {e}"))),
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|e| self.err(line, format!("{key}: {s:?}: {e}")))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

fn tokenize(text: &str, path: &Path) -> Result<Raw> {
    let mut raw = Raw {
        path: path.to_path_buf(),
        entries: BTreeMap::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(raw.err(line_no, format!("expected `key = value`, got {line:?}")));
        };
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(raw.err(line_no, format!("unknown key {key:?}")));
        }
        if let Some((first, _)) = raw.entries.get(key) {
            return Err(raw.err(
                line_no,
                format!("duplicate key {key:?} (first on line {first})"),
            ));
        }
        raw.entries
            .insert(key.to_string(), (line_no, value.trim().to_string()));
    }
    Ok(raw)
}

impl ExperimentConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| SpsaError::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses config text; `path` is only used in error messages.
    pub fn parse(text: &str, path: impl AsRef<Path>) -> Result<Self> {
        let raw = tokenize(text, path.as_ref())?;

        let mut per_alg: BTreeMap<Algorithm, TableId> = BTreeMap::new();
        let mut shared: Option<TableId> = None;
        if let Some((line, v)) = raw.get("preset") {
            for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match item.split_once(':') {
                    Some((alg, table)) => {
                        let alg: Algorithm = alg
                            .trim()
                            .parse()
                            .map_err(|e| raw.err(line, format!("preset: {e}")))?;
                        let table: TableId = table
                            .trim()
                            .parse()
                            .map_err(|e| raw.err(line, format!("preset: {e}")))?;
                        per_alg.insert(alg, table);
                    }
                    None if shared.is_none() && per_alg.is_empty() => {
                        shared = Some(
                            item.parse()
                                .map_err(|e| raw.err(line, format!("preset: {e}")))?,
                        );
                    }
                    None => {
                        return Err(
                            raw.err(line, "preset: mix of shared and per-algorithm presets")
                        );
                    }
                }
            }
        }

        let algorithms: Vec<Algorithm> = match raw.list("algorithms")? {
            Some(list) => list,
            None => match shared {
                Some(t) => preset(t).algorithms.to_vec(),
                None if !per_alg.is_empty() => per_alg.keys().copied().collect(),
                None => return Err(raw.err(0, "missing key \"algorithms\"")),
            },
        };
        if algorithms.is_empty() {
            return Err(raw.err(
                raw.get("algorithms").map_or(0, |(l, _)| l),
                "algorithms: empty list",
            ));
        }

        let explicit = |key: &str| raw.parse::<f64>(key);
        let (a, big_a, c, alpha, gamma) = (
            explicit("a")?,
            explicit("A")?,
            explicit("c")?,
            explicit("alpha")?,
            explicit("gamma")?,
        );
        let gain_mode: GainMode = raw.parse("gain_mode")?.unwrap_or(GainMode::RhoAdaptive);

        let mut problem: Option<BenchmarkProblem> = raw.parse("problem")?;
        let mut preset_m: Option<u64> = None;
        let mut setups = Vec::with_capacity(algorithms.len());
        for alg in &algorithms {
            let table = per_alg.get(alg).copied().or(shared);
            let base = table.map(preset);
            if let Some(p) = &base {
                match problem {
                    Some(q) if q != p.problem => {
                        return Err(SpsaError::Configuration(format!(
                            "preset {} is for {}, not {q}",
                            p.table, p.problem
                        )))
                    }
                    _ => problem = Some(p.problem),
                }
                preset_m =
                    Some(preset_m.map_or(p.max_iterations, |m: u64| m.max(p.max_iterations)));
            }
            let pick = |v: Option<f64>, from: Option<f64>, name: &str| {
                v.or(from).ok_or_else(|| {
                    SpsaError::Configuration(format!("{alg}: no preset and no explicit {name}"))
                })
            };
            let schedule = GainSchedule::new(
                pick(a, base.as_ref().map(|p| p.a), "a")?,
                pick(big_a, base.as_ref().map(|p| p.big_a), "A")?,
                pick(c, base.as_ref().map(|p| p.c), "c")?,
                pick(alpha, base.as_ref().map(|p| p.alpha), "alpha")?,
                pick(gamma, base.as_ref().map(|p| p.gamma), "gamma")?,
            )?;
            let mode = if *alg == Algorithm::Spsa1a {
                gain_mode
            } else {
                GainMode::Standard
            };
            setups.push(AlgorithmSetup {
                algorithm: *alg,
                schedule: schedule.with_mode(mode),
                preset: table,
            });
        }
        for alg in per_alg.keys() {
            if !algorithms.contains(alg) {
                return Err(SpsaError::Configuration(format!(
                    "preset given for {alg}, which is not in algorithms"
                )));
            }
        }
        let problem = problem.ok_or_else(|| raw.err(0, "missing key \"problem\""))?;

        let x0 = match raw.list::<f64>("x0")? {
            Some(v) => Point::new(v)?,
            None => problem.default_x0(),
        };
        let max_iterations = raw
            .parse::<u64>("max_iterations")?
            .or(preset_m)
            .ok_or_else(|| raw.err(0, "missing key \"max_iterations\""))?;
        let sigma = raw.parse::<f64>("noise_sigma")?.unwrap_or(0.0);
        let noise = if sigma == 0.0 {
            NoiseModel::NONE
        } else {
            NoiseModel::gaussian(sigma)?
        };

        let config = ExperimentConfig {
            problem,
            algorithms: setups,
            noise,
            x0,
            max_iterations,
            thresholds: raw.list("thresholds")?.unwrap_or_default(),
            replications: raw.parse("replications")?.unwrap_or(DEFAULT_REPLICATIONS),
            master_seed: raw.parse("master_seed")?.unwrap_or(0),
            workers: raw.parse("workers")?,
            spsa1_divisor: raw.parse("spsa1_divisor")?.unwrap_or_default(),
            out_dir: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SpsaError::Configuration(m));
        if self.algorithms.is_empty() {
            return bad("no algorithms".into());
        }
        if self.replications < 1 {
            return bad("replications must be at least 1".into());
        }
        if self.max_iterations < 1 {
            return bad("max_iterations must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if self.x0.dim() != self.problem.n() {
            return bad(format!(
                "x0 has dimension {}, {} needs {}",
                self.x0.dim(),
                self.problem,
                self.problem.n()
            ));
        }
        if let Some(t) = self
            .thresholds
            .iter()
            .find(|t| !(t.is_finite() && **t >= 0.0))
        {
            return bad(format!(
                "thresholds must be finite and nonnegative, got {t}"
            ));
        }
        if self.thresholds.windows(2).any(|w| w[1] >= w[0]) {
            return bad(format!(
                "thresholds must be strictly decreasing, got {:?}",
                self.thresholds
            ));
        }
        let mut seen = Vec::new();
        for s in &self.algorithms {
            if seen.contains(&s.algorithm) {
                return bad(format!("{} listed twice", s.algorithm));
            }
            seen.push(s.algorithm);
            s.schedule.validate()?;
        }
        Ok(())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            problem: self.problem,
            algorithms: self.algorithms.clone(),
            noise_sigma: self.noise.effective_sigma(),
            x0: self.x0.coords().to_vec(),
            max_iterations: self.max_iterations,
            thresholds: self.thresholds.clone(),
            replications: self.replications,
            master_seed: self.master_seed,
            spsa1_divisor: self.spsa1_divisor,
        }
    }

    /// Renders the config back into the file format. Parsing the result
    /// gives an equal config (apart from `out_dir`).
    pub fn to_config_text(&self) -> String {
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x}"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut s = String::new();
        let _ = writeln!(s, "problem = {}", self.problem.id());
        let algs: Vec<&str> = self.algorithms.iter().map(|a| a.algorithm.id()).collect();
        let _ = writeln!(s, "algorithms = {}", algs.join(", "));
        let tables: Vec<Option<TableId>> = self.algorithms.iter().map(|a| a.preset).collect();
        if tables.iter().all(|t| t.is_some() && *t == tables[0]) {
            let _ = writeln!(s, "preset = {}", tables[0].unwrap_or(TableId::T1));
        } else if tables.iter().all(Option::is_some) {
            let pairs: Vec<String> = self
                .algorithms
                .iter()
                .filter_map(|a| a.preset.map(|t| format!("{}:{}", a.algorithm.id(), t)))
                .collect();
            let _ = writeln!(s, "preset = {}", pairs.join(", "));
        }
        // a gain shared by every algorithm is written out; the rest come from presets
        let fields: [(&str, fn(&GainSchedule) -> f64); 5] = [
            ("a", |g| g.a),
            ("A", |g| g.big_a),
            ("c", |g| g.c),
            ("alpha", |g| g.alpha),
            ("gamma", |g| g.gamma),
        ];
        for (key, get) in fields {
            let v = get(&self.algorithms[0].schedule);
            if self.algorithms.iter().all(|a| get(&a.schedule) == v) {
                let _ = writeln!(s, "{key} = {v}");
            }
        }
        if let Some(a) = self
            .algorithms
            .iter()
            .find(|a| a.algorithm == Algorithm::Spsa1a)
        {
            let _ = writeln!(s, "gain_mode = {}", a.schedule.mode);
        }
        let _ = writeln!(s, "spsa1_divisor = {}", self.spsa1_divisor);
        let _ = writeln!(s, "noise_sigma = {}", self.noise.effective_sigma());
        let _ = writeln!(s, "x0 = {}", join(self.x0.coords()));
        let _ = writeln!(s, "max_iterations = {}", self.max_iterations);
        if !self.thresholds.is_empty() {
            let _ = writeln!(s, "thresholds = {}", join(&self.thresholds));
        }
        let _ = writeln!(s, "replications = {}", self.replications);
        let _ = writeln!(s, "master_seed = {}", self.master_seed);
        if let Some(w) = self.workers {
            let _ = writeln!(s, "workers = {w}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(text, "test.cfg")
    }

    #[test]
    fn table_four_preset() {
        let c =
            parse("# quartic\npreset = T4\nthresholds = 1e-2, 1e-3\nnoise_sigma = 0.01\n").unwrap();
        assert_eq!(c.problem, BenchmarkProblem::Quartic);
        let algs: Vec<Algorithm> = c.algorithms.iter().map(|a| a.algorithm).collect();
        assert_eq!(algs, [Algorithm::Spsa, Algorithm::Spsa1, Algorithm::Spsa1a]);
        assert_eq!(c.max_iterations, 100_000);
        assert_eq!(c.replications, 50);
        assert_eq!(c.algorithms[2].schedule.mode, GainMode::RhoAdaptive);
        assert_eq!(c.algorithms[0].schedule.mode, GainMode::Standard);
        assert_eq!(c.x0.coords(), &[3.0, -1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn per_algorithm_presets_and_overrides() {
        let c = parse(
            "problem = powell_singular\npreset = spsa:T3_spsa, spsa1a:T3_spsa1a\nc = 0.2\ngain_mode = standard\n",
        )
        .unwrap();
        assert_eq!(c.algorithms[0].schedule.a, 0.08);
        assert_eq!(c.algorithms[1].schedule.a, 0.02);
        assert!(c.algorithms.iter().all(|a| a.schedule.c == 0.2));
        assert_eq!(c.algorithms[1].schedule.mode, GainMode::Standard);
        let again = parse(&c.to_config_text()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn explicit_gains_round_trip() {
        let c = parse(
            "problem = rosenbrock\nalgorithms = fdsa, rdsa\na = 0.1\nA = 10\nc = 0.1\nalpha = 0.602\ngamma = 0.101\nmax_iterations = 20\nreplications = 3\nworkers = 2\nx0 = -1.2, 1\n",
        )
        .unwrap();
        assert_eq!(parse(&c.to_config_text()).unwrap(), c);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let line = |text: &str| match parse(text) {
            Err(SpsaError::Parse { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("preset = T4\nbogus = 1\n"), 2);
        assert_eq!(line("preset = T4\n\nreplications = many\n"), 3);
        assert_eq!(line("preset = T4\nnoise_sigma 0.1\n"), 2);
        assert_eq!(line("preset = T4\nc = 1\nc = 2\n"), 3);
        assert_eq!(line("preset = T9\n"), 1);
    }

    #[test]
    fn invalid_configs() {
        for text in [
            "preset = T4\nthresholds = 1e-3, 1e-2\n",
            "preset = T4\nreplications = 0\n",
            "preset = T4\nx0 = 1, 2\n",
            "preset = T4\nproblem = beale\n",
            "problem = quartic\nalgorithms = spsa\n",
            "preset = T4\nalgorithms = spsa, spsa\n",
            "preset = T1\nnoise_sigma = -1\n",
        ] {
            assert!(parse(text).is_err(), "{text}");
        }
    }
}
