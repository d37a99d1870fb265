//! SPSA1-A and the plain stochastic-approximation drivers.
//!
//! One SPSA1-A iteration spends two measurements and moves twice:
//!
//! ```text
//! g      = SPSA estimate at x_k along a fresh xi_k
//! rho_k  = rho / |g|_inf
//! x_half = x_k    - a_k g     / (1 + rho_k)
//! x_k+1  = x_half - a_k xi_hat / (1 + rho_k),   xi_hat uniform on {d : d.g >= 0}
//! ```
//!
//! `rho` depends only on the dimension and makes `E[xi_hat | g] = rho_k g`.
//! When `g` is exactly zero `rho_k` is infinite and both half-steps vanish.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, ln_binomial};
use crate::error::{Result, SpsaError};
use crate::estimators::{
    fdsa_gradient, rdsa_gradient, sample_perturbation, spsa1_gradient, spsa_gradient, DirectionLaw,
    GradientEstimate, Perturbation, Spsa1Divisor,
};
use crate::gains::GainSchedule;
use crate::objective::MeasuredObjective;
use crate::point::Point;
use crate::seed::{RandomSource, Stream};
use crate::trace::{IterateTrace, Termination, TraceRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Spsa,
    Spsa1,
    Spsa1a,
    Fdsa,
    Rdsa,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Spsa,
        Algorithm::Spsa1,
        Algorithm::Spsa1a,
        Algorithm::Fdsa,
        Algorithm::Rdsa,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Spsa => "spsa",
            Algorithm::Spsa1 => "spsa1",
            Algorithm::Spsa1a => "spsa1a",
            Algorithm::Fdsa => "fdsa",
            Algorithm::Rdsa => "rdsa",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Spsa => "SPSA",
            Algorithm::Spsa1 => "SPSA1",
            Algorithm::Spsa1a => "SPSA1-A",
            Algorithm::Fdsa => "FDSA",
            Algorithm::Rdsa => "RDSA",
        }
    }

    /// Measurements per iteration in dimension `n`.
    pub fn cost_per_iteration(&self, n: usize) -> u64 {
        match self {
            Algorithm::Spsa | Algorithm::Spsa1a | Algorithm::Rdsa => 2,
            Algorithm::Spsa1 => 1,
            Algorithm::Fdsa => 2 * n as u64,
        }
    }
}

impl FromStr for Algorithm {
    type Err = SpsaError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_'], "");
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == key)
            .ok_or_else(|| SpsaError::Argument(format!("unknown algorithm `{s}`")))
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// The dimension constant `rho`.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoConstant {
    pub n: usize,
    pub value: f64,
    /// Exact value for `n <= 64`.
    pub exact: Option<Ratio<u128>>,
}

const EXACT_RHO_MAX_N: usize = 64;

/// ```text
/// n odd:  C(n-1, (n-1)/2) / 2^(n-1)
/// n even: C(n-1, n/2) / (2^(n-1) + C(n, n/2) / 2)
/// ```
pub fn rho_constant(n: usize) -> Result<RhoConstant> {
    if n == 0 {
        return Err(SpsaError::Argument("rho needs n >= 1".into()));
    }
    let m = n as u64;
    if n <= EXACT_RHO_MAX_N {
        let pow = 1u128 << (m - 1);
        let (num, den) = if n % 2 == 1 {
            (binomial(m - 1, (m - 1) / 2).expect("fits u128"), pow)
        } else {
            let central = binomial(m, m / 2).expect("fits u128");
            (
                binomial(m - 1, m / 2).expect("fits u128"),
                pow + central / 2,
            )
        };
        let exact = Ratio::new(num, den);
        return Ok(RhoConstant {
            n,
            value: num as f64 / den as f64,
            exact: Some(exact),
        });
    }
    let ln2 = std::f64::consts::LN_2;
    let value = if n % 2 == 1 {
        (ln_binomial(m - 1, (m - 1) / 2) - (m - 1) as f64 * ln2).exp()
    } else {
        // 2^(n-1) + C/2 = 2^(n-1) (1 + C / 2^n), and C / 2^n <= 1
        let ratio = (ln_binomial(m, m / 2) - m as f64 * ln2).exp();
        (ln_binomial(m - 1, m / 2) - (m - 1) as f64 * ln2 - ratio.ln_1p()).exp()
    };
    Ok(RhoConstant {
        n,
        value,
        exact: None,
    })
}

/// `rho / |g|_inf`, or `+inf` when `g` is zero.
pub fn rho_k(rho: &RhoConstant, g_hat: &[f64]) -> f64 {
    let sup = g_hat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup > 0.0 {
        rho.value / sup
    } else {
        f64::INFINITY
    }
}

/// Whether `d . g >= 0`. Ties are accepted. When all `|g_i|` are equal, as
/// for every SPSA estimate, the sign is decided by integer counting so that
/// rounding cannot turn an exact tie into a rejection.
pub fn descent_side_accepts(d: &Perturbation, g_hat: &[f64]) -> bool {
    let m = g_hat.first().map_or(0.0, |v| v.abs());
    if g_hat.iter().all(|v| v.abs() == m) {
        let s: i64 = d
            .signs()
            .iter()
            .zip(g_hat)
            .map(|(&di, gi)| {
                if *gi > 0.0 {
                    di as i64
                } else if *gi < 0.0 {
                    -(di as i64)
                } else {
                    0
                }
            })
            .sum();
        s >= 0
    } else {
        d.dot(g_hat) >= 0.0
    }
}

/// Uniform draw from `{d in {-1,1}^n : d . g >= 0}` by rejection from the
/// full cube.
pub fn sample_descent_side<R: Rng + ?Sized>(g_hat: &[f64], rng: &mut R) -> Result<Perturbation> {
    loop {
        let d = sample_perturbation(g_hat.len(), rng)?;
        if descent_side_accepts(&d, g_hat) {
            return Ok(d);
        }
    }
}

#[derive(Clone, Debug)]
pub struct IterateState {
    pub k: u64,
    pub x: Vec<f64>,
    pub measurements: u64,
    pub rng: RandomSource,
}

impl IterateState {
    pub fn new(x0: &Point, rng: RandomSource) -> Self {
        IterateState {
            k: 0,
            x: x0.to_vec(),
            measurements: 0,
            rng,
        }
    }
}

/// Everything one SPSA1-A iteration computed.
#[derive(Clone, Debug)]
pub struct StepDetail {
    pub c_k: f64,
    pub estimate: GradientEstimate,
    pub rho_k: f64,
    /// `None` for a degenerate (zero-estimate) step.
    pub a_k: Option<f64>,
    pub x_half: Vec<f64>,
    pub xi_hat: Option<Perturbation>,
}

fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

fn diverged(k: u64) -> SpsaError {
    SpsaError::Divergence {
        iteration: k,
        trace: Box::new(IterateTrace::new(0)),
    }
}

/// One SPSA1-A iteration. Order: `c_k`, `xi_k`, two measurements, `g`,
/// `rho_k`, then `a_k`, so a rho-adaptive schedule sees the current `rho_k`.
pub fn spsa1a_step(
    state: &mut IterateState,
    schedule: &GainSchedule,
    obj: &mut MeasuredObjective<'_>,
    rho: &RhoConstant,
) -> Result<StepDetail> {
    let n = state.x.len();
    if rho.n != n {
        return Err(SpsaError::Argument(format!(
            "rho was computed for n = {}, iterate has n = {n}",
            rho.n
        )));
    }
    let c_k = schedule.perturbation(state.k);
    let xi = sample_perturbation(n, &mut state.rng)?;
    let estimate = spsa_gradient(obj, &state.x, c_k, &xi)?;
    state.measurements += estimate.measurements_used;
    let rk = rho_k(rho, &estimate.g_hat);

    if rk.is_infinite() {
        state.k += 1;
        return Ok(StepDetail {
            c_k,
            estimate,
            rho_k: rk,
            a_k: None,
            x_half: state.x.clone(),
            xi_hat: None,
        });
    }

    let (a_k, _) = schedule.gains(state.k, Some(rk))?;
    let scale = a_k / (1.0 + rk);
    let x_half: Vec<f64> = state
        .x
        .iter()
        .zip(&estimate.g_hat)
        .map(|(x, g)| x - scale * g)
        .collect();
    let xi_hat = sample_descent_side(&estimate.g_hat, &mut state.rng)?;
    let x_next: Vec<f64> = x_half
        .iter()
        .zip(xi_hat.signs())
        .map(|(x, &d)| x - scale * d as f64)
        .collect();
    if !all_finite(&x_next) {
        return Err(diverged(state.k));
    }
    state.x = x_next;
    state.k += 1;
    Ok(StepDetail {
        c_k,
        estimate,
        rho_k: rk,
        a_k: Some(a_k),
        x_half,
        xi_hat: Some(xi_hat),
    })
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub schedule: GainSchedule,
    pub x0: Point,
    pub max_iterations: u64,
    /// Stop once `|f(x_k) - f*| <= threshold`.
    pub error_threshold: Option<f64>,
    pub spsa1_divisor: Spsa1Divisor,
    pub rdsa_law: DirectionLaw,
    /// Seed of the perturbation stream.
    pub seed: u64,
    pub replication: u64,
}

impl RunConfig {
    pub fn new(
        algorithm: Algorithm,
        schedule: GainSchedule,
        x0: Point,
        max_iterations: u64,
    ) -> Self {
        RunConfig {
            algorithm,
            schedule,
            x0,
            max_iterations,
            error_threshold: None,
            spsa1_divisor: Spsa1Divisor::default(),
            rdsa_law: DirectionLaw::default(),
            seed: 0,
            replication: 0,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.error_threshold = Some(threshold);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.max_iterations == 0 {
            return Err(SpsaError::Configuration(
                "max_iterations must be positive".into(),
            ));
        }
        if let Some(t) = self.error_threshold {
            if !(t >= 0.0) {
                return Err(SpsaError::Configuration(format!(
                    "error threshold must be nonnegative, got {t}"
                )));
            }
        }
        Ok(())
    }
}

struct Recorder {
    trace: IterateTrace,
    threshold: Option<f64>,
}

impl Recorder {
    /// Appends a record; returns `true` when the run should stop. An iterate
    /// whose error is not finite counts as divergence and is not recorded.
    fn record(
        &mut self,
        obj: &MeasuredObjective<'_>,
        k: u64,
        measurements: u64,
        x: &[f64],
    ) -> Result<bool> {
        let error = obj.true_error(x)?;
        if !error.is_finite() {
            return Err(diverged(k));
        }
        self.trace.records.push(TraceRecord {
            iteration: k,
            measurements,
            error,
        });
        self.trace.final_x.clear();
        self.trace.final_x.extend_from_slice(x);
        let hit = self.threshold.is_some_and(|t| error <= t);
        if hit {
            self.trace.termination = Termination::ThresholdReached;
        }
        Ok(hit)
    }

    fn fail(mut self, err: SpsaError) -> SpsaError {
        let iteration = match err {
            SpsaError::Divergence { iteration, .. } => iteration,
            SpsaError::Evaluation { .. } => self.trace.iterations(),
            other => return other,
        };
        self.trace.termination = Termination::Diverged;
        SpsaError::Divergence {
            iteration,
            trace: Box::new(self.trace),
        }
    }
}

fn start(config: &RunConfig, obj: &MeasuredObjective<'_>) -> Result<(IterateState, Recorder)> {
    config.validate()?;
    if config.x0.dim() != obj.dim() {
        return Err(SpsaError::Argument(format!(
            "x0 has dimension {}, objective expects {}",
            config.x0.dim(),
            obj.dim()
        )));
    }
    let state = IterateState::new(
        &config.x0,
        RandomSource::stream(config.seed, Stream::Perturbation),
    );
    let recorder = Recorder {
        trace: IterateTrace::new(config.replication),
        threshold: config.error_threshold,
    };
    Ok((state, recorder))
}

/// Runs `config.algorithm` until `max_iterations` or the error threshold.
///
/// Emits one record per iteration, including `k = 0`. Errors are checked
/// with the uncounted true value. A non-finite iterate or measurement ends
/// the run with [`SpsaError::Divergence`] carrying the partial trace.
pub fn run(config: &RunConfig, obj: &mut MeasuredObjective<'_>) -> Result<IterateTrace> {
    if config.algorithm != Algorithm::Spsa1a {
        return run_baseline(config, obj);
    }
    let rho = rho_constant(obj.dim())?;
    let (mut state, mut rec) = start(config, obj)?;
    match rec.record(obj, 0, 0, &state.x) {
        Ok(true) => return Ok(rec.trace),
        Ok(false) => {}
        Err(e) => return Err(rec.fail(e)),
    }
    while state.k < config.max_iterations {
        if let Err(e) = spsa1a_step(&mut state, &config.schedule, obj, &rho) {
            return Err(rec.fail(e));
        }
        match rec.record(obj, state.k, state.measurements, &state.x) {
            Ok(true) => return Ok(rec.trace),
            Ok(false) => {}
            Err(e) => return Err(rec.fail(e)),
        }
    }
    Ok(rec.trace)
}

/// Plain SA, `x_k+1 = x_k - a_k g_k`, with `g_k` from SPSA, SPSA1, FDSA or
/// RDSA. Always uses the standard step size.
pub fn run_baseline(config: &RunConfig, obj: &mut MeasuredObjective<'_>) -> Result<IterateTrace> {
    if config.algorithm == Algorithm::Spsa1a {
        return Err(SpsaError::Configuration(
            "spsa1a is not a plain SA baseline; use run".into(),
        ));
    }
    let (mut state, mut rec) = start(config, obj)?;
    match rec.record(obj, 0, 0, &state.x) {
        Ok(true) => return Ok(rec.trace),
        Ok(false) => {}
        Err(e) => return Err(rec.fail(e)),
    }
    let n = state.x.len();
    while state.k < config.max_iterations {
        let c_k = config.schedule.perturbation(state.k);
        let a_k = config.schedule.base_step(state.k);
        let estimate = match config.algorithm {
            Algorithm::Spsa => sample_perturbation(n, &mut state.rng)
                .and_then(|xi| spsa_gradient(obj, &state.x, c_k, &xi)),
            Algorithm::Spsa1 => sample_perturbation(n, &mut state.rng)
                .and_then(|xi| spsa1_gradient(obj, &state.x, c_k, &xi, config.spsa1_divisor)),
            Algorithm::Fdsa => fdsa_gradient(obj, &state.x, c_k),
            Algorithm::Rdsa => config
                .rdsa_law
                .sample(n, &mut state.rng)
                .and_then(|d| rdsa_gradient(obj, &state.x, c_k, &d)),
            Algorithm::Spsa1a => unreachable!(),
        };
        let estimate = match estimate {
            Ok(e) => e,
            Err(e) => return Err(rec.fail(e)),
        };
        state.measurements += estimate.measurements_used;
        for (x, g) in state.x.iter_mut().zip(&estimate.g_hat) {
            *x -= a_k * g;
        }
        if !all_finite(&state.x) {
            return Err(rec.fail(diverged(state.k)));
        }
        state.k += 1;
        match rec.record(obj, state.k, state.measurements, &state.x) {
            Ok(true) => return Ok(rec.trace),
            Ok(false) => {}
            Err(e) => return Err(rec.fail(e)),
        }
    }
    Ok(rec.trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::Sphere;
    use crate::gains::GainMode;
    use crate::objective::FnObjective;

    #[test]
    fn rho_small_n() {
        let expect = [(1, 1, 1), (2, 1, 3), (3, 1, 2), (4, 3, 11), (5, 3, 8)];
        for (n, p, q) in expect {
            let r = rho_constant(n).unwrap();
            assert_eq!(r.exact.unwrap(), Ratio::new(p, q), "n = {n}");
            assert!((r.value - p as f64 / q as f64).abs() < 1e-15);
        }
        assert!(rho_constant(0).is_err());
    }

    #[test]
    fn rho_decreases_and_log_domain_matches() {
        // decreasing within each parity; rho(2) = 1/3 < rho(3) = 1/2
        for start in [1usize, 2] {
            let mut prev = rho_constant(start).unwrap().value;
            for n in (start + 2..=400).step_by(2) {
                let r = rho_constant(n).unwrap().value;
                assert!(r < prev && r > 0.0, "n = {n}");
                prev = r;
            }
            assert!(prev < 0.05);
        }
        // compare log-domain formula against the exact one near the switch
        for n in [63usize, 64] {
            let exact = rho_constant(n).unwrap().value;
            let m = n as u64;
            let ln2 = std::f64::consts::LN_2;
            let approx = if n % 2 == 1 {
                (ln_binomial(m - 1, (m - 1) / 2) - (m - 1) as f64 * ln2).exp()
            } else {
                let ratio = (ln_binomial(m, m / 2) - m as f64 * ln2).exp();
                (ln_binomial(m - 1, m / 2) - (m - 1) as f64 * ln2 - ratio.ln_1p()).exp()
            };
            assert!((exact - approx).abs() < 1e-12 * exact);
        }
        assert!(rho_constant(65).unwrap().exact.is_none());
    }

    #[test]
    fn rho_k_values() {
        let r = rho_constant(2).unwrap();
        assert!((rho_k(&r, &[2.0, -2.0]) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(rho_k(&r, &[1.0, -1.0]), r.value);
        assert!(rho_k(&r, &[0.0, 0.0]).is_infinite());
    }

    #[test]
    fn descent_set_for_two_dims() {
        let g = [2.0, -2.0];
        let accepted: Vec<Vec<i8>> = [[1i8, 1], [1, -1], [-1, 1], [-1, -1]]
            .iter()
            .filter(|d| descent_side_accepts(&Perturbation::new(d.to_vec()).unwrap(), &g))
            .map(|d| d.to_vec())
            .collect();
        assert_eq!(accepted, vec![vec![1, 1], vec![1, -1], vec![-1, -1]]);
    }

    #[test]
    fn exact_ties_survive_rounding() {
        // 0.1 * 3 is inexact; the counted comparison still sees a tie.
        let s = 0.1f64 + 0.2;
        let g = [s, s, s, -s, -s, -s];
        let d = Perturbation::new(vec![1, 1, 1, 1, 1, 1]).unwrap();
        assert!(descent_side_accepts(&d, &g));
    }

    #[test]
    fn descent_samples_stay_on_side() {
        let mut rng = RandomSource::new(9);
        let g = [0.7, -0.7, 0.7, 0.7, -0.7];
        for _ in 0..10_000 {
            let d = sample_descent_side(&g, &mut rng).unwrap();
            assert!(d.dot(&g) >= 0.0);
        }
        // zero estimate accepts the whole cube
        let mut seen = std::collections::HashSet::new();
        for _ in 0..1000 {
            seen.insert(sample_descent_side(&[0.0, 0.0], &mut rng).unwrap());
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn step_hand_values() {
        // f = x1 - x2 at x = 0: xi = +-(1, -1) gives slope +-2 and g = (2, -2).
        let lin = FnObjective::new("lin", 2, |x: &[f64]| x[0] - x[1]);
        let schedule = GainSchedule::new(0.1, 0.0, 0.1, 1.0, 0.101).unwrap();
        let rho = rho_constant(2).unwrap();
        let mut obj = MeasuredObjective::noiseless(&lin);
        for seed in 0..64 {
            let mut state = IterateState::new(&Point::zeros(2).unwrap(), RandomSource::new(seed));
            let d = spsa1a_step(&mut state, &schedule, &mut obj, &rho).unwrap();
            if d.estimate.g_hat != vec![2.0, -2.0] {
                continue;
            }
            assert!((d.rho_k - 1.0 / 6.0).abs() < 1e-15);
            assert!((d.x_half[0] + 6.0 / 35.0).abs() < 1e-15);
            assert!((d.x_half[1] - 6.0 / 35.0).abs() < 1e-15);
            assert_eq!(state.measurements, 2);
            assert_eq!(state.k, 1);
            return;
        }
        panic!("no seed produced g = (2, -2)");
    }

    #[test]
    fn degenerate_step_is_zero_step() {
        let s = Sphere { n: 3 };
        let schedule = GainSchedule::new(0.1, 0.0, 0.1, 1.0, 0.101)
            .unwrap()
            .with_mode(GainMode::RhoAdaptive);
        let rho = rho_constant(3).unwrap();
        let mut obj = MeasuredObjective::noiseless(&s);
        let mut state = IterateState::new(&Point::zeros(3).unwrap(), RandomSource::new(1));
        let d = spsa1a_step(&mut state, &schedule, &mut obj, &rho).unwrap();
        assert!(d.rho_k.is_infinite());
        assert!(d.a_k.is_none() && d.xi_hat.is_none());
        assert_eq!(state.x, vec![0.0; 3]);
        assert_eq!((state.k, state.measurements, obj.measurements()), (1, 2, 2));
    }

    #[test]
    fn run_stops_immediately_at_optimum() {
        let s = Sphere { n: 2 };
        let mut obj = MeasuredObjective::noiseless(&s);
        let cfg = RunConfig::new(
            Algorithm::Spsa1a,
            GainSchedule::new(0.1, 0.0, 0.1, 1.0, 0.1).unwrap(),
            Point::zeros(2).unwrap(),
            100,
        )
        .with_threshold(0.0);
        let t = run(&cfg, &mut obj).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.termination, Termination::ThresholdReached);
        assert_eq!(obj.measurements(), 0);
    }

    #[test]
    fn baseline_costs() {
        let s = Sphere { n: 4 };
        let x0 = Point::new(vec![1.0, -1.0, 0.5, 0.2]).unwrap();
        let sched = GainSchedule::new(0.01, 10.0, 0.1, 0.602, 0.101).unwrap();
        for alg in [
            Algorithm::Spsa,
            Algorithm::Spsa1,
            Algorithm::Fdsa,
            Algorithm::Rdsa,
        ] {
            let mut obj = MeasuredObjective::noiseless(&s);
            let t = run(&RunConfig::new(alg, sched, x0.clone(), 10), &mut obj).unwrap();
            assert_eq!(t.len(), 11);
            assert_eq!(obj.measurements(), 10 * alg.cost_per_iteration(4));
            for r in &t.records {
                assert_eq!(r.measurements, r.iteration * alg.cost_per_iteration(4));
            }
        }
        let mut obj = MeasuredObjective::noiseless(&s);
        let fdsa = RunConfig::new(Algorithm::Fdsa, sched, x0.clone(), 10);
        run(&fdsa, &mut obj).unwrap();
        assert_eq!(obj.measurements(), 80);
        let cfg = RunConfig::new(Algorithm::Spsa1a, sched, x0, 10);
        assert!(run_baseline(&cfg, &mut obj).is_err());
    }

    #[test]
    fn divergence_keeps_partial_trace() {
        // unbounded below; x runs 1, 3.7, 44, 1e19 and then exp overflows
        let f = FnObjective::new("negexp", 1, |x: &[f64]| -x[0].exp());
        let mut obj = MeasuredObjective::noiseless(&f);
        let sched = GainSchedule::new(1.0, 0.0, 0.1, 0.01, 0.1).unwrap();
        let cfg = RunConfig::new(Algorithm::Spsa, sched, Point::new(vec![1.0]).unwrap(), 1000);
        match run(&cfg, &mut obj) {
            Err(SpsaError::Divergence { trace, .. }) => {
                assert!(!trace.is_empty());
                assert_eq!(trace.termination, Termination::Diverged);
                assert!(trace.final_x.iter().all(|v| v.is_finite()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn algorithm_ids() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("SPSA1-A".parse::<Algorithm>().unwrap(), Algorithm::Spsa1a);
        assert!("adam".parse::<Algorithm>().is_err());
    }
}
