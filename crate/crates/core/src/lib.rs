//! Derivative-free stochastic optimization from noisy function measurements.
//!
//! The crate implements the simultaneous perturbation family of stochastic
//! approximation methods:
//!
//! * SPSA, two measurements per iteration;
//! * SPSA1, one measurement per iteration;
//! * SPSA1-A, two measurements per iteration but two moves, the second along
//!   a random sign vector drawn on the descent side of the estimate;
//! * FDSA and RDSA baselines.
//!
//! Around the optimizers sit brute-force oracles for the combinatorial
//! constants ([`oracles`]), an asymptotic normality predictor ([`theory`]),
//! the benchmark problems and reference gain presets ([`bench`]), and a seeded
//! experiment harness ([`harness`]).

pub mod bench;
pub mod combinatorics;
pub mod error;
pub mod estimators;
pub mod gains;
pub mod harness;
pub mod noise;
pub mod objective;
pub mod oracles;
pub mod point;
pub mod seed;
pub mod spsa1a;
pub mod theory;
pub mod trace;

pub use error::{Result, SpsaError};
pub use gains::{GainMode, GainSchedule};
pub use noise::NoiseModel;
pub use objective::{FnObjective, MeasuredObjective, Objective};
pub use point::Point;
pub use seed::RandomSource;
pub use spsa1a::{run, run_baseline, Algorithm, RunConfig};
pub use trace::{IterateTrace, Termination, TraceRecord};
