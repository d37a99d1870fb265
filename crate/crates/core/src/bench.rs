//! Benchmark problems with analytic derivatives, and the reference gain
//! presets used with them.
//!
//! Powell's singular function and the quartic are sums of powers of linear
//! forms, `w (u.x)^p`, which gives every derivative order from one formula.
//! Rosenbrock and Beale are written out by hand.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpsaError};
use crate::gains::GainSchedule;
use crate::objective::Objective;
use crate::point::Point;
use crate::spsa1a::Algorithm;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkProblem {
    Rosenbrock,
    Beale,
    PowellSingular,
    /// `x'x + 0.1 sum x_i^3 + 0.01 sum x_i^4` in five dimensions.
    Quartic,
}

impl BenchmarkProblem {
    pub const ALL: [BenchmarkProblem; 4] = [
        BenchmarkProblem::Rosenbrock,
        BenchmarkProblem::Beale,
        BenchmarkProblem::PowellSingular,
        BenchmarkProblem::Quartic,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            BenchmarkProblem::Rosenbrock => "rosenbrock",
            BenchmarkProblem::Beale => "beale",
            BenchmarkProblem::PowellSingular => "powell_singular",
            BenchmarkProblem::Quartic => "quartic",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            BenchmarkProblem::Rosenbrock | BenchmarkProblem::Beale => 2,
            BenchmarkProblem::PowellSingular => 4,
            BenchmarkProblem::Quartic => 5,
        }
    }

    pub fn x_star(&self) -> Point {
        let v = match self {
            BenchmarkProblem::Rosenbrock => vec![1.0, 1.0],
            BenchmarkProblem::Beale => vec![3.0, 0.5],
            BenchmarkProblem::PowellSingular => vec![0.0; 4],
            BenchmarkProblem::Quartic => vec![0.0; 5],
        };
        Point::new(v).expect("finite")
    }

    /// Starting points of the reference experiments. The quartic start is
    /// `(3, -1, 0, 1)` padded with a zero to five coordinates.
    pub fn default_x0(&self) -> Point {
        let v = match self {
            BenchmarkProblem::Rosenbrock => vec![-1.2, 1.0],
            BenchmarkProblem::Beale => vec![1.0, 1.0],
            BenchmarkProblem::PowellSingular => vec![3.0, -1.0, 0.0, 1.0],
            BenchmarkProblem::Quartic => vec![3.0, -1.0, 0.0, 1.0, 0.0],
        };
        Point::new(v).expect("finite")
    }

    fn power_terms(&self) -> Option<Vec<PowerTerm>> {
        match self {
            BenchmarkProblem::PowellSingular => Some(vec![
                PowerTerm::new(1.0, &[1.0, 10.0, 0.0, 0.0], 2),
                PowerTerm::new(5.0, &[0.0, 0.0, 1.0, -1.0], 2),
                PowerTerm::new(1.0, &[0.0, 1.0, -2.0, 0.0], 4),
                PowerTerm::new(10.0, &[1.0, 0.0, 0.0, -1.0], 4),
            ]),
            BenchmarkProblem::Quartic => {
                let mut terms = Vec::with_capacity(15);
                for i in 0..5 {
                    let mut u = [0.0; 5];
                    u[i] = 1.0;
                    terms.push(PowerTerm::new(1.0, &u, 2));
                    terms.push(PowerTerm::new(0.1, &u, 3));
                    terms.push(PowerTerm::new(0.01, &u, 4));
                }
                Some(terms)
            }
            _ => None,
        }
    }
}

impl FromStr for BenchmarkProblem {
    type Err = SpsaError;

    fn from_str(s: &str) -> Result<Self> {
        BenchmarkProblem::ALL
            .into_iter()
            .find(|p| p.id() == s.trim())
            .ok_or_else(|| SpsaError::Argument(format!("unknown problem `{s}`")))
    }
}

impl fmt::Display for BenchmarkProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `weight * (u . x)^power`
struct PowerTerm {
    weight: f64,
    u: Vec<f64>,
    power: i32,
}

impl PowerTerm {
    fn new(weight: f64, u: &[f64], power: i32) -> Self {
        PowerTerm {
            weight,
            u: u.to_vec(),
            power,
        }
    }

    fn form(&self, x: &[f64]) -> f64 {
        self.u.iter().zip(x).map(|(u, x)| u * x).sum()
    }

    /// Scalar factor of the `order`-th derivative: `w p (p-1) .. (u.x)^(p-order)`.
    fn factor(&self, x: &[f64], order: i32) -> f64 {
        if order > self.power {
            return 0.0;
        }
        let falling: f64 = (0..order).map(|j| (self.power - j) as f64).product();
        self.weight * falling * self.form(x).powi(self.power - order)
    }
}

fn sum_terms(terms: &[PowerTerm], x: &[f64]) -> f64 {
    terms.iter().map(|t| t.factor(x, 0)).sum()
}

// Beale residuals r_i = b_i - x1 (1 - x2^i), i = 1..3.
const BEALE_B: [f64; 3] = [1.5, 2.25, 2.625];

struct BealeResidual {
    r: f64,
    d: [f64; 2],
    dd: [[f64; 2]; 2],
    ddd: [[[f64; 2]; 2]; 2],
}

fn beale_residual(i: i32, x: &[f64]) -> BealeResidual {
    let (x1, x2) = (x[0], x[1]);
    let fi = i as f64;
    let pw = |e: i32| if e < 0 { 0.0 } else { x2.powi(e) };
    let r = BEALE_B[(i - 1) as usize] - x1 * (1.0 - pw(i));
    let d = [-(1.0 - pw(i)), x1 * fi * pw(i - 1)];
    let r12 = fi * pw(i - 1);
    let r22 = x1 * fi * (fi - 1.0) * pw(i - 2);
    let dd = [[0.0, r12], [r12, r22]];
    let r122 = fi * (fi - 1.0) * pw(i - 2);
    let r222 = x1 * fi * (fi - 1.0) * (fi - 2.0) * pw(i - 3);
    let mut ddd = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for c in 0..2 {
                ddd[a][b][c] = match a + b + c {
                    2 => r122,
                    3 => r222,
                    _ => 0.0,
                };
            }
        }
    }
    BealeResidual { r, d, dd, ddd }
}

impl Objective for BenchmarkProblem {
    fn name(&self) -> &str {
        self.id()
    }

    fn dim(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            BenchmarkProblem::Rosenbrock => {
                100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
            }
            BenchmarkProblem::Beale => (1..=3).map(|i| beale_residual(i, x).r.powi(2)).sum(),
            _ => sum_terms(&self.power_terms().expect("power-sum problem"), x),
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(match self {
            BenchmarkProblem::Rosenbrock => {
                let t = x[1] - x[0] * x[0];
                vec![-400.0 * x[0] * t - 2.0 * (1.0 - x[0]), 200.0 * t]
            }
            BenchmarkProblem::Beale => {
                let mut g = vec![0.0; 2];
                for i in 1..=3 {
                    let r = beale_residual(i, x);
                    for a in 0..2 {
                        g[a] += 2.0 * r.r * r.d[a];
                    }
                }
                g
            }
            _ => {
                let mut g = vec![0.0; self.n()];
                for t in self.power_terms()? {
                    let f = t.factor(x, 1);
                    for (gi, ui) in g.iter_mut().zip(&t.u) {
                        *gi += f * ui;
                    }
                }
                g
            }
        })
    }

    fn hessian(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let n = self.n();
        Some(match self {
            BenchmarkProblem::Rosenbrock => DMatrix::from_row_slice(
                2,
                2,
                &[
                    1200.0 * x[0] * x[0] - 400.0 * x[1] + 2.0,
                    -400.0 * x[0],
                    -400.0 * x[0],
                    200.0,
                ],
            ),
            BenchmarkProblem::Beale => {
                let mut h = DMatrix::zeros(2, 2);
                for i in 1..=3 {
                    let r = beale_residual(i, x);
                    for a in 0..2 {
                        for b in 0..2 {
                            h[(a, b)] += 2.0 * (r.d[a] * r.d[b] + r.r * r.dd[a][b]);
                        }
                    }
                }
                h
            }
            _ => {
                let mut h = DMatrix::zeros(n, n);
                for t in self.power_terms()? {
                    let f = t.factor(x, 2);
                    for a in 0..n {
                        for b in 0..n {
                            h[(a, b)] += f * t.u[a] * t.u[b];
                        }
                    }
                }
                h
            }
        })
    }

    fn third(&self, x: &[f64], i: usize, j: usize, k: usize) -> Option<f64> {
        let n = self.n();
        if i >= n || j >= n || k >= n {
            return None;
        }
        // evaluate in one canonical index order so permutations agree exactly
        let mut idx = [i, j, k];
        idx.sort_unstable();
        let [i, j, k] = idx;
        Some(match self {
            BenchmarkProblem::Rosenbrock => match idx {
                [0, 0, 0] => 2400.0 * x[0],
                [0, 0, 1] => -400.0,
                _ => 0.0,
            },
            BenchmarkProblem::Beale => (1..=3)
                .map(|m| {
                    let r = beale_residual(m, x);
                    2.0 * (r.d[i] * r.dd[j][k]
                        + r.d[j] * r.dd[i][k]
                        + r.d[k] * r.dd[i][j]
                        + r.r * r.ddd[i][j][k])
                })
                .sum(),
            _ => self
                .power_terms()?
                .iter()
                .map(|t| t.factor(x, 3) * t.u[i] * t.u[j] * t.u[k])
                .sum(),
        })
    }
}

/// `x'x` in `n` dimensions. Its third derivatives vanish, so SPSA gradient
/// estimates on it carry no deterministic bias.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sphere {
    pub n: usize,
}

impl Objective for Sphere {
    fn name(&self) -> &str {
        "sphere"
    }

    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().map(|v| 2.0 * v).collect())
    }

    fn hessian(&self, _x: &[f64]) -> Option<DMatrix<f64>> {
        Some(DMatrix::identity(self.n, self.n) * 2.0)
    }

    fn third(&self, _x: &[f64], _i: usize, _j: usize, _k: usize) -> Option<f64> {
        Some(0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableId {
    T1,
    T2,
    T3Spsa,
    T3Spsa1a,
    T4,
    T5,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::T1,
        TableId::T2,
        TableId::T3Spsa,
        TableId::T3Spsa1a,
        TableId::T4,
        TableId::T5,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            TableId::T1 => "T1",
            TableId::T2 => "T2",
            TableId::T3Spsa => "T3_spsa",
            TableId::T3Spsa1a => "T3_spsa1a",
            TableId::T4 => "T4",
            TableId::T5 => "T5",
        }
    }
}

impl FromStr for TableId {
    type Err = SpsaError;

    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL
            .into_iter()
            .find(|t| t.id().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| SpsaError::Argument(format!("unknown preset `{s}`")))
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// One reference gain preset.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPreset {
    pub table: TableId,
    pub problem: BenchmarkProblem,
    /// Algorithms the preset is meant for.
    pub algorithms: &'static [Algorithm],
    pub a: f64,
    pub big_a: f64,
    pub c: f64,
    pub alpha: f64,
    pub gamma: f64,
    /// Iteration cap `M` used with this row.
    pub max_iterations: u64,
}

impl ParameterPreset {
    pub fn schedule(&self) -> GainSchedule {
        GainSchedule::new(self.a, self.big_a, self.c, self.alpha, self.gamma)
            .expect("reference presets are valid")
    }
}

pub fn preset(table: TableId) -> ParameterPreset {
    use Algorithm::*;
    let (problem, algorithms, a, big_a, c, alpha, gamma, max_iterations): (
        _,
        &'static [Algorithm],
        _,
        _,
        _,
        _,
        _,
        _,
    ) = match table {
        TableId::T1 => (
            BenchmarkProblem::Rosenbrock,
            &[Spsa, Spsa1a],
            0.1,
            2200.0,
            0.1,
            0.602,
            0.101,
            5000,
        ),
        TableId::T2 => (
            BenchmarkProblem::Beale,
            &[Spsa, Spsa1a],
            1.0,
            30.0,
            0.1,
            1.0,
            0.16667,
            5000,
        ),
        TableId::T3Spsa => (
            BenchmarkProblem::PowellSingular,
            &[Spsa],
            0.08,
            1000.0,
            0.1,
            0.602,
            0.101,
            5000,
        ),
        TableId::T3Spsa1a => (
            BenchmarkProblem::PowellSingular,
            &[Spsa1a],
            0.02,
            100.0,
            0.1,
            0.602,
            0.101,
            5000,
        ),
        TableId::T4 => (
            BenchmarkProblem::Quartic,
            &[Spsa, Spsa1, Spsa1a],
            0.17,
            20.0,
            0.06,
            1.0,
            0.16667,
            100_000,
        ),
        TableId::T5 => (
            BenchmarkProblem::Quartic,
            &[Spsa, Spsa1, Spsa1a],
            0.27,
            100.0,
            0.06,
            1.0,
            0.16667,
            100_000,
        ),
    };
    ParameterPreset {
        table,
        problem,
        algorithms,
        a,
        big_a,
        c,
        alpha,
        gamma,
        max_iterations,
    }
}

/// Parses a preset id; errors on unknown ids.
pub fn preset_by_id(id: &str) -> Result<ParameterPreset> {
    Ok(preset(id.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let r = BenchmarkProblem::Rosenbrock;
        assert!((r.value(&[-1.2, 1.0]) - 24.2).abs() < 1e-12);
        assert_eq!(BenchmarkProblem::Beale.value(&[3.0, 0.5]), 0.0);
        assert_eq!(
            BenchmarkProblem::PowellSingular.value(&[3.0, -1.0, 0.0, 1.0]),
            215.0
        );
    }

    #[test]
    fn optima() {
        for p in BenchmarkProblem::ALL {
            let xs = p.x_star();
            assert!((p.value(&xs) - p.f_star()).abs() <= 1e-12, "{p}");
            let g = p.gradient(&xs).unwrap();
            assert!(g.iter().all(|v| v.abs() <= 1e-10), "{p}: {g:?}");
        }
        let q = BenchmarkProblem::Quartic;
        assert_eq!(q.gradient(&[0.0; 5]).unwrap(), vec![0.0; 5]);
        assert_eq!(q.value(&[0.0; 5]), 0.0);
    }

    #[test]
    fn quartic_third_derivatives_at_origin() {
        let q = BenchmarkProblem::Quartic;
        let z = [0.0; 5];
        for l in 0..5 {
            assert!((q.third(&z, l, l, l).unwrap() - 0.6).abs() < 1e-15);
            for i in 0..5 {
                if i != l {
                    assert_eq!(q.third(&z, i, i, l).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn powell_hessian_is_singular_at_optimum() {
        let h = BenchmarkProblem::PowellSingular.hessian(&[0.0; 4]).unwrap();
        assert!(h.rank(1e-9) < 4);
    }

    #[test]
    fn presets() {
        let t1 = preset(TableId::T1);
        assert_eq!(
            (t1.a, t1.big_a, t1.c, t1.alpha, t1.gamma),
            (0.1, 2200.0, 0.1, 0.602, 0.101)
        );
        let t3 = preset_by_id("T3_spsa1a").unwrap();
        assert_eq!(
            (t3.a, t3.big_a, t3.c, t3.alpha, t3.gamma),
            (0.02, 100.0, 0.1, 0.602, 0.101)
        );
        let t4 = preset(TableId::T4);
        assert_eq!(
            (t4.a, t4.big_a, t4.c, t4.alpha, t4.gamma),
            (0.17, 20.0, 0.06, 1.0, 0.16667)
        );
        let t5 = preset(TableId::T5);
        assert_eq!((t5.a, t5.big_a, t5.c), (0.27, 100.0, 0.06));
        let t2 = preset(TableId::T2);
        assert_eq!(
            (t2.a, t2.big_a, t2.c, t2.alpha, t2.gamma),
            (1.0, 30.0, 0.1, 1.0, 0.16667)
        );
        let t3s = preset(TableId::T3Spsa);
        assert_eq!((t3s.a, t3s.big_a), (0.08, 1000.0));
        assert!(preset_by_id("T9").is_err());
    }
}
