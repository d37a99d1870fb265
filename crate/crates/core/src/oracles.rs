//! Brute-force checks for the descent-side constant and the estimator bias.
//!
//! Everything here is written independently of the runtime path in
//! [`crate::spsa1a`]: sets are enumerated over all `2^n` sign vectors and
//! decided with integer arithmetic, and `rho` comes out as an exact rational.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::combinatorics::binomial;
use crate::error::{Result, SpsaError};
use crate::estimators::{sample_perturbation, spsa_gradient, Perturbation};
use crate::objective::{MeasuredObjective, Objective};
use crate::seed::{child_seed, RandomSource};
use crate::spsa1a::{rho_constant, rho_k, sample_descent_side};

/// Largest dimension the enumeration oracles accept.
pub const MAX_ENUMERATION_N: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct DescentSet {
    pub n: usize,
    pub members: Vec<Perturbation>,
    pub cardinality: usize,
}

fn check_capacity(n: usize) -> Result<()> {
    if n == 0 {
        return Err(SpsaError::Argument("enumeration needs n >= 1".into()));
    }
    if n > MAX_ENUMERATION_N {
        return Err(SpsaError::Capacity {
            n,
            max: MAX_ENUMERATION_N,
        });
    }
    Ok(())
}

fn sign_pattern(g_hat: &[f64]) -> Result<Vec<i64>> {
    let m = g_hat.first().map_or(0.0, |v| v.abs());
    if m == 0.0 || g_hat.iter().any(|v| v.abs() != m) {
        return Err(SpsaError::Argument(
            "enumeration expects nonzero components of equal magnitude".into(),
        ));
    }
    Ok(g_hat
        .iter()
        .map(|v| if *v > 0.0 { 1 } else { -1 })
        .collect())
}

/// Calls `visit` with every `d` in `{-1,1}^n` such that `d . s >= 0`.
fn for_each_member(s: &[i64], mut visit: impl FnMut(u64)) {
    let n = s.len();
    for mask in 0u64..(1u64 << n) {
        let dot: i64 = (0..n)
            .map(|i| if mask >> i & 1 == 1 { s[i] } else { -s[i] })
            .sum();
        if dot >= 0 {
            visit(mask);
        }
    }
}

fn mask_to_signs(mask: u64, n: usize) -> Vec<i8> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// Every `d` in `{-1,1}^n` with `d . g >= 0`.
pub fn enumerate_descent_set(g_hat: &[f64]) -> Result<DescentSet> {
    check_capacity(g_hat.len())?;
    let s = sign_pattern(g_hat)?;
    let n = s.len();
    let mut members = Vec::new();
    for_each_member(&s, |mask| {
        members.push(Perturbation::new(mask_to_signs(mask, n)).expect("sign vector"))
    });
    Ok(DescentSet {
        n,
        cardinality: members.len(),
        members,
    })
}

/// Component-wise sum of all members of the descent set.
pub fn signed_member_sum(g_hat: &[f64]) -> Result<Vec<i64>> {
    check_capacity(g_hat.len())?;
    let s = sign_pattern(g_hat)?;
    let n = s.len();
    let mut sum = vec![0i64; n];
    for_each_member(&s, |mask| {
        for (i, acc) in sum.iter_mut().enumerate() {
            *acc += if mask >> i & 1 == 1 { 1 } else { -1 };
        }
    });
    Ok(sum)
}

/// Cardinality predicted by counting: `2^(n-1) + C(n, n/2)/2` for even `n`,
/// `2^(n-1)` for odd `n`.
pub fn descent_set_cardinality_formula(n: usize) -> u128 {
    let m = n as u64;
    let half_cube = 1u128 << (m - 1);
    if n.is_multiple_of(2) {
        half_cube + binomial(m, m / 2).expect("small n") / 2
    } else {
        half_cube
    }
}

/// Signed member sum predicted by counting: `C(n-1, n/2)` for even `n`,
/// `C(n-1, (n-1)/2)` for odd `n`, times `sgn(g)`.
pub fn signed_sum_formula(n: usize) -> u128 {
    let m = n as u64;
    if n.is_multiple_of(2) {
        binomial(m - 1, m / 2).expect("small n")
    } else {
        binomial(m - 1, (m - 1) / 2).expect("small n")
    }
}

/// Exact mean of the uniform law on the descent set of `g = (1, .., 1)`.
///
/// Returns the common component value; an error if the components differ,
/// which would contradict coordinate symmetry.
pub fn rho_bruteforce(n: usize) -> Result<Ratio<i64>> {
    let ones = vec![1.0; n];
    let sum = signed_member_sum(&ones)?;
    let card = enumerate_cardinality(n)?;
    if sum.iter().any(|v| *v != sum[0]) {
        return Err(SpsaError::Argument(format!(
            "descent-set mean is not symmetric: {sum:?}"
        )));
    }
    Ok(Ratio::new(sum[0], card as i64))
}

fn enumerate_cardinality(n: usize) -> Result<u64> {
    check_capacity(n)?;
    let s = vec![1i64; n];
    let mut count = 0u64;
    for_each_member(&s, |_| count += 1);
    Ok(count)
}

/// One row of [`verify_rho`].
#[derive(Clone, Debug, Serialize)]
pub struct RhoCheck {
    pub n: usize,
    pub closed_form: String,
    pub brute_force: String,
    pub cardinality: u64,
    pub cardinality_formula: u128,
    pub signed_sum: i64,
    pub signed_sum_formula: u128,
    pub matches: bool,
}

/// Compares the closed-form `rho` with enumeration for `n = 1..=max_n`.
pub fn verify_rho(max_n: usize) -> Result<Vec<RhoCheck>> {
    check_capacity(max_n)?;
    (1..=max_n)
        .map(|n| {
            let closed = rho_constant(n)?.exact.expect("exact for small n");
            let brute = rho_bruteforce(n)?;
            let card = enumerate_cardinality(n)?;
            let sum = signed_member_sum(&vec![1.0; n])?[0];
            let card_f = descent_set_cardinality_formula(n);
            let sum_f = signed_sum_formula(n);
            let matches = *closed.numer() == *brute.numer() as u128
                && *closed.denom() == *brute.denom() as u128
                && card as u128 == card_f
                && sum as u128 == sum_f;
            Ok(RhoCheck {
                n,
                closed_form: format!("{}/{}", closed.numer(), closed.denom()),
                brute_force: format!("{}/{}", brute.numer(), brute.denom()),
                cardinality: card,
                cardinality_formula: card_f,
                signed_sum: sum,
                signed_sum_formula: sum_f,
                matches,
            })
        })
        .collect()
}

/// Bias of the averaged SPSA1-A direction at one perturbation size.
#[derive(Clone, Debug, Serialize)]
pub struct BiasRow {
    pub c: f64,
    /// Control-variate estimate of `E[(g + xi_hat)/(1 + rho_k)] - grad f`.
    pub bias: Vec<f64>,
    pub std_err: Vec<f64>,
    pub bias_norm: f64,
    pub norm_std_err: f64,
    /// Plain sample mean of `(g + xi_hat)/(1 + rho_k) - grad f`.
    pub raw_bias: Vec<f64>,
    pub raw_std_err: Vec<f64>,
    /// Whether the norm stands more than four standard errors above zero.
    pub resolved: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BiasScan {
    pub rows: Vec<BiasRow>,
    /// Least-squares slope of `ln |bias|` against `ln c` over rows with a
    /// positive norm; `None` with fewer than two such rows.
    pub slope: Option<f64>,
}

#[derive(Clone, Copy, Default)]
struct Moments {
    count: u64,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(&mut self, o: &Moments) {
        self.count += o.count;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    fn std_err(&self) -> f64 {
        let n = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

const BIAS_BLOCK: usize = 50_000;

/// Monte Carlo estimate of the deterministic bias of the averaged direction
/// `(g + xi_hat)/(1 + rho_k)` at `x`, for each `c` in `c_values`.
///
/// Measurements are noiseless. Two control variates with known zero mean are
/// subtracted from each draw: `(xi_hat - rho sgn g)/(1 + rho_k)` and
/// `xi xi' grad f - grad f`. The plain sample mean is reported alongside.
pub fn bias_scan(
    problem: &dyn Objective,
    x: &[f64],
    c_values: &[f64],
    replications: usize,
    seed: u64,
) -> Result<BiasScan> {
    let n = problem.dim();
    crate::objective::check_dim(n, x)?;
    if replications < 2 {
        return Err(SpsaError::InsufficientSamples {
            needed: 2,
            got: replications,
        });
    }
    let grad = problem
        .gradient(x)
        .ok_or_else(|| SpsaError::NotApplicable(format!("{} has no gradient", problem.name())))?;
    let rho = rho_constant(n)?;

    let mut rows = Vec::with_capacity(c_values.len());
    for (ci, &c) in c_values.iter().enumerate() {
        if !(c.is_finite() && c > 0.0) {
            return Err(SpsaError::Argument(format!("c must be positive, got {c}")));
        }
        let blocks = replications.div_ceil(BIAS_BLOCK);
        let partials: Vec<Result<(Vec<Moments>, Vec<Moments>)>> = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let draws = BIAS_BLOCK.min(replications - b * BIAS_BLOCK);
                let mut rng = RandomSource::new(child_seed(seed, ci as u64, b as u64));
                let mut obj = MeasuredObjective::noiseless(problem);
                let mut adj = vec![Moments::default(); n];
                let mut raw = vec![Moments::default(); n];
                for _ in 0..draws {
                    let xi = sample_perturbation(n, &mut rng)?;
                    let est = spsa_gradient(&mut obj, x, c, &xi)?;
                    let g = &est.g_hat;
                    let rk = rho_k(&rho, g);
                    let xi_v = xi.to_vec();
                    let proj: f64 = xi_v.iter().zip(&grad).map(|(a, b)| a * b).sum();
                    if rk.is_infinite() {
                        for l in 0..n {
                            raw[l].push(-grad[l]);
                            adj[l].push(g[l] - xi_v[l] * proj);
                        }
                        continue;
                    }
                    let xi_hat = sample_descent_side(g, &mut rng)?;
                    let w = 1.0 / (1.0 + rk);
                    for l in 0..n {
                        let d = xi_hat.signs()[l] as f64;
                        let sgn = g[l].signum();
                        let z = (g[l] + d) * w - grad[l];
                        let cv = (d - rho.value * sgn) * w + (xi_v[l] * proj - grad[l]);
                        raw[l].push(z);
                        adj[l].push(z - cv);
                    }
                }
                Ok((adj, raw))
            })
            .collect();
        let mut adj = vec![Moments::default(); n];
        let mut raw = vec![Moments::default(); n];
        for p in partials {
            let (a, r) = p?;
            for l in 0..n {
                adj[l].merge(&a[l]);
                raw[l].merge(&r[l]);
            }
        }
        let bias: Vec<f64> = adj.iter().map(Moments::mean).collect();
        let std_err: Vec<f64> = adj.iter().map(Moments::std_err).collect();
        let bias_norm = bias.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_std_err = std_err.iter().map(|v| v * v).sum::<f64>().sqrt();
        rows.push(BiasRow {
            c,
            resolved: bias_norm > 4.0 * norm_std_err,
            bias,
            std_err,
            bias_norm,
            norm_std_err,
            raw_bias: raw.iter().map(Moments::mean).collect(),
            raw_std_err: raw.iter().map(Moments::std_err).collect(),
        });
    }
    let slope = log_log_slope(&rows);
    Ok(BiasScan { rows, slope })
}

fn log_log_slope(rows: &[BiasRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.bias_norm > 0.0)
        .map(|r| (r.c.ln(), r.bias_norm.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sets() {
        let s = enumerate_descent_set(&[5.0]).unwrap();
        assert_eq!(s.cardinality, 1);
        assert_eq!(s.members[0].signs(), &[1]);

        let s = enumerate_descent_set(&[2.0, -2.0]).unwrap();
        assert_eq!(s.cardinality, 3);
        assert!(!s.members.contains(&Perturbation::new(vec![-1, 1]).unwrap()));

        assert_eq!(
            enumerate_descent_set(&[1.0, -1.0, 1.0])
                .unwrap()
                .cardinality,
            4
        );
    }

    #[test]
    fn capacity_and_domain() {
        assert!(matches!(
            enumerate_descent_set(&[1.0; 21]),
            Err(SpsaError::Capacity { n: 21, max: 20 })
        ));
        assert!(enumerate_descent_set(&[1.0, 2.0]).is_err());
        assert!(enumerate_descent_set(&[0.0, 0.0]).is_err());
        assert!(rho_bruteforce(0).is_err());
    }

    #[test]
    fn brute_force_rho() {
        assert_eq!(rho_bruteforce(1).unwrap(), Ratio::new(1, 1));
        assert_eq!(rho_bruteforce(2).unwrap(), Ratio::new(1, 3));
        assert_eq!(rho_bruteforce(3).unwrap(), Ratio::new(1, 2));
        assert_eq!(rho_bruteforce(4).unwrap(), Ratio::new(3, 11));
        assert_eq!(rho_bruteforce(5).unwrap(), Ratio::new(3, 8));
    }

    #[test]
    fn sign_pattern_symmetry() {
        // the mean points along sgn(g) for any sign pattern
        let g = [1.0, -1.0, -1.0, 1.0];
        let sum = signed_member_sum(&g).unwrap();
        assert_eq!(sum, vec![3, -3, -3, 3]);
    }

    #[test]
    fn verify_rho_table() {
        let rows = verify_rho(12).unwrap();
        assert_eq!(rows.len(), 12);
        assert!(rows.iter().all(|r| r.matches), "{rows:#?}");
    }
}
