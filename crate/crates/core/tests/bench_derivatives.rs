use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spsa::bench::BenchmarkProblem;
use spsa::Objective;

// five-point central difference
fn diff<F: Fn(f64) -> f64>(f: F, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}

fn shifted(x: &[f64], i: usize, t: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] += t;
    y
}

fn random_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect()
}

fn close(approx: f64, exact: f64, rel: f64, scale: f64) -> bool {
    (approx - exact).abs() <= rel * exact.abs().max(scale)
}

#[test]
fn gradients_match_finite_differences() {
    for p in BenchmarkProblem::ALL {
        let n = p.n();
        for x in random_points(n, 100, 1) {
            let g = p.gradient(&x).unwrap();
            let scale = g.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                let fd = diff(|t| p.value(&shifted(&x, i, t)), 1e-3);
                assert!(
                    close(fd, g[i], 1e-6, scale),
                    "{p} at {x:?}: d{i} {fd} vs {}",
                    g[i]
                );
            }
        }
    }
}

#[test]
fn hessians_match_finite_differences() {
    for p in BenchmarkProblem::ALL {
        let n = p.n();
        for x in random_points(n, 100, 2) {
            let h = p.hessian(&x).unwrap();
            assert_eq!(h, h.transpose(), "{p} hessian not symmetric");
            let scale = h.amax().max(1.0);
            for i in 0..n {
                for j in 0..n {
                    let fd = diff(|t| p.gradient(&shifted(&x, j, t)).unwrap()[i], 1e-3);
                    assert!(
                        close(fd, h[(i, j)], 1e-6, scale),
                        "{p} at {x:?}: h{i}{j} {fd} vs {}",
                        h[(i, j)]
                    );
                }
            }
        }
    }
}

#[test]
fn third_derivatives_match_finite_differences() {
    for p in BenchmarkProblem::ALL {
        let n = p.n();
        for x in random_points(n, 100, 3) {
            let mut scale = 1.0_f64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        scale = scale.max(p.third(&x, i, j, k).unwrap().abs());
                    }
                }
            }
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let t = p.third(&x, i, j, k).unwrap();
                        // symmetric in all index orders
                        assert_eq!(t, p.third(&x, k, i, j).unwrap());
                        assert_eq!(t, p.third(&x, j, i, k).unwrap());
                        let fd = diff(|s| p.hessian(&shifted(&x, k, s)).unwrap()[(i, j)], 1e-3);
                        assert!(
                            close(fd, t, 1e-6, scale),
                            "{p} at {x:?}: t{i}{j}{k} {fd} vs {t}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn optima_are_stationary() {
    for p in BenchmarkProblem::ALL {
        let xs = p.x_star();
        assert!((p.value(&xs) - p.f_star()).abs() <= 1e-12, "{p}");
        assert!(
            p.gradient(&xs).unwrap().iter().all(|g| g.abs() <= 1e-10),
            "{p}"
        );
    }
    let q = BenchmarkProblem::Quartic;
    assert_eq!(q.value(&[0.0; 5]), 0.0);
    assert!(q.gradient(&[0.0; 5]).unwrap().iter().all(|g| *g == 0.0));
}

#[test]
fn quartic_grid_search_finds_origin() {
    // unit grid over [-10, 10]^5, 21^5 points
    let q = BenchmarkProblem::Quartic;
    let mut best = (f64::INFINITY, [0i32; 5]);
    let mut x = [0.0; 5];
    let mut idx = [-10i32; 5];
    loop {
        for (xi, ii) in x.iter_mut().zip(&idx) {
            *xi = *ii as f64;
        }
        let v = q.value(&x);
        if v < best.0 {
            best = (v, idx);
        }
        if idx != [0; 5] {
            assert!(v > 0.0, "f({x:?}) = {v}");
        }
        let mut d = 0;
        while d < 5 {
            idx[d] += 1;
            if idx[d] <= 10 {
                break;
            }
            idx[d] = -10;
            d += 1;
        }
        if d == 5 {
            break;
        }
    }
    assert_eq!(best, (0.0, [0; 5]));
}

#[test]
fn dimension_mismatch_is_reported() {
    use spsa::{MeasuredObjective, SpsaError};
    let p = BenchmarkProblem::Beale;
    let mut obj = MeasuredObjective::noiseless(&p);
    assert!(matches!(
        obj.measure(&[1.0, 2.0, 3.0]),
        Err(SpsaError::Argument(_))
    ));
    assert_eq!(obj.measurements(), 0);
}
