//! Binomial coefficients: exact in `u128` where they fit, log-domain beyond.

use statrs::function::gamma::ln_gamma;

/// `C(n, k)` exactly, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pascal_triangle() {
        for n in 1..=66u64 {
            for k in 1..n {
                assert_eq!(
                    binomial(n, k).unwrap(),
                    binomial(n - 1, k - 1).unwrap() + binomial(n - 1, k).unwrap()
                );
            }
        }
        assert_eq!(binomial(64, 32), Some(1_832_624_140_942_590_534));
        assert_eq!(binomial(3, 5), Some(0));
        assert_eq!(binomial(0, 0), Some(1));
    }

    #[test]
    fn overflow_is_reported() {
        assert!(binomial(200, 100).is_none());
    }

    #[test]
    fn log_domain_agrees() {
        for (n, k) in [(10u64, 3u64), (64, 32), (100, 50)] {
            let exact = binomial(n, k).unwrap() as f64;
            assert!((ln_binomial(n, k) - exact.ln()).abs() < 1e-10);
        }
    }
}
