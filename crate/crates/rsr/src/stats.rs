//! Small statistics kit: chi-square goodness of fit and the special
//! functions behind it. Used by the uniformity checks and the assessment
//! harnesses; precise to far better than the 1e-3 significance levels the
//! checks run at.

/// ln Γ(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0);
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (std::f64::consts::TAU).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized lower incomplete gamma P(a, x) by series expansion.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..500 {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * 1e-15 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x) by continued fraction.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    h * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Upper tail Q(a, x) = 1 - P(a, x) of the regularized incomplete gamma.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        1.0
    } else if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_cf(a, x)
    }
}

/// Survival function of the chi-square distribution with `df` degrees of
/// freedom: the probability of a statistic at least as large as `x` under
/// the null hypothesis.
pub fn chi_square_sf(x: f64, df: u32) -> f64 {
    gamma_q(df as f64 / 2.0, x / 2.0)
}

/// Pearson chi-square statistic for observed bin counts against uniform
/// expectation. Returns `(statistic, degrees of freedom)`.
pub fn chi_square_uniform(observed: &[u64]) -> (f64, u32) {
    assert!(observed.len() >= 2);
    let total: u64 = observed.iter().sum();
    let expected = total as f64 / observed.len() as f64;
    let stat = observed
        .iter()
        .map(|&o| {
            let d = o as f64 - expected;
            d * d / expected
        })
        .sum();
    (stat, observed.len() as u32 - 1)
}

/// Convenience: chi-square goodness-of-fit p-value for uniform bins.
pub fn uniformity_p_value(observed: &[u64]) -> f64 {
    let (stat, df) = chi_square_uniform(observed);
    chi_square_sf(stat, df)
}

/// Two-sided binomial sign-test p-value for `k` successes out of `n` fair
/// coin flips, computed from the exact binomial tail.
pub fn sign_test_p_value(k: u64, n: u64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let lo = k.min(n - k);
    // Sum both tails of Binomial(n, 1/2).
    let ln_half_n = -(n as f64) * std::f64::consts::LN_2;
    let mut tail = 0.0;
    for i in 0..=lo {
        let ln_c = ln_gamma(n as f64 + 1.0)
            - ln_gamma(i as f64 + 1.0)
            - ln_gamma((n - i) as f64 + 1.0);
        tail += (ln_c + ln_half_n).exp();
    }
    (2.0 * tail).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_reference_points() {
        // Γ(1) = 1, Γ(5) = 24, Γ(0.5) = sqrt(pi)
        assert!((ln_gamma(1.0)).abs() < 1e-12);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-12);
    }

    #[test]
    fn chi_square_sf_table_points() {
        // Standard table quantiles: chi2(0.999; 7) = 24.3219, chi2(0.95; 3) = 7.8147.
        assert!((chi_square_sf(24.3219, 7) - 0.001).abs() < 5e-5);
        assert!((chi_square_sf(7.8147, 3) - 0.05).abs() < 5e-4);
        // df = 2 has the closed form exp(-x/2).
        assert!((chi_square_sf(5.0, 2) - (-2.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn uniform_bins_pass() {
        let obs = [1000u64, 1010, 990, 1005, 995, 1002, 998, 1000];
        assert!(uniformity_p_value(&obs) > 0.5);
    }

    #[test]
    fn skewed_bins_fail() {
        let obs = [2000u64, 500, 1000, 1000, 1000, 1000, 1000, 500];
        assert!(uniformity_p_value(&obs) < 1e-6);
    }

    #[test]
    fn sign_test_extremes() {
        assert!(sign_test_p_value(50, 100) > 0.9);
        assert!(sign_test_p_value(5, 100) < 1e-6);
        assert_eq!(sign_test_p_value(0, 0), 1.0);
    }
}
