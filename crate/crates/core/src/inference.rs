//! Central and non-central χ² distributions, and the significance test /
//! confidence interval for a transfer entropy estimate built on them.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::error::{Error, Result};

/// Poisson mass left out of the non-central mixture.
const MIXTURE_TAIL: f64 = 1e-12;
const DEFAULT_ALPHA: f64 = 0.05;

fn check_dof(d: u64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidArgument(
            "degrees of freedom must be positive".into(),
        ));
    }
    Ok(d as f64)
}

fn check_nonnegative(name: &str, v: f64) -> Result<()> {
    if v.is_nan() || v < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "{name} must be nonnegative, got {v}"
        )));
    }
    Ok(())
}

/// P(χ²(d) ≤ x).
pub fn chi2_cdf(x: f64, d: u64) -> Result<f64> {
    let d = check_dof(d)?;
    check_nonnegative("x", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(gamma_lr(d / 2.0, x / 2.0))
}

/// P(χ²(d) > x), computed directly so small tail probabilities keep their precision.
pub fn chi2_sf(x: f64, d: u64) -> Result<f64> {
    let d = check_dof(d)?;
    check_nonnegative("x", x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(gamma_ur(d / 2.0, x / 2.0))
}

/// Sums `w_j · term(j)` over the Poisson(μ) weights, starting at the mode
/// and walking outwards until the omitted mass is below [`MIXTURE_TAIL`].
fn poisson_mixture<F: Fn(u64) -> f64>(mu: f64, term: F) -> f64 {
    let weight = |j: u64| (-mu + j as f64 * mu.ln() - ln_gamma(j as f64 + 1.0)).exp();
    let mode = mu.floor() as u64;
    let mut mass = 0.0;
    let mut sum = 0.0;

    // Weights decrease monotonically below the mode.
    for j in (0..=mode).rev() {
        let w = weight(j);
        mass += w;
        sum += w * term(j);
        if w < MIXTURE_TAIL * 1e-6 {
            break;
        }
    }
    let mut j = mode + 1;
    while 1.0 - mass > MIXTURE_TAIL {
        let w = weight(j);
        if w == 0.0 && j as f64 > mu {
            break;
        }
        mass += w;
        sum += w * term(j);
        j += 1;
    }
    sum
}

/// P(χ²(d; λ) ≤ x) as a Poisson(λ/2) mixture of central χ²(d + 2j) laws.
pub fn noncentral_chi2_cdf(x: f64, d: u64, lambda: f64) -> Result<f64> {
    check_nonnegative("lambda", lambda)?;
    if lambda == 0.0 {
        return chi2_cdf(x, d);
    }
    chi2_cdf(x, d)?;
    let p = poisson_mixture(lambda / 2.0, |j| {
        chi2_cdf(x, d + 2 * j).expect("validated arguments")
    });
    Ok(p.clamp(0.0, 1.0))
}

/// P(χ²(d; λ) > x).
pub fn noncentral_chi2_sf(x: f64, d: u64, lambda: f64) -> Result<f64> {
    check_nonnegative("lambda", lambda)?;
    if lambda == 0.0 {
        return chi2_sf(x, d);
    }
    chi2_sf(x, d)?;
    let p = poisson_mixture(lambda / 2.0, |j| {
        chi2_sf(x, d + 2 * j).expect("validated arguments")
    });
    Ok(p.clamp(0.0, 1.0))
}

/// Density of χ²(d; λ) at `x`, as the matching Poisson mixture of central densities.
pub fn noncentral_chi2_pdf(x: f64, d: u64, lambda: f64) -> Result<f64> {
    check_dof(d)?;
    check_nonnegative("x", x)?;
    check_nonnegative("lambda", lambda)?;
    let central = |dof: f64| {
        if x == 0.0 {
            return match dof {
                v if v < 2.0 => f64::INFINITY,
                2.0 => 0.5,
                _ => 0.0,
            };
        }
        let h = dof / 2.0;
        ((h - 1.0) * x.ln() - x / 2.0 - h * 2f64.ln() - ln_gamma(h)).exp()
    };
    if lambda == 0.0 {
        return Ok(central(d as f64));
    }
    Ok(poisson_mixture(lambda / 2.0, |j| {
        central((d + 2 * j) as f64)
    }))
}

/// Smallest x with P(χ²(d) ≤ x) = p, by bisection.
pub fn chi2_quantile(p: f64, d: u64) -> Result<f64> {
    check_dof(d)?;
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside [0, 1)"
        )));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = (d as f64).max(1.0);
    while chi2_cdf(hi, d)? < p {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(mid, d)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Solves `noncentral_chi2_cdf(x; d, λ) = target` for λ ≥ 0. The CDF is
/// nonincreasing in λ; returns 0 when the CDF at λ = 0 is already at or
/// below `target`.
fn invert_noncentrality(x: f64, d: u64, target: f64) -> Result<f64> {
    if noncentral_chi2_cdf(x, d, 0.0)? <= target {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = x.max(1.0);
    while noncentral_chi2_cdf(x, d, hi)? > target {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-9 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if noncentral_chi2_cdf(x, d, mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outcome of testing the null of zero transfer entropy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeTestResult {
    /// Nats.
    pub te_hat: f64,
    /// 2·n_eff·te_hat, asymptotically χ²(dof) under the null.
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub confidence_level: f64,
    pub effective_samples: u64,
}

/// [`te_test_with_alpha`] at the default 95% confidence level.
pub fn te_test(te_hat: f64, n_eff: u64, d: u64) -> Result<TeTestResult> {
    te_test_with_alpha(te_hat, n_eff, d, DEFAULT_ALPHA)
}

/// Significance test and non-centrality-inversion confidence interval for a
/// transfer entropy estimate from `n_eff` effective samples with `d` degrees
/// of freedom.
pub fn te_test_with_alpha(te_hat: f64, n_eff: u64, d: u64, alpha: f64) -> Result<TeTestResult> {
    if n_eff == 0 {
        return Err(Error::InvalidArgument("no effective samples".into()));
    }
    check_dof(d)?;
    check_nonnegative("te_hat", te_hat)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} outside (0, 1)"
        )));
    }
    let scale = 2.0 * n_eff as f64;
    let statistic = scale * te_hat;
    let lambda_upper = invert_noncentrality(statistic, d, alpha / 2.0)?;
    let lambda_lower = invert_noncentrality(statistic, d, 1.0 - alpha / 2.0)?;
    Ok(TeTestResult {
        te_hat,
        statistic,
        dof: d,
        p_value: chi2_sf(statistic, d)?,
        ci_lower: lambda_lower / scale,
        ci_upper: lambda_upper / scale,
        confidence_level: 1.0 - alpha,
        effective_samples: n_eff,
    })
}

/// Kolmogorov-Smirnov distance between the empirical law of `sorted`
/// (ascending) and a continuous reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (((i + 1) as f64 / n) - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_two_dof() {
        assert_abs_diff_eq!(
            chi2_cdf(2.0, 2).unwrap(),
            1.0 - (-1f64).exp(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(chi2_cdf(2.0, 2).unwrap(), 0.6321206, epsilon = 1e-7);
        assert_eq!(chi2_cdf(0.0, 5).unwrap(), 0.0);
        // 1 − e^{−x/2} = 0.95 at x = 2 ln 20.
        assert_abs_diff_eq!(chi2_cdf(5.9915, 2).unwrap(), 0.95, epsilon = 1e-5);
        assert!(chi2_cdf(-1.0, 2).is_err());
        assert!(chi2_cdf(1.0, 0).is_err());
    }

    #[test]
    fn quantile_examples() {
        assert_abs_diff_eq!(
            chi2_quantile(1.0 - (-1f64).exp(), 2).unwrap(),
            2.0,
            epsilon = 1e-12
        );
        assert_eq!(chi2_quantile(0.0, 3).unwrap(), 0.0);
        assert_abs_diff_eq!(
            chi2_quantile(0.95, 2).unwrap(),
            2.0 * 20f64.ln(),
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(chi2_quantile(0.95, 2).unwrap(), 5.9915, epsilon = 1e-4);
        assert!(chi2_quantile(1.0, 2).is_err());
        assert!(chi2_quantile(-0.1, 2).is_err());
    }

    #[test]
    fn quantile_roundtrip_and_monotone() {
        for d in 1..=20 {
            let mut prev = 0.0;
            for i in 1..100 {
                let p = i as f64 / 100.0;
                let q = chi2_quantile(p, d).unwrap();
                assert!((chi2_cdf(q, d).unwrap() - p).abs() <= 1e-9, "d={d} p={p}");
                assert!(q > prev);
                prev = q;
            }
        }
    }

    #[test]
    fn noncentral_reduces_to_central() {
        for d in [1, 2, 5, 17] {
            for x in [0.0, 0.3, 1.0, 4.0, 25.0] {
                let c = chi2_cdf(x, d).unwrap();
                assert_eq!(noncentral_chi2_cdf(x, d, 0.0).unwrap(), c);
                assert!((noncentral_chi2_cdf(x, d, 1e-12).unwrap() - c).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn noncentral_two_dof_against_bessel_series() {
        // For d = 2 every mixture component has the closed form
        // P(1 + j, b) = 1 − e^{−b} Σ_{i≤j} b^i / i!, so
        // F = 1 − e^{−(a+b)} Σ_j (a^j / j!) Σ_{i≤j} b^i / i! with a = λ/2, b = x/2.
        let oracle = |x: f64, lambda: f64| {
            let (a, b) = (lambda / 2.0, x / 2.0);
            let mut total = 0.0;
            let mut aj = 1.0;
            let mut bi = 1.0;
            let mut inner = 1.0;
            for j in 0..400 {
                if j > 0 {
                    aj *= a / j as f64;
                    bi *= b / j as f64;
                    inner += bi;
                }
                total += aj * inner;
            }
            1.0 - (-(a + b)).exp() * total
        };
        for (x, lambda) in [(1.0, 0.5), (3.0, 2.0), (10.0, 4.0), (6.0, 12.0)] {
            let got = noncentral_chi2_cdf(x, 2, lambda).unwrap();
            assert_abs_diff_eq!(got, oracle(x, lambda), epsilon = 1e-11);
        }
    }

    #[test]
    fn noncentral_mean_by_quadrature() {
        // Mean d + λ from ∫ (1 − F(x)) dx, trapezoid on a fine grid.
        for (d, lambda) in [(2, 0.0), (2, 5.0), (3, 20.0), (1, 1.5)] {
            let upper =
                (d as f64 + lambda) + 20.0 * (2.0 * (d as f64 + 2.0 * lambda)).sqrt() + 50.0;
            let steps = 40_000;
            let h = upper / steps as f64;
            let mut integral = 0.0;
            for i in 0..=steps {
                let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
                integral += w * noncentral_chi2_sf(i as f64 * h, d, lambda).unwrap();
            }
            integral *= h;
            assert_abs_diff_eq!(integral, d as f64 + lambda, epsilon = 1e-3);
        }
    }

    #[test]
    fn noncentral_monotone_in_lambda_and_x() {
        for d in [1, 2, 6] {
            for x in [0.5, 2.0, 10.0, 60.0] {
                let mut prev = 1.0;
                for i in 0..60 {
                    let f = noncentral_chi2_cdf(x, d, i as f64 * 1.5).unwrap();
                    assert!(f <= prev + 1e-15);
                    prev = f;
                }
            }
            let mut prev = 0.0;
            for i in 0..400 {
                let f = noncentral_chi2_cdf(i as f64, d, 30.0).unwrap();
                assert!(f >= prev);
                prev = f;
            }
            assert!(1.0 - prev < 1e-12);
        }
    }

    #[test]
    fn cdf_and_sf_complement() {
        for (x, d, l) in [
            (3.0, 2, 1.0),
            (300.0, 2, 337.0),
            (0.1, 4, 0.0),
            (50.0, 10, 60.0),
        ] {
            let s = noncentral_chi2_cdf(x, d, l).unwrap() + noncentral_chi2_sf(x, d, l).unwrap();
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn pdf_integrates_to_cdf() {
        let (d, lambda, x) = (3, 7.0, 9.0);
        let steps = 20_000;
        let h = x / steps as f64;
        let integral: f64 = (0..steps)
            .map(|i| noncentral_chi2_pdf((i as f64 + 0.5) * h, d, lambda).unwrap() * h)
            .sum();
        assert_abs_diff_eq!(
            integral,
            noncentral_chi2_cdf(x, d, lambda).unwrap(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn test_zero_estimate() {
        let r = te_test(0.0, 100, 2).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.ci_lower, 0.0);
    }

    #[test]
    fn test_p_value_at_critical_value() {
        let n_eff = 1000;
        let r = te_test(5.9915 / (2.0 * n_eff as f64), n_eff, 2).unwrap();
        assert_abs_diff_eq!(r.statistic, 5.9915, epsilon = 1e-12);
        assert_abs_diff_eq!(r.p_value, 0.05, epsilon = 1e-5);
        assert_abs_diff_eq!(
            r.p_value,
            1.0 - chi2_cdf(r.statistic, 2).unwrap(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn interval_endpoints_hit_targets() {
        let r = te_test_with_alpha(0.08, 2047, 2, 0.1).unwrap();
        let s = r.statistic;
        let scale = 2.0 * 2047.0;
        assert_abs_diff_eq!(
            noncentral_chi2_cdf(s, 2, r.ci_upper * scale).unwrap(),
            0.05,
            epsilon = 1e-8
        );
        assert_abs_diff_eq!(
            noncentral_chi2_cdf(s, 2, r.ci_lower * scale).unwrap(),
            0.95,
            epsilon = 1e-8
        );
        assert!(r.ci_lower < r.te_hat && r.te_hat < r.ci_upper);
        assert!(r.ci_lower <= r.te_hat + 2.0 / scale);
        assert_abs_diff_eq!(r.confidence_level, 0.9);
    }

    #[test]
    fn small_statistic_clamps_lower_bound() {
        // Statistic 1.0: between the central 2.5% and 97.5% quantiles.
        let r = te_test(0.005, 100, 2).unwrap();
        assert_eq!(r.ci_lower, 0.0);
        assert!(r.ci_upper > 0.0);
        // Statistic 0.02: below the central 2.5% quantile, both ends clamp.
        let r = te_test(1e-4, 100, 2).unwrap();
        assert_eq!((r.ci_lower, r.ci_upper), (0.0, 0.0));
    }

    #[test]
    fn test_rejects_bad_input() {
        assert!(te_test(-0.1, 10, 2).is_err());
        assert!(te_test(0.1, 0, 2).is_err());
        assert!(te_test(0.1, 10, 0).is_err());
        assert!(te_test_with_alpha(0.1, 10, 2, 1.5).is_err());
    }

    #[test]
    fn ks_against_uniform() {
        let sample: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert_abs_diff_eq!(ks_distance(&sample, |u| u), 0.005, epsilon = 1e-12);
        let shifted: Vec<f64> = sample.iter().map(|u| u * 0.5).collect();
        assert!(ks_distance(&shifted, |u| u) > 0.49);
    }
}
