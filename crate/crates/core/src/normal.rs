//! Standard normal distribution helpers.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{PI, SQRT_2};

/// Standard normal CDF.
pub fn cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-x / SQRT_2)
}

/// Standard normal survival function `1 - cdf(x)`, accurate in the upper tail.
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// Standard normal quantile function.
pub fn ppf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = -SQRT_2 * erfc_inv(2.0 * p);
    // one Newton step against the accurate cdf
    let d = pdf(x);
    if d > 0.0 && x.is_finite() {
        let r = if x > 0.0 { (1.0 - p) - sf(x) } else { cdf(x) - p };
        x - r / d
    } else {
        x
    }
}

/// Natural log of the standard normal CDF, finite far into the lower tail.
pub fn log_cdf(x: f64) -> f64 {
    if x > -30.0 {
        return cdf(x).ln();
    }
    // Mills-ratio asymptotic series.
    let x2 = x * x;
    let inv = 1.0 / x2;
    let series = 1.0 - inv + 3.0 * inv * inv - 15.0 * inv * inv * inv + 105.0 * inv.powi(4);
    -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * PI).ln() + series.ln()
}

/// Standard normal density.
pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        assert_relative_eq!(cdf(0.0), 0.5, epsilon = 1e-16);
        assert_relative_eq!(cdf(1.959963984540054), 0.975, epsilon = 1e-15);
        assert_relative_eq!(ppf(0.95), 1.6448536269514722, epsilon = 1e-14);
        assert_relative_eq!(ppf(1e-12), -7.034483825301131, max_relative = 1e-12);
        assert_relative_eq!(cdf(-10.0), 7.619853024160527e-24, max_relative = 1e-12);
    }

    #[test]
    fn ppf_inverts_cdf() {
        for &x in &[-8.0, -3.2, -0.4, 0.0, 0.7, 2.5] {
            assert_relative_eq!(ppf(cdf(x)), x, epsilon = 1e-12);
        }
        assert_relative_eq!(ppf(sf(6.0)), -6.0, epsilon = 1e-12);
    }

    #[test]
    fn log_cdf_is_continuous_at_switch() {
        let a = log_cdf(-30.0 + 1e-9);
        let b = log_cdf(-30.0 - 1e-9);
        assert_relative_eq!(a, b, max_relative = 1e-9);
        assert!(log_cdf(-100.0).is_finite());
    }
}
