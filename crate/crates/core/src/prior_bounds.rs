//! Comparison bounds from earlier work: (ε, δ) singling out, Rényi and
//! zero-concentrated reconstruction bounds, and optimal composition of pure
//! DP mechanisms.

use crate::error::{check_non_negative, check_positive, check_probability, Error, Result};
use crate::grid;
use crate::tradeoff::TradeoffCurve;
use serde::Serialize;

/// `(t, ε)`-RDP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RdpGuarantee {
    pub order: f64,
    pub epsilon: f64,
}

impl RdpGuarantee {
    pub fn new(order: f64, epsilon: f64) -> Result<Self> {
        if !(order > 1.0) {
            return Err(Error::Domain {
                name: "order",
                value: order,
                reason: "must exceed 1",
            });
        }
        check_non_negative("epsilon", epsilon)?;
        Ok(RdpGuarantee { order, epsilon })
    }
}

/// ρ-zCDP.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZcdpGuarantee {
    pub rho: f64,
}

impl ZcdpGuarantee {
    pub fn new(rho: f64) -> Result<Self> {
        check_non_negative("rho", rho)?;
        Ok(ZcdpGuarantee { rho })
    }

    /// `(t, ρt)`-RDP at order `t`.
    pub fn rdp_epsilon(&self, t: f64) -> f64 {
        self.rho * t
    }
}

fn check_weight(n: u64, w: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain {
            name: "n",
            value: n as f64,
            reason: "must exceed 1",
        });
    }
    check_probability("w", w)?;
    if w > 1.0 / n as f64 {
        return Err(Error::Domain {
            name: "w",
            value: w,
            reason: "must not exceed 1/n",
        });
    }
    Ok(())
}

/// Singling-out success under (ε, δ)-DP: `min(1, n (e^ε w + δ))`.
pub fn pso_bound_eps_delta(n: u64, w: f64, epsilon: f64, delta: f64) -> Result<f64> {
    check_weight(n, w)?;
    check_non_negative("epsilon", epsilon)?;
    check_probability("delta", delta)?;
    let v = n as f64 * (epsilon.exp() * w + delta);
    Ok(if v.is_nan() { 1.0 } else { v.min(1.0) })
}

/// Singling-out success under f-DP: `min(1, n (1 - f(w)))`.
pub fn pso_bound_fdp(n: u64, w: f64, f: &TradeoffCurve) -> Result<f64> {
    check_weight(n, w)?;
    Ok((n as f64 * (1.0 - f.eval(w))).min(1.0))
}

/// Reconstruction success under `(t, ε)`-RDP: `(base e^ε)^{(t-1)/t}`.
pub fn srr_bound_rdp(base: f64, guarantee: &RdpGuarantee) -> Result<f64> {
    check_probability("base", base)?;
    if !(guarantee.order > 1.0) {
        return Err(Error::Domain {
            name: "order",
            value: guarantee.order,
            reason: "must exceed 1",
        });
    }
    if base == 0.0 {
        return Ok(0.0);
    }
    let t = guarantee.order;
    let log = (t - 1.0) / t * (base.ln() + guarantee.epsilon);
    Ok(log.exp().clamp(base, 1.0))
}

/// Result of the zCDP reconstruction bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZcdpSrrBound {
    pub value: f64,
    /// Set when `base = 0`, where the value is the limit of the formula.
    pub zero_base_limit: bool,
}

/// Reconstruction success under ρ-zCDP: `exp{-(√ln(1/base) - √ρ)²}`, or 1
/// once `√ρ` exceeds `√ln(1/base)`.
pub fn srr_bound_zcdp(base: f64, rho: f64) -> Result<ZcdpSrrBound> {
    check_probability("base", base)?;
    check_non_negative("rho", rho)?;
    if base == 0.0 {
        return Ok(ZcdpSrrBound {
            value: 0.0,
            zero_base_limit: true,
        });
    }
    let a = (-base.ln()).sqrt();
    let r = rho.sqrt();
    let value = if a < r { 1.0 } else { (-(a - r).powi(2)).exp() };
    Ok(ZcdpSrrBound {
        value: value.clamp(base, 1.0),
        zero_base_limit: false,
    })
}

/// Minimum of the RDP reconstruction bound over a grid of orders.
pub fn srr_bound_rdp_curve(
    base: f64,
    eps_of_t: impl Fn(f64) -> f64,
    t_grid: &[f64],
) -> Result<f64> {
    if t_grid.is_empty() {
        return Err(Error::Empty("t_grid"));
    }
    let mut best: f64 = 1.0;
    for &t in t_grid {
        let g = RdpGuarantee::new(t, eps_of_t(t))?;
        best = best.min(srr_bound_rdp(base, &g)?);
    }
    Ok(best)
}

/// Default order grid: `t - 1` log-spaced on [1e-3, 1e4].
pub fn default_t_grid() -> Vec<f64> {
    grid::logspace(1e-3, 1e4, 4001)
        .into_iter()
        .map(|x| 1.0 + x)
        .collect()
}

/// Minimum of the RDP reconstruction bound over all orders `t > 1`: a coarse
/// scan in `log(t - 1)` followed by golden-section refinement.
pub fn srr_bound_rdp_optimized(base: f64, eps_of_t: impl Fn(f64) -> f64) -> Result<f64> {
    check_probability("base", base)?;
    if base == 0.0 {
        return Ok(0.0);
    }
    let log_bound = |u: f64| {
        let t = 1.0 + u.exp();
        ((t - 1.0) / t * (base.ln() + eps_of_t(t))).min(0.0)
    };
    let (lo, hi) = ((1e-4f64).ln(), (1e6f64).ln());
    let n = 400;
    let us = grid::linspace(lo, hi, n);
    let vals: Vec<f64> = us.iter().map(|&u| log_bound(u)).collect();
    let (i, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    let a = us[i.saturating_sub(1)];
    let b = us[(i + 1).min(n - 1)];
    let u = golden_min(&log_bound, a, b, 1e-12);
    let best = log_bound(u).min(vals[i]);
    Ok(best.exp().clamp(base, 1.0))
}

pub(crate) fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= tol * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Rényi divergence of order `t` for the Gaussian mechanism with parameter μ.
pub fn gaussian_rdp(mu: f64, t: f64) -> f64 {
    t * mu * mu / 2.0
}

/// Rényi divergence of order `t` for the Laplace mechanism with parameter ε.
pub fn laplace_rdp(epsilon: f64, t: f64) -> f64 {
    let a = t / (2.0 * t - 1.0);
    let b = (t - 1.0) / (2.0 * t - 1.0);
    // log(a e^{(t-1)ε} + b e^{-tε}) / (t - 1), factoring out the larger term
    let x = a.ln() + (t - 1.0) * epsilon;
    let y = b.ln() - t * epsilon;
    let m = x.max(y);
    (m + ((x - m).exp() + (y - m).exp()).ln()) / (t - 1.0)
}

/// δ of the k-fold composition of ε-DP mechanisms at `eps_global`, which is
/// the exact profile of `k` randomized-response releases.
pub fn optimal_composition_delta(epsilon: f64, k: u32, eps_global: f64) -> f64 {
    let kf = k as f64;
    let log_norm = kf * epsilon.exp().ln_1p();
    let mut delta = 0.0;
    for j in 0..=k {
        let loss = (kf - 2.0 * j as f64) * epsilon;
        if loss <= eps_global {
            break;
        }
        let log_weight = ln_binomial(k, j) + (kf - j as f64) * epsilon - log_norm;
        delta += log_weight.exp() * -(eps_global - loss).exp_m1();
    }
    delta.clamp(0.0, 1.0)
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    if n <= 64 {
        let k = k.min(n - k) as u128;
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n as u128 - i) / (i + 1);
        }
        (c as f64).ln()
    } else {
        let k = k.min(n - k);
        (0..k)
            .map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln())
            .sum()
    }
}

/// Smallest `ε_g` with `(ε_g, δ_target)`-DP for the k-fold composition of
/// ε-DP mechanisms under optimal composition. Returns `(ε_g, δ_target)`.
pub fn optimal_composition_pure(epsilon: f64, k: u32, delta_target: f64) -> Result<(f64, f64)> {
    check_positive("epsilon", epsilon)?;
    if k < 1 {
        return Err(Error::Domain {
            name: "k",
            value: k as f64,
            reason: "must be at least 1",
        });
    }
    if !(delta_target > 0.0 && delta_target < 1.0) {
        return Err(Error::Domain {
            name: "delta_target",
            value: delta_target,
            reason: "must lie in (0, 1)",
        });
    }
    if optimal_composition_delta(epsilon, k, 0.0) <= delta_target {
        return Ok((0.0, delta_target));
    }
    let (mut lo, mut hi) = (0.0, k as f64 * epsilon);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if optimal_composition_delta(epsilon, k, mid) > delta_target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1e-300) {
            break;
        }
    }
    Ok((hi, delta_target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pso_examples() {
        assert_relative_eq!(pso_bound_eps_delta(10, 0.01, 0.0, 0.0).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(pso_bound_eps_delta(10, 0.01, f64::INFINITY, 0.0).unwrap(), 1.0);
        assert_eq!(pso_bound_eps_delta(5000, 1.0 / 5000.0, 1.0, 1e-5).unwrap(), 1.0);
        assert!(pso_bound_eps_delta(10, 0.2, 1.0, 0.0).is_err());
        let id = TradeoffCurve::identity();
        assert_relative_eq!(pso_bound_fdp(10, 0.01, &id).unwrap(), 0.1, epsilon = 1e-15);
        assert_eq!(pso_bound_fdp(10, 0.01, &TradeoffCurve::zero()).unwrap(), 1.0);
    }

    #[test]
    fn rdp_examples() {
        let g = RdpGuarantee::new(2.0, 0.0).unwrap();
        assert_eq!(srr_bound_rdp(1.0, &g).unwrap(), 1.0);
        assert_eq!(srr_bound_rdp(0.0, &g).unwrap(), 0.0);
        let g = RdpGuarantee::new(2.0, gaussian_rdp(0.75, 2.0)).unwrap();
        assert_relative_eq!(g.epsilon, 0.5625);
        let v = srr_bound_rdp(0.25, &g).unwrap();
        assert_relative_eq!(v, (0.25 * 0.5625f64.exp()).sqrt(), epsilon = 1e-15);
        assert!((v - 0.662).abs() < 1e-3);
        assert!(RdpGuarantee::new(1.0, 0.1).is_err());
    }

    #[test]
    fn zcdp_examples() {
        assert_relative_eq!(srr_bound_zcdp(0.3, 0.0).unwrap().value, 0.3, epsilon = 1e-15);
        assert_relative_eq!(
            srr_bound_zcdp((-4.0f64).exp(), 1.0).unwrap().value,
            (-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert_eq!(srr_bound_zcdp(0.2, -(0.2f64.ln())).unwrap().value, 1.0);
        let z = srr_bound_zcdp(0.0, 1.0).unwrap();
        assert!(z.zero_base_limit && z.value == 0.0);
    }

    #[test]
    fn rdp_curve_matches_zcdp_for_gaussian() {
        let mu: f64 = 1.0;
        let rho = mu * mu / 2.0;
        for &base in &[0.1, 0.25, 0.5] {
            let grid_min = srr_bound_rdp_curve(base, |t| gaussian_rdp(mu, t), &default_t_grid()).unwrap();
            let t2 = srr_bound_rdp(base, &RdpGuarantee::new(2.0, gaussian_rdp(mu, 2.0)).unwrap()).unwrap();
            let z = srr_bound_zcdp(base, rho).unwrap().value;
            let opt = srr_bound_rdp_optimized(base, |t| gaussian_rdp(mu, t)).unwrap();
            assert!(grid_min <= t2);
            assert!((grid_min - z).abs() < 1e-6, "{grid_min} {z}");
            assert!((opt - z).abs() < 1e-9, "{opt} {z}");
        }
        assert_eq!(srr_bound_rdp_curve(1.0, |t| gaussian_rdp(mu, t), &default_t_grid()).unwrap(), 1.0);
        assert!(srr_bound_rdp_curve(0.5, |t| t, &[]).is_err());
    }

    #[test]
    fn laplace_rdp_limits() {
        // t -> infinity recovers ε; small ε gives roughly t ε² / 2
        assert!((laplace_rdp(0.5, 1e6) - 0.5).abs() < 1e-5);
        let e = 0.01;
        assert!((laplace_rdp(e, 2.0) - e * e).abs() < 1e-5);
    }

    fn brute_force_delta(epsilon: f64, k: u32, eps_global: f64) -> f64 {
        // enumerate every output sequence of k randomized-response bits
        let p = epsilon.exp() / (1.0 + epsilon.exp());
        let mut delta = 0.0;
        for code in 0..(1u64 << k) {
            let ones = code.count_ones() as i32;
            let zeros = k as i32 - ones;
            let pp = p.powi(ones) * (1.0 - p).powi(zeros);
            let qq = (1.0 - p).powi(ones) * p.powi(zeros);
            delta += (pp - eps_global.exp() * qq).max(0.0);
        }
        delta
    }

    #[test]
    fn optimal_composition_matches_enumeration() {
        for &(k, eg) in &[(1, 0.1), (5, 0.3), (15, 1.0), (15, 2.2)] {
            let a = optimal_composition_delta(0.2, k, eg);
            let b = brute_force_delta(0.2, k, eg);
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
        let (eg, _) = optimal_composition_pure(0.2, 15, 1e-9).unwrap();
        assert!((optimal_composition_delta(0.2, 15, eg) - 1e-9).abs() < 1e-15);
        assert!((brute_force_delta(0.2, 15, eg) - 1e-9).abs() < 1e-13);
        assert!(eg <= 3.0);
    }

    #[test]
    fn optimal_composition_examples() {
        let (eg, _) = optimal_composition_pure(0.2, 1, 1e-9).unwrap();
        assert!((eg - 0.2).abs() < 1e-8);
        let (eg5, _) = optimal_composition_pure(0.2, 5, 1e-9).unwrap();
        assert!(eg5 <= 1.0);
        let mut prev = 0.0;
        for k in 1..=30 {
            let (e, _) = optimal_composition_pure(0.2, k, 1e-9).unwrap();
            assert!(e >= prev && e <= 0.2 * k as f64 + 1e-12);
            prev = e;
        }
        assert!(optimal_composition_pure(0.2, 3, 0.0).is_err());
        assert!(optimal_composition_pure(0.2, 3, 1.0).is_err());
    }
}
