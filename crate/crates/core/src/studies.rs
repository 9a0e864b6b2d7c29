//! Reproducible comparison tables: bound dominance, singling-out, the
//! Census anchor, the query budget case study and the oracle corpus.

use crate::accountant::MechanismSpec;
use crate::calibrate::{self, CalibrationRequest, Method, Target};
use crate::error::{check_positive, check_probability, Result};
use crate::grid;
use crate::oracle::{self, VerifyCase};
use crate::pld;
use crate::prior_bounds;
use crate::risk::{self, BaselineSpec};
use crate::tradeoff::{gaussian_mu_for, TradeoffCurve};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceRow {
    pub sigma: f64,
    pub base: f64,
    pub adv_fdp: f64,
    pub adv_zcdp: f64,
    pub adv_rdp2: f64,
}

/// Advantage of a unit-sensitivity Gaussian mechanism under the exact curve,
/// zCDP and order-2 RDP, for each `(σ, base)`.
pub fn dominance_table(sigmas: &[f64], bases: &[f64]) -> Result<Vec<DominanceRow>> {
    let mut rows = Vec::with_capacity(sigmas.len() * bases.len());
    for &sigma in sigmas {
        let spec = MechanismSpec::gaussian(sigma)?;
        for &base in bases {
            let b = BaselineSpec::Fixed { base };
            let adv = |m| calibrate::method_report(&spec, &b, m).map(|r| r.advantage_bound);
            rows.push(DominanceRow {
                sigma,
                base,
                adv_fdp: adv(Method::UnifiedFdp)?,
                adv_zcdp: adv(Method::Zcdp)?,
                adv_rdp2: adv(Method::RdpOrder(2.0))?,
            });
        }
    }
    Ok(rows)
}

pub fn dominance_sigmas() -> Vec<f64> {
    (0..14).map(|i| 0.4 + 0.2 * i as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinglingOutRow {
    pub n: u64,
    pub epsilon: f64,
    pub mu: f64,
    /// Average-dataset PSO advantage from the (ε, δ) bound.
    pub adv_pso_eps_delta: f64,
    /// Average-dataset PSO advantage from the f-DP bound.
    pub adv_pso_fdp: f64,
    /// Strong-adversary SPSO advantage from the f-DP bound.
    pub adv_spso_fdp: f64,
}

/// Singling-out comparison for the Gaussian mechanism with ε taken at δ.
pub fn singling_out_table(ns: &[u64], w: f64, epsilons: &[f64], delta: f64) -> Result<Vec<SinglingOutRow>> {
    let mut rows = Vec::new();
    for &eps in epsilons {
        let mu = gaussian_mu_for(eps, delta)?;
        let f = TradeoffCurve::gaussian(mu)?;
        let spso = risk::adv_bound(&f, w)?;
        for &n in ns {
            let base = risk::baseline_value(&BaselineSpec::PsoWeight { n, w })?;
            let std = prior_bounds::pso_bound_eps_delta(n, w, eps, delta)?;
            let fdp = prior_bounds::pso_bound_fdp(n, w, &f)?;
            rows.push(SinglingOutRow {
                n,
                epsilon: eps,
                mu,
                adv_pso_eps_delta: (std - base).max(0.0),
                adv_pso_fdp: (fdp - base).max(0.0),
                adv_spso_fdp: spso,
            });
        }
    }
    Ok(rows)
}

/// Smallest ε at which the (ε, δ) PSO success bound `n (e^ε w + δ)` reaches 1.
pub fn pso_saturation_epsilon(n: u64, w: f64, delta: f64) -> f64 {
    let x = (1.0 / n as f64 - delta) / w;
    if x <= 1.0 {
        0.0
    } else {
        x.ln()
    }
}

/// Smallest ε at which the SPSO advantage reaches `fraction` of its ceiling
/// `1 - w`, for the Gaussian mechanism with ε taken at δ.
pub fn spso_saturation_epsilon(w: f64, delta: f64, fraction: f64) -> Result<f64> {
    check_probability("fraction", fraction)?;
    let adv = |eps: f64| -> Result<f64> {
        let f = TradeoffCurve::gaussian(gaussian_mu_for(eps, delta)?)?;
        risk::adv_bound(&f, w)
    };
    let goal = fraction * (1.0 - w);
    let (mut lo, mut hi) = (1e-3, 1.0);
    while adv(hi)? < goal {
        lo = hi;
        hi *= 2.0;
        if hi > 1e4 {
            return Ok(f64::INFINITY);
        }
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if adv(mid)? < goal {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusAnchor {
    pub epsilon: f64,
    pub delta: f64,
    /// μ whose Gaussian profile passes through `(ε, δ)`.
    pub mu_profile: f64,
    pub adv_worst_case_profile: f64,
    /// ρ with `ε = ρ + 2 √(ρ ln(1/δ))`, the zCDP-to-(ε, δ) conversion.
    pub rho: f64,
    pub mu_zcdp: f64,
    pub adv_worst_case_zcdp: f64,
    /// TV of the single (ε, δ) curve.
    pub adv_standard: f64,
}

pub fn census_anchor(epsilon: f64, delta: f64) -> Result<CensusAnchor> {
    let mu_profile = gaussian_mu_for(epsilon, delta)?;
    let adv_profile = risk::adv_bound_worst_case(&TradeoffCurve::gaussian(mu_profile)?);
    let l = (1.0 / delta).ln();
    let root = -l.sqrt() + (l + epsilon).sqrt();
    let rho = root * root;
    let mu_zcdp = (2.0 * rho).sqrt();
    let adv_zcdp = risk::adv_bound_worst_case(&TradeoffCurve::gaussian(mu_zcdp)?);
    let adv_standard = risk::adv_bound_worst_case(&TradeoffCurve::from_epsilon_delta(epsilon, delta)?);
    Ok(CensusAnchor {
        epsilon,
        delta,
        mu_profile,
        adv_worst_case_profile: adv_profile,
        rho,
        mu_zcdp,
        adv_worst_case_zcdp: adv_zcdp,
        adv_standard,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseRatio {
    pub target: f64,
    pub sigma_fdp: f64,
    pub sigma_other: f64,
}

impl NoiseRatio {
    pub fn ratio(&self) -> f64 {
        self.sigma_other / self.sigma_fdp
    }
}

/// Calibrated σ for a unit-sensitivity Gaussian at a worst-case advantage
/// target, exact curve against `other`.
pub fn noise_ratio(target: f64, other: Method) -> Result<NoiseRatio> {
    let sigma = |m| -> Result<f64> {
        let req = CalibrationRequest::new(
            MechanismSpec::gaussian(1.0)?,
            Target::Advantage(target),
            BaselineSpec::WorstCase,
            m,
        )?;
        Ok(calibrate::calibrate_noise(&req)?.noise_scale)
    };
    Ok(NoiseRatio {
        target,
        sigma_fdp: sigma(Method::UnifiedFdp)?,
        sigma_other: sigma(other)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRow {
    pub k: u32,
    pub adv_fdp: f64,
    pub eps_standard: f64,
    pub adv_standard: f64,
    pub feasible_fdp: bool,
    pub feasible_standard: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryTable {
    pub b: f64,
    pub base: f64,
    pub target_adv: f64,
    pub delta_std: f64,
    pub rows: Vec<QueryRow>,
}

impl QueryTable {
    /// Largest `k` such that every composition up to `k` meets the target.
    pub fn max_k_fdp(&self) -> u32 {
        max_prefix(self.rows.iter().map(|r| (r.k, r.feasible_fdp)))
    }

    pub fn max_k_standard(&self) -> u32 {
        max_prefix(self.rows.iter().map(|r| (r.k, r.feasible_standard)))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,adv_fdp,eps_standard,adv_standard,feasible_fdp,feasible_standard\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:.10e},{:.10e},{:.10e},{},{}\n",
                r.k, r.adv_fdp, r.eps_standard, r.adv_standard, r.feasible_fdp, r.feasible_standard
            ));
        }
        s
    }
}

fn max_prefix(it: impl Iterator<Item = (u32, bool)>) -> u32 {
    let mut best = 0;
    for (k, ok) in it {
        if !ok {
            break;
        }
        best = k;
    }
    best
}

/// Advantage of `k` unit-sensitivity Laplace(b) queries at a fixed baseline,
/// through the composed PLD curve and through optimal pure-DP composition
/// converted to a single `(ε_g, δ_std)` pair.
pub fn queries_table(b: f64, k_max: u32, base: f64, target_adv: f64, delta_std: f64) -> Result<QueryTable> {
    check_positive("b", b)?;
    check_probability("base", base)?;
    let eps = 1.0 / b;
    let single = pld::pld_of_laplace(eps, crate::accountant::laplace_step(eps))?;
    let mut rows = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let curve = if k == 1 {
            TradeoffCurve::laplace(eps)?
        } else {
            pld::curve_from_pld(&pld::pld_compose(&single, k)?)?
        };
        let adv_fdp = risk::adv_bound(&curve, base)?;
        let eps_standard = if delta_std > 0.0 {
            prior_bounds::optimal_composition_pure(eps, k, delta_std)?.0
        } else {
            k as f64 * eps
        };
        let std = TradeoffCurve::from_epsilon_delta(eps_standard, delta_std)?;
        let adv_standard = risk::adv_bound(&std, base)?;
        rows.push(QueryRow {
            k,
            adv_fdp,
            eps_standard,
            adv_standard,
            feasible_fdp: adv_fdp <= target_adv,
            feasible_standard: adv_standard <= target_adv,
        });
    }
    Ok(QueryTable {
        b,
        base,
        target_adv,
        delta_std,
        rows,
    })
}

/// Default oracle corpus: random small attack instances plus randomized
/// response cases where the bound is tight.
pub fn verify_corpus(count: usize, seed: u64) -> Result<Vec<VerifyCase>> {
    let mut cases = Vec::with_capacity(count + 3);
    for (i, inst) in oracle::random_instances(count, seed).iter().enumerate() {
        cases.push(oracle::verify_instance(&format!("random-{i}"), inst)?);
    }
    for p in [0.1, 0.25, 0.4] {
        cases.push(oracle::randomized_response_case(p)?);
    }
    Ok(cases)
}

/// ε grid used for the singling-out table.
pub fn singling_out_epsilons() -> Vec<f64> {
    grid::linspace(0.1, 40.0, 400)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_values() {
        let c = census_anchor(10.6, 1e-10).unwrap();
        assert!(c.adv_standard > 0.9999);
        assert!((c.rho - 1.0).abs() < 2e-3, "{}", c.rho);
        assert!((c.adv_worst_case_zcdp - 0.52).abs() < 0.005);
        assert!(c.mu_profile > c.mu_zcdp);
    }

    #[test]
    fn pso_saturates_early() {
        assert_eq!(pso_saturation_epsilon(5000, 1.0 / 5000.0, 1e-5), 0.0);
        let e = pso_saturation_epsilon(500, 1.0 / 5000.0, 1e-5);
        assert!((e - ((1.0 / 500.0 - 1e-5) * 5000.0f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn query_rows_are_monotone() {
        let t = queries_table(5.0, 6, 0.1, 0.2, 1e-9).unwrap();
        for w in t.rows.windows(2) {
            assert!(w[1].adv_fdp >= w[0].adv_fdp - 1e-12);
            assert!(w[1].adv_standard >= w[0].adv_standard - 1e-12);
        }
        let r1 = &t.rows[0];
        assert!((r1.adv_fdp - r1.adv_standard).abs() < 1e-3);
        let all = queries_table(5.0, 4, 0.1, 1.0, 1e-9).unwrap();
        assert_eq!(all.max_k_fdp(), 4);
        assert_eq!(all.max_k_standard(), 4);
    }

    #[test]
    fn corpus_passes() {
        let cases = verify_corpus(20, 3).unwrap();
        assert!(cases.iter().all(|c| c.passed()));
    }
}
