//! Risk evaluation under several accounting methods, and noise calibration
//! to a target advantage or success level.

use crate::accountant::{self, Family, MechanismSpec};
use crate::error::{check_positive, Error, Result};
use crate::grid;
use crate::prior_bounds::{self, golden_min, RdpGuarantee};
use crate::risk::{self, BaselineSpec, RiskReport};
use crate::tradeoff::{gaussian_epsilon, TradeoffCurve};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Method {
    /// Exact trade-off curve of the mechanism.
    UnifiedFdp,
    /// RDP at a single order.
    RdpOrder(f64),
    /// RDP optimized over all orders.
    RdpContinuum,
    Zcdp,
    /// A single (ε, δ) pair at the given δ.
    EpsDelta { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Target {
    Advantage(f64),
    Success(f64),
}

impl Target {
    pub fn value(&self) -> f64 {
        match *self {
            Target::Advantage(v) | Target::Success(v) => v,
        }
    }
}

/// Full risk report for a mechanism under one accounting method.
pub fn method_report(
    spec: &MechanismSpec,
    baseline: &BaselineSpec,
    method: Method,
) -> Result<RiskReport> {
    spec.validate()?;
    baseline.validate()?;
    let report = match method {
        Method::UnifiedFdp => risk::fdp_report(&accountant::curve_of(spec)?, baseline)?,
        Method::EpsDelta { delta } => eps_delta_report(spec, baseline, delta)?,
        Method::RdpOrder(t) => {
            if !(t > 1.0) {
                return Err(Error::Domain {
                    name: "order",
                    value: t,
                    reason: "must exceed 1",
                });
            }
            let eps = rdp_epsilon(spec, method)?;
            let succ = |b: f64| -> Result<f64> {
                prior_bounds::srr_bound_rdp(b, &RdpGuarantee::new(t, eps(t))?)
            };
            reconstruction_report(baseline, method, succ)?.with_param("order", t)
        }
        Method::RdpContinuum => {
            let eps = rdp_epsilon(spec, method)?;
            let succ = |b: f64| prior_bounds::srr_bound_rdp_optimized(b, &eps);
            reconstruction_report(baseline, method, succ)?
        }
        Method::Zcdp => {
            let rho = zcdp_rho(spec)?;
            let succ = |b: f64| prior_bounds::srr_bound_zcdp(b, rho).map(|z| z.value);
            reconstruction_report(baseline, method, succ)?.with_param("rho", rho)
        }
    };
    Ok(report
        .with_param("mechanism", spec.family)
        .with_param("noise_scale", spec.noise_scale)
        .with_param("sensitivity", spec.sensitivity)
        .with_param("compositions", spec.compositions)
        .with_param("neighborhood", spec.neighborhood))
}

/// The advantage or success bound selected by `target`.
pub fn risk_at(
    spec: &MechanismSpec,
    baseline: &BaselineSpec,
    method: Method,
    target: Target,
) -> Result<f64> {
    let report = method_report(spec, baseline, method)?;
    match target {
        Target::Advantage(_) => Ok(report.advantage_bound),
        Target::Success(_) => {
            if *baseline == BaselineSpec::WorstCase {
                Err(Error::NoScalarBaseline)
            } else {
                Ok(report.success_bound)
            }
        }
    }
}

fn mismatch(method: Method, family: Family) -> Error {
    Error::Unsupported {
        method: method.to_string(),
        family: family.to_string(),
    }
}

fn rdp_epsilon(spec: &MechanismSpec, method: Method) -> Result<impl Fn(f64) -> f64> {
    let k = spec.compositions as f64;
    let (family, param) = match spec.family {
        Family::Gaussian => (0, spec.gaussian_mu().unwrap()),
        Family::Laplace => (1, spec.epsilon_per_release().unwrap()),
        Family::RandomizedResponse => return Err(mismatch(method, spec.family)),
    };
    Ok(move |t: f64| {
        if family == 0 {
            prior_bounds::gaussian_rdp(param, t)
        } else {
            k * prior_bounds::laplace_rdp(param, t)
        }
    })
}

/// ρ of the composed mechanism. Laplace uses the pure-DP conversion
/// `ρ = k ε² / 2`.
fn zcdp_rho(spec: &MechanismSpec) -> Result<f64> {
    match spec.family {
        Family::Gaussian => Ok(spec.gaussian_mu().unwrap().powi(2) / 2.0),
        Family::Laplace => {
            let eps = spec.epsilon_per_release().unwrap();
            Ok(spec.compositions as f64 * eps * eps / 2.0)
        }
        Family::RandomizedResponse => Err(mismatch(Method::Zcdp, spec.family)),
    }
}

/// (ε, δ) guarantee of the composed mechanism at the given δ.
pub fn epsilon_at(spec: &MechanismSpec, delta: f64) -> Result<f64> {
    match spec.family {
        Family::Gaussian => {
            if delta <= 0.0 {
                return Ok(f64::INFINITY);
            }
            gaussian_epsilon(spec.gaussian_mu().unwrap(), delta)
        }
        Family::Laplace | Family::RandomizedResponse => {
            let eps = spec.epsilon_per_release().unwrap();
            if delta <= 0.0 {
                return Ok(spec.compositions as f64 * eps);
            }
            Ok(prior_bounds::optimal_composition_pure(eps, spec.compositions, delta)?.0)
        }
    }
}

fn eps_delta_report(spec: &MechanismSpec, baseline: &BaselineSpec, delta: f64) -> Result<RiskReport> {
    crate::error::check_probability("delta", delta)?;
    let eps = epsilon_at(spec, delta)?;
    let curve = TradeoffCurve::from_epsilon_delta(eps, delta)?;
    let mut report = match *baseline {
        BaselineSpec::PsoWeight { n, w } => {
            let base = risk::baseline_value(baseline)?;
            let succ = prior_bounds::pso_bound_eps_delta(n, w, eps, delta)?.max(base);
            RiskReport::new("eps-delta", "pso", baseline, Some(base), succ, succ - base)
        }
        _ => risk::fdp_report(&curve, baseline)?,
    };
    report.method = "eps-delta".into();
    Ok(report.with_param("epsilon", eps).with_param("delta", delta))
}

fn reconstruction_report(
    baseline: &BaselineSpec,
    method: Method,
    succ: impl Fn(f64) -> Result<f64>,
) -> Result<RiskReport> {
    let name = method.to_string();
    match baseline {
        BaselineSpec::WorstCase => {
            let adv = max_over_baselines(|b| succ(b).map(|s| s - b))?;
            Ok(RiskReport::new(&name, "reconstruction-worst-case", baseline, None, 1.0, adv))
        }
        _ => {
            let base = risk::baseline_value(baseline)?;
            let s = succ(base)?.max(base);
            Ok(RiskReport::new(&name, "reconstruction", baseline, Some(base), s, s - base))
        }
    }
}

/// `sup_b g(b)` over `b ∈ (0, 1)`: log-spaced scan, then golden refinement.
fn max_over_baselines(g: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let us = grid::linspace((1e-15f64).ln(), 0.0, 301);
    let mut vals = Vec::with_capacity(us.len());
    for &u in &us {
        vals.push(g(u.exp())?);
    }
    let (i, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let lo = us[i.saturating_sub(1)];
    let hi = us[(i + 1).min(us.len() - 1)];
    let neg = |u: f64| g(u.exp()).map(|v| -v).unwrap_or(f64::INFINITY);
    let u = golden_min(&neg, lo, hi, 1e-12);
    Ok(best.max(-neg(u)).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRequest {
    /// Mechanism with every parameter fixed except the noise scale.
    pub mechanism: MechanismSpec,
    pub target: Target,
    pub baseline: BaselineSpec,
    pub method: Method,
    /// Relative tolerance on the returned noise scale.
    pub tolerance: f64,
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub noise_scale: f64,
    pub risk: f64,
    /// The target is met at the lower end of the (expanded) bracket.
    pub trivial: bool,
    pub evaluations: usize,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-4;
const MAX_EXPANSIONS: u32 = 16;
const RR_MAX_FLIP: f64 = 0.5 - 1e-12;

impl CalibrationRequest {
    pub fn new(
        mechanism: MechanismSpec,
        target: Target,
        baseline: BaselineSpec,
        method: Method,
    ) -> Result<Self> {
        let bracket = match mechanism.family {
            Family::Gaussian => (0.05 * mechanism.sensitivity, 20.0 * mechanism.sensitivity),
            Family::Laplace => (0.5 * mechanism.sensitivity, 100.0 * mechanism.sensitivity),
            Family::RandomizedResponse => (1e-3, RR_MAX_FLIP),
        };
        let req = CalibrationRequest {
            mechanism,
            target,
            baseline,
            method,
            tolerance: DEFAULT_TOLERANCE,
            bracket,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn with_bracket(mut self, lo: f64, hi: f64) -> Result<Self> {
        self.bracket = (lo, hi);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.target.value();
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::Domain {
                name: "target",
                value: v,
                reason: "must lie in (0, 1]",
            });
        }
        check_positive("tolerance", self.tolerance)?;
        if self.tolerance >= 1.0 {
            return Err(Error::Domain {
                name: "tolerance",
                value: self.tolerance,
                reason: "must be below 1",
            });
        }
        let (lo, hi) = self.bracket;
        check_positive("bracket lo", lo)?;
        if !(lo < hi) {
            return Err(Error::Domain {
                name: "bracket hi",
                value: hi,
                reason: "must exceed bracket lo",
            });
        }
        if let Target::Success(_) = self.target {
            if self.baseline == BaselineSpec::WorstCase {
                return Err(Error::NoScalarBaseline);
            }
        }
        self.mechanism.with_noise_scale(lo)?;
        self.mechanism.with_noise_scale(hi)?;
        self.baseline.validate()
    }

    pub fn risk_at(&self, noise_scale: f64) -> Result<f64> {
        risk_at(
            &self.mechanism.with_noise_scale(noise_scale)?,
            &self.baseline,
            self.method,
            self.target,
        )
    }

    fn grow(&self, hi: f64) -> f64 {
        match self.mechanism.family {
            Family::RandomizedResponse => (0.5 * (hi + 0.5)).min(RR_MAX_FLIP),
            _ => 2.0 * hi,
        }
    }
}

/// Smallest noise scale (within relative tolerance) whose risk meets the
/// target. Bisects on `log σ`.
pub fn calibrate_noise(req: &CalibrationRequest) -> Result<Calibration> {
    req.validate()?;
    let target = req.target.value();
    let mut evaluations = 0;
    let mut eval = |s: f64| {
        evaluations += 1;
        req.risk_at(s)
    };
    let (mut lo, mut hi) = req.bracket;
    let mut r_hi = eval(hi)?;
    let mut expansions = 0;
    while r_hi > target {
        let next = req.grow(hi);
        if expansions == MAX_EXPANSIONS || next <= hi {
            return Err(Error::Infeasible { target, floor: r_hi });
        }
        hi = next;
        r_hi = eval(hi)?;
        expansions += 1;
    }
    let mut r_lo = eval(lo)?;
    expansions = 0;
    while r_lo <= target {
        if expansions == MAX_EXPANSIONS {
            return Ok(Calibration {
                noise_scale: lo,
                risk: r_lo,
                trivial: true,
                evaluations,
            });
        }
        hi = lo;
        r_hi = r_lo;
        lo /= 2.0;
        r_lo = eval(lo)?;
        expansions += 1;
    }
    while hi / lo - 1.0 > req.tolerance {
        let mid = (lo * hi).sqrt();
        let r = eval(mid)?;
        if r > r_lo + 1e-9 || r < r_hi - 1e-9 {
            return Err(Error::NonMonotone {
                lo,
                hi,
                risk_lo: r_lo,
                risk_hi: r_hi,
            });
        }
        if r > target {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
            r_hi = r;
        }
    }
    Ok(Calibration {
        noise_scale: hi,
        risk: r_hi,
        trivial: false,
        evaluations,
    })
}

/// Checks that the risk is non-increasing in the noise scale on a log grid
/// over the request's bracket.
pub fn monotonicity_probe(req: &CalibrationRequest, points: usize) -> Result<()> {
    let (lo, hi) = req.bracket;
    let scales = grid::logspace(lo, hi, points.max(2));
    let mut prev: Option<(f64, f64)> = None;
    for &s in &scales {
        let r = req.risk_at(s)?;
        if let Some((ps, pr)) = prev {
            if r > pr + 1e-9 {
                return Err(Error::NonMonotone {
                    lo: ps,
                    hi: s,
                    risk_lo: pr,
                    risk_hi: r,
                });
            }
        }
        prev = Some((s, r));
    }
    Ok(())
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::UnifiedFdp => f.write_str("fdp"),
            Method::RdpOrder(t) => write!(f, "rdp-t{t}"),
            Method::RdpContinuum => f.write_str("rdp"),
            Method::Zcdp => f.write_str("zcdp"),
            Method::EpsDelta { delta } => write!(f, "eps-delta:{delta:e}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    /// Accepts `fdp`, `zcdp`, `rdp`, `rdp-t<order>`, `eps-delta` (δ = 1e-5)
    /// and `eps-delta:<δ>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = || Error::Parse {
            line: 0,
            message: format!("unknown method `{s}`"),
        };
        match s.as_str() {
            "fdp" | "unified-fdp" => return Ok(Method::UnifiedFdp),
            "zcdp" => return Ok(Method::Zcdp),
            "rdp" | "rdp-continuum" => return Ok(Method::RdpContinuum),
            "eps-delta" => return Ok(Method::EpsDelta { delta: 1e-5 }),
            _ => {}
        }
        if let Some(t) = s.strip_prefix("rdp-t") {
            let t: f64 = t.parse().map_err(|_| bad())?;
            return if t > 1.0 { Ok(Method::RdpOrder(t)) } else { Err(bad()) };
        }
        if let Some(d) = s.strip_prefix("eps-delta:") {
            let delta: f64 = d.parse().map_err(|_| bad())?;
            return if (0.0..=1.0).contains(&delta) {
                Ok(Method::EpsDelta { delta })
            } else {
                Err(bad())
            };
        }
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal;
    use crate::tradeoff::TradeoffCurve;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauss(sigma: f64) -> MechanismSpec {
        MechanismSpec::gaussian(sigma).unwrap()
    }

    const ADV: Target = Target::Advantage(0.15);

    #[test]
    fn risk_examples() {
        let r = risk_at(&gauss(1.0), &BaselineSpec::WorstCase, Method::UnifiedFdp, ADV).unwrap();
        assert_relative_eq!(r, 2.0 * normal::cdf(0.5) - 1.0, epsilon = 1e-12);
        let r = risk_at(&gauss(1e6), &BaselineSpec::WorstCase, Method::UnifiedFdp, ADV).unwrap();
        assert!(r < 1e-6);
        let lap = MechanismSpec::laplace(5.0).unwrap();
        let base = BaselineSpec::Fixed { base: 0.1 };
        let r = risk_at(&lap, &base, Method::UnifiedFdp, ADV).unwrap();
        let f = TradeoffCurve::laplace(0.2).unwrap();
        assert_relative_eq!(r, 1.0 - f.eval(0.1) - 0.1, epsilon = 1e-12);
    }

    #[test]
    fn mismatched_methods() {
        let rr = MechanismSpec::randomized_response(0.2).unwrap();
        for m in [Method::Zcdp, Method::RdpContinuum, Method::RdpOrder(2.0)] {
            assert!(matches!(
                risk_at(&rr, &BaselineSpec::WorstCase, m, ADV),
                Err(Error::Unsupported { .. })
            ));
        }
        assert!(risk_at(&rr, &BaselineSpec::WorstCase, Method::EpsDelta { delta: 1e-6 }, ADV).is_ok());
        assert!(risk_at(&gauss(1.0), &BaselineSpec::WorstCase, Method::UnifiedFdp, Target::Success(0.5)).is_err());
    }

    #[test]
    fn worst_case_zcdp_matches_continuum_rdp() {
        for &s in &[0.8, 1.5, 3.0] {
            let z = risk_at(&gauss(s), &BaselineSpec::WorstCase, Method::Zcdp, ADV).unwrap();
            let r = risk_at(&gauss(s), &BaselineSpec::WorstCase, Method::RdpContinuum, ADV).unwrap();
            assert!((z - r).abs() < 1e-8, "{z} {r}");
        }
    }

    #[test]
    fn worst_case_rdp_two_has_floor() {
        // (b e^ε)^{1/2} - b peaks at e^ε / 4
        let r = risk_at(&gauss(1e3), &BaselineSpec::WorstCase, Method::RdpOrder(2.0), ADV).unwrap();
        assert!((r - 0.25).abs() < 1e-6, "{r}");
        let req = CalibrationRequest::new(gauss(1.0), ADV, BaselineSpec::WorstCase, Method::RdpOrder(2.0)).unwrap();
        assert!(matches!(calibrate_noise(&req), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn calibrates_closed_form() {
        let req = CalibrationRequest::new(gauss(1.0), ADV, BaselineSpec::WorstCase, Method::UnifiedFdp).unwrap();
        let c = calibrate_noise(&req).unwrap();
        let mu = 2.0 * normal::ppf(0.575);
        assert!((mu - 0.3782).abs() < 1e-4);
        assert!(!c.trivial);
        assert!((c.noise_scale * mu - 1.0).abs() < 2e-4, "{}", c.noise_scale);
        assert!(c.risk <= 0.15);
    }

    #[test]
    fn trivial_and_infeasible_targets() {
        let req = CalibrationRequest::new(gauss(1.0), Target::Advantage(1.0), BaselineSpec::WorstCase, Method::UnifiedFdp)
            .unwrap();
        let c = calibrate_noise(&req).unwrap();
        assert!(c.trivial);
        let req = CalibrationRequest::new(
            gauss(1.0),
            Target::Advantage(0.01),
            BaselineSpec::WorstCase,
            Method::EpsDelta { delta: 0.05 },
        )
        .unwrap();
        match calibrate_noise(&req) {
            Err(Error::Infeasible { floor, .. }) => assert!(floor >= 0.05),
            other => panic!("{other:?}"),
        }
        assert!(CalibrationRequest::new(gauss(1.0), Target::Advantage(0.0), BaselineSpec::WorstCase, Method::UnifiedFdp).is_err());
    }

    #[test]
    fn method_ordering() {
        for &t in &[0.3, 0.5, 0.7] {
            let base = BaselineSpec::Fixed { base: 0.1 };
            let sigma = |m| {
                let req = CalibrationRequest::new(gauss(1.0), Target::Advantage(t), base, m).unwrap();
                calibrate_noise(&req).unwrap().noise_scale
            };
            let f = sigma(Method::UnifiedFdp);
            let z = sigma(Method::Zcdp);
            let r = sigma(Method::RdpOrder(2.0));
            assert!(f <= z && z <= r, "{t}: {f} {z} {r}");
        }
    }

    #[test]
    fn calibration_tightness() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let t = rng.gen_range(0.01..0.9);
            let base = BaselineSpec::Fixed { base: 0.05 };
            let req = CalibrationRequest::new(gauss(1.0), Target::Advantage(t), base, Method::UnifiedFdp).unwrap();
            let c = calibrate_noise(&req).unwrap();
            assert!(req.risk_at(c.noise_scale).unwrap() <= t);
            assert!(req.risk_at(c.noise_scale * 0.99).unwrap() > t);
        }
    }

    #[test]
    fn probes_are_monotone() {
        let base = BaselineSpec::Fixed { base: 0.1 };
        let cases = [
            (gauss(1.0), Method::UnifiedFdp),
            (gauss(1.0), Method::Zcdp),
            (gauss(1.0), Method::RdpContinuum),
            (gauss(1.0), Method::RdpOrder(2.0)),
            (gauss(1.0), Method::EpsDelta { delta: 1e-5 }),
            (MechanismSpec::laplace(1.0).unwrap(), Method::UnifiedFdp),
            (MechanismSpec::laplace(1.0).unwrap(), Method::Zcdp),
            (MechanismSpec::laplace(1.0).unwrap(), Method::RdpOrder(3.0)),
            (MechanismSpec::randomized_response(0.2).unwrap(), Method::UnifiedFdp),
            (MechanismSpec::randomized_response(0.2).unwrap(), Method::EpsDelta { delta: 1e-6 }),
        ];
        for (spec, m) in cases {
            let req = CalibrationRequest::new(spec, Target::Success(0.5), base, m).unwrap();
            monotonicity_probe(&req, 50).unwrap();
        }
    }

    #[test]
    fn randomized_response_calibration_stays_in_domain() {
        let rr = MechanismSpec::randomized_response(0.1).unwrap();
        let req = CalibrationRequest::new(rr, Target::Advantage(0.1), BaselineSpec::WorstCase, Method::UnifiedFdp).unwrap();
        let c = calibrate_noise(&req).unwrap();
        // TV of randomized response is 1 - 2p
        assert!((c.noise_scale - 0.45).abs() < 1e-4, "{}", c.noise_scale);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [
            Method::UnifiedFdp,
            Method::Zcdp,
            Method::RdpContinuum,
            Method::RdpOrder(2.0),
            Method::EpsDelta { delta: 1e-9 },
        ] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert!("rdp-t1".parse::<Method>().is_err());
        assert!("magic".parse::<Method>().is_err());
    }
}
