//! Trade-off curves for parametric mechanisms and their compositions.

use crate::error::{check_positive, Error, Result};
use crate::oracle;
use crate::pld::{self, PldGrid};
use crate::tradeoff::TradeoffCurve;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Gaussian,
    Laplace,
    RandomizedResponse,
}

/// Neighbouring relation the sensitivity was derived under. It is recorded
/// and echoed in reports; the sensitivity value itself is what enters the
/// arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Neighborhood {
    AddRemove,
    ReplaceOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MechanismSpec {
    pub family: Family,
    /// σ for Gaussian, b for Laplace, flip probability for randomized response.
    pub noise_scale: f64,
    /// L2 for Gaussian, L1 for Laplace; unused for randomized response.
    pub sensitivity: f64,
    pub compositions: u32,
    pub neighborhood: Neighborhood,
}

/// Default loss-grid step for Laplace composition.
pub const DEFAULT_PLD_STEP: f64 = 1e-4;

impl MechanismSpec {
    pub fn new(family: Family, noise_scale: f64) -> Result<Self> {
        let spec = MechanismSpec {
            family,
            noise_scale,
            sensitivity: 1.0,
            compositions: 1,
            neighborhood: Neighborhood::AddRemove,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        Self::new(Family::Gaussian, sigma)
    }

    pub fn laplace(b: f64) -> Result<Self> {
        Self::new(Family::Laplace, b)
    }

    pub fn randomized_response(p: f64) -> Result<Self> {
        Self::new(Family::RandomizedResponse, p)
    }

    pub fn with_sensitivity(mut self, sensitivity: f64) -> Result<Self> {
        self.sensitivity = sensitivity;
        self.validate()?;
        Ok(self)
    }

    pub fn with_compositions(mut self, k: u32) -> Result<Self> {
        self.compositions = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_neighborhood(mut self, n: Neighborhood) -> Self {
        self.neighborhood = n;
        self
    }

    pub fn with_noise_scale(&self, noise_scale: f64) -> Result<Self> {
        let mut s = self.clone();
        s.noise_scale = noise_scale;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("noise_scale", self.noise_scale)?;
        check_positive("sensitivity", self.sensitivity)?;
        if self.compositions < 1 {
            return Err(Error::Domain {
                name: "compositions",
                value: self.compositions as f64,
                reason: "must be at least 1",
            });
        }
        if self.family == Family::RandomizedResponse && self.noise_scale >= 0.5 {
            return Err(Error::Domain {
                name: "noise_scale",
                value: self.noise_scale,
                reason: "randomized-response flip probability must lie in (0, 0.5)",
            });
        }
        Ok(())
    }

    /// μ of the composed Gaussian mechanism, `√k Δ / σ`.
    pub fn gaussian_mu(&self) -> Option<f64> {
        (self.family == Family::Gaussian)
            .then(|| (self.compositions as f64).sqrt() * self.sensitivity / self.noise_scale)
    }

    /// Pure-DP parameter of a single release (Laplace: Δ/b; randomized
    /// response: ln((1-p)/p)); `None` for Gaussian.
    pub fn epsilon_per_release(&self) -> Option<f64> {
        match self.family {
            Family::Gaussian => None,
            Family::Laplace => Some(self.sensitivity / self.noise_scale),
            Family::RandomizedResponse => {
                let p = self.noise_scale;
                Some(((1.0 - p) / p).ln())
            }
        }
    }
}

/// Trade-off curve of the (composed) mechanism.
pub fn curve_of(spec: &MechanismSpec) -> Result<TradeoffCurve> {
    spec.validate()?;
    let k = spec.compositions;
    let curve = match spec.family {
        Family::Gaussian => TradeoffCurve::gaussian(spec.gaussian_mu().unwrap())?,
        Family::Laplace => {
            let eps = spec.epsilon_per_release().unwrap();
            if k == 1 {
                TradeoffCurve::laplace(eps)?
            } else {
                let grid = pld::pld_of_laplace(eps, laplace_step(eps))?;
                pld::curve_from_pld(&pld::pld_compose(&grid, k)?)?
            }
        }
        Family::RandomizedResponse => {
            let pair = oracle::randomized_response_pair(spec.noise_scale, k)?;
            oracle::exact_symmetric_tradeoff(&pair)?
        }
    };
    Ok(curve.with_provenance(format!("{spec}")))
}

/// Loss-grid step used for a Laplace release with parameter ε.
pub fn laplace_step(epsilon: f64) -> f64 {
    DEFAULT_PLD_STEP.min(epsilon / 8.0)
}

/// Discretized PLD of the full composed mechanism.
pub fn pld_of(spec: &MechanismSpec, step: f64) -> Result<PldGrid> {
    spec.validate()?;
    let single = match spec.family {
        Family::Laplace => pld::pld_of_laplace(spec.epsilon_per_release().unwrap(), step)?,
        Family::Gaussian => {
            let mu = spec.sensitivity / spec.noise_scale;
            pld::pld_of_gaussian(mu, step, 12.0)?
        }
        Family::RandomizedResponse => {
            return Err(Error::Unsupported {
                method: "pld".into(),
                family: "randomized-response".into(),
            })
        }
    };
    pld::pld_compose(&single, spec.compositions)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gaussian => "gaussian",
            Family::Laplace => "laplace",
            Family::RandomizedResponse => "randomized-response",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "gaussian" => Ok(Family::Gaussian),
            "laplace" => Ok(Family::Laplace),
            "randomized-response" | "rr" => Ok(Family::RandomizedResponse),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown mechanism family `{other}`"),
            }),
        }
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Neighborhood::AddRemove => "add-remove",
            Neighborhood::ReplaceOne => "replace-one",
        })
    }
}

impl FromStr for Neighborhood {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "add-remove" => Ok(Neighborhood::AddRemove),
            "replace-one" => Ok(Neighborhood::ReplaceOne),
            other => Err(Error::Parse {
                line: 0,
                message: format!("unknown neighborhood `{other}`"),
            }),
        }
    }
}

impl fmt::Display for MechanismSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}(noise_scale={}, sensitivity={}, compositions={}, neighborhood={})",
            self.family, self.noise_scale, self.sensitivity, self.compositions, self.neighborhood
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid;
    use crate::tradeoff::tv_from_curve;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_composition() {
        let c1 = curve_of(&MechanismSpec::gaussian(1.0).unwrap()).unwrap();
        let g1 = TradeoffCurve::gaussian(1.0).unwrap();
        let c4 = curve_of(&MechanismSpec::gaussian(1.0).unwrap().with_compositions(4).unwrap())
            .unwrap();
        let g2 = TradeoffCurve::gaussian(2.0).unwrap();
        for &a in &[1e-6, 0.01, 0.3, 0.9] {
            assert_eq!(c1.eval(a), g1.eval(a));
            assert_relative_eq!(c4.eval(a), g2.eval(a), epsilon = 1e-15);
        }
    }

    #[test]
    fn randomized_response_is_exact() {
        let c = curve_of(&MechanismSpec::randomized_response(0.25).unwrap()).unwrap();
        let pure = TradeoffCurve::from_epsilon_delta(3f64.ln(), 0.0).unwrap();
        for i in 0..=200 {
            let a = i as f64 / 200.0;
            assert_relative_eq!(c.eval(a), pure.eval(a), epsilon = 1e-15);
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(MechanismSpec::gaussian(0.0).is_err());
        assert!(MechanismSpec::randomized_response(0.5).is_err());
        assert!(MechanismSpec::laplace(1.0).unwrap().with_compositions(0).is_err());
        assert!("poisson".parse::<Family>().is_err());
    }

    #[test]
    fn laplace_composition_is_monotone_and_conservative() {
        let base = MechanismSpec::laplace(5.0).unwrap();
        let mut prev = curve_of(&base).unwrap();
        for k in 2..=4 {
            let c = curve_of(&base.clone().with_compositions(k).unwrap()).unwrap();
            for &a in &grid::linspace(0.0, 1.0, 501) {
                assert!(c.eval(a) <= prev.eval(a) + 1e-12, "k={k}, a={a}");
            }
            prev = c;
        }
        // pure-DP composition can never be beaten
        let pure = TradeoffCurve::from_epsilon_delta(0.8, 0.0).unwrap();
        for &a in &grid::linspace(0.0, 1.0, 501) {
            assert!(prev.eval(a) >= pure.eval(a) - 1e-9);
        }
    }

    #[test]
    fn two_laplace_releases_match_oracle() {
        // product of two discretized Laplace pairs
        let eps = 0.5;
        let c = curve_of(&MechanismSpec::laplace(1.0 / eps).unwrap().with_compositions(2).unwrap())
            .unwrap();
        let single = oracle::discretized_laplace_pair(eps, 202).unwrap();
        let n = single.len();
        let mut p = Vec::with_capacity(n * n);
        let mut q = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                p.push(single.p[i] * single.p[j]);
                q.push(single.q[i] * single.q[j]);
            }
        }
        let s: f64 = p.iter().sum();
        let t: f64 = q.iter().sum();
        let pair = oracle::DiscretePair::new(
            p.into_iter().map(|x| x / s).collect(),
            q.into_iter().map(|x| x / t).collect(),
        )
        .unwrap();
        let truth = oracle::exact_symmetric_tradeoff(&pair).unwrap();
        let mut worst: f64 = 0.0;
        for &a in &grid::linspace(0.0, 1.0, 2001) {
            worst = worst.max((c.eval(a) - truth.eval(a)).abs());
            assert!(c.eval(a) <= truth.eval(a) + 1e-9, "a={a}");
        }
        assert!(worst < 1e-3, "{worst}");
        assert_relative_eq!(
            tv_from_curve(&c).eta,
            tv_from_curve(&truth).eta,
            epsilon = 1e-3
        );
    }
}
