//! Attack-risk bounds derived from a trade-off curve.
//!
//! For an f-DP mechanism and any attack with baseline success `base`,
//! success is at most `1 - f(base)` and advantage over the baseline is at
//! most `1 - f(base) - base`, which never exceeds the TV parameter η.

use crate::error::{check_probability, Error, Result};
use crate::tradeoff::{group_privacy, tv_from_curve, TradeoffCurve};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

/// How the baseline success of an attack is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaselineSpec {
    Fixed { base: f64 },
    /// Predicate singling out against a dataset of `n` records with a
    /// predicate of weight `w`.
    PsoWeight { n: u64, w: f64 },
    /// Strong-adversary singling out: the baseline equals the weight.
    SpsoWeight { w: f64 },
    /// Two candidates with prior `(π, 1 - π)`.
    Bernoulli { pi: f64 },
    WorstCase,
}

impl BaselineSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BaselineSpec::Fixed { base } => check_probability("base", base),
            BaselineSpec::PsoWeight { n, w } => {
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
            BaselineSpec::SpsoWeight { w } => check_probability("w", w),
            BaselineSpec::Bernoulli { pi } => check_probability("pi", pi),
            BaselineSpec::WorstCase => Ok(()),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            BaselineSpec::Fixed { base } => format!("fixed({base})"),
            BaselineSpec::PsoWeight { n, w } => format!("pso(n={n}, w={w})"),
            BaselineSpec::SpsoWeight { w } => format!("spso(w={w})"),
            BaselineSpec::Bernoulli { pi } => format!("bernoulli(pi={pi})"),
            BaselineSpec::WorstCase => "worst-case".into(),
        }
    }
}

impl fmt::Display for BaselineSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for BaselineSpec {
    type Err = Error;

    /// `worst-case`, `fixed:<base>`, `pso:<n>:<w>`, `spso:<w>` or
    /// `bernoulli:<pi>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let bad = |why: &str| Error::Parse {
            line: 0,
            message: format!("baseline `{s}`: {why}"),
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        let parts: Vec<&str> = s.split(':').collect();
        let spec = match parts.as_slice() {
            ["worst-case"] | ["worst"] => BaselineSpec::WorstCase,
            ["fixed", b] => BaselineSpec::Fixed { base: num(b)? },
            ["spso", w] => BaselineSpec::SpsoWeight { w: num(w)? },
            ["bernoulli", p] => BaselineSpec::Bernoulli { pi: num(p)? },
            ["pso", n, w] => BaselineSpec::PsoWeight {
                n: n.trim().parse().map_err(|_| bad("expected an integer n"))?,
                w: num(w)?,
            },
            _ => return Err(bad("unknown form")),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Scalar baseline success.
pub fn baseline_value(spec: &BaselineSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match *spec {
        BaselineSpec::Fixed { base } => base,
        BaselineSpec::PsoWeight { n, w } => {
            let n = n as f64;
            n * w * ((n - 1.0) * (-w).ln_1p()).exp()
        }
        BaselineSpec::SpsoWeight { w } => w,
        BaselineSpec::Bernoulli { pi } => pi.max(1.0 - pi),
        BaselineSpec::WorstCase => return Err(Error::NoScalarBaseline),
    })
}

/// `succ ≤ 1 - f(base)`.
pub fn succ_bound(f: &TradeoffCurve, base: f64) -> Result<f64> {
    check_probability("base", base)?;
    Ok((1.0 - f.eval(base)).clamp(base, 1.0))
}

/// `adv ≤ 1 - f(base) - base`, clamped at zero.
pub fn adv_bound(f: &TradeoffCurve, base: f64) -> Result<f64> {
    Ok((succ_bound(f, base)? - base).max(0.0))
}

/// Baseline-independent advantage bound η.
pub fn adv_bound_worst_case(f: &TradeoffCurve) -> f64 {
    tv_from_curve(f).eta
}

/// `R_f(π) = min_α π α + (1 - π) f(α)`.
pub fn bayes_error(f: &TradeoffCurve, pi: f64) -> Result<f64> {
    f.bayes_error(pi)
}

/// Success bound for two candidates with prior `(π, 1 - π)`: `1 - R_f(π)`.
pub fn bernoulli_succ_bound(f: &TradeoffCurve, pi: f64) -> Result<f64> {
    Ok((1.0 - bayes_error(f, pi)?).clamp(pi.max(1.0 - pi), 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Known on-average train loss, bound on the test loss.
    TrainToTest,
    /// Known on-average test loss, bound on the train loss.
    TestToTrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneralizationPair {
    pub known_loss: f64,
    pub loss_bound: f64,
    pub direction: Direction,
    pub group_order: u32,
}

/// On-average generalization: the unknown loss is at most `1 - f(known)`.
pub fn generalization_bound(
    f: &TradeoffCurve,
    known_loss: f64,
    direction: Direction,
) -> Result<GeneralizationPair> {
    check_probability("known_loss", known_loss)?;
    Ok(GeneralizationPair {
        known_loss,
        loss_bound: 1.0 - f.eval(known_loss),
        direction,
        group_order: 1,
    })
}

/// Bound for functions of the whole dataset, `1 - f^(n)(known)`. Also the
/// narcissus-resiliency success bound with `known` the NR baseline.
pub fn nonlinear_generalization_bound(f: &TradeoffCurve, n: u32, known_value: f64) -> Result<f64> {
    check_probability("known_value", known_value)?;
    let fk = group_privacy(f, n)?;
    Ok((1.0 - fk.eval(known_value)).clamp(known_value, 1.0))
}

/// Memorization and replace-one membership advantage are at most η.
pub fn memorization_bound(f: &TradeoffCurve) -> f64 {
    tv_from_curve(f).eta
}

/// The value object every bound computation returns.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub method: String,
    pub theorem: String,
    pub baseline: String,
    pub baseline_value: Option<f64>,
    pub success_bound: f64,
    pub advantage_bound: f64,
    pub params: BTreeMap<String, String>,
}

impl RiskReport {
    pub fn new(
        method: impl Into<String>,
        theorem: impl Into<String>,
        baseline: &BaselineSpec,
        baseline_value: Option<f64>,
        success_bound: f64,
        advantage_bound: f64,
    ) -> Self {
        RiskReport {
            method: method.into(),
            theorem: theorem.into(),
            baseline: baseline.label(),
            baseline_value,
            success_bound,
            advantage_bound,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub const CSV_HEADER: &'static str = "method,baseline,success_bound,advantage_bound,params";

    pub fn csv_row(&self) -> String {
        let base = match self.baseline_value {
            Some(v) => format!("{v:.16e}"),
            None => self.baseline.clone(),
        };
        let mut params = format!("theorem={};baseline={}", self.theorem, self.baseline);
        for (k, v) in &self.params {
            let _ = write!(params, ";{k}={v}");
        }
        format!(
            "{},{},{:.16e},{:.16e},{}",
            csv_field(&self.method),
            csv_field(&base),
            self.success_bound,
            self.advantage_bound,
            csv_field(&params)
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// CSV document for a set of reports.
pub fn reports_to_csv(reports: &[RiskReport]) -> String {
    let mut s = String::from(RiskReport::CSV_HEADER);
    s.push('\n');
    for r in reports {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Pretty JSON array for a set of reports.
pub fn reports_to_json(reports: &[RiskReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Unbiased reconstruction robustness: success `1 - f(base)`, advantage
/// `min(succ - base, η)`.
pub fn urr_bounds(f: &TradeoffCurve, base: f64) -> Result<RiskReport> {
    let succ = succ_bound(f, base)?;
    let adv = (succ - base).min(tv_from_curve(f).eta).max(0.0);
    Ok(RiskReport::new(
        "fdp",
        "urr",
        &BaselineSpec::Fixed { base },
        Some(base),
        succ,
        adv,
    )
    .with_param("curve", f.provenance()))
}

/// Success and advantage bounds for any baseline kind via the f-DP theorems.
pub fn fdp_report(f: &TradeoffCurve, baseline: &BaselineSpec) -> Result<RiskReport> {
    baseline.validate()?;
    let report = match *baseline {
        BaselineSpec::WorstCase => {
            let eta = adv_bound_worst_case(f);
            RiskReport::new("fdp", "tv-advantage", baseline, None, 1.0, eta)
        }
        BaselineSpec::Bernoulli { pi } => {
            let base = baseline_value(baseline)?;
            let succ = bernoulli_succ_bound(f, pi)?;
            RiskReport::new("fdp", "bayes-error", baseline, Some(base), succ, (succ - base).max(0.0))
        }
        BaselineSpec::PsoWeight { n, w } => {
            let base = baseline_value(baseline)?;
            let succ = crate::prior_bounds::pso_bound_fdp(n, w, f)?.max(base);
            RiskReport::new("fdp", "pso", baseline, Some(base), succ, (succ - base).max(0.0))
        }
        BaselineSpec::Fixed { .. } | BaselineSpec::SpsoWeight { .. } => {
            let base = baseline_value(baseline)?;
            let succ = succ_bound(f, base)?;
            RiskReport::new("fdp", "success", baseline, Some(base), succ, (succ - base).max(0.0))
        }
    };
    Ok(report.with_param("curve", f.provenance()))
}
