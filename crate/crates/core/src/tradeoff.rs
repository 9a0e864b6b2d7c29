//! Trade-off functions and the quantities derived from them.
//!
//! A trade-off function maps the false-positive rate α of the optimal test
//! between neighbouring output distributions to its smallest false-negative
//! rate. Every curve here is convex, continuous, non-increasing and bounded
//! by `1 - α`.

use crate::envelope::{self, Line};
use crate::error::{check_non_negative, check_probability, Error, Result};
use crate::grid;
use crate::normal;
use std::fmt::Write as _;

/// Internal representation of a curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    /// `max{0, 1 - δ - e^ε α, e^{-ε}(1 - δ - α)}`.
    EpsilonDelta { epsilon: f64, delta: f64 },
    /// `Φ(Φ⁻¹(1 - α) - μ)`.
    Gaussian { mu: f64 },
    /// Exact curve of two Laplace distributions whose centres differ by `1/b`,
    /// with `ε = Δ/b`.
    Laplace { epsilon: f64 },
    /// Linear interpolation between ordered knots spanning [0, 1].
    Piecewise(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffCurve {
    repr: Representation,
    provenance: String,
}

/// A set of `(ε, δ(ε))` guarantees sorted by ε.
#[derive(Debug, Clone, PartialEq)]
pub struct PrivacyProfile {
    points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvParameter {
    pub eta: f64,
}

impl TradeoffCurve {
    /// The curve of an `(ε, δ)`-DP guarantee.
    pub fn from_epsilon_delta(epsilon: f64, delta: f64) -> Result<Self> {
        if epsilon.is_nan() {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                reason: "must be a number",
            });
        }
        check_non_negative("epsilon", epsilon)?;
        check_probability("delta", delta)?;
        if epsilon.is_infinite() || delta == 1.0 {
            return Ok(Self::zero().with_provenance(format!(
                "epsilon-delta(epsilon={epsilon}, delta={delta})"
            )));
        }
        Ok(TradeoffCurve {
            repr: Representation::EpsilonDelta { epsilon, delta },
            provenance: format!("epsilon-delta(epsilon={epsilon}, delta={delta})"),
        })
    }

    /// μ-Gaussian DP curve.
    pub fn gaussian(mu: f64) -> Result<Self> {
        if mu.is_nan() {
            return Err(Error::Domain {
                name: "mu",
                value: mu,
                reason: "must be a number",
            });
        }
        check_non_negative("mu", mu)?;
        if mu.is_infinite() {
            return Ok(Self::zero().with_provenance(format!("gaussian(mu={mu})")));
        }
        Ok(TradeoffCurve {
            repr: Representation::Gaussian { mu },
            provenance: format!("gaussian(mu={mu})"),
        })
    }

    /// Exact curve of a single Laplace release with privacy parameter ε.
    pub fn laplace(epsilon: f64) -> Result<Self> {
        if epsilon.is_nan() {
            return Err(Error::Domain {
                name: "epsilon",
                value: epsilon,
                reason: "must be a number",
            });
        }
        check_non_negative("epsilon", epsilon)?;
        if epsilon.is_infinite() {
            return Ok(Self::zero().with_provenance(format!("laplace(epsilon={epsilon})")));
        }
        Ok(TradeoffCurve {
            repr: Representation::Laplace { epsilon },
            provenance: format!("laplace(epsilon={epsilon})"),
        })
    }

    /// Perfect privacy: `f(α) = 1 - α`.
    pub fn identity() -> Self {
        TradeoffCurve {
            repr: Representation::EpsilonDelta {
                epsilon: 0.0,
                delta: 0.0,
            },
            provenance: "identity".into(),
        }
    }

    /// No privacy: `f ≡ 0`.
    pub fn zero() -> Self {
        TradeoffCurve {
            repr: Representation::Piecewise(vec![(0.0, 0.0), (1.0, 0.0)]),
            provenance: "zero".into(),
        }
    }

    /// Validated piecewise-linear curve. Violations below `1e-9` are repaired
    /// by a convexification pass; larger ones are rejected.
    pub fn from_knots(knots: Vec<(f64, f64)>) -> Result<Self> {
        let problems = knot_violations(&knots, 1e-9);
        if let Some(first) = problems.into_iter().next() {
            return Err(Error::InvalidCurve(first));
        }
        Ok(Self::piecewise_unchecked(envelope::convexify(&knots)))
    }

    pub(crate) fn piecewise_unchecked(knots: Vec<(f64, f64)>) -> Self {
        TradeoffCurve {
            repr: Representation::Piecewise(knots),
            provenance: "piecewise".into(),
        }
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> Self {
        self.provenance = provenance.into();
        self
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    /// `f(α)`, with α clamped to [0, 1].
    pub fn eval(&self, alpha: f64) -> f64 {
        let a = alpha.clamp(0.0, 1.0);
        let v = match &self.repr {
            Representation::EpsilonDelta { epsilon, delta } => {
                if a == 0.0 {
                    1.0 - delta
                } else {
                    let e = epsilon.exp();
                    (1.0 - delta - e * a).max((1.0 - delta - a) / e).max(0.0)
                }
            }
            Representation::Gaussian { mu } => normal::cdf(-normal::ppf(a) - mu),
            Representation::Laplace { epsilon } => laplace_eval(*epsilon, a),
            Representation::Piecewise(knots) => envelope::interpolate(knots, a),
        };
        v.clamp(0.0, 1.0 - a)
    }

    /// Right derivative `f'(α)` for α in [0, 1); used for tangent lines.
    pub fn slope(&self, alpha: f64) -> f64 {
        let a = alpha.clamp(0.0, 1.0);
        match &self.repr {
            Representation::EpsilonDelta { .. } | Representation::Piecewise(_) => {
                let knots = self.exact_knots().expect("piecewise-linear kind");
                let i = knots.partition_point(|k| k.0 <= a).clamp(1, knots.len() - 1);
                let (x0, y0) = knots[i - 1];
                let (x1, y1) = knots[i];
                (y1 - y0) / (x1 - x0)
            }
            Representation::Gaussian { mu } => {
                if *mu == 0.0 {
                    return -1.0;
                }
                let z = -normal::ppf(a);
                -(mu * z - 0.5 * mu * mu).exp()
            }
            Representation::Laplace { epsilon } => {
                let e = epsilon.exp();
                if a < 0.5 / e {
                    -e
                } else if a < 0.5 {
                    -1.0 / (4.0 * e * a * a)
                } else {
                    -1.0 / e
                }
            }
        }
    }

    /// Knots for piecewise-linear kinds; `None` for smooth analytic kinds.
    pub fn exact_knots(&self) -> Option<Vec<(f64, f64)>> {
        match &self.repr {
            Representation::EpsilonDelta { epsilon, delta } => {
                let c = (1.0 - delta) / (1.0 + epsilon.exp());
                let knots = vec![(0.0, 1.0 - delta), (c, c), (1.0 - delta, 0.0), (1.0, 0.0)];
                Some(envelope::dedup_knots(knots))
            }
            Representation::Piecewise(k) => Some(k.clone()),
            _ => None,
        }
    }

    /// Piecewise-linear knots that never exceed the curve. Smooth kinds use the
    /// upper envelope of tangent lines at the default α-grid.
    pub fn knots(&self) -> Vec<(f64, f64)> {
        self.exact_knots()
            .unwrap_or_else(|| self.tangent_envelope(&grid::default_alpha_grid()))
    }

    /// Upper envelope of tangent lines at the given abscissae.
    pub fn tangent_envelope(&self, alphas: &[f64]) -> Vec<(f64, f64)> {
        let mut lines: Vec<Line> = alphas
            .iter()
            .filter(|&&a| a < 1.0)
            .map(|&a| Line::through(a, self.eval(a), self.slope(a)))
            .collect();
        if let Representation::Laplace { epsilon } = self.repr {
            let e = epsilon.exp();
            lines.push(Line::new(-e, 1.0));
            lines.push(Line::new(-1.0 / e, 1.0 / e));
            lines.push(Line::through(0.5 / e, 0.5, -e));
        }
        envelope::upper_envelope(lines)
    }

    /// Conservative piecewise-linear version of this curve.
    pub fn to_piecewise(&self) -> TradeoffCurve {
        match &self.repr {
            Representation::Piecewise(_) => self.clone(),
            _ => TradeoffCurve {
                repr: Representation::Piecewise(self.knots()),
                provenance: self.provenance.clone(),
            },
        }
    }

    /// `min_α f(α) + λα` for λ ≥ 0.
    pub fn conjugate_min(&self, lambda: f64) -> f64 {
        if lambda.is_infinite() {
            return self.eval(0.0);
        }
        match &self.repr {
            Representation::Gaussian { mu } => {
                if lambda <= 0.0 {
                    return 0.0;
                }
                if *mu == 0.0 {
                    return lambda.min(1.0);
                }
                let z = lambda.ln() / mu + mu / 2.0;
                (normal::cdf(z - mu) + lambda * normal::cdf(-z)).min(1.0)
            }
            Representation::Laplace { epsilon } => {
                let e = epsilon.exp();
                if lambda >= e {
                    1.0
                } else if lambda <= 1.0 / e {
                    lambda
                } else {
                    (lambda / e).sqrt()
                }
            }
            _ => {
                let knots = self.exact_knots().expect("piecewise-linear kind");
                knots
                    .iter()
                    .map(|&(a, y)| if a == 0.0 { y } else { y + lambda * a })
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Smallest δ such that this curve dominates the `(ε, δ)` curve.
    pub fn delta_at(&self, epsilon: f64) -> f64 {
        let d = match &self.repr {
            Representation::Gaussian { mu } => gaussian_delta(*mu, epsilon),
            Representation::Laplace { epsilon: e0 } => {
                if epsilon >= *e0 {
                    0.0
                } else {
                    -((epsilon - e0) / 2.0).exp_m1()
                }
            }
            _ => 1.0 - self.conjugate_min(epsilon.exp()),
        };
        d.clamp(0.0, 1.0)
    }

    /// Minimum over α of `π α + (1 - π) f(α)`.
    pub fn bayes_error(&self, pi: f64) -> Result<f64> {
        check_probability("pi", pi)?;
        if pi == 1.0 {
            return Ok(0.0);
        }
        Ok(((1.0 - pi) * self.conjugate_min(pi / (1.0 - pi))).clamp(0.0, 0.5))
    }

    /// Evaluate on every α in `alphas`.
    pub fn sample(&self, alphas: &[f64]) -> Vec<f64> {
        alphas.iter().map(|&a| self.eval(a)).collect()
    }

    /// Check curve invariants on a grid; returns a description of each failure.
    pub fn check_invariants(&self, alphas: &[f64], tol: f64) -> Vec<String> {
        let mut problems = Vec::new();
        if let Some(k) = self.exact_knots() {
            problems.extend(knot_violations(&k, tol));
        }
        let ys = self.sample(alphas);
        for (i, (&a, &y)) in alphas.iter().zip(&ys).enumerate() {
            if !(-tol..=1.0 - a + tol).contains(&y) {
                problems.push(format!("f({a}) = {y} outside [0, 1 - alpha]"));
            }
            if i > 0 && y > ys[i - 1] + tol {
                problems.push(format!("increasing at alpha = {a}"));
            }
            if i > 0 && i + 1 < alphas.len() {
                let (a0, a2) = (alphas[i - 1], alphas[i + 1]);
                let (y0, y2) = (ys[i - 1], ys[i + 1]);
                let chord = y0 + (y2 - y0) * (a - a0) / (a2 - a0);
                if y > chord + tol {
                    problems.push(format!("not convex at alpha = {a}"));
                }
            }
        }
        problems
    }

    /// CSV with header `alpha,f`, one row per knot.
    pub fn to_csv(&self) -> String {
        knots_to_csv(&self.knots())
    }

    /// Parse and validate a curve CSV.
    pub fn from_csv(text: &str) -> Result<Self> {
        Self::from_knots(parse_curve_csv(text)?).map(|c| c.with_provenance("csv"))
    }
}

impl PrivacyProfile {
    pub fn new(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("profile"));
        }
        for &(e, d) in &points {
            if e.is_nan() {
                return Err(Error::Domain {
                    name: "epsilon",
                    value: e,
                    reason: "must be a number",
                });
            }
            check_probability("delta", d)?;
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in points.windows(2) {
            if w[1].1 > w[0].1 + 1e-12 {
                return Err(Error::InvalidCurve(format!(
                    "profile delta increases from {} at epsilon {} to {} at epsilon {}",
                    w[0].1, w[0].0, w[1].1, w[1].0
                )));
            }
        }
        Ok(PrivacyProfile { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("epsilon,delta\n");
        for &(e, d) in &self.points {
            let _ = writeln!(s, "{e:.16e},{d:.16e}");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_two_column_csv(text, ("epsilon", "delta"))?;
        Self::new(rows)
    }
}

/// (ε, δ) line upper envelope over every pair of the profile; exact piecewise form.
pub fn curve_from_profile(profile: &PrivacyProfile) -> TradeoffCurve {
    let mut lines = Vec::with_capacity(2 * profile.points.len());
    for &(eps, delta) in &profile.points {
        if eps.is_infinite() || delta >= 1.0 {
            continue;
        }
        let e = eps.exp();
        lines.push(Line::new(-e, 1.0 - delta));
        lines.push(Line::new(-1.0 / e, (1.0 - delta) / e));
    }
    let knots = envelope::convexify(&envelope::upper_envelope(lines));
    TradeoffCurve::piecewise_unchecked(knots)
        .with_provenance(format!("profile-envelope({} points)", profile.points.len()))
}

/// `δ(ε)` for each requested ε.
pub fn profile_from_curve(f: &TradeoffCurve, epsilons: &[f64]) -> Result<PrivacyProfile> {
    if epsilons.is_empty() {
        return Err(Error::Empty("epsilons"));
    }
    for &e in epsilons {
        check_non_negative("epsilon", e)?;
    }
    let mut pts: Vec<(f64, f64)> = epsilons.iter().map(|&e| (e, f.delta_at(e))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    // enforce monotonicity against rounding
    for i in 1..pts.len() {
        pts[i].1 = pts[i].1.min(pts[i - 1].1);
    }
    PrivacyProfile::new(pts)
}

/// η = max_α (1 - f(α) - α).
pub fn tv_from_curve(f: &TradeoffCurve) -> TvParameter {
    let eta = match f.representation() {
        Representation::EpsilonDelta { epsilon, delta } => {
            (1.0 - 2.0 * (1.0 - delta) / (1.0 + epsilon.exp())).max(0.0)
        }
        Representation::Gaussian { mu } => 1.0 - 2.0 * normal::cdf(-mu / 2.0),
        Representation::Laplace { epsilon } => -(-epsilon / 2.0).exp_m1(),
        Representation::Piecewise(knots) => knots
            .iter()
            .map(|&(a, y)| 1.0 - y - a)
            .fold(0.0, f64::max),
    };
    TvParameter {
        eta: eta.clamp(0.0, 1.0),
    }
}

/// `f^(k) = 1 - (1 - f)^{∘k}`: the guarantee against `k` changed records.
pub fn group_privacy(f: &TradeoffCurve, k: u32) -> Result<TradeoffCurve> {
    if k < 1 {
        return Err(Error::Domain {
            name: "k",
            value: k as f64,
            reason: "must be at least 1",
        });
    }
    if k == 1 {
        return Ok(f.clone());
    }
    let g: Vec<(f64, f64)> = f.knots().iter().map(|&(a, y)| (a, 1.0 - y)).collect();
    let mut h = g.clone();
    for _ in 1..k {
        h = compose_increasing(&g, &h);
        if h.len() > MAX_GROUP_KNOTS {
            h = thin_concave(&h, MAX_GROUP_KNOTS / 2);
        }
    }
    let knots: Vec<(f64, f64)> = h.into_iter().map(|(a, y)| (a, 1.0 - y)).collect();
    Ok(TradeoffCurve::piecewise_unchecked(envelope::convexify(&knots))
        .with_provenance(format!("group({k}) of {}", f.provenance())))
}

const MAX_GROUP_KNOTS: usize = 20_000;

/// Exact knots of `g ∘ h` for non-decreasing piecewise-linear `g`, `h`.
fn compose_increasing(g: &[(f64, f64)], h: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = h.iter().map(|k| k.0).collect();
    for w in h.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y1 <= y0 {
            continue;
        }
        let lo = g.partition_point(|k| k.0 <= y0);
        let hi = g.partition_point(|k| k.0 < y1);
        for gk in &g[lo..hi] {
            xs.push(x0 + (gk.0 - y0) * (x1 - x0) / (y1 - y0));
        }
    }
    let xs = grid::sort_dedup(xs);
    let out = xs
        .into_iter()
        .map(|x| (x, envelope::interpolate(g, envelope::interpolate(h, x))))
        .collect();
    envelope::dedup_knots(out)
}

/// Keep a subset of the segment lines of a concave curve. Their lower
/// envelope lies above the curve, so `1 - g` stays a lower bound on `f`.
fn thin_concave(h: &[(f64, f64)], target: usize) -> Vec<(f64, f64)> {
    let step = (h.len() / target).max(1);
    let lines: Vec<Line> = h
        .windows(2)
        .enumerate()
        .filter(|(i, _)| i % step == 0 || *i + 2 == h.len())
        .filter(|(_, w)| w[1].0 > w[0].0)
        .map(|(_, w)| {
            let s = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            // 1 - g has slope -s and passes through (x0, 1 - y0)
            Line::through(w[0].0, 1.0 - w[0].1, -s)
        })
        .collect();
    envelope::upper_envelope(lines)
        .into_iter()
        .map(|(a, y)| (a, 1.0 - y))
        .collect()
}

fn laplace_eval(epsilon: f64, a: f64) -> f64 {
    let e = epsilon.exp();
    if a < 0.5 / e {
        1.0 - e * a
    } else if a <= 0.5 {
        1.0 / (4.0 * e * a)
    } else {
        (1.0 - a) / e
    }
}

/// Gaussian privacy profile `Φ(-ε/μ + μ/2) - e^ε Φ(-ε/μ - μ/2)`.
pub fn gaussian_delta(mu: f64, epsilon: f64) -> f64 {
    if mu == 0.0 {
        return 0.0;
    }
    if mu.is_infinite() {
        return 1.0;
    }
    let a = -epsilon / mu + mu / 2.0;
    let b = -epsilon / mu - mu / 2.0;
    let first = normal::cdf(a);
    let second = (epsilon + normal::log_cdf(b)).exp();
    if first > 1e-3 {
        return (first - second).clamp(0.0, 1.0);
    }
    // relative cancellation: δ = Φ(a) (1 - exp(ε + logΦ(b) - logΦ(a)))
    let la = normal::log_cdf(a);
    let r = epsilon + normal::log_cdf(b) - la;
    (-(la.exp()) * r.exp_m1()).clamp(0.0, 1.0)
}

/// Smallest ε with `gaussian_delta(mu, ε) <= delta`.
pub fn gaussian_epsilon(mu: f64, delta: f64) -> Result<f64> {
    check_probability("delta", delta)?;
    if delta <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if gaussian_delta(mu, 0.0) <= delta {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while gaussian_delta(mu, hi) > delta {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gaussian_delta(mu, mid) > delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Largest μ whose Gaussian profile satisfies `δ(ε) <= delta`.
pub fn gaussian_mu_for(epsilon: f64, delta: f64) -> Result<f64> {
    check_non_negative("epsilon", epsilon)?;
    check_probability("delta", delta)?;
    if delta >= 1.0 {
        return Ok(f64::INFINITY);
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while gaussian_delta(hi, epsilon) < delta {
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gaussian_delta(mid, epsilon) < delta {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(lo)
}

fn knot_violations(knots: &[(f64, f64)], tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    if knots.len() < 2 {
        out.push("need at least two knots".to_string());
        return out;
    }
    if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
        out.push("knots must start at alpha = 0 and end at alpha = 1".to_string());
    }
    for &(a, y) in knots {
        if !a.is_finite() || !y.is_finite() {
            out.push(format!("non-finite knot ({a}, {y})"));
        } else if y < -tol || y > 1.0 - a + tol {
            out.push(format!("f({a}) = {y} outside [0, 1 - alpha]"));
        }
    }
    for w in knots.windows(2) {
        if w[1].0 <= w[0].0 {
            out.push(format!("alpha not strictly increasing at {}", w[1].0));
        } else if w[1].1 > w[0].1 + tol {
            out.push(format!("increasing between alpha {} and {}", w[0].0, w[1].0));
        }
    }
    for w in knots.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        if b.0 <= a.0 || c.0 <= b.0 {
            continue;
        }
        let chord = a.1 + (c.1 - a.1) * (b.0 - a.0) / (c.0 - a.0);
        if b.1 > chord + tol {
            out.push(format!("not convex at alpha = {}", b.0));
        }
    }
    out
}

/// Structural violations of raw knots (empty when valid).
pub fn validate_knots(knots: &[(f64, f64)]) -> Vec<String> {
    knot_violations(knots, 1e-9)
}

pub(crate) fn knots_to_csv(knots: &[(f64, f64)]) -> String {
    let mut s = String::from("alpha,f\n");
    for &(a, y) in knots {
        let _ = writeln!(s, "{a:.16e},{y:.16e}");
    }
    s
}

/// Parse `alpha,f` rows without validating curve invariants.
pub fn parse_curve_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    parse_two_column_csv(text, ("alpha", "f"))
}

fn parse_two_column_csv(text: &str, header: (&str, &str)) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if !seen_header {
            if cols.len() != 2 || cols[0] != header.0 || cols[1] != header.1 {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected header `{},{}`", header.0, header.1),
                });
            }
            seen_header = true;
            continue;
        }
        if cols.len() != 2 {
            return Err(Error::Parse {
                line: i + 1,
                message: "expected two columns".into(),
            });
        }
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("`{s}`: {e}"),
            })
        };
        rows.push((parse(cols[0])?, parse(cols[1])?));
    }
    if !seen_header {
        return Err(Error::Parse {
            line: 0,
            message: "missing header".into(),
        });
    }
    Ok(rows)
}
