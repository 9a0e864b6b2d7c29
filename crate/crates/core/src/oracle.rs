//! Brute-force ground truth for small discrete mechanism pairs.
//!
//! The exact trade-off curve follows from Neyman–Pearson ordering. Attack
//! success is maximized by enumerating every deterministic attack.

use crate::envelope;
use crate::error::{Error, Result};
use crate::normal;
use crate::risk;
use crate::tradeoff::{self, TradeoffCurve};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two probability vectors over the same finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePair {
    pub outcomes: Vec<String>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl DiscretePair {
    pub fn new(p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        let outcomes = (0..p.len()).map(|i| i.to_string()).collect();
        Self::with_outcomes(outcomes, p, q)
    }

    pub fn with_outcomes(outcomes: Vec<String>, p: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if p.len() != q.len() || p.len() != outcomes.len() {
            return Err(Error::InvalidPair("mass vectors differ in length".into()));
        }
        if p.is_empty() {
            return Err(Error::Empty("outcomes"));
        }
        for (name, v) in [("p", &p), ("q", &q)] {
            if v.iter().any(|&m| !(m >= 0.0)) {
                return Err(Error::InvalidPair(format!("{name} has a negative mass")));
            }
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidPair(format!("{name} sums to {s}")));
            }
        }
        Ok(DiscretePair { outcomes, p, q })
    }

    pub fn swapped(&self) -> DiscretePair {
        DiscretePair {
            outcomes: self.outcomes.clone(),
            p: self.q.clone(),
            q: self.p.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Knots `(α, β)` of `T(P, Q)`: reject outcomes in decreasing order of `q/p`,
/// with tied ratios merged into one randomized segment.
pub fn tradeoff_knots(pair: &DiscretePair) -> Vec<(f64, f64)> {
    let mut idx: Vec<usize> = (0..pair.len()).collect();
    // compare q_i/p_i > q_j/p_j as q_i p_j > q_j p_i, avoiding division by zero
    idx.sort_by(|&i, &j| {
        let lhs = pair.q[i] * pair.p[j];
        let rhs = pair.q[j] * pair.p[i];
        rhs.total_cmp(&lhs)
    });
    let mut knots = vec![(0.0, 1.0)];
    let (mut alpha, mut q_rejected) = (0.0, 0.0);
    let mut k = 0;
    while k < idx.len() {
        let i = idx[k];
        let mut dp = pair.p[i];
        let mut dq = pair.q[i];
        k += 1;
        while k < idx.len() {
            let j = idx[k];
            if pair.q[j] * pair.p[i] == pair.q[i] * pair.p[j] {
                dp += pair.p[j];
                dq += pair.q[j];
                k += 1;
            } else {
                break;
            }
        }
        alpha += dp;
        q_rejected += dq;
        knots.push((alpha.min(1.0), (1.0 - q_rejected).max(0.0)));
    }
    if let Some(last) = knots.last_mut() {
        last.0 = 1.0;
        last.1 = 0.0;
    }
    knots
}

/// Exact trade-off curve `T(P, Q)`.
pub fn exact_tradeoff(pair: &DiscretePair) -> Result<TradeoffCurve> {
    let knots = envelope::convexify(&tradeoff_knots(pair));
    Ok(TradeoffCurve::piecewise_unchecked(knots).with_provenance("oracle"))
}

/// Symmetrized curve `min{T(P,Q), T(Q,P)}` convexified: the tightest f with
/// respect to which both orderings of the pair are f-DP.
pub fn exact_symmetric_tradeoff(pair: &DiscretePair) -> Result<TradeoffCurve> {
    let mut pts = tradeoff_knots(pair);
    pts.extend(tradeoff_knots(&pair.swapped()));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let knots = envelope::convexify(&pts);
    Ok(TradeoffCurve::piecewise_unchecked(knots).with_provenance("oracle-symmetric"))
}

/// Lower convex hull of the trade-off knots of every ordered pair in a family.
pub fn family_tradeoff(dists: &[Vec<f64>]) -> Result<TradeoffCurve> {
    let mut pts = Vec::new();
    for (i, p) in dists.iter().enumerate() {
        for (j, q) in dists.iter().enumerate() {
            if i != j {
                let pair = DiscretePair::new(p.clone(), q.clone())?;
                pts.extend(tradeoff_knots(&pair));
            }
        }
    }
    if pts.is_empty() {
        return Ok(TradeoffCurve::identity());
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    Ok(TradeoffCurve::piecewise_unchecked(envelope::convexify(&pts)).with_provenance("oracle-family"))
}

/// Half the L1 distance between the mass vectors.
pub fn exact_tv(pair: &DiscretePair) -> f64 {
    0.5 * pair
        .p
        .iter()
        .zip(&pair.q)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

/// Largest `|outcomes| · |candidates|` accepted by [`optimal_attack_success`].
pub const MAX_ATTACK_INSTANCE: usize = 16;

/// An attack instance: a prior over candidate records and, for each
/// candidate, the mechanism's output distribution when that record is used.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackInstance {
    pub prior: Vec<f64>,
    pub outputs: Vec<Vec<f64>>,
}

/// Maximum over every map `outcome -> candidate` of the probability that the
/// guess equals the record actually used.
pub fn optimal_attack_success(inst: &AttackInstance) -> Result<f64> {
    let c = inst.prior.len();
    if c == 0 {
        return Err(Error::Empty("candidates"));
    }
    if inst.outputs.len() != c {
        return Err(Error::InvalidPair("one output distribution per candidate".into()));
    }
    let m = inst.outputs[0].len();
    if inst.outputs.iter().any(|o| o.len() != m) {
        return Err(Error::InvalidPair("output distributions differ in length".into()));
    }
    if m * c > MAX_ATTACK_INSTANCE {
        return Err(Error::InstanceTooLarge {
            outcomes: m,
            candidates: c,
            limit: MAX_ATTACK_INSTANCE,
        });
    }
    let total = (c as u64).pow(m as u32);
    let mut best: f64 = 0.0;
    for code in 0..total {
        let mut rest = code;
        let mut success = 0.0;
        for o in 0..m {
            let guess = (rest % c as u64) as usize;
            rest /= c as u64;
            success += inst.prior[guess] * inst.outputs[guess][o];
        }
        best = best.max(success);
    }
    Ok(best)
}

/// Largest prior mass: the success of guessing without seeing the output.
pub fn attack_baseline(inst: &AttackInstance) -> f64 {
    inst.prior.iter().copied().fold(0.0, f64::max)
}

/// Slice a continuous pair into `cells` equal cells between `lo` and `hi`;
/// tails are lumped into the end cells.
pub fn discretize(
    cdf_p: impl Fn(f64) -> f64,
    cdf_q: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    cells: usize,
) -> Result<DiscretePair> {
    if cells < 2 || !(hi > lo) {
        return Err(Error::InvalidPair("need hi > lo and at least two cells".into()));
    }
    let edges: Vec<f64> = (1..cells)
        .map(|i| lo + (hi - lo) * i as f64 / cells as f64)
        .collect();
    let masses = |cdf: &dyn Fn(f64) -> f64| {
        let mut out = Vec::with_capacity(cells);
        let mut prev = 0.0;
        for &e in &edges {
            let c = cdf(e);
            out.push((c - prev).max(0.0));
            prev = c;
        }
        out.push((1.0 - prev).max(0.0));
        let s: f64 = out.iter().sum();
        out.iter_mut().for_each(|m| *m /= s);
        out
    };
    DiscretePair::new(masses(&cdf_p), masses(&cdf_q))
}

/// Laplace(0, 1/ε) against Laplace(1, 1/ε) on `cells` cells. The likelihood
/// ratio is constant outside [0, 1], so the two tails are single cells and
/// the remaining cells split [0, 1] evenly.
pub fn discretized_laplace_pair(epsilon: f64, cells: usize) -> Result<DiscretePair> {
    if cells < 3 {
        return Err(Error::InvalidPair("need at least three cells".into()));
    }
    let b = 1.0 / epsilon;
    let cdf = |x: f64, mean: f64| {
        let z = (x - mean) / b;
        if z < 0.0 {
            0.5 * z.exp()
        } else {
            1.0 - 0.5 * (-z).exp()
        }
    };
    let m = cells - 2;
    let masses = |mean: f64| {
        let mut out = Vec::with_capacity(cells);
        let mut prev = cdf(0.0, mean);
        out.push(prev);
        for i in 1..=m {
            let c = cdf(i as f64 / m as f64, mean);
            out.push((c - prev).max(0.0));
            prev = c;
        }
        out.push(1.0 - prev);
        let s: f64 = out.iter().sum();
        out.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    DiscretePair::new(masses(0.0), masses(1.0))
}

/// N(0, 1) against N(μ, 1), discretized on `cells` cells.
pub fn discretized_gaussian_pair(mu: f64, cells: usize) -> Result<DiscretePair> {
    discretize(normal::cdf, move |x| normal::cdf(x - mu), -12.0, mu + 12.0, cells)
}

/// Binomial(k, 1 - p) against Binomial(k, p): `k` randomized-response bits.
pub fn randomized_response_pair(p: f64, k: u32) -> Result<DiscretePair> {
    let k = k as usize;
    let mut a = Vec::with_capacity(k + 1);
    let mut b = Vec::with_capacity(k + 1);
    for ones in 0..=k {
        let lc = ln_choose(k, ones);
        let zeros = (k - ones) as f64;
        let ones_f = ones as f64;
        a.push((lc + ones_f * (1.0 - p).ln() + zeros * p.ln()).exp());
        b.push((lc + ones_f * p.ln() + zeros * (1.0 - p).ln()).exp());
    }
    let norm = |v: Vec<f64>| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect::<Vec<_>>()
    };
    DiscretePair::new(norm(a), norm(b))
}

pub(crate) fn ln_choose(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// Outcome of checking one corpus instance.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyCase {
    pub name: String,
    pub attack_success: f64,
    pub baseline: f64,
    pub bound: f64,
    pub curve_ok: bool,
}

impl VerifyCase {
    pub fn gap(&self) -> f64 {
        self.bound - self.attack_success
    }

    pub fn passed(&self) -> bool {
        self.curve_ok && self.gap() >= -1e-12
    }
}

/// Random attack instances: uniform-ish priors over 2 to 4 candidates and
/// output distributions over 2 to 4 outcomes, within the brute-force limit.
pub fn random_instances(count: usize, seed: u64) -> Vec<AttackInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range(2..=4usize);
        let m = rng.gen_range(2..=4usize);
        if c * m > MAX_ATTACK_INSTANCE {
            continue;
        }
        let prior = random_simplex(&mut rng, c);
        let outputs = (0..c).map(|_| random_simplex(&mut rng, m)).collect();
        out.push(AttackInstance { prior, outputs });
    }
    out
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-9f64..1.0).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Check one instance: the family curve passes the curve invariants and the
/// brute-force attack respects `succ ≤ 1 - f(base)`.
pub fn verify_instance(name: &str, inst: &AttackInstance) -> Result<VerifyCase> {
    let f = family_tradeoff(&inst.outputs)?;
    let curve_ok = f
        .exact_knots()
        .map(|k| tradeoff::validate_knots(&k).is_empty())
        .unwrap_or(false)
        && f.check_invariants(&crate::grid::linspace(0.0, 1.0, 1001), 1e-12).is_empty();
    let baseline = attack_baseline(inst);
    let attack_success = optimal_attack_success(inst)?;
    let bound = risk::succ_bound(&f, baseline)?;
    Ok(VerifyCase {
        name: name.to_string(),
        attack_success,
        baseline,
        bound,
        curve_ok,
    })
}

/// Randomized response with flip probability `p` over two equally likely
/// records: returns the case checked against the two-candidate Bayes bound.
pub fn randomized_response_case(p: f64) -> Result<VerifyCase> {
    let inst = AttackInstance {
        prior: vec![0.5, 0.5],
        outputs: vec![vec![1.0 - p, p], vec![p, 1.0 - p]],
    };
    let f = family_tradeoff(&inst.outputs)?;
    let attack_success = optimal_attack_success(&inst)?;
    let bound = risk::bernoulli_succ_bound(&f, 0.5)?;
    Ok(VerifyCase {
        name: format!("randomized-response(p={p})"),
        attack_success,
        baseline: 0.5,
        bound,
        curve_ok: tradeoff::validate_knots(&f.knots()).is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identical_pair_gives_identity() {
        let pair = DiscretePair::new(vec![0.2, 0.3, 0.5], vec![0.2, 0.3, 0.5]).unwrap();
        let f = exact_tradeoff(&pair).unwrap();
        for i in 0..=10 {
            let a = i as f64 / 10.0;
            assert_relative_eq!(f.eval(a), 1.0 - a, epsilon = 1e-15);
        }
        assert_eq!(exact_tv(&pair), 0.0);
    }

    #[test]
    fn disjoint_pair_gives_zero() {
        let pair = DiscretePair::new(vec![1.0, 0.0], vec![0.0, 1.0]).unwrap();
        let f = exact_tradeoff(&pair).unwrap();
        for i in 1..=10 {
            assert_eq!(f.eval(i as f64 / 10.0), 0.0);
        }
        assert_eq!(exact_tv(&pair), 1.0);
    }

    #[test]
    fn randomized_response_knots() {
        let pair = DiscretePair::new(vec![0.75, 0.25], vec![0.25, 0.75]).unwrap();
        let k = exact_tradeoff(&pair).unwrap().exact_knots().unwrap();
        assert_eq!(k, vec![(0.0, 1.0), (0.25, 0.25), (1.0, 0.0)]);
        let pure = TradeoffCurve::from_epsilon_delta(3f64.ln(), 0.0).unwrap();
        let f = exact_tradeoff(&pair).unwrap();
        for i in 0..=100 {
            let a = i as f64 / 100.0;
            assert_relative_eq!(f.eval(a), pure.eval(a), epsilon = 1e-15);
        }
    }

    #[test]
    fn tv_matches_curve() {
        let pair = DiscretePair::new(vec![0.1, 0.4, 0.5], vec![0.3, 0.3, 0.4]).unwrap();
        let f = exact_tradeoff(&pair).unwrap();
        assert_relative_eq!(
            tradeoff::tv_from_curve(&f).eta,
            exact_tv(&pair),
            epsilon = 1e-12
        );
    }

    #[test]
    fn mass_mismatch_is_rejected() {
        assert!(DiscretePair::new(vec![0.5, 0.5], vec![1.0]).is_err());
        assert!(DiscretePair::new(vec![0.5, 0.6], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn attack_examples() {
        let blind = AttackInstance {
            prior: vec![0.5, 0.5],
            outputs: vec![vec![0.5, 0.5], vec![0.5, 0.5]],
        };
        assert_relative_eq!(optimal_attack_success(&blind).unwrap(), 0.5);
        let reveal = AttackInstance {
            prior: vec![0.5, 0.5],
            outputs: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert_relative_eq!(optimal_attack_success(&reveal).unwrap(), 1.0);
        let rr = randomized_response_case(0.25).unwrap();
        assert_relative_eq!(rr.attack_success, 0.75, epsilon = 1e-15);
        assert!(rr.gap().abs() < 1e-9);
    }

    #[test]
    fn oversized_instance_is_rejected() {
        let inst = AttackInstance {
            prior: vec![0.2; 5],
            outputs: vec![vec![0.25; 4]; 5],
        };
        assert!(matches!(
            optimal_attack_success(&inst),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn discretized_laplace_tv() {
        let pair = discretized_laplace_pair(0.2, 100_000).unwrap();
        assert!((exact_tv(&pair) - (1.0 - (-0.1f64).exp())).abs() < 1e-4);
    }

    #[test]
    fn binomial_pair_for_one_bit() {
        let pair = randomized_response_pair(0.25, 1).unwrap();
        assert_relative_eq!(pair.p[1], 0.75, epsilon = 1e-15);
        assert_relative_eq!(pair.q[1], 0.25, epsilon = 1e-15);
    }
}
