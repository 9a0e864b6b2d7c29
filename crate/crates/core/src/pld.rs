//! Discretized privacy loss distributions.
//!
//! Losses sit on the uniform grid `ℓ_i = (offset + i) · step`. Every
//! discretization rounds losses up, and mass that falls off the grid is
//! booked as an infinite loss, so profiles computed from a grid are upper
//! bounds on the true ones.

use crate::error::{check_positive, Error, Result};
use crate::normal;
use crate::tradeoff::{curve_from_profile, PrivacyProfile, TradeoffCurve};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct PldGrid {
    step: f64,
    offset: i64,
    masses: Vec<f64>,
    truncation_mass: f64,
    infinity_mass: f64,
}

/// Above this many multiply-adds the transform path is used.
const DIRECT_LIMIT: f64 = 4e6;

impl PldGrid {
    /// Build from raw parts, checking the normalization invariant.
    pub fn new(
        step: f64,
        offset: i64,
        masses: Vec<f64>,
        truncation_mass: f64,
        infinity_mass: f64,
    ) -> Result<Self> {
        check_positive("step", step)?;
        if masses.is_empty() {
            return Err(Error::Empty("masses"));
        }
        if masses.iter().any(|&m| !(m >= 0.0)) || truncation_mass < 0.0 || infinity_mass < 0.0 {
            return Err(Error::InvalidCurve("negative probability mass".into()));
        }
        let total: f64 = masses.iter().sum::<f64>() + truncation_mass + infinity_mass;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCurve(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        Ok(PldGrid {
            step,
            offset,
            masses,
            truncation_mass,
            infinity_mass,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn infinity_mass(&self) -> f64 {
        self.infinity_mass
    }

    pub fn loss(&self, i: usize) -> f64 {
        (self.offset + i as i64) as f64 * self.step
    }

    pub fn loss_values(&self) -> Vec<f64> {
        (0..self.masses.len()).map(|i| self.loss(i)).collect()
    }

    pub fn max_loss(&self) -> f64 {
        self.loss(self.masses.len() - 1)
    }

    /// CSV with header `loss,mass`; off-grid mass appears as a final `inf` row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("loss,mass\n");
        for (i, &m) in self.masses.iter().enumerate() {
            let _ = writeln!(s, "{:.16e},{m:.16e}", self.loss(i));
        }
        let _ = writeln!(s, "inf,{:.16e}", self.truncation_mass + self.infinity_mass);
        s
    }
}

/// PLD of the Laplace mechanism with privacy parameter ε.
///
/// Under the first distribution the loss has an atom `e^{-ε}/2` at `-ε`, an
/// atom `1/2` at `ε`, and CDF `exp(-(ε - ℓ)/2)/2` in between.
pub fn pld_of_laplace(epsilon: f64, grid_step: f64) -> Result<PldGrid> {
    check_positive("epsilon", epsilon)?;
    check_positive("grid_step", grid_step)?;
    if !epsilon.is_finite() {
        return Err(Error::Domain {
            name: "epsilon",
            value: epsilon,
            reason: "must be finite",
        });
    }
    if grid_step >= 2.0 * epsilon {
        return Err(Error::Domain {
            name: "grid_step",
            value: grid_step,
            reason: "must be smaller than the loss support width 2 epsilon",
        });
    }
    let lo = (-epsilon / grid_step).ceil() as i64;
    let hi = (epsilon / grid_step).ceil() as i64;
    let n = (hi - lo + 1) as usize;
    // mass of (ℓ_{i-1}, ℓ_i] for interior cells, via cdf differences in log form
    let cdf = |l: f64| -> f64 {
        if l >= epsilon {
            1.0
        } else if l < -epsilon {
            0.0
        } else {
            0.5 * (-(epsilon - l) / 2.0).exp()
        }
    };
    let mut masses = vec![0.0; n];
    masses[0] = cdf(lo as f64 * grid_step);
    for (i, m) in masses.iter_mut().enumerate().take(n - 1).skip(1) {
        let b = (lo + i as i64) as f64 * grid_step;
        let a = b - grid_step;
        *m = -0.5 * (-(epsilon - b) / 2.0).exp() * (-(b - a) / 2.0).exp_m1();
    }
    let below_top = cdf((hi - 1) as f64 * grid_step);
    masses[n - 1] = 1.0 - below_top;
    let total: f64 = masses.iter().sum();
    let masses = masses.into_iter().map(|m| m / total).collect();
    PldGrid::new(grid_step, lo, masses, 0.0, 0.0)
}

/// PLD of the Gaussian mechanism with parameter μ: loss ~ N(μ²/2, μ²).
/// The grid spans `tail_sigmas` standard deviations on each side.
pub fn pld_of_gaussian(mu: f64, grid_step: f64, tail_sigmas: f64) -> Result<PldGrid> {
    check_positive("mu", mu)?;
    check_positive("grid_step", grid_step)?;
    check_positive("tail_sigmas", tail_sigmas)?;
    let mean = mu * mu / 2.0;
    let lo = ((mean - tail_sigmas * mu) / grid_step).ceil() as i64;
    let hi = ((mean + tail_sigmas * mu) / grid_step).ceil() as i64;
    let n = (hi - lo + 1) as usize;
    let z = |l: f64| (l - mean) / mu;
    let mut masses = vec![0.0; n];
    masses[0] = normal::cdf(z(lo as f64 * grid_step));
    for (i, m) in masses.iter_mut().enumerate().skip(1) {
        let b = (lo + i as i64) as f64 * grid_step;
        let a = b - grid_step;
        let (za, zb) = (z(a), z(b));
        *m = if za > 0.0 {
            normal::sf(za) - normal::sf(zb)
        } else {
            normal::cdf(zb) - normal::cdf(za)
        }
        .max(0.0);
    }
    let finite: f64 = masses.iter().sum();
    let truncation = (1.0 - finite).max(normal::sf(z(hi as f64 * grid_step)));
    let scale = (1.0 - truncation) / finite;
    let masses = masses.into_iter().map(|m| m * scale).collect();
    PldGrid::new(grid_step, lo, masses, truncation, 0.0)
}

/// k-fold self-convolution.
pub fn pld_compose(pld: &PldGrid, k: u32) -> Result<PldGrid> {
    if k < 1 {
        return Err(Error::Domain {
            name: "k",
            value: k as f64,
            reason: "must be at least 1",
        });
    }
    if k == 1 {
        return Ok(pld.clone());
    }
    let kf = k as f64;
    let len = pld.masses.len();
    let out_len = (len - 1) * k as usize + 1;
    let finite_in = 1.0 - pld.truncation_mass - pld.infinity_mass;
    let infinity = -(kf * (-pld.infinity_mass).ln_1p()).exp_m1();
    let finite_out = finite_in.powi(k as i32);

    let work = len as f64 * out_len as f64;
    let (mut masses, error) = if work <= DIRECT_LIMIT {
        (direct_power(&pld.masses, k), 0.0)
    } else {
        fft_power(&pld.masses, k, out_len)
    };
    for m in masses.iter_mut() {
        if *m < 0.0 {
            *m = 0.0;
        }
    }
    let target = (finite_out - error).max(0.0);
    let sum: f64 = masses.iter().sum();
    if sum > 0.0 {
        let s = target / sum;
        masses.iter_mut().for_each(|m| *m *= s);
    }
    let truncation = (1.0 - target - infinity).max(0.0);
    let mut out = PldGrid {
        step: pld.step,
        offset: pld.offset * k as i64,
        masses,
        truncation_mass: truncation,
        infinity_mass: infinity,
    };
    out.fix_normalization();
    Ok(out)
}

impl PldGrid {
    /// Absorb rounding in the final sum into the truncation mass.
    fn fix_normalization(&mut self) {
        let sum: f64 = self.masses.iter().sum();
        let rest = 1.0 - sum - self.infinity_mass;
        if rest >= 0.0 {
            self.truncation_mass = rest;
        } else {
            let s = (1.0 - self.infinity_mass - self.truncation_mass) / sum;
            self.masses.iter_mut().for_each(|m| *m *= s);
        }
    }
}

fn direct_power(m: &[f64], k: u32) -> Vec<f64> {
    let mut acc = m.to_vec();
    for _ in 1..k {
        let mut next = vec![0.0; acc.len() + m.len() - 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in m.iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        acc = next;
    }
    acc
}

/// Returns the convolution power and a pessimistic bound on its absolute error.
fn fft_power(m: &[f64], k: u32, out_len: usize) -> (Vec<f64>, f64) {
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let mut buf: Vec<Complex<f64>> = m
        .iter()
        .map(|&x| Complex::new(x, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    forward.process(&mut buf);
    for c in buf.iter_mut() {
        *c = c.powu(k);
    }
    inverse.process(&mut buf);
    let scale = 1.0 / size as f64;
    let out = buf[..out_len].iter().map(|c| c.re * scale).collect();
    let error = 4.0 * k as f64 * size as f64 * f64::EPSILON;
    (out, error)
}

/// `δ(ε) = E[(1 - e^{ε - L})₊]` plus all off-grid mass.
pub fn profile_from_pld(pld: &PldGrid, epsilons: &[f64]) -> Result<PrivacyProfile> {
    if epsilons.is_empty() {
        return Err(Error::Empty("epsilons"));
    }
    let sums = SuffixSums::new(pld);
    let mut pts: Vec<(f64, f64)> = epsilons.iter().map(|&e| (e, sums.delta(e))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    for i in 1..pts.len() {
        pts[i].1 = pts[i].1.min(pts[i - 1].1);
    }
    PrivacyProfile::new(pts)
}

struct SuffixSums<'a> {
    pld: &'a PldGrid,
    mass: Vec<f64>,
    weighted: Vec<f64>,
}

impl<'a> SuffixSums<'a> {
    fn new(pld: &'a PldGrid) -> Self {
        let n = pld.masses.len();
        let mut mass = vec![0.0; n + 1];
        let mut weighted = vec![0.0; n + 1];
        for i in (0..n).rev() {
            mass[i] = mass[i + 1] + pld.masses[i];
            weighted[i] = weighted[i + 1] + pld.masses[i] * (-pld.loss(i)).exp();
        }
        SuffixSums {
            pld,
            mass,
            weighted,
        }
    }

    fn delta(&self, epsilon: f64) -> f64 {
        let n = self.pld.masses.len() as i64;
        // first cell with loss strictly above ε
        let guess = (epsilon / self.pld.step).floor() as i64 - self.pld.offset + 1;
        let mut j = guess.clamp(0, n);
        while j > 0 && self.pld.loss(j as usize - 1) > epsilon {
            j -= 1;
        }
        while j < n && self.pld.loss(j as usize) <= epsilon {
            j += 1;
        }
        let j = j as usize;
        let finite = (self.mass[j] - epsilon.exp() * self.weighted[j]).max(0.0);
        (finite + self.pld.truncation_mass + self.pld.infinity_mass).min(1.0)
    }
}

/// Trade-off curve of the discretized pair: the (ε, δ) line envelope of the
/// profile at ε = 0 and at every non-negative grid loss.
pub fn curve_from_pld(pld: &PldGrid) -> Result<TradeoffCurve> {
    let mut eps = vec![0.0];
    eps.extend(
        pld.loss_values()
            .into_iter()
            .filter(|&l| l > 0.0),
    );
    let profile = profile_from_pld(pld, &eps)?;
    Ok(curve_from_profile(&profile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tradeoff::{gaussian_delta, tv_from_curve};
    use approx::assert_relative_eq;

    #[test]
    fn laplace_pld_is_normalized() {
        let p = pld_of_laplace(0.2, 1e-4).unwrap();
        let s: f64 = p.masses().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_relative_eq!(p.masses()[0], 0.5 * (-0.2f64).exp(), max_relative = 1e-9);
        assert_relative_eq!(*p.masses().last().unwrap(), 0.5000250, epsilon = 1e-7);
        assert!(pld_of_laplace(0.2, 0.4).is_err());
    }

    #[test]
    fn laplace_pld_profile() {
        let p = pld_of_laplace(0.2, 1e-4).unwrap();
        let prof = profile_from_pld(&p, &[0.0, 0.2]).unwrap();
        let tv = tv_from_curve(&TradeoffCurve::laplace(0.2).unwrap()).eta;
        assert!(prof.points()[0].1 >= tv);
        assert!((prof.points()[0].1 - tv).abs() < 1e-4);
        assert!(prof.points()[1].1 < 1e-12);
    }

    #[test]
    fn compose_once_is_identity() {
        let p = pld_of_laplace(0.5, 1e-2).unwrap();
        assert_eq!(pld_compose(&p, 1).unwrap(), p);
        assert!(pld_compose(&p, 0).is_err());
    }

    #[test]
    fn direct_and_fft_agree() {
        let p = pld_of_laplace(0.3, 1e-2).unwrap();
        let d = direct_power(p.masses(), 6);
        let (f, err) = fft_power(p.masses(), 6, d.len());
        let diff = d.iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < err.max(1e-13), "{diff}");
    }

    #[test]
    fn composed_gaussian_matches_analytic_profile() {
        let mu = 0.5;
        let k = 4;
        let p = pld_of_gaussian(mu, 1e-3, 10.0).unwrap();
        let c = pld_compose(&p, k).unwrap();
        let s: f64 = c.masses().iter().sum::<f64>() + c.truncation_mass() + c.infinity_mass();
        assert!((s - 1.0).abs() < 1e-12);
        let eps: Vec<f64> = (0..=50).map(|i| 0.1 * i as f64).collect();
        let prof = profile_from_pld(&c, &eps).unwrap();
        for &(e, d) in prof.points() {
            let exact = gaussian_delta(mu * (k as f64).sqrt(), e);
            assert!(d >= exact - 1e-12, "not pessimistic at {e}");
            assert!(d - exact < 1e-3, "{e}: {d} vs {exact}");
        }
    }

    #[test]
    fn csv_lists_every_cell() {
        let p = pld_of_laplace(0.5, 0.25).unwrap();
        let csv = p.to_csv();
        assert_eq!(csv.lines().count(), p.masses().len() + 2);
    }
}
