//! Non-uniform evaluation grids on [0, 1].

/// Default α-grid: log-spaced down to 1e-12 near both ends, uniform in the middle.
pub fn default_alpha_grid() -> Vec<f64> {
    let mut tail = Vec::new();
    let per_decade = 40;
    for i in 0..(10 * per_decade) {
        let exponent = -12.0 + i as f64 / per_decade as f64;
        tail.push(10f64.powf(exponent));
    }
    let mut xs = vec![0.0];
    xs.extend(tail.iter().copied());
    let mut a = 1e-2;
    while a < 1.0 - 1e-2 + 1e-12 {
        xs.push(a);
        a += 1e-3;
    }
    xs.extend(tail.iter().rev().map(|t| 1.0 - t));
    xs.push(1.0);
    sort_dedup(xs)
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive; both must be positive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}

pub(crate) fn sort_dedup(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.total_cmp(b));
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * b.abs().max(1e-300));
    xs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_sorted_and_spans_unit_interval() {
        let g = default_alpha_grid();
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g[1] <= 1e-12 * 1.0001);
        assert!(g.len() > 1500 && g.len() < 2500);
    }

    #[test]
    fn logspace_endpoints() {
        let g = logspace(1e-3, 10.0, 5);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[4] - 10.0).abs() < 1e-12);
    }
}
