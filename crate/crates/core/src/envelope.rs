//! Convex piecewise-linear helpers on [0, 1]: upper envelopes of lines and
//! greatest convex minorants of point sets.

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn new(slope: f64, intercept: f64) -> Self {
        Line { slope, intercept }
    }

    /// Line through `(x, y)` with slope `s`.
    pub fn through(x: f64, y: f64, s: f64) -> Self {
        Line {
            slope: s,
            intercept: y - s * x,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

fn crossing(a: &Line, b: &Line) -> f64 {
    (b.intercept - a.intercept) / (a.slope - b.slope)
}

/// Knots of `max(0, max_i line_i)` restricted to [0, 1].
pub(crate) fn upper_envelope(mut lines: Vec<Line>) -> Vec<(f64, f64)> {
    lines.retain(|l| l.slope.is_finite() && l.intercept.is_finite());
    lines.push(Line::new(0.0, 0.0));
    lines.sort_by(|a, b| {
        a.slope
            .total_cmp(&b.slope)
            .then(b.intercept.total_cmp(&a.intercept))
    });
    lines.dedup_by(|later, kept| later.slope == kept.slope);

    let mut hull: Vec<Line> = Vec::with_capacity(lines.len());
    for l in lines {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            if crossing(&a, &l) <= crossing(&a, &b) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(l);
    }

    let n = hull.len();
    let xs: Vec<f64> = (0..n - 1).map(|j| crossing(&hull[j], &hull[j + 1])).collect();
    let mut j = 0;
    while j < n - 1 && xs[j] <= 0.0 {
        j += 1;
    }
    let mut knots = vec![(0.0, hull[j].at(0.0).max(0.0))];
    while j < n - 1 && xs[j] < 1.0 {
        knots.push((xs[j], hull[j].at(xs[j]).max(0.0)));
        j += 1;
    }
    knots.push((1.0, hull[j].at(1.0).max(0.0)));
    dedup_knots(knots)
}

/// Greatest convex minorant of points sorted by x (duplicates allowed).
pub(crate) fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    let mut i = 0;
    while i < points.len() {
        let x = points[i].0;
        let mut y = points[i].1;
        while i + 1 < points.len() && points[i + 1].0 == x {
            i += 1;
            y = y.min(points[i].1);
        }
        push_lower(&mut hull, (x, y));
        i += 1;
    }
    hull
}

fn push_lower(hull: &mut Vec<(f64, f64)>, p: (f64, f64)) {
    while hull.len() >= 2 {
        let a = hull[hull.len() - 2];
        let b = hull[hull.len() - 1];
        // keep b only if it lies strictly below the chord a-p
        let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
        if cross <= 0.0 {
            hull.pop();
        } else {
            break;
        }
    }
    hull.push(p);
}

/// Repair rounding: clamp to [0, 1 - α], convex minorant, then running minimum.
pub(crate) fn convexify(knots: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let clamped: Vec<(f64, f64)> = knots
        .iter()
        .map(|&(a, y)| (a, y.clamp(0.0, (1.0 - a).max(0.0))))
        .collect();
    let mut hull = lower_hull(&clamped);
    let mut running = f64::INFINITY;
    for k in hull.iter_mut() {
        running = running.min(k.1);
        k.1 = running;
    }
    dedup_knots(hull)
}

/// Drop knots whose α coincides with the previous one and interior knots that
/// are collinear with their neighbours.
pub(crate) fn dedup_knots(knots: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(knots.len());
    for k in knots {
        if let Some(last) = out.last_mut() {
            if k.0 <= last.0 {
                last.1 = last.1.min(k.1);
                continue;
            }
        }
        while out.len() >= 2 {
            let a = out[out.len() - 2];
            let b = out[out.len() - 1];
            let s1 = (b.1 - a.1) / (b.0 - a.0);
            let s2 = (k.1 - b.1) / (k.0 - b.0);
            if (s1 - s2).abs() <= 1e-15 * (1.0 + s1.abs().max(s2.abs())) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(k);
    }
    out
}

/// Linear interpolation on sorted knots; clamps outside the knot range.
pub(crate) fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let i = knots.partition_point(|k| k.0 <= x);
    if i == 0 {
        return knots[0].1;
    }
    if i == knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    if x1 == x0 {
        return y0.min(y1);
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_of_single_line() {
        let k = upper_envelope(vec![Line::new(-1.0, 1.0)]);
        assert_eq!(k, vec![(0.0, 1.0), (1.0, 0.0)]);
    }

    #[test]
    fn envelope_clips_at_zero() {
        let k = upper_envelope(vec![Line::new(-2.0, 1.0)]);
        assert_eq!(k, vec![(0.0, 1.0), (0.5, 0.0), (1.0, 0.0)]);
    }

    #[test]
    fn envelope_keeps_only_dominant_lines() {
        let lines = vec![
            Line::new(-2.0, 1.0),
            Line::new(-0.5, 0.5),
            Line::new(-1.0, 0.2),
        ];
        let k = upper_envelope(lines);
        assert_eq!(k.len(), 3);
        assert!((k[1].0 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(k[2], (1.0, 0.0));
    }

    #[test]
    fn hull_removes_concave_point() {
        let pts = [(0.0, 1.0), (0.5, 0.6), (1.0, 0.0)];
        assert_eq!(lower_hull(&pts), vec![(0.0, 1.0), (1.0, 0.0)]);
        let pts = [(0.0, 1.0), (0.5, 0.2), (1.0, 0.0)];
        assert_eq!(lower_hull(&pts).len(), 3);
    }

    #[test]
    fn hull_with_duplicate_x_takes_minimum() {
        let pts = [(0.0, 1.0), (0.5, 0.3), (0.5, 0.2), (1.0, 0.0)];
        assert_eq!(lower_hull(&pts), vec![(0.0, 1.0), (0.5, 0.2), (1.0, 0.0)]);
    }

    #[test]
    fn convexify_makes_monotone() {
        let pts = [(0.0, 1.0), (0.5, 0.0), (1.0, 0.1)];
        let c = convexify(&pts);
        assert_eq!(c.last().unwrap().1, 0.0);
    }

    #[test]
    fn interpolation() {
        let k = [(0.0, 1.0), (0.5, 0.25), (1.0, 0.0)];
        assert_eq!(interpolate(&k, 0.25), 0.625);
        assert_eq!(interpolate(&k, 1.0), 0.0);
        assert_eq!(interpolate(&k, 0.0), 1.0);
    }
}
