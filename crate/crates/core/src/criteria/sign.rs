use serde::{Deserialize, Serialize};

use crate::numerics::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    NonNegative,
    NonPositive,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::NonNegative => 1.0,
            Sign::NonPositive => -1.0,
        }
    }
}

/// Maximal intervals where `sign · values ≥ -slack` at consecutive grid
/// nodes. Ends adjacent to a failing node are moved to the linearly
/// interpolated zero between the two nodes. Intervals of zero length are
/// dropped.
pub fn sign_windows(values: &[f64], grid: &Grid, sign: Sign, slack: f64) -> Vec<(f64, f64)> {
    let x = grid.nodes();
    let v: Vec<f64> = values.iter().map(|v| sign.factor() * v).collect();
    let ok = |i: usize| v[i] >= -slack;
    // zero of the linear interpolant between an accepted and a failing node
    let crossing = |good: usize, bad: usize| {
        if v[good] <= 0.0 {
            x[good]
        } else {
            x[good] + (x[bad] - x[good]) * v[good] / (v[good] - v[bad])
        }
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < v.len() {
        if !ok(i) {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < v.len() && ok(i + 1) {
            i += 1;
        }
        let start = if first > 0 { crossing(first, first - 1) } else { x[0] };
        let end = if i + 1 < v.len() { crossing(i, i + 1) } else { x[i] };
        if end > start {
            out.push((start, end));
        }
        i += 1;
    }
    out
}

/// Pairwise intersections of two sorted lists of disjoint intervals.
pub fn intersect_windows(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_is_nonnegative_on_first_half_period() {
        let g = Grid::uniform(0.0, 2.0 * PI, 1001).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|t| t.sin()).collect();
        let w = sign_windows(&v, &g, Sign::NonNegative, 1e-12);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0, 0.0);
        assert!((w[0].1 - PI).abs() < 1e-12);
        let w = sign_windows(&v, &g, Sign::NonPositive, 1e-12);
        assert_eq!(w.len(), 1);
        assert!((w[0].0 - PI).abs() < 1e-12 && w[0].1 == 2.0 * PI);
    }

    #[test]
    fn zero_values_fill_the_span_for_both_signs() {
        let g = Grid::uniform(0.0, 3.0, 31).unwrap();
        let v = vec![0.0; 31];
        for s in [Sign::NonNegative, Sign::NonPositive] {
            assert_eq!(sign_windows(&v, &g, s, 1e-12), vec![(0.0, 3.0)]);
        }
    }

    #[test]
    fn linear_ramp_window_is_refined_to_its_root() {
        let g = Grid::uniform(0.0, 2.0, 8).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|t| t - 1.0).collect();
        let w = sign_windows(&v, &g, Sign::NonPositive, 1e-12);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].0, 0.0);
        assert!((w[0].1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn intersections() {
        let a = [(0.0, 2.0), (3.0, 5.0)];
        let b = [(1.0, 4.0), (4.5, 6.0)];
        assert_eq!(intersect_windows(&a, &b), vec![(1.0, 2.0), (3.0, 4.0), (4.5, 5.0)]);
        assert!(intersect_windows(&a, &[]).is_empty());
    }
}
