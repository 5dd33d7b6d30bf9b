use serde::{Deserialize, Serialize};

use super::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureRule {
    #[default]
    Trapezoid,
    /// Cells are taken in pairs and integrated against the quadratic through
    /// the pair's three nodes (an odd last cell reuses the final three).
    /// Works on non-uniform grids; falls back to trapezoid on 2 nodes.
    Simpson,
}

/// Running integral of grid-sampled `values` from the first node, by the
/// composite trapezoid rule. `out[0] == 0`.
pub fn cumulative_integral(values: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    cumulative_integral_with(values, grid, QuadratureRule::Trapezoid)
}

pub fn cumulative_integral_with(
    values: &[f64],
    grid: &Grid,
    rule: QuadratureRule,
) -> Result<Vec<f64>> {
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            found: values.len(),
        });
    }
    let x = grid.nodes();
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    out.push(0.0);
    let mut acc = 0.0;
    for i in 0..n - 1 {
        let piece = match rule {
            QuadratureRule::Trapezoid => 0.5 * (x[i + 1] - x[i]) * (values[i] + values[i + 1]),
            QuadratureRule::Simpson if n < 3 => {
                0.5 * (x[i + 1] - x[i]) * (values[i] + values[i + 1])
            }
            QuadratureRule::Simpson => {
                // cells are paired so even nodes carry composite Simpson sums
                let j = (i - i % 2).min(n - 3);
                quadratic_piece(
                    [x[j], x[j + 1], x[j + 2]],
                    [values[j], values[j + 1], values[j + 2]],
                    x[i],
                    x[i + 1],
                )
            }
        };
        acc += piece;
        out.push(acc);
    }
    Ok(out)
}

/// Definite integral over the whole grid.
pub fn integral(values: &[f64], grid: &Grid, rule: QuadratureRule) -> Result<f64> {
    Ok(*cumulative_integral_with(values, grid, rule)?.last().unwrap())
}

// Exact integral over [a, b] of the quadratic interpolating (xs, fs), in
// Newton form about xs[0].
fn quadratic_piece(xs: [f64; 3], fs: [f64; 3], a: f64, b: f64) -> f64 {
    let h1 = xs[1] - xs[0];
    let d1 = (fs[1] - fs[0]) / h1;
    let d2 = ((fs[2] - fs[1]) / (xs[2] - xs[1]) - d1) / (xs[2] - xs[0]);
    let (ua, ub) = (a - xs[0], b - xs[0]);
    let lin = 0.5 * (ub * ub - ua * ua);
    let quad = (ub.powi(3) - ua.powi(3)) / 3.0 - 0.5 * h1 * (ub * ub - ua * ua);
    fs[0] * (b - a) + d1 * lin + d2 * quad
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_and_linear_are_exact() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        let out = cumulative_integral(&[1.0; 11], &g).unwrap();
        assert_eq!(out[0], 0.0);
        assert_eq!(*out.last().unwrap(), 1.0);

        let g = Grid::uniform(0.0, 2.0, 17).unwrap();
        let lin: Vec<f64> = g.nodes().to_vec();
        assert_eq!(*cumulative_integral(&lin, &g).unwrap().last().unwrap(), 2.0);
    }

    #[test]
    fn cosine_quarter_period() {
        let g = Grid::uniform(0.0, std::f64::consts::FRAC_PI_2, 1001).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|t| t.cos()).collect();
        let trap = integral(&v, &g, QuadratureRule::Trapezoid).unwrap();
        assert!((trap - 1.0).abs() < 1e-6);
        let simp = integral(&v, &g, QuadratureRule::Simpson).unwrap();
        assert!((simp - 1.0).abs() < 1e-11);
    }

    #[test]
    fn simpson_exact_for_quadratics_on_uneven_grid() {
        let g = Grid::new(vec![0.0, 0.1, 0.35, 0.4, 0.9, 1.0, 1.7]).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        let out = cumulative_integral_with(&v, &g, QuadratureRule::Simpson).unwrap();
        for (x, got) in g.nodes().iter().zip(&out) {
            let exact = x.powi(3) - 0.5 * x * x + 2.0 * x;
            assert!((got - exact).abs() < 1e-12, "{x}: {got} vs {exact}");
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let g = Grid::uniform(0.0, 1.0, 5).unwrap();
        assert!(matches!(
            cumulative_integral(&[1.0; 4], &g),
            Err(Error::LengthMismatch { expected: 5, found: 4 })
        ));
    }

    proptest! {
        #[test]
        fn linearity(a in -5.0f64..5.0, b in -5.0f64..5.0, seed in 0u64..1000) {
            let g = Grid::uniform(-1.0, 2.0, 64).unwrap();
            let u: Vec<f64> = g.nodes().iter().map(|t| (t * (1.0 + seed as f64 * 1e-3)).sin()).collect();
            let v: Vec<f64> = g.nodes().iter().map(|t| t * t - seed as f64 * 1e-2).collect();
            let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + b * y).collect();
            for rule in [QuadratureRule::Trapezoid, QuadratureRule::Simpson] {
                let iu = cumulative_integral_with(&u, &g, rule).unwrap();
                let iv = cumulative_integral_with(&v, &g, rule).unwrap();
                let iw = cumulative_integral_with(&w, &g, rule).unwrap();
                for k in 0..g.len() {
                    let expect = a * iu[k] + b * iv[k];
                    prop_assert!((iw[k] - expect).abs() <= 1e-12 * (1.0 + expect.abs()));
                }
            }
        }
    }
}
