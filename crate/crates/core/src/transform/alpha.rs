use std::sync::Arc;

use serde::Serialize;

use super::scalar::{SampledFn, ScalarFn};
use super::{check_starts_at, SystemSpec};
use crate::error::Result;
use crate::expr::Expr;
use crate::numerics::{cumulative_integral_with, Grid, QuadratureRule};

/// The λ-independent parts of `α_λ = A·λ + α₀` on a grid, where
/// `A = exp ∫p` and `α₀ = A ∫ f/A`. Shared by every λ of a sweep.
#[derive(Debug, Clone)]
pub struct AlphaBasis {
    grid: Grid,
    a_factor: Vec<f64>,
    alpha0: Vec<f64>,
    p: Vec<f64>,
    f: Vec<f64>,
    r: Vec<f64>,
    g: Vec<f64>,
}

/// `α_λ` and `g_λ = r α_λ + g` sampled on a grid.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaTrace {
    pub lambda: f64,
    #[serde(skip)]
    pub grid: Grid,
    /// `A(t) = exp ∫_{t0}^t p`.
    pub a_factor: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `α' = p α + f` at the nodes.
    #[serde(skip)]
    pub alpha_slope: Vec<f64>,
    pub g_lambda: Vec<f64>,
}

impl AlphaBasis {
    pub fn new(sys: &SystemSpec, grid: &Grid) -> Result<AlphaBasis> {
        check_starts_at(grid, sys.t0)?;
        let ts = grid.nodes();
        let p = sys.p.sample(ts)?;
        let f = sys.f.sample(ts)?;
        let r = sys.r.sample(ts)?;
        let g = sys.g.sample(ts)?;
        let a_factor: Vec<f64> = cumulative_integral_with(&p, grid, QuadratureRule::Simpson)?
            .into_iter()
            .map(f64::exp)
            .collect();
        let ratio: Vec<f64> = f.iter().zip(&a_factor).map(|(f, a)| f / a).collect();
        let inner = cumulative_integral_with(&ratio, grid, QuadratureRule::Simpson)?;
        let alpha0 = a_factor.iter().zip(&inner).map(|(a, i)| a * i).collect();
        Ok(AlphaBasis {
            grid: grid.clone(),
            a_factor,
            alpha0,
            p,
            f,
            r,
            g,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn a_factor(&self) -> &[f64] {
        &self.a_factor
    }

    pub fn alpha0(&self) -> &[f64] {
        &self.alpha0
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn alpha_values(&self, lambda: f64) -> Vec<f64> {
        self.a_factor
            .iter()
            .zip(&self.alpha0)
            .map(|(a, a0)| a * lambda + a0)
            .collect()
    }

    /// `g_λ = r α_λ + g` at the nodes.
    pub fn g_lambda_values(&self, alpha: &[f64]) -> Vec<f64> {
        alpha
            .iter()
            .zip(&self.r)
            .zip(&self.g)
            .map(|((a, r), g)| r * a + g)
            .collect()
    }

    pub fn trace(&self, lambda: f64) -> AlphaTrace {
        let alpha = self.alpha_values(lambda);
        let alpha_slope = alpha
            .iter()
            .zip(&self.p)
            .zip(&self.f)
            .map(|((a, p), f)| p * a + f)
            .collect();
        let g_lambda = self.g_lambda_values(&alpha);
        AlphaTrace {
            lambda,
            grid: self.grid.clone(),
            a_factor: self.a_factor.clone(),
            alpha,
            alpha_slope,
            g_lambda,
        }
    }
}

impl AlphaTrace {
    /// `α_λ` between nodes, by cubic Hermite interpolation.
    pub fn alpha_fn(&self) -> ScalarFn {
        ScalarFn::sampled(
            self.grid.clone(),
            self.alpha.clone(),
            Some(self.alpha_slope.clone()),
        )
    }

    /// `g_λ(t) = r(t) α_λ(t) + g(t)` with `r`, `g` evaluated exactly and
    /// `α_λ` interpolated.
    pub fn g_lambda_fn(&self, sys: &SystemSpec) -> ScalarFn {
        let alpha = Arc::new(SampledFn {
            grid: self.grid.clone(),
            values: self.alpha.clone(),
            slopes: Some(self.alpha_slope.clone()),
        });
        let (r, g) = (sys.r.clone(), sys.g.clone());
        ScalarFn::closure(move |t| Ok(r.eval(t)? * alpha.eval(t) + g.eval(t)?))
    }
}

/// `α_λ(t) = A(t)(λ + ∫_{t0}^t f/A)` and `g_λ = r α_λ + g` on `grid`.
pub fn alpha_lambda(sys: &SystemSpec, lambda: f64, grid: &Grid) -> Result<AlphaTrace> {
    Ok(AlphaBasis::new(sys, grid)?.trace(lambda))
}

/// The system satisfied by `(φ₁, ψ)` after substituting `φ = φ₁ + α_λ`:
/// same `p, q, r, s`, no first forcing, second forcing `g_λ`.
#[derive(Debug, Clone)]
pub struct ShiftedSystem {
    pub p: Expr,
    pub q: Expr,
    pub r: Expr,
    pub s: Expr,
    pub g_lambda: ScalarFn,
    pub alpha: AlphaTrace,
    pub t0: f64,
}

impl ShiftedSystem {
    pub fn derivative(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        dy[0] = self.p.eval(t)? * y[0] + self.q.eval(t)? * y[1];
        dy[1] = self.r.eval(t)? * y[0] + self.s.eval(t)? * y[1] + self.g_lambda.eval(t)?;
        Ok(())
    }
}

pub fn shift_system(sys: &SystemSpec, lambda: f64, grid: &Grid) -> Result<ShiftedSystem> {
    let alpha = alpha_lambda(sys, lambda, grid)?;
    Ok(ShiftedSystem {
        p: sys.p.clone(),
        q: sys.q.clone(),
        r: sys.r.clone(),
        s: sys.s.clone(),
        g_lambda: alpha.g_lambda_fn(sys),
        alpha,
        t0: sys.t0,
    })
}
