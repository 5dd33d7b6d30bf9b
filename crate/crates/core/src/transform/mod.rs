//! Structural transforms of forced 2×2 linear systems
//!
//! ```text
//! φ' = p(t)φ + q(t)ψ + f(t)
//! ψ' = r(t)φ + s(t)ψ + g(t)
//! ```
//!
//! the reduction of `(a φ')' + b φ' + c φ = d` to such a system, the shift
//! `φ = φ₁ + α_λ(t)` that moves the first forcing into the second equation,
//! and the correspondence between the system and the scalar Riccati equation
//! for `y = ψ / φ`.

mod alpha;
mod riccati_form;
mod scalar;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::Grid;

pub use alpha::{alpha_lambda, shift_system, AlphaBasis, AlphaTrace, ShiftedSystem};
pub use riccati_form::{
    lift_riccati_solution, project_to_riccati, riccati_of_system, RiccatiProblem,
};
pub use scalar::{SampledFn, ScalarFn};

/// Coefficients `p, q, r, s, f, g` of a forced linear system and its start
/// time `t0`. With `f ≡ g ≡ 0` it is the homogeneous system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub p: Expr,
    pub q: Expr,
    pub r: Expr,
    pub s: Expr,
    pub f: Expr,
    pub g: Expr,
    pub t0: f64,
}

/// Coefficient values at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub f: f64,
    pub g: f64,
}

/// Coefficients sampled on every node of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSystem {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

impl SystemSpec {
    pub fn new(p: Expr, q: Expr, r: Expr, s: Expr, f: Expr, g: Expr, t0: f64) -> SystemSpec {
        SystemSpec { p, q, r, s, f, g, t0 }
    }

    /// Parses `[p, q, r, s, f, g]` from text.
    pub fn parse(coefficients: [&str; 6], t0: f64) -> Result<SystemSpec> {
        let [p, q, r, s, f, g] = coefficients.map(Expr::parse);
        Ok(SystemSpec::new(p?, q?, r?, s?, f?, g?, t0))
    }

    /// The same system with both forcing terms removed.
    pub fn homogeneous(&self) -> SystemSpec {
        SystemSpec {
            f: Expr::zero(),
            g: Expr::zero(),
            ..self.clone()
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        self.f.is_literal(0.0) && self.g.is_literal(0.0)
    }

    pub fn coefficients_at(&self, t: f64) -> Result<Coefficients> {
        Ok(Coefficients {
            p: self.p.eval(t)?,
            q: self.q.eval(t)?,
            r: self.r.eval(t)?,
            s: self.s.eval(t)?,
            f: self.f.eval(t)?,
            g: self.g.eval(t)?,
        })
    }

    /// Samples all six coefficients on `grid`, failing on the first node
    /// where one of them cannot be evaluated.
    pub fn sample(&self, grid: &Grid) -> Result<SampledSystem> {
        let ts = grid.nodes();
        Ok(SampledSystem {
            p: self.p.sample(ts)?,
            q: self.q.sample(ts)?,
            r: self.r.sample(ts)?,
            s: self.s.sample(ts)?,
            f: self.f.sample(ts)?,
            g: self.g.sample(ts)?,
        })
    }

    /// Right-hand side of the system at `(t, [φ, ψ])`.
    pub fn derivative(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let c = self.coefficients_at(t)?;
        dy[0] = c.p * y[0] + c.q * y[1] + c.f;
        dy[1] = c.r * y[0] + c.s * y[1] + c.g;
        Ok(())
    }

    /// `E = p - s`, the linear coefficient of the associated Riccati equation.
    pub fn e_coefficient(&self) -> Expr {
        difference(self.p.clone(), self.s.clone())
    }
}

/// Coefficients of `(a φ')' + b φ' + c φ = d` and its start time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderSpec {
    pub a: Expr,
    pub b: Expr,
    pub c: Expr,
    pub d: Expr,
    pub t0: f64,
}

impl SecondOrderSpec {
    pub fn new(a: Expr, b: Expr, c: Expr, d: Expr, t0: f64) -> SecondOrderSpec {
        SecondOrderSpec { a, b, c, d, t0 }
    }

    /// Parses `[a, b, c, d]` from text.
    pub fn parse(coefficients: [&str; 4], t0: f64) -> Result<SecondOrderSpec> {
        let [a, b, c, d] = coefficients.map(Expr::parse);
        Ok(SecondOrderSpec::new(a?, b?, c?, d?, t0))
    }

    pub fn is_undamped(&self) -> bool {
        self.b.is_literal(0.0)
    }

    /// Fails unless `a > 0` on every node of `grid`.
    pub fn check_leading_positive(&self, grid: &Grid) -> Result<()> {
        for &t in grid.nodes() {
            let a = self.a.eval(t)?;
            if !(a > 0.0) {
                return Err(Error::Precondition(format!(
                    "leading coefficient a must be positive, but a({t}) = {a}"
                )));
            }
        }
        Ok(())
    }
}

/// Rewrites the second-order equation as the system for `(φ, ψ = a φ')`:
/// `p = 0, q = 1/a, r = -c, s = -b/a, f = 0, g = d`.
pub fn reduce_equation(eq: &SecondOrderSpec, grid: &Grid) -> Result<SystemSpec> {
    eq.check_leading_positive(grid)?;
    let q = if eq.a.is_literal(1.0) {
        Expr::one()
    } else {
        Expr::div(Expr::one(), eq.a.clone())
    };
    let s = if eq.b.is_literal(0.0) {
        Expr::zero()
    } else if eq.a.is_literal(1.0) {
        negate(eq.b.clone())
    } else {
        negate(Expr::div(eq.b.clone(), eq.a.clone()))
    };
    Ok(SystemSpec::new(
        Expr::zero(),
        q,
        negate(eq.c.clone()),
        s,
        Expr::zero(),
        eq.d.clone(),
        eq.t0,
    ))
}

/// Default working grid: `per_unit` cells per unit of time, at least
/// `per_unit` cells overall.
pub fn working_grid(t0: f64, horizon: f64, per_unit: usize) -> Result<Grid> {
    Grid::with_density(t0, horizon, per_unit, per_unit)
}

pub(crate) fn negate(e: Expr) -> Expr {
    match e {
        Expr::Neg(inner) => *inner,
        Expr::Const(0.0) => Expr::zero(),
        Expr::Const(v) => Expr::num(-v),
        other => Expr::neg(other),
    }
}

pub(crate) fn difference(a: Expr, b: Expr) -> Expr {
    if b.is_literal(0.0) {
        a
    } else if a.is_literal(0.0) {
        negate(b)
    } else {
        Expr::sub(a, b)
    }
}

pub(crate) fn check_starts_at(grid: &Grid, t0: f64) -> Result<()> {
    if (grid.start() - t0).abs() > 1e-12 * (1.0 + t0.abs()) {
        return Err(Error::Precondition(format!(
            "grid starts at {} but the system starts at {t0}",
            grid.start()
        )));
    }
    Ok(())
}
