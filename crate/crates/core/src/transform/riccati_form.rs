use std::sync::Arc;

use super::alpha::AlphaTrace;
use super::scalar::ScalarFn;
use super::{negate, SystemSpec};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::{cumulative_integral_with, Grid, QuadratureRule, Trajectory};

/// Scalar Riccati equation `y' + f(t) y² + g(t) y + h(t) = 0` on `span`.
#[derive(Debug, Clone)]
pub struct RiccatiProblem {
    pub fcoef: ScalarFn,
    pub gcoef: ScalarFn,
    pub hcoef: ScalarFn,
    pub span: (f64, f64),
}

impl RiccatiProblem {
    pub fn new(fcoef: ScalarFn, gcoef: ScalarFn, hcoef: ScalarFn, span: (f64, f64)) -> Result<Self> {
        if !(span.0.is_finite() && span.1.is_finite() && span.0 < span.1) {
            return Err(Error::Precondition(format!(
                "bad Riccati span [{}, {}]",
                span.0, span.1
            )));
        }
        Ok(RiccatiProblem {
            fcoef,
            gcoef,
            hcoef,
            span,
        })
    }

    /// Parses `[f, g, h]` from text.
    pub fn parse(coefficients: [&str; 3], span: (f64, f64)) -> Result<Self> {
        let [f, g, h] = coefficients.map(Expr::parse);
        RiccatiProblem::new(f?.into(), g?.into(), h?.into(), span)
    }

    /// `y'` forced by the equation.
    pub fn rate(&self, t: f64, y: f64) -> Result<f64> {
        Ok(-(self.fcoef.eval(t)? * y * y + self.gcoef.eval(t)? * y + self.hcoef.eval(t)?))
    }

    /// `y' + f y² + g y + h` for a candidate value and slope.
    pub fn residual(&self, t: f64, y: f64, slope: f64) -> Result<f64> {
        Ok(slope - self.rate(t, y)?)
    }

    pub fn with_span(&self, span: (f64, f64)) -> Result<Self> {
        RiccatiProblem::new(
            self.fcoef.clone(),
            self.gcoef.clone(),
            self.hcoef.clone(),
            span,
        )
    }
}

/// Riccati equation of `y = ψ / φ₁`.
///
/// Without `forced` this is `y' + q y² + (p - s) y - r = 0` for the
/// homogeneous system. With `forced = (φ₁ trajectory, α_λ trace)` the
/// constant term becomes `-r - g_λ / φ₁`, which requires `φ₁` to be
/// zero-free on `span`.
pub fn riccati_of_system(
    sys: &SystemSpec,
    forced: Option<(&Trajectory, &AlphaTrace)>,
    span: (f64, f64),
) -> Result<RiccatiProblem> {
    let fcoef = ScalarFn::from_expr(sys.q.clone());
    let gcoef = ScalarFn::from_expr(sys.e_coefficient());
    let hcoef = match forced {
        None => ScalarFn::from_expr(negate(sys.r.clone())),
        Some((phi1, alpha)) => {
            let inside = |a: f64, b: f64| span.0 >= a - 1e-12 && span.1 <= b + 1e-12;
            if !inside(phi1.start(), phi1.end()) || !inside(alpha.grid.start(), alpha.grid.end()) {
                return Err(Error::Precondition(
                    "span not covered by the φ₁ trajectory and α_λ trace".into(),
                ));
            }
            check_zero_free(phi1, span)?;
            let g_lambda = alpha.g_lambda_fn(sys);
            let r = sys.r.clone();
            let phi1 = Arc::new(phi1.clone());
            ScalarFn::closure(move |t| {
                Ok(-r.eval(t)? - g_lambda.eval(t)? / phi1.value_at(t, 0)?)
            })
        }
    };
    RiccatiProblem::new(fcoef, gcoef, hcoef, span)
}

fn check_zero_free(traj: &Trajectory, span: (f64, f64)) -> Result<()> {
    if let Some(&t) = traj
        .crossings(0)
        .iter()
        .find(|&&t| t >= span.0 && t <= span.1)
    {
        return Err(Error::Precondition(format!(
            "φ₁ vanishes at t = {t}; the Riccati correspondence is undefined"
        )));
    }
    let phi = traj.component(0);
    let within: Vec<f64> = traj
        .times()
        .iter()
        .zip(&phi)
        .filter(|(t, _)| **t >= span.0 && **t <= span.1)
        .map(|(_, v)| *v)
        .collect();
    let first = within.first().copied().unwrap_or(1.0);
    if let Some(v) = within.iter().find(|v| **v == 0.0 || v.signum() != first.signum()) {
        return Err(Error::Precondition(format!(
            "φ₁ vanishes on the span (value {v}); the Riccati correspondence is undefined"
        )));
    }
    Ok(())
}

/// Recovers `(φ₁, ψ)` from a Riccati solution:
/// `φ₁(t) = φ₁(t₁) exp ∫ (p + q y)`, `ψ = y φ₁`.
pub fn lift_riccati_solution(
    y: &Trajectory,
    phi1_at_start: f64,
    sys: &SystemSpec,
) -> Result<Trajectory> {
    if y.dim() != 1 || y.len() < 2 {
        return Err(Error::Precondition(
            "expected a one-dimensional trajectory with at least two nodes".into(),
        ));
    }
    if phi1_at_start == 0.0 || !phi1_at_start.is_finite() {
        return Err(Error::Precondition("φ₁ at the start must be finite and nonzero".into()));
    }
    let times = y.refined_times(4);
    let grid = Grid::new(times.clone())?;
    let mut yv = Vec::with_capacity(times.len());
    let mut dy = Vec::with_capacity(times.len());
    let mut rate = Vec::with_capacity(times.len());
    for &t in &times {
        let v = y.value_at(t, 0)?;
        yv.push(v);
        dy.push(y.derivative_at(t, 0)?);
        rate.push(sys.p.eval(t)? + sys.q.eval(t)? * v);
    }
    let log_growth = cumulative_integral_with(&rate, &grid, QuadratureRule::Simpson)?;
    let mut states = Vec::with_capacity(2 * times.len());
    let mut derivs = Vec::with_capacity(2 * times.len());
    for i in 0..times.len() {
        let phi = phi1_at_start * log_growth[i].exp();
        let dphi = rate[i] * phi;
        states.extend([phi, yv[i] * phi]);
        derivs.extend([dphi, dy[i] * phi + yv[i] * dphi]);
    }
    Trajectory::from_samples(2, times, states, derivs)
}

/// `y = ψ / φ` along a two-component trajectory; `φ` must be zero-free.
pub fn project_to_riccati(traj: &Trajectory) -> Result<Trajectory> {
    if traj.dim() != 2 || traj.len() < 2 {
        return Err(Error::Precondition(
            "expected a two-dimensional trajectory with at least two nodes".into(),
        ));
    }
    check_zero_free(traj, (traj.start(), traj.end()))?;
    // the quotient varies much faster than its factors near zeros of φ
    let times = traj.refined_times(16);
    let mut states = Vec::with_capacity(times.len());
    let mut derivs = Vec::with_capacity(times.len());
    for &t in &times {
        let (phi, psi) = (traj.value_at(t, 0)?, traj.value_at(t, 1)?);
        if phi == 0.0 {
            return Err(Error::Precondition(format!("φ vanishes at t = {t}")));
        }
        let (dphi, dpsi) = (traj.derivative_at(t, 0)?, traj.derivative_at(t, 1)?);
        states.push(psi / phi);
        derivs.push((dpsi * phi - psi * dphi) / (phi * phi));
    }
    Trajectory::from_samples(1, times, states, derivs)
}
