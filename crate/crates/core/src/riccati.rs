//! Scalar Riccati equations `y' + f y² + g y + h = 0`: solving with escape
//! detection, and the integral comparison certificate between two such
//! equations together with its direct numerical validation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{cumulative_integral_with, integrate_ode, Grid, QuadratureRule, Tolerances, Trajectory};
use crate::transform::{RiccatiProblem, ScalarFn};

/// Allowed shortfall of `y₁ - y₂` in [`comparison_validate`].
pub const ORDERING_SLACK: f64 = 1e-6;

const CHECK_NODES: usize = 1025;

/// A numerical Riccati solution; `escape_time` is set when the solution
/// left every bounded set before the end of the requested span.
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub trajectory: Trajectory,
    pub escape_time: Option<f64>,
}

impl RiccatiSolution {
    pub fn end(&self) -> f64 {
        self.trajectory.end()
    }
}

/// Integrates `prob` from `y(span.0) = y0` over its span.
pub fn solve_riccati(prob: &RiccatiProblem, y0: f64, tol: &Tolerances) -> Result<RiccatiSolution> {
    let trajectory = integrate_ode(
        |t, y, dy| {
            dy[0] = prob.rate(t, y[0])?;
            Ok(())
        },
        &[y0],
        prob.span,
        tol,
        &[],
    )?;
    let escape_time = trajectory.escape_time();
    Ok(RiccatiSolution {
        trajectory,
        escape_time,
    })
}

/// Two Riccati equations and the data of the comparison condition:
/// a solution start `y2_start` of the second, functions `eta1`, `eta2`
/// meant to satisfy `η' + f_k η² + g_k η + h_k ≥ 0`, and `gamma`.
#[derive(Debug, Clone)]
pub struct ComparisonInstance {
    pub problem1: RiccatiProblem,
    pub problem2: RiccatiProblem,
    pub y2_start: f64,
    pub eta1: ScalarFn,
    pub eta2: ScalarFn,
    pub gamma: f64,
    pub span: (f64, f64),
    pub tolerances: Tolerances,
    pub certificate_slack: f64,
}

impl ComparisonInstance {
    /// Instance with constant `η₁ = η₂ = max(y2_start, 0) + eta_offset`
    /// and `γ = y2_start`.
    pub fn new(
        problem1: RiccatiProblem,
        problem2: RiccatiProblem,
        y2_start: f64,
        eta_offset: f64,
    ) -> ComparisonInstance {
        let eta = ScalarFn::constant(y2_start.max(0.0) + eta_offset);
        let span = (
            problem1.span.0.max(problem2.span.0),
            problem1.span.1.min(problem2.span.1),
        );
        ComparisonInstance {
            problem1,
            problem2,
            y2_start,
            eta1: eta.clone(),
            eta2: eta,
            gamma: y2_start,
            span,
            tolerances: Tolerances::default(),
            certificate_slack: 1e-9,
        }
    }

    pub fn with_etas(mut self, eta1: ScalarFn, eta2: ScalarFn) -> Self {
        self.eta1 = eta1;
        self.eta2 = eta2;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    /// Checks the structural hypotheses: endpoint ordering of `y₂`, `η₁`,
    /// `η₂`, the range of `γ`, and `f₁ ≥ 0` on a sampling of the span.
    pub fn check(&self) -> Result<()> {
        let (a, b) = self.span;
        if !(a < b) || self.problem1.span.0 > a || self.problem2.span.0 > a {
            return Err(Error::Precondition(format!("bad comparison span [{a}, {b}]")));
        }
        let e1 = self.eta1.eval(a)?;
        let e2 = self.eta2.eval(a)?;
        if self.y2_start > e1 || self.y2_start > e2 {
            return Err(Error::Precondition(format!(
                "y₂(t₀) = {} exceeds η₁(t₀) = {e1} or η₂(t₀) = {e2}",
                self.y2_start
            )));
        }
        if !(self.gamma >= self.y2_start && self.gamma <= e1) {
            return Err(Error::Precondition(format!(
                "γ = {} outside [y₂(t₀), η₁(t₀)] = [{}, {e1}]",
                self.gamma, self.y2_start
            )));
        }
        let grid = Grid::uniform(a, b, CHECK_NODES)?;
        for &t in grid.nodes() {
            let f1 = self.problem1.fcoef.eval(t)?;
            if f1 < 0.0 {
                return Err(Error::Precondition(format!("f₁({t}) = {f1} is negative")));
            }
        }
        Ok(())
    }

    fn restricted(&self, prob: &RiccatiProblem) -> Result<RiccatiProblem> {
        prob.with_span(self.span)
    }
}

/// Running value of the comparison expression
///
/// ```text
/// Φ(t) = γ - y₂(t₀) + ∫_{t₀}^{t} exp(∫_{t₀}^{τ} [f₁(η₁ + η₂) + g₁]) ·
///        [(f₂ - f₁) y₂² + (g₂ - g₁) y₂ + (h₂ - h₁)] dτ
/// ```
///
/// along the solution `y₂`.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub times: Vec<f64>,
    pub phi_trace: Vec<f64>,
    pub min_value: f64,
    pub min_at: f64,
    pub holds: bool,
    pub squared_variant: bool,
    /// Escape time of `y₂` when it ended the computation early.
    pub truncated_at: Option<f64>,
}

/// Evaluates the comparison expression along `y₂`. With `squared_variant`
/// the first bracket term is `(f₂ - f₁)² y₂²` instead of `(f₂ - f₁) y₂²`.
pub fn comparison_certificate(
    inst: &ComparisonInstance,
    squared_variant: bool,
) -> Result<CertificateReport> {
    inst.check()?;
    let p1 = inst.restricted(&inst.problem1)?;
    let p2 = inst.restricted(&inst.problem2)?;
    let y2 = solve_riccati(&p2, inst.y2_start, &inst.tolerances)?;
    let times = y2.trajectory.refined_times(4);
    let grid = Grid::new(times.clone())?;
    let n = times.len();
    let mut exponent = Vec::with_capacity(n);
    let mut bracket = Vec::with_capacity(n);
    for &t in &times {
        let y = y2.trajectory.value_at(t, 0)?;
        let (f1, g1, h1) = (p1.fcoef.eval(t)?, p1.gcoef.eval(t)?, p1.hcoef.eval(t)?);
        let (f2, g2, h2) = (p2.fcoef.eval(t)?, p2.gcoef.eval(t)?, p2.hcoef.eval(t)?);
        exponent.push(f1 * (inst.eta1.eval(t)? + inst.eta2.eval(t)?) + g1);
        let df = if squared_variant { (f2 - f1).powi(2) } else { f2 - f1 };
        bracket.push(df * y * y + (g2 - g1) * y + (h2 - h1));
    }
    let inner = cumulative_integral_with(&exponent, &grid, QuadratureRule::Simpson)?;
    let integrand: Vec<f64> = inner
        .iter()
        .zip(&bracket)
        .map(|(i, b)| i.exp() * b)
        .collect();
    let outer = cumulative_integral_with(&integrand, &grid, QuadratureRule::Simpson)?;
    let offset = inst.gamma - inst.y2_start;
    let phi_trace: Vec<f64> = outer.iter().map(|v| offset + v).collect();
    let (k, min_value) = phi_trace
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |m, (i, v)| if v < m.1 { (i, v) } else { m });
    Ok(CertificateReport {
        min_at: times[k],
        holds: min_value >= -inst.certificate_slack,
        times,
        phi_trace,
        min_value,
        squared_variant,
        truncated_at: y2.escape_time,
    })
}

/// Outcome of solving both equations and comparing them directly.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub y1_start: f64,
    pub y1_escape: Option<f64>,
    pub y2_escape: Option<f64>,
    /// `y₁` reached the end of the span.
    pub y1_exists: bool,
    /// Minimum of `y₁ - y₂` over the common existence interval.
    pub min_difference: f64,
    pub min_difference_at: f64,
    pub checked_until: f64,
    pub passed: bool,
}

/// Solves the first equation from `η₁(t₀)` and the second from `y2_start`,
/// and checks that `y₁ ≥ y₂ - 1e-6` wherever both exist and that `y₁`
/// does not escape before `y₂`.
pub fn comparison_validate(inst: &ComparisonInstance) -> Result<ValidationReport> {
    inst.check()?;
    let y1_start = inst.eta1.eval(inst.span.0)?;
    let y1 = solve_riccati(&inst.restricted(&inst.problem1)?, y1_start, &inst.tolerances)?;
    let y2 = solve_riccati(&inst.restricted(&inst.problem2)?, inst.y2_start, &inst.tolerances)?;
    let until = y1.end().min(y2.end());
    let mut times: Vec<f64> = y1
        .trajectory
        .refined_times(4)
        .into_iter()
        .chain(y2.trajectory.refined_times(4))
        .filter(|&t| t <= until)
        .collect();
    times.sort_by(f64::total_cmp);
    let mut min_difference = f64::INFINITY;
    let mut min_difference_at = inst.span.0;
    for &t in &times {
        let d = y1.trajectory.value_at(t, 0)? - y2.trajectory.value_at(t, 0)?;
        if d < min_difference {
            min_difference = d;
            min_difference_at = t;
        }
    }
    let outlives = match (y1.escape_time, y2.escape_time) {
        (None, _) => true,
        (Some(e1), Some(e2)) => e1 >= e2 - 1e-9 * (1.0 + e2.abs()),
        (Some(_), None) => false,
    };
    Ok(ValidationReport {
        y1_start,
        y1_escape: y1.escape_time,
        y2_escape: y2.escape_time,
        y1_exists: y1.escape_time.is_none(),
        min_difference,
        min_difference_at,
        checked_until: until,
        passed: min_difference >= -ORDERING_SLACK && outlives,
    })
}

/// Minimum over `times` of `η' + f η² + g η + h`; a nonnegative value means
/// `η` satisfies the Riccati inequality there.
pub fn inequality_margin(
    prob: &RiccatiProblem,
    values: &[f64],
    slopes: &[f64],
    times: &[f64],
) -> Result<f64> {
    if values.len() != times.len() || slopes.len() != times.len() {
        return Err(Error::LengthMismatch {
            expected: times.len(),
            found: values.len().min(slopes.len()),
        });
    }
    let mut min = f64::INFINITY;
    for ((&t, &v), &d) in times.iter().zip(values).zip(slopes) {
        min = min.min(prob.residual(t, v, d)?);
    }
    Ok(min)
}

/// [`inequality_margin`] of a function with an available derivative,
/// sampled on `nodes` points of the problem span.
pub fn function_inequality_margin(prob: &RiccatiProblem, eta: &ScalarFn, nodes: usize) -> Result<f64> {
    let grid = Grid::uniform(prob.span.0, prob.span.1, nodes)?;
    let times = grid.nodes();
    let values = eta.sample(times)?;
    let slopes = times
        .iter()
        .map(|&t| {
            eta.slope(t)
                .unwrap_or_else(|| Err(Error::Precondition("η has no derivative".into())))
        })
        .collect::<Result<Vec<f64>>>()?;
    inequality_margin(prob, &values, &slopes, times)
}

/// [`inequality_margin`] along a one-dimensional trajectory, sampled on its
/// nodes refined `per_step` times.
pub fn trajectory_inequality_margin(
    prob: &RiccatiProblem,
    traj: &Trajectory,
    per_step: usize,
) -> Result<f64> {
    let times = traj.refined_times(per_step);
    let values = times.iter().map(|&t| traj.value_at(t, 0)).collect::<Result<Vec<f64>>>()?;
    let slopes = times
        .iter()
        .map(|&t| traj.derivative_at(t, 0))
        .collect::<Result<Vec<f64>>>()?;
    inequality_margin(prob, &values, &slopes, &times)
}

/// Solves the linear equation `ζ' + g ζ + h = 0` obtained by dropping the
/// quadratic term; with `f ≥ 0` its solutions satisfy the Riccati inequality.
pub fn linear_minorant(prob: &RiccatiProblem, zeta0: f64, tol: &Tolerances) -> Result<Trajectory> {
    integrate_ode(
        |t, y, dy| {
            dy[0] = -(prob.gcoef.eval(t)? * y[0] + prob.hcoef.eval(t)?);
            Ok(())
        },
        &[zeta0],
        prob.span,
        tol,
        &[],
    )
}
