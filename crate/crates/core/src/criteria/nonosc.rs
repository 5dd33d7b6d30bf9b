use serde::Serialize;

use super::prufer::horizon_nonoscillation_test;
use super::{sampled_min, CriteriaOptions, Evidence, Outcome, Verdict, HORIZON_NOTE};
use crate::error::Result;
use crate::numerics::Grid;
use crate::transform::{AlphaBasis, SystemSpec};

/// Set of `λ ≥ 0` with `α_λ ≥ 0` and `r α_λ + g ≥ 0` on every grid node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambdaInterval {
    pub lo: f64,
    /// `None` when unbounded above.
    pub hi: Option<f64>,
    /// Node whose constraint sets `lo`, if any.
    pub lo_at: Option<f64>,
    pub hi_at: Option<f64>,
}

impl LambdaInterval {
    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= self.lo && self.hi.is_none_or(|h| lambda <= h)
    }
}

/// Intersects, in one pass over the grid, the affine constraints
/// `A λ + α₀ ≥ 0` and `r A λ + (r α₀ + g) ≥ 0` with `λ ≥ 0`.
pub fn lambda_feasibility(sys: &SystemSpec, grid: &Grid) -> Result<Option<LambdaInterval>> {
    Ok(lambda_feasibility_from_basis(&AlphaBasis::new(sys, grid)?))
}

pub fn lambda_feasibility_from_basis(basis: &AlphaBasis) -> Option<LambdaInterval> {
    let mut out = LambdaInterval {
        lo: 0.0,
        hi: None,
        lo_at: None,
        hi_at: None,
    };
    let nodes = basis.grid().nodes();
    for (i, &t) in nodes.iter().enumerate() {
        let (a, a0, r, g) = (
            basis.a_factor()[i],
            basis.alpha0()[i],
            basis.r()[i],
            basis.g()[i],
        );
        for (slope, offset) in [(a, a0), (r * a, r * a0 + g)] {
            if slope > 0.0 {
                let bound = -offset / slope;
                if bound > out.lo {
                    out.lo = bound;
                    out.lo_at = Some(t);
                }
            } else if slope < 0.0 {
                let bound = -offset / slope;
                if out.hi.is_none_or(|h| bound < h) {
                    out.hi = Some(bound);
                    out.hi_at = Some(t);
                }
            } else if offset < 0.0 {
                return None;
            }
        }
    }
    match out.hi {
        Some(h) if h < out.lo => None,
        _ => Some(out),
    }
}

/// Non-oscillation of the forced system from `q ≥ 0`, a feasible `λ ≥ 0`
/// and non-oscillation of the homogeneous system, all on `grid`.
pub fn nonoscillation_check(sys: &SystemSpec, grid: &Grid, opts: &CriteriaOptions) -> Result<Verdict> {
    let horizon = grid.span();
    let q_min = sampled_min(&sys.q, grid)?;
    let lambda_interval = lambda_feasibility(sys, grid)?;
    let homogeneous = horizon_nonoscillation_test(&sys.homogeneous(), horizon, opts)?;
    let mut failures = Vec::new();
    if q_min < 0.0 {
        failures.push("q >= 0 fails".to_string());
    }
    if lambda_interval.is_none() {
        failures.push("no lambda >= 0 gives alpha >= 0 and r*alpha + g >= 0 on the grid".to_string());
    }
    match homogeneous.outcome {
        Outcome::NonOscillatory => {}
        Outcome::Oscillatory => failures.push("homogeneous system oscillatory on horizon".to_string()),
        Outcome::Inconclusive => {
            failures.push("homogeneous system not shown non-oscillatory on horizon".to_string())
        }
    }
    let evidence = Evidence::NonOscillation {
        q_min,
        lambda_witness: lambda_interval.map(|l| l.lo),
        lambda_interval,
        homogeneous: Some(Box::new(homogeneous)),
    };
    let mut verdict = match failures.first() {
        None => Verdict::decided(Outcome::NonOscillatory, horizon, evidence),
        Some(f) => Verdict::inconclusive(horizon, evidence, f.clone()),
    };
    verdict.notes.extend(failures);
    Ok(verdict.with_note(HORIZON_NOTE))
}
