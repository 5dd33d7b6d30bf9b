use std::f64::consts::{FRAC_PI_2, PI};

use super::{sampled_min, CriteriaOptions, Evidence, Outcome, Verdict, HORIZON_NOTE};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::{integrate_ode, Grid, Trajectory, Watch};
use crate::transform::SystemSpec;

/// Polar angle equation of the homogeneous system, for `φ = ρ cos θ`,
/// `ψ = ρ sin θ`:
/// `θ' = r cos²θ + (s - p) sin θ cos θ - q sin²θ`.
/// Zeros of `φ` are the crossings of the lines `θ = π/2 + kπ`.
#[derive(Debug, Clone)]
pub struct PruferField {
    p: Expr,
    q: Expr,
    r: Expr,
    s: Expr,
}

impl PruferField {
    pub fn rate(&self, t: f64, theta: f64) -> Result<f64> {
        let (sn, cs) = theta.sin_cos();
        let (p, q, r, s) = (
            self.p.eval(t)?,
            self.q.eval(t)?,
            self.r.eval(t)?,
            self.s.eval(t)?,
        );
        Ok(r * cs * cs + (s - p) * sn * cs - q * sn * sn)
    }

    /// Angle trajectory from `theta0` over `span`.
    pub fn integrate(
        &self,
        span: (f64, f64),
        theta0: f64,
        opts: &CriteriaOptions,
        watch: &[Watch],
    ) -> Result<Trajectory> {
        integrate_ode(
            |t, y, dy| {
                dy[0] = self.rate(t, y[0])?;
                Ok(())
            },
            &[theta0],
            span,
            &opts.angle_tolerances(),
            watch,
        )
    }
}

/// Angle field of the homogeneous companion of `sys`; forcing is ignored.
pub fn prufer_angle_field(sys: &SystemSpec) -> PruferField {
    PruferField {
        p: sys.p.clone(),
        q: sys.q.clone(),
        r: sys.r.clone(),
        s: sys.s.clone(),
    }
}

/// First time in `span` at which the angle started at `π/2` on `span.0`
/// has descended by `π`, i.e. the solution vanishing at `span.0` vanishes
/// again. A descent short of `π` by at most the angle slack at `span.1`
/// counts, returning `span.1`.
pub fn descent_time(
    field: &PruferField,
    span: (f64, f64),
    opts: &CriteriaOptions,
) -> Result<Option<f64>> {
    let traj = field.integrate(span, FRAC_PI_2, opts, &[Watch::level(0, -FRAC_PI_2)])?;
    if let Some(&t) = traj.crossings(0).first() {
        return Ok(Some(t));
    }
    if traj.last_state()[0] <= -FRAC_PI_2 + opts.angle_slack {
        return Ok(Some(span.1));
    }
    Ok(None)
}

/// Whether every solution of the homogeneous system has a zero of `φ` in
/// `[s, t]`, decided by the angle of the solution vanishing at `s`.
/// Requires `q ≥ 0` on the interval.
pub fn interval_oscillation_test(
    sys: &SystemSpec,
    interval: (f64, f64),
    opts: &CriteriaOptions,
) -> Result<Verdict> {
    let (s, t) = interval;
    if !(s < t) {
        return Err(Error::Precondition(format!("empty interval [{s}, {t}]")));
    }
    let grid = Grid::with_density(s, t, opts.nodes_per_unit.max(1), 64)?;
    let q_min = sampled_min(&sys.q, &grid)?;
    if q_min < 0.0 {
        let evidence = Evidence::Interval {
            interval,
            q_min,
            descent: None,
            margin: None,
        };
        return Ok(Verdict::inconclusive(interval, evidence, "q >= 0 fails on the interval"));
    }
    let traj = prufer_angle_field(sys).integrate(interval, FRAC_PI_2, opts, &[])?;
    let end = traj.last_state()[0];
    let descent = FRAC_PI_2 - end;
    let outcome = if end <= -FRAC_PI_2 + opts.angle_slack {
        Outcome::Oscillatory
    } else {
        Outcome::NonOscillatory
    };
    Ok(Verdict::decided(
        outcome,
        interval,
        Evidence::Interval {
            interval,
            q_min,
            descent: Some(descent),
            margin: Some(descent - PI),
        },
    ))
}

/// Classifies the homogeneous system on `[t0, horizon]` from the zeros of
/// the solution vanishing at `t0`: non-oscillatory when the final
/// `tail_fraction` of the horizon is zero-free, oscillatory when no gap
/// between zeros (or the ends) exceeds the window width.
pub fn horizon_nonoscillation_test(
    sys: &SystemSpec,
    horizon: (f64, f64),
    opts: &CriteriaOptions,
) -> Result<Verdict> {
    let (t0, tmax) = horizon;
    let grid = opts.grid(t0, tmax)?;
    let q_min = sampled_min(&sys.q, &grid)?;
    let tail_start = tmax - opts.tail_fraction * (tmax - t0);
    let window = opts.window_width.unwrap_or((tmax - t0) / 8.0);
    if q_min < 0.0 {
        let evidence = Evidence::Horizon {
            q_min,
            crossings: Vec::new(),
            tail_start,
            max_gap: None,
            window,
        };
        return Ok(Verdict::inconclusive(horizon, evidence, "q >= 0 fails on the horizon"));
    }
    let traj = prufer_angle_field(sys).integrate(horizon, FRAC_PI_2, opts, &[Watch::angle_zero_lines(0)])?;
    let crossings = traj.crossings(0);
    let mut marks = vec![t0];
    marks.extend(&crossings);
    marks.push(tmax);
    let max_gap = marks.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let tail_zero = crossings.iter().any(|&c| c >= tail_start);
    let evidence = Evidence::Horizon {
        q_min,
        crossings,
        tail_start,
        max_gap: Some(max_gap),
        window,
    };
    let verdict = if !tail_zero {
        Verdict::decided(Outcome::NonOscillatory, horizon, evidence)
    } else if max_gap <= window {
        Verdict::decided(Outcome::Oscillatory, horizon, evidence)
    } else {
        Verdict::inconclusive(
            horizon,
            evidence,
            format!("zeros recur in the tail but some gap exceeds the window width {window}"),
        )
    };
    Ok(verdict.with_note(HORIZON_NOTE))
}
