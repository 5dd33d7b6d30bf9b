use std::cell::RefCell;
use std::collections::HashMap;

use serde::Serialize;

use super::prufer::{descent_time, interval_oscillation_test, prufer_angle_field, PruferField};
use super::sign::{intersect_windows, sign_windows, Sign};
use super::{sampled_min, CriteriaOptions, Evidence, Outcome, Verdict, HORIZON_NOTE};
use crate::error::Result;
use crate::numerics::Grid;
use crate::transform::{AlphaBasis, SystemSpec};

/// Intervals `T ≤ s1 < t1 ≤ s2 < t2` and a `λ` such that `α_λ` and `g_λ`
/// are both `≤ 0` on `[s1, t1]` and both `≥ 0` on `[s2, t2]`, and the
/// homogeneous system is oscillatory on each interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalWitness {
    pub s1: f64,
    pub t1: f64,
    pub s2: f64,
    pub t2: f64,
    pub lambda: f64,
    /// Smallest value of `∓α_λ` and `∓g_λ` over the grid nodes of each
    /// interval.
    pub sign_margins: [f64; 2],
    /// Angle descent minus `π` on each interval.
    pub osc_margins: [f64; 2],
}

/// Outcome of the witness search for one scan point `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanWitness {
    pub t: f64,
    pub witness: Option<IntervalWitness>,
}

struct LambdaWindows {
    lambda: f64,
    /// Where `α_λ ≤ 0` and `g_λ ≤ 0`.
    first: Vec<(f64, f64)>,
    /// Where `α_λ ≥ 0` and `g_λ ≥ 0`.
    second: Vec<(f64, f64)>,
}

/// Witness search state shared across scan points: sign windows per `λ`
/// and a cache of angle descents.
pub struct OscillationSearch {
    homogeneous: SystemSpec,
    field: PruferField,
    basis: AlphaBasis,
    opts: CriteriaOptions,
    windows: Vec<LambdaWindows>,
    descents: RefCell<HashMap<(u64, u64), Option<f64>>>,
}

impl OscillationSearch {
    pub fn new(sys: &SystemSpec, grid: &Grid, lambda_grid: &[f64], opts: &CriteriaOptions) -> Result<Self> {
        let basis = AlphaBasis::new(sys, grid)?;
        Ok(Self::from_basis(sys, basis, lambda_grid, opts))
    }

    pub fn from_basis(
        sys: &SystemSpec,
        basis: AlphaBasis,
        lambda_grid: &[f64],
        opts: &CriteriaOptions,
    ) -> Self {
        let slack = opts.sign_slack;
        let windows = lambda_grid
            .iter()
            .map(|&lambda| {
                let alpha = basis.alpha_values(lambda);
                let g_lambda = basis.g_lambda_values(&alpha);
                let grid = basis.grid();
                let both = |sign| {
                    intersect_windows(
                        &sign_windows(&alpha, grid, sign, slack),
                        &sign_windows(&g_lambda, grid, sign, slack),
                    )
                };
                LambdaWindows {
                    lambda,
                    first: both(Sign::NonPositive),
                    second: both(Sign::NonNegative),
                }
            })
            .collect();
        OscillationSearch {
            homogeneous: sys.homogeneous(),
            field: prufer_angle_field(sys),
            basis,
            opts: opts.clone(),
            windows,
            descents: RefCell::new(HashMap::new()),
        }
    }

    pub fn basis(&self) -> &AlphaBasis {
        &self.basis
    }

    fn descent(&self, span: (f64, f64)) -> Result<Option<f64>> {
        let key = (span.0.to_bits(), span.1.to_bits());
        if let Some(v) = self.descents.borrow().get(&key) {
            return Ok(*v);
        }
        let v = descent_time(&self.field, span, &self.opts)?;
        self.descents.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn search_lambda(&self, w: &LambdaWindows, t: f64) -> Result<Option<[f64; 4]>> {
        let long_enough = |a: f64, b: f64| b - a > 1e-9 * (1.0 + a.abs());
        for &(a1, b1) in w.first.iter().filter(|w| w.1 > t) {
            let s1 = a1.max(t);
            if !long_enough(s1, b1) {
                continue;
            }
            let Some(t1) = self.descent((s1, b1))? else { continue };
            for &(a2, b2) in w.second.iter().filter(|w| w.1 > t1) {
                let s2 = a2.max(t1);
                if !long_enough(s2, b2) {
                    continue;
                }
                if let Some(t2) = self.descent((s2, b2))? {
                    return Ok(Some([s1, t1, s2, t2]));
                }
            }
        }
        Ok(None)
    }

    /// Best witness beyond `t` over the `λ` grid: earliest `s1`, then
    /// shortest `t2 - s1`, then smallest `|λ|`.
    pub fn search(&self, t: f64) -> Result<Option<IntervalWitness>> {
        let mut best: Option<([f64; 4], f64)> = None;
        for w in &self.windows {
            if let Some(iv) = self.search_lambda(w, t)? {
                let better = match &best {
                    None => true,
                    Some((b, l)) => {
                        (iv[0], iv[3] - iv[0], w.lambda.abs()) < (b[0], b[3] - b[0], l.abs())
                    }
                };
                if better {
                    best = Some((iv, w.lambda));
                }
            }
        }
        let Some((iv, lambda)) = best else { return Ok(None) };
        let [s1, t1, s2, t2] = iv;
        Ok(Some(IntervalWitness {
            s1,
            t1,
            s2,
            t2,
            lambda,
            sign_margins: [
                self.sign_margin(lambda, (s1, t1), Sign::NonPositive),
                self.sign_margin(lambda, (s2, t2), Sign::NonNegative),
            ],
            osc_margins: [self.osc_margin((s1, t1))?, self.osc_margin((s2, t2))?],
        }))
    }

    fn sign_margin(&self, lambda: f64, (a, b): (f64, f64), sign: Sign) -> f64 {
        let basis = &self.basis;
        let k = sign.factor();
        basis
            .grid()
            .index_range(a, b)
            .map(|i| {
                let alpha = basis.a_factor()[i] * lambda + basis.alpha0()[i];
                let g = basis.r()[i] * alpha + basis.g()[i];
                (k * alpha).min(k * g)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn osc_margin(&self, interval: (f64, f64)) -> Result<f64> {
        let v = interval_oscillation_test(&self.homogeneous, interval, &self.opts)?;
        Ok(match v.evidence {
            Evidence::Interval { margin: Some(m), .. } => m,
            _ => f64::NEG_INFINITY,
        })
    }
}

/// Witness search for a single scan point.
pub fn oscillation_witness_search(
    sys: &SystemSpec,
    t: f64,
    lambda_grid: &[f64],
    horizon: (f64, f64),
    opts: &CriteriaOptions,
) -> Result<Option<IntervalWitness>> {
    let grid = opts.grid(horizon.0, horizon.1)?;
    OscillationSearch::new(sys, &grid, lambda_grid, opts)?.search(t)
}

/// `lambda_points` values evenly spread over `[-span, span]` plus `0`, with
/// `span = max|g| / max|r A|` unless configured.
pub fn default_lambda_grid(basis: &AlphaBasis, opts: &CriteriaOptions) -> Vec<f64> {
    let span = opts.lambda_span.unwrap_or_else(|| {
        let gmax = basis.g().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let ramax = basis
            .r()
            .iter()
            .zip(basis.a_factor())
            .fold(0.0f64, |m, (r, a)| m.max((r * a).abs()));
        let ratio = gmax / ramax;
        if ratio.is_finite() && ratio > 0.0 {
            ratio
        } else {
            1.0
        }
    });
    let n = opts.lambda_points.max(1);
    let mut out: Vec<f64> = if n == 1 {
        vec![0.0]
    } else {
        (0..n)
            .map(|i| span * (2.0 * i as f64 / (n - 1) as f64 - 1.0))
            .collect()
    };
    if !out.contains(&0.0) {
        out.push(0.0);
        out.sort_by(f64::total_cmp);
    }
    out
}

/// Scan points: `scan_points` values over one period when the coefficients
/// are periodic, otherwise over the first half of the horizon.
pub fn default_scan(t0: f64, horizon: f64, opts: &CriteriaOptions) -> Vec<f64> {
    let width = opts.periodic.unwrap_or(0.5 * (horizon - t0));
    let n = opts.scan_points.max(1);
    (0..n).map(|i| t0 + width * i as f64 / n as f64).collect()
}

/// Oscillation of the forced system from `q ≥ 0` and an interval witness
/// for every scan point. Failure is inconclusive, never non-oscillatory.
pub fn oscillation_check(
    sys: &SystemSpec,
    horizon: (f64, f64),
    scan: Option<&[f64]>,
    lambda_grid: Option<&[f64]>,
    opts: &CriteriaOptions,
) -> Result<Verdict> {
    let grid = opts.grid(horizon.0, horizon.1)?;
    let q_min = sampled_min(&sys.q, &grid)?;
    let scan = scan.map_or_else(|| default_scan(horizon.0, horizon.1, opts), <[f64]>::to_vec);
    let evidence = |lambda_count, found| Evidence::Oscillation {
        q_min,
        lambda_count,
        periodic: opts.periodic,
        scan: found,
    };
    if q_min < 0.0 {
        return Ok(Verdict::inconclusive(horizon, evidence(0, Vec::new()), "q >= 0 fails")
            .with_note(HORIZON_NOTE));
    }
    let basis = AlphaBasis::new(sys, &grid)?;
    let lambdas = lambda_grid.map_or_else(|| default_lambda_grid(&basis, opts), <[f64]>::to_vec);
    let search = OscillationSearch::from_basis(sys, basis, &lambdas, opts);
    let mut found = Vec::with_capacity(scan.len());
    let mut failed = None;
    for &t in &scan {
        let witness = search.search(t)?;
        let missing = witness.is_none();
        found.push(ScanWitness { t, witness });
        if missing {
            failed = Some(format!("no interval witness beyond T = {t}"));
            break;
        }
    }
    let verdict = match failed {
        None => Verdict::decided(Outcome::Oscillatory, horizon, evidence(lambdas.len(), found)),
        Some(f) => Verdict::inconclusive(horizon, evidence(lambdas.len(), found), f),
    };
    let mut verdict = verdict
        .with_note(HORIZON_NOTE)
        .with_note("interval oscillation is tested on the homogeneous system");
    if let Some(p) = opts.periodic {
        verdict = verdict.with_note(format!(
            "coefficients declared periodic with period {p}; scan covers one period"
        ));
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sys(c: [&str; 6]) -> SystemSpec {
        SystemSpec::parse(c, 0.0).unwrap()
    }

    fn opts() -> CriteriaOptions {
        CriteriaOptions {
            nodes_per_unit: 128,
            ..CriteriaOptions::default()
        }
    }

    #[test]
    fn forced_harmonic_witness_follows_sine_sign_pattern() {
        let s = sys(["0", "1", "-1", "0", "0", "sin(t)"]);
        let w = oscillation_witness_search(&s, 0.0, &[0.0], (0.0, 16.0 * PI), &opts())
            .unwrap()
            .unwrap();
        for (got, want) in [(w.s1, PI), (w.t1, 2.0 * PI), (w.s2, 2.0 * PI), (w.t2, 3.0 * PI)] {
            assert!((got - want).abs() < 1e-3, "{got} vs {want}");
        }
        assert_eq!(w.lambda, 0.0);
        assert!(w.osc_margins.iter().all(|m| m.abs() < 1e-6));
        assert!(w.sign_margins.iter().all(|m| *m >= -1e-12));
    }

    #[test]
    fn homogeneous_harmonic_has_degenerate_witness() {
        let s = sys(["0", "1", "-1", "0", "0", "0"]);
        let w = oscillation_witness_search(&s, 1.0, &[0.0], (0.0, 20.0), &opts())
            .unwrap()
            .unwrap();
        assert!((w.s1 - 1.0).abs() < 1e-12);
        assert!((w.t1 - 1.0 - PI).abs() < 1e-6);
        assert_eq!(w.sign_margins, [0.0, 0.0]);
    }

    #[test]
    fn hyperbolic_forced_system_has_no_witness() {
        let o = opts();
        let s = sys(["0", "1", "1", "0", "0", "-exp(-t)"]);
        let grid = o.grid(0.0, 30.0).unwrap();
        let basis = AlphaBasis::new(&s, &grid).unwrap();
        let lambdas = default_lambda_grid(&basis, &o);
        assert!(lambdas.contains(&0.0));
        assert_eq!(lambdas.len(), 41);
        let search = OscillationSearch::from_basis(&s, basis, &lambdas, &o);
        assert_eq!(search.search(0.0).unwrap(), None);
        let v = oscillation_check(&s, (0.0, 30.0), None, None, &o).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn forced_harmonic_is_oscillatory_for_every_scan_point() {
        let s = sys(["0", "1", "-1", "0", "0", "sin(t)"]);
        let v = oscillation_check(&s, (0.0, 16.0 * PI), None, None, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Oscillatory);
        let Evidence::Oscillation { scan, .. } = &v.evidence else { panic!() };
        assert_eq!(scan.len(), 8);
        for sw in scan {
            let w = sw.witness.as_ref().unwrap();
            assert_eq!(w.lambda, 0.0);
            assert!(w.s1 >= sw.t && w.s1 < w.t1 && w.t1 <= w.s2 && w.s2 < w.t2);
            let k = (w.s1 / PI).round();
            assert!((w.s1 - k * PI).abs() < 1e-3);
            assert!((k as i64) % 2 == 1);
        }
    }

    #[test]
    fn negative_q_is_inconclusive() {
        let s = sys(["0", "cos(t)", "-1", "0", "0", "sin(t)"]);
        let v = oscillation_check(&s, (0.0, 10.0), None, None, &opts()).unwrap();
        assert_eq!(v.failed_condition.as_deref(), Some("q >= 0 fails"));
    }

    #[test]
    fn periodic_scan_covers_one_period() {
        let o = CriteriaOptions {
            periodic: Some(2.0 * PI),
            ..opts()
        };
        let scan = default_scan(0.0, 100.0, &o);
        assert_eq!(scan.len(), 8);
        assert!((scan[7] - 2.0 * PI * 7.0 / 8.0).abs() < 1e-12);
        assert_eq!(default_scan(0.0, 16.0, &opts())[1], 1.0);
    }
}
