use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use super::osc::default_scan;
use super::sign::{sign_windows, Sign};
use super::{CriteriaOptions, Evidence, Outcome, Verdict, HORIZON_NOTE};
use crate::error::{Error, Result};
use crate::expr::{Expr, Func};
use crate::numerics::{integral, refine_root, Grid, QuadratureRule};
use crate::transform::SecondOrderSpec;

const ENDPOINT_TOL: f64 = 1e-9;

/// Test function `u` on `[s, t]` with `u(s) = u(t) = 0`, `u ≢ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    u: Expr,
    interval: (f64, f64),
}

impl TestFunction {
    pub fn new(u: Expr, interval: (f64, f64)) -> Result<TestFunction> {
        let (s, t) = interval;
        if !(s < t) {
            return Err(Error::Precondition(format!("empty interval [{s}, {t}]")));
        }
        for end in [s, t] {
            let v = u.eval(end)?;
            if v.abs() > ENDPOINT_TOL {
                return Err(Error::Precondition(format!(
                    "test function must vanish at {end}, but u({end}) = {v}"
                )));
            }
        }
        let mut nonzero = false;
        for k in 1..64 {
            if u.eval(s + (t - s) * k as f64 / 64.0)? != 0.0 {
                nonzero = true;
                break;
            }
        }
        if !nonzero {
            return Err(Error::Precondition("test function vanishes identically".into()));
        }
        Ok(TestFunction { u, interval })
    }

    /// `sin(π (t - s) / (e - s))` on `[s, e]`.
    pub fn half_sine(s: f64, e: f64) -> Result<TestFunction> {
        TestFunction::from_family(&Expr::call(Func::Sin, Expr::mul(Expr::num(PI), Expr::Time)), s, e)
    }

    /// Maps a function `U` on `[0, 1]` to `U((t - s) / (e - s))` on `[s, e]`.
    pub fn from_family(family: &Expr, s: f64, e: f64) -> Result<TestFunction> {
        let unit = Expr::div(Expr::sub(Expr::Time, Expr::num(s)), Expr::num(e - s));
        TestFunction::new(family.substitute_time(&unit), (s, e))
    }

    pub fn u(&self) -> &Expr {
        &self.u
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }
}

/// `∫ (c u² - a u'²)` over the test function's interval, by composite
/// Simpson on `nodes` uniform nodes.
pub fn wong_functional(a: &Expr, c: &Expr, u: &TestFunction, nodes: usize) -> Result<f64> {
    let du = u.u.derivative()?;
    let (s, t) = u.interval;
    let n = nodes.max(3) | 1;
    let grid = Grid::uniform(s, t, n)?;
    let mut values = Vec::with_capacity(n);
    for &x in grid.nodes() {
        let (uv, dv) = (u.u.eval(x)?, du.eval(x)?);
        values.push(c.eval(x)? * uv * uv - a.eval(x)? * dv * dv);
    }
    integral(&values, &grid, QuadratureRule::Simpson)
}

/// Windows `T ≤ s1 < t1 ≤ s2 < t2` with `d ≤ 0` on the first, `d ≥ 0` on
/// the second and the functional nonnegative on both.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WongPair {
    pub s1: f64,
    pub t1: f64,
    pub s2: f64,
    pub t2: f64,
    pub j1: f64,
    pub j2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WongScan {
    pub t: f64,
    pub pair: Option<WongPair>,
}

struct WongSearch<'a> {
    eq: &'a SecondOrderSpec,
    family: Expr,
    opts: &'a CriteriaOptions,
    cache: RefCell<HashMap<(u64, u64), f64>>,
}

impl WongSearch<'_> {
    fn functional(&self, s: f64, t: f64) -> Result<f64> {
        let key = (s.to_bits(), t.to_bits());
        if let Some(&j) = self.cache.borrow().get(&key) {
            return Ok(j);
        }
        let u = TestFunction::from_family(&self.family, s, t)?;
        let j = wong_functional(&self.eq.a, &self.eq.c, &u, self.opts.wong_nodes)?;
        self.cache.borrow_mut().insert(key, j);
        Ok(j)
    }

    fn pair(&self, first: &[(f64, f64)], second: &[(f64, f64)], t: f64) -> Result<Option<WongPair>> {
        let long_enough = |a: f64, b: f64| b - a > 1e-9 * (1.0 + a.abs());
        let slack = self.opts.wong_slack;
        for &(a1, t1) in first.iter().filter(|w| w.1 > t) {
            let s1 = a1.max(t);
            if !long_enough(s1, t1) {
                continue;
            }
            let j1 = self.functional(s1, t1)?;
            if j1 < -slack {
                continue;
            }
            for &(a2, t2) in second.iter().filter(|w| w.1 > t1) {
                let s2 = a2.max(t1);
                if !long_enough(s2, t2) {
                    continue;
                }
                let j2 = self.functional(s2, t2)?;
                if j2 >= -slack {
                    return Ok(Some(WongPair { s1, t1, s2, t2, j1, j2 }));
                }
            }
        }
        Ok(None)
    }
}

/// Moves interior window ends onto the root of `d` in the surrounding grid
/// cell; ends without a bracketed sign change stay put.
fn refine_window_ends(d: &Expr, grid: &Grid, windows: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let x = grid.nodes();
    let refine = |t: f64| {
        if t <= grid.start() || t >= grid.end() {
            return t;
        }
        let i = grid.cell(t);
        let f = |s: f64| d.eval(s).unwrap_or(f64::NAN);
        refine_root(f, (x[i], x[i + 1]), 1e-14).unwrap_or(t)
    };
    windows
        .into_iter()
        .map(|(a, b)| (refine(a), refine(b)))
        .filter(|(a, b)| b > a)
        .collect()
}

/// Oscillation of the forced undamped equation from forcing sign windows
/// carrying a nonnegative functional, for every scan point. `family` is a
/// test function on `[0, 1]`; the half-sine is used when absent.
pub fn wong_check(
    eq: &SecondOrderSpec,
    horizon: (f64, f64),
    family: Option<&Expr>,
    opts: &CriteriaOptions,
) -> Result<Verdict> {
    let grid = opts.grid(horizon.0, horizon.1)?;
    eq.check_leading_positive(&grid)?;
    let b = eq.b.sample(grid.nodes())?;
    if b.iter().any(|v| *v != 0.0) {
        return Ok(Verdict::inconclusive(
            horizon,
            Evidence::Wong { scan: Vec::new() },
            "b must vanish identically",
        )
        .with_note("damped equations are outside this criterion"));
    }
    let d = eq.d.sample(grid.nodes())?;
    let refine = |windows: Vec<(f64, f64)>| refine_window_ends(&eq.d, &grid, windows);
    let first = refine(sign_windows(&d, &grid, Sign::NonPositive, opts.sign_slack));
    let second = refine(sign_windows(&d, &grid, Sign::NonNegative, opts.sign_slack));
    let search = WongSearch {
        eq,
        family: family
            .cloned()
            .unwrap_or_else(|| Expr::call(Func::Sin, Expr::mul(Expr::num(PI), Expr::Time))),
        opts,
        cache: RefCell::new(HashMap::new()),
    };
    let mut scan = Vec::new();
    let mut failed = None;
    for t in default_scan(horizon.0, horizon.1, opts) {
        let pair = search.pair(&first, &second, t)?;
        let missing = pair.is_none();
        scan.push(WongScan { t, pair });
        if missing {
            failed = Some(format!("no forcing windows with nonnegative functional beyond T = {t}"));
            break;
        }
    }
    let evidence = Evidence::Wong { scan };
    let verdict = match failed {
        None => Verdict::decided(Outcome::Oscillatory, horizon, evidence),
        Some(f) => Verdict::inconclusive(horizon, evidence, f),
    };
    Ok(verdict.with_note(HORIZON_NOTE))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sine_on_half_period() -> TestFunction {
        TestFunction::new(Expr::parse("sin(t)").unwrap(), (0.0, PI)).unwrap()
    }

    fn opts() -> CriteriaOptions {
        CriteriaOptions {
            nodes_per_unit: 128,
            ..CriteriaOptions::default()
        }
    }

    #[test]
    fn functional_closed_forms() {
        let one = Expr::one();
        let u = sine_on_half_period();
        assert!(wong_functional(&one, &one, &u, 4097).unwrap().abs() <= 1e-8);
        let j = wong_functional(&one, &Expr::num(4.0), &u, 4097).unwrap();
        assert!((j - 1.5 * PI).abs() <= 1e-6);
        let u2 = TestFunction::new(Expr::parse("2*sin(t)").unwrap(), (0.0, PI)).unwrap();
        let j2 = wong_functional(&one, &Expr::num(4.0), &u2, 4097).unwrap();
        assert!((j2 - 4.0 * j).abs() <= 1e-9);
        let j0 = wong_functional(&one, &Expr::zero(), &u, 4097).unwrap();
        assert!((j0 + 0.5 * PI).abs() <= 1e-9);
    }

    #[test]
    fn test_function_invariants() {
        assert!(TestFunction::new(Expr::parse("cos(t)").unwrap(), (0.0, PI)).is_err());
        assert!(TestFunction::new(Expr::zero(), (0.0, 1.0)).is_err());
        assert!(TestFunction::new(Expr::parse("sin(t)").unwrap(), (1.0, 1.0)).is_err());
        let h = TestFunction::half_sine(2.0, 5.0).unwrap();
        assert!((h.u().eval(3.5).unwrap() - 1.0).abs() < 1e-15);
        let fam = TestFunction::from_family(&Expr::parse("t*(1-t)").unwrap(), 2.0, 4.0).unwrap();
        assert!((fam.u().eval(3.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn forced_harmonic_is_oscillatory() {
        let eq = SecondOrderSpec::parse(["1", "0", "1", "sin(t)"], 0.0).unwrap();
        let v = wong_check(&eq, (0.0, 16.0 * PI), None, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Oscillatory, "{v:?}");
        let Evidence::Wong { scan } = &v.evidence else { panic!() };
        let p = scan[1].pair.as_ref().unwrap();
        assert!((p.s1 - PI).abs() < 1e-9 && (p.t1 - 2.0 * PI).abs() < 1e-9, "{p:?}");
        assert!((p.t2 - 3.0 * PI).abs() < 1e-9, "{p:?}");
        assert!(p.j1.abs() < 1e-8);
    }

    #[test]
    fn one_signed_forcing_is_inconclusive() {
        let eq = SecondOrderSpec::parse(["1", "0", "-1", "-exp(-t)"], 0.0).unwrap();
        let v = wong_check(&eq, (0.0, 20.0), None, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn zero_c_is_inconclusive() {
        let eq = SecondOrderSpec::parse(["1", "0", "0", "sin(t)"], 0.0).unwrap();
        let v = wong_check(&eq, (0.0, 20.0), None, &opts()).unwrap();
        assert_eq!(v.outcome, Outcome::Inconclusive);
    }

    #[test]
    fn damped_equation_is_inconclusive() {
        let eq = SecondOrderSpec::parse(["1", "0.1", "1", "sin(t)"], 0.0).unwrap();
        let v = wong_check(&eq, (0.0, 20.0), None, &opts()).unwrap();
        assert_eq!(v.failed_condition.as_deref(), Some("b must vanish identically"));
    }
}
