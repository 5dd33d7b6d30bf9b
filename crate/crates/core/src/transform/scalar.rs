use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::expr::Expr;
use crate::numerics::Grid;

type Closure = dyn Fn(f64) -> Result<f64> + Send + Sync;

/// A scalar function of time: a closed-form expression, a grid-sampled
/// trace, or an arbitrary closure.
#[derive(Clone)]
pub enum ScalarFn {
    Expr {
        value: Expr,
        /// Symbolic derivative, when one exists.
        slope: Option<Expr>,
    },
    Sampled(Arc<SampledFn>),
    Closure(Arc<Closure>),
}

/// Grid samples with optional node slopes. With slopes the interpolant is
/// cubic Hermite, otherwise piecewise linear.
#[derive(Debug, Clone)]
pub struct SampledFn {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub slopes: Option<Vec<f64>>,
}

impl SampledFn {
    pub fn eval(&self, t: f64) -> f64 {
        match &self.slopes {
            None => self.grid.interpolate(&self.values, t),
            Some(d) => {
                let i = self.grid.cell(t);
                let x = self.grid.nodes();
                let h = x[i + 1] - x[i];
                let s = (t - x[i]) / h;
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * self.values[i]
                    + (s3 - 2.0 * s2 + s) * h * d[i]
                    + (-2.0 * s3 + 3.0 * s2) * self.values[i + 1]
                    + (s3 - s2) * h * d[i + 1]
            }
        }
    }

    pub fn slope(&self, t: f64) -> f64 {
        let i = self.grid.cell(t);
        let x = self.grid.nodes();
        let h = x[i + 1] - x[i];
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        match &self.slopes {
            None => (y1 - y0) / h,
            Some(d) => {
                let s = (t - x[i]) / h;
                let s2 = s * s;
                ((6.0 * s2 - 6.0 * s) * y0
                    + (3.0 * s2 - 4.0 * s + 1.0) * h * d[i]
                    + (-6.0 * s2 + 6.0 * s) * y1
                    + (3.0 * s2 - 2.0 * s) * h * d[i + 1])
                    / h
            }
        }
    }
}

impl ScalarFn {
    pub fn from_expr(e: Expr) -> ScalarFn {
        let slope = e.derivative().ok();
        ScalarFn::Expr { value: e, slope }
    }

    pub fn constant(v: f64) -> ScalarFn {
        ScalarFn::Expr {
            value: Expr::num(v),
            slope: Some(Expr::zero()),
        }
    }

    pub fn sampled(grid: Grid, values: Vec<f64>, slopes: Option<Vec<f64>>) -> ScalarFn {
        ScalarFn::Sampled(Arc::new(SampledFn { grid, values, slopes }))
    }

    pub fn closure<F>(f: F) -> ScalarFn
    where
        F: Fn(f64) -> Result<f64> + Send + Sync + 'static,
    {
        ScalarFn::Closure(Arc::new(f))
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match self {
            ScalarFn::Expr { value, .. } => value.eval(t),
            ScalarFn::Sampled(s) => Ok(s.eval(t)),
            ScalarFn::Closure(f) => f(t),
        }
    }

    /// Derivative at `t` when it is available without numerical
    /// differentiation.
    pub fn slope(&self, t: f64) -> Option<Result<f64>> {
        match self {
            ScalarFn::Expr { slope, .. } => slope.as_ref().map(|d| d.eval(t)),
            ScalarFn::Sampled(s) => Some(Ok(s.slope(t))),
            ScalarFn::Closure(_) => None,
        }
    }

    pub fn sample(&self, ts: &[f64]) -> Result<Vec<f64>> {
        ts.iter().map(|&t| self.eval(t)).collect()
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            ScalarFn::Expr { value, .. } => Some(value),
            _ => None,
        }
    }
}

impl From<Expr> for ScalarFn {
    fn from(e: Expr) -> Self {
        ScalarFn::from_expr(e)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarFn::Expr { value, .. } => write!(f, "ScalarFn({value})"),
            ScalarFn::Sampled(s) => write!(
                f,
                "ScalarFn(sampled on [{}, {}], {} nodes)",
                s.grid.start(),
                s.grid.end(),
                s.grid.len()
            ),
            ScalarFn::Closure(_) => f.write_str("ScalarFn(closure)"),
        }
    }
}
