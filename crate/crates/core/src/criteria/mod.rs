//! Decision procedures for oscillation and non-oscillation on a finite
//! horizon.
//!
//! Every verdict is horizon-qualified: `oscillatory` and `non_oscillatory`
//! mean the sufficient conditions of the respective criterion were verified
//! on the grid covering `[t0, T_max]`, never that they hold on the half-line.

mod nonosc;
mod osc;
mod prufer;
mod sign;
mod wong;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::expr::Expr;
use crate::numerics::{Grid, Tolerances};

pub use nonosc::{lambda_feasibility, lambda_feasibility_from_basis, nonoscillation_check, LambdaInterval};
pub use osc::{
    default_lambda_grid, default_scan, oscillation_check, oscillation_witness_search,
    IntervalWitness, OscillationSearch, ScanWitness,
};
pub use prufer::{
    descent_time, horizon_nonoscillation_test, interval_oscillation_test, prufer_angle_field,
    PruferField,
};
pub use sign::{intersect_windows, sign_windows, Sign};
pub use wong::{wong_check, wong_functional, TestFunction, WongPair, WongScan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Oscillatory,
    NonOscillatory,
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Oscillatory => "oscillatory",
            Outcome::NonOscillatory => "non_oscillatory",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

/// Decision with the data that supports it.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub horizon: (f64, f64),
    pub evidence: Evidence,
    /// First condition that failed, for inconclusive verdicts.
    pub failed_condition: Option<String>,
    pub notes: Vec<String>,
}

impl Verdict {
    fn decided(outcome: Outcome, horizon: (f64, f64), evidence: Evidence) -> Verdict {
        Verdict {
            outcome,
            horizon,
            evidence,
            failed_condition: None,
            notes: Vec::new(),
        }
    }

    fn inconclusive(horizon: (f64, f64), evidence: Evidence, failed: impl Into<String>) -> Verdict {
        Verdict {
            outcome: Outcome::Inconclusive,
            horizon,
            evidence,
            failed_condition: Some(failed.into()),
            notes: Vec::new(),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.notes.push(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Angle descent over one interval, started on a zero line.
    Interval {
        interval: (f64, f64),
        q_min: f64,
        descent: Option<f64>,
        /// `descent - π`; nonnegative (up to the angle slack) means a zero.
        margin: Option<f64>,
    },
    /// Zero lines crossed by the angle started on a zero line at `t0`.
    Horizon {
        q_min: f64,
        crossings: Vec<f64>,
        tail_start: f64,
        /// Largest distance between consecutive zeros, counting both ends.
        max_gap: Option<f64>,
        window: f64,
    },
    NonOscillation {
        q_min: f64,
        lambda_interval: Option<LambdaInterval>,
        lambda_witness: Option<f64>,
        homogeneous: Option<Box<Verdict>>,
    },
    Oscillation {
        q_min: f64,
        lambda_count: usize,
        periodic: Option<f64>,
        scan: Vec<ScanWitness>,
    },
    Wong {
        scan: Vec<WongScan>,
    },
    None,
}

/// Tunable parameters of the decision procedures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CriteriaOptions {
    pub tolerances: Tolerances,
    /// Working grid cells per unit of time.
    pub nodes_per_unit: usize,
    /// Slack on the π descent of the angle, in radians.
    pub angle_slack: f64,
    /// Slack on weak sign conditions.
    pub sign_slack: f64,
    /// Final fraction of the horizon that must be zero-free for a
    /// non-oscillation verdict of the homogeneous system.
    pub tail_fraction: f64,
    /// Largest allowed gap between zeros for an oscillation verdict of the
    /// homogeneous system; defaults to an eighth of the horizon.
    pub window_width: Option<f64>,
    pub lambda_points: usize,
    /// Half-width of the λ grid; derived from the coefficients when unset.
    pub lambda_span: Option<f64>,
    pub scan_points: usize,
    /// Coefficient period; the scan then covers one period only.
    pub periodic: Option<f64>,
    /// Quadrature nodes per test-function interval.
    pub wong_nodes: usize,
    pub wong_slack: f64,
}

impl Default for CriteriaOptions {
    fn default() -> Self {
        CriteriaOptions {
            tolerances: Tolerances::default(),
            nodes_per_unit: 2048,
            angle_slack: 1e-6,
            sign_slack: 1e-12,
            tail_fraction: 0.5,
            window_width: None,
            lambda_points: 41,
            lambda_span: None,
            scan_points: 8,
            periodic: None,
            wong_nodes: 4097,
            wong_slack: 1e-9,
        }
    }
}

impl CriteriaOptions {
    /// Working grid over `[t0, horizon]`.
    pub fn grid(&self, t0: f64, horizon: f64) -> Result<Grid> {
        crate::transform::working_grid(t0, horizon, self.nodes_per_unit.max(1))
    }

    pub(crate) fn angle_tolerances(&self) -> Tolerances {
        self.tolerances.without_escape()
    }
}

/// Minimum of `e` over the nodes of `grid`.
pub(crate) fn sampled_min(e: &Expr, grid: &Grid) -> Result<f64> {
    let mut m = f64::INFINITY;
    for &t in grid.nodes() {
        m = m.min(e.eval(t)?);
    }
    Ok(m)
}

pub(crate) const HORIZON_NOTE: &str =
    "verdict is qualified by the horizon: conditions were checked on the working grid only";
