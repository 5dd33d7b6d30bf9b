//! Direct simulation of an ensemble of solutions, used as an empirical
//! referee for the criteria verdicts.

use std::f64::consts::TAU;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_ode, Tolerances, Trajectory, Watch};
use crate::transform::SystemSpec;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SIZE: usize = 16;

/// Initial conditions `(φ₀, ψ₀)` at `span.0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub initial_conditions: Vec<(f64, f64)>,
    pub seed: u64,
    pub span: (f64, f64),
}

impl Ensemble {
    pub fn new(initial_conditions: Vec<(f64, f64)>, seed: u64, span: (f64, f64)) -> Result<Ensemble> {
        if initial_conditions.len() < 2 {
            return Err(Error::Precondition("an ensemble needs at least 2 members".into()));
        }
        if !(span.0 < span.1) {
            return Err(Error::Precondition(format!("empty span [{}, {}]", span.0, span.1)));
        }
        Ok(Ensemble {
            initial_conditions,
            seed,
            span,
        })
    }

    /// `(1, 0)`, `(0, 1)` and `size - 2` unit-circle points drawn from `seed`.
    pub fn seeded(span: (f64, f64), seed: u64, size: usize) -> Result<Ensemble> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ics = vec![(1.0, 0.0), (0.0, 1.0)];
        for _ in 2..size {
            let (s, c) = rng.gen_range(0.0..TAU).sin_cos();
            ics.push((c, s));
        }
        Ensemble::new(ics, seed, span)
    }

    pub fn standard(span: (f64, f64)) -> Ensemble {
        Ensemble::seeded(span, DEFAULT_SEED, DEFAULT_SIZE).expect("default ensemble is valid")
    }
}

/// One trajectory per member with the zeros of `φ` recorded. Linear systems
/// cannot escape, so the magnitude test is disabled.
pub fn simulate_ensemble(sys: &SystemSpec, ens: &Ensemble, tol: &Tolerances) -> Result<Vec<Trajectory>> {
    let tol = tol.without_escape();
    ens.initial_conditions
        .iter()
        .map(|&(phi, psi)| {
            integrate_ode(
                |t, y, dy| sys.derivative(t, y, dy),
                &[phi, psi],
                ens.span,
                &tol,
                &[Watch::zeros(0)],
            )
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpiricalOutcome {
    OscillatoryObserved,
    NonoscillatoryObserved,
    /// No member left to classify.
    Inconclusive,
}

impl EmpiricalOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            EmpiricalOutcome::OscillatoryObserved => "oscillatory_observed",
            EmpiricalOutcome::NonoscillatoryObserved => "nonoscillatory_observed",
            EmpiricalOutcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalVerdict {
    pub outcome: EmpiricalOutcome,
    pub final_window: (f64, f64),
    pub last_zero_per_member: Vec<Option<f64>>,
    pub zero_counts: Vec<usize>,
    /// Members whose zeros fall in the final window.
    pub final_window_counts: Vec<usize>,
    /// Identically zero members, left out of the classification.
    pub excluded: Vec<usize>,
}

/// Oscillatory when every nontrivial member has a zero of `φ` in the final
/// `final_window_fraction` of the span, non-oscillatory when some member is
/// zero-free there.
pub fn empirical_classification(trajectories: &[Trajectory], final_window_fraction: f64) -> EmpiricalVerdict {
    let (start, end) = trajectories
        .first()
        .map_or((0.0, 0.0), |t| (t.start(), t.end()));
    let window_start = end - final_window_fraction.clamp(0.0, 1.0) * (end - start);
    let mut verdict = EmpiricalVerdict {
        outcome: EmpiricalOutcome::Inconclusive,
        final_window: (window_start, end),
        last_zero_per_member: Vec::new(),
        zero_counts: Vec::new(),
        final_window_counts: Vec::new(),
        excluded: Vec::new(),
    };
    let mut all_have_zero = true;
    let mut considered = 0;
    for (i, traj) in trajectories.iter().enumerate() {
        let zeros = traj.crossings(0);
        let in_window = zeros.iter().filter(|&&z| z >= window_start).count();
        verdict.last_zero_per_member.push(zeros.last().copied());
        verdict.zero_counts.push(zeros.len());
        verdict.final_window_counts.push(in_window);
        if is_trivial(traj) {
            verdict.excluded.push(i);
            continue;
        }
        considered += 1;
        all_have_zero &= in_window > 0;
    }
    verdict.outcome = if considered == 0 {
        EmpiricalOutcome::Inconclusive
    } else if all_have_zero {
        EmpiricalOutcome::OscillatoryObserved
    } else {
        EmpiricalOutcome::NonoscillatoryObserved
    };
    verdict
}

fn is_trivial(traj: &Trajectory) -> bool {
    (0..traj.len()).all(|i| traj.state(i).iter().all(|v| *v == 0.0))
}

/// Largest distance between consecutive zeros of `φ` within `window`,
/// counting the window ends. Every subinterval of `window` longer than this
/// contains a zero.
pub fn max_zero_gap(traj: &Trajectory, window: (f64, f64)) -> f64 {
    let mut marks = vec![window.0];
    marks.extend(traj.crossings(0).into_iter().filter(|&z| z > window.0 && z < window.1));
    marks.push(window.1);
    marks.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Writes `t,phi,psi` rows at the trajectory nodes, 17 significant digits.
pub fn write_trace_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    out.write_all(b"t,phi,psi\n")?;
    for (i, t) in traj.times().iter().enumerate() {
        let y = traj.state(i);
        writeln!(out, "{t:.16e},{:.16e},{:.16e}", y[0], y[1])?;
    }
    out.flush()
}

/// One `member_NN.csv` per trajectory in `dir`.
pub fn export_traces(trajectories: &[Trajectory], dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    trajectories
        .iter()
        .enumerate()
        .map(|(i, traj)| {
            let path = dir.join(format!("member_{i:02}.csv"));
            write_trace_csv(traj, io::BufWriter::new(fs::File::create(&path)?))?;
            Ok(path)
        })
        .collect()
}
