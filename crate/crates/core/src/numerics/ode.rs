//! Adaptive Dormand–Prince 5(4) integration with dense output, level-crossing
//! events and escape detection.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::root::brent;
use super::trajectory::{Event, EventKind, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// A state whose max-norm exceeds this ends the integration with an
    /// escape event. May be infinite to disable the magnitude test.
    pub escape_magnitude: f64,
    pub root_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            escape_magnitude: 1e8,
            root_tol: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let finite_positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidTolerances(format!("{name} must be positive, got {v}")))
            }
        };
        finite_positive("rel_tol", self.rel_tol)?;
        finite_positive("abs_tol", self.abs_tol)?;
        finite_positive("root_tol", self.root_tol)?;
        if !(self.escape_magnitude > 0.0) {
            return Err(Error::InvalidTolerances(format!(
                "escape_magnitude must be positive, got {}",
                self.escape_magnitude
            )));
        }
        if self.rel_tol < 1e-13 {
            return Err(Error::InvalidTolerances(format!(
                "rel_tol must be at least 1e-13, got {}",
                self.rel_tol
            )));
        }
        Ok(())
    }

    /// Same tolerances with the magnitude escape test switched off.
    pub fn without_escape(self) -> Self {
        Tolerances {
            escape_magnitude: f64::INFINITY,
            ..self
        }
    }
}

/// Quantity watched for level crossings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Indicator {
    /// The component crossing a fixed level (0 for plain zeros).
    Level(f64),
    /// An angle component crossing any of the lines π/2 + kπ, i.e. the zeros
    /// of its cosine.
    AngleZeroLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Watch {
    pub component: usize,
    pub indicator: Indicator,
}

impl Watch {
    pub fn zeros(component: usize) -> Watch {
        Watch {
            component,
            indicator: Indicator::Level(0.0),
        }
    }

    pub fn level(component: usize, level: f64) -> Watch {
        Watch {
            component,
            indicator: Indicator::Level(level),
        }
    }

    pub fn angle_zero_lines(component: usize) -> Watch {
        Watch {
            component,
            indicator: Indicator::AngleZeroLines,
        }
    }

    // Levels strictly passed when moving from `a` to `b`. A start exactly on
    // a level does not count; an end exactly on one does.
    fn levels_crossed(&self, a: f64, b: f64) -> Vec<f64> {
        match self.indicator {
            Indicator::Level(l) => {
                if (a < l && b >= l) || (a > l && b <= l) {
                    vec![l]
                } else {
                    vec![]
                }
            }
            Indicator::AngleZeroLines => {
                let index = |x: f64| (x - FRAC_PI_2) / PI;
                let line = |k: f64| FRAC_PI_2 + k * PI;
                if b < a {
                    let hi = index(a).ceil() - 1.0;
                    let lo = index(b).ceil();
                    let mut out = Vec::new();
                    let mut k = hi;
                    while k >= lo {
                        out.push(line(k));
                        k -= 1.0;
                    }
                    out
                } else if b > a {
                    let lo = index(a).floor() + 1.0;
                    let hi = index(b).floor();
                    let mut out = Vec::new();
                    let mut k = lo;
                    while k <= hi {
                        out.push(line(k));
                        k += 1.0;
                    }
                    out
                } else {
                    vec![]
                }
            }
        }
    }
}

// Dormand–Prince tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// continuous extension of order 4: y(t + s h) = y + h * sum_i k_i * sum_j P[i][j] s^(j+1)
pub(crate) const P: [[f64; 4]; 7] = [
    [
        1.0,
        -8048581381.0 / 2820520608.0,
        8663915743.0 / 2820520608.0,
        -12715105075.0 / 11282082432.0,
    ],
    [0.0, 0.0, 0.0, 0.0],
    [
        0.0,
        131558114200.0 / 32700410799.0,
        -68118460800.0 / 10900136933.0,
        87487479700.0 / 32700410799.0,
    ],
    [
        0.0,
        -1754552775.0 / 470086768.0,
        14199869525.0 / 1410260304.0,
        -10690763975.0 / 1880347072.0,
    ],
    [
        0.0,
        127303824393.0 / 49829197408.0,
        -318862633887.0 / 49829197408.0,
        701980252875.0 / 199316789632.0,
    ],
    [
        0.0,
        -282668133.0 / 205662961.0,
        2019193451.0 / 616988883.0,
        -1453857185.0 / 822651844.0,
    ],
    [
        0.0,
        40617522.0 / 29380423.0,
        -110615467.0 / 29380423.0,
        69997945.0 / 29380423.0,
    ],
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;
const MAX_STEPS: usize = 2_000_000;

fn norm_inf(y: &[f64]) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Integrates `y' = field(t, y)` over `span` from `y0`.
///
/// Local error per step is held below `rel_tol * |y| + abs_tol`. Crossings of
/// each `watch` are located on the dense output to `root_tol`. Integration
/// stops early with an escape event when the state norm exceeds
/// `escape_magnitude` or the step falls below `1e-12 * (t_b - t_a)`.
pub fn integrate_ode<F>(
    mut field: F,
    y0: &[f64],
    span: (f64, f64),
    tol: &Tolerances,
    watch: &[Watch],
) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    tol.validate()?;
    let (ta, tb) = span;
    if !(ta.is_finite() && tb.is_finite() && ta < tb) {
        return Err(Error::Precondition(format!("bad integration span [{ta}, {tb}]")));
    }
    let dim = y0.len();
    if dim == 0 || y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Precondition("initial state must be finite and non-empty".into()));
    }
    if let Some(w) = watch.iter().find(|w| w.component >= dim) {
        return Err(Error::Precondition(format!(
            "watched component {} out of range for dimension {dim}",
            w.component
        )));
    }

    let length = tb - ta;
    let h_min = 1e-12 * length;

    let mut t = ta;
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; dim]; 7];
    field(t, &y, &mut k[0])?;
    if k[0].iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration {
            t,
            message: "non-finite field value".into(),
        });
    }

    let mut times = vec![t];
    let mut states = y.clone();
    let mut derivs = k[0].clone();
    let mut dense = Vec::new();
    let mut events = Vec::new();

    let finish = |times, states, derivs, dense, events| -> Result<Trajectory> {
        Ok(Trajectory::from_samples(dim, times, states, derivs)?
            .with_quartic(dense)
            .with_events(events))
    };

    if norm_inf(&y) > tol.escape_magnitude {
        events.push(Event {
            kind: EventKind::Escape,
            time: t,
            direction: 0,
        });
        return finish(times, states, derivs, dense, events);
    }

    let mut h = initial_step(&mut field, t, &y, &k[0], tol, length)?;
    let mut stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    let mut steps = 0usize;
    let mut rejected_last = false;

    while t < tb {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Integration {
                t,
                message: format!("exceeded {MAX_STEPS} steps"),
            });
        }
        if h < h_min {
            events.push(Event {
                kind: EventKind::Escape,
                time: t,
                direction: 0,
            });
            break;
        }
        let last = t + h >= tb;
        if last {
            h = tb - t;
        }

        let mut finite = true;
        for s in 1..7 {
            let (done, todo) = k.split_at_mut(s);
            for d in 0..dim {
                let acc: f64 = done.iter().zip(&A[s]).map(|(kj, a)| a * kj[d]).sum();
                stage[d] = y[d] + h * acc;
            }
            field(t + C[s] * h, &stage, &mut todo[0])?;
            if todo[0].iter().any(|v| !v.is_finite()) {
                finite = false;
                break;
            }
        }
        if !finite {
            h *= MIN_FACTOR;
            rejected_last = true;
            continue;
        }
        // stage 7 is evaluated at y_new (first-same-as-last)
        y_new.copy_from_slice(&stage);

        let mut err = 0.0;
        for d in 0..dim {
            let e: f64 = h * (0..7).map(|j| E[j] * k[j][d]).sum::<f64>();
            let sc = tol.abs_tol + tol.rel_tol * y[d].abs().max(y_new[d].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / dim as f64).sqrt();
        if !err.is_finite() {
            h *= MIN_FACTOR;
            rejected_last = true;
            continue;
        }

        if err > 1.0 {
            h *= (SAFETY * err.powf(-0.2)).max(MIN_FACTOR);
            rejected_last = true;
            continue;
        }

        let t_new = if last { tb } else { t + h };
        let step_start = dense.len();
        for d in 0..dim {
            for j in 0..4 {
                let q: f64 = k.iter().zip(&P).map(|(ki, pi)| ki[d] * pi[j]).sum();
                dense.push(h * q);
            }
        }

        for w in watch {
            let c = w.component;
            for level in w.levels_crossed(y[c], y_new[c]) {
                let time = if y_new[c] == level {
                    t_new
                } else {
                    let q = &dense[step_start + c * 4..step_start + c * 4 + 4];
                    let y0c = y[c];
                    let g = |s: f64| y0c + s * (q[0] + s * (q[1] + s * (q[2] + s * q[3]))) - level;
                    let s_tol = tol.root_tol / h;
                    let s = brent(g, 0.0, 1.0, y0c - level, y_new[c] - level, s_tol)?;
                    t + s * (t_new - t)
                };
                events.push(Event {
                    kind: EventKind::ZeroCrossing(c),
                    time,
                    direction: if y_new[c] > y[c] { 1 } else { -1 },
                });
            }
        }

        t = t_new;
        y.copy_from_slice(&y_new);
        let (first, rest) = k.split_at_mut(1);
        first[0].copy_from_slice(&rest[5]);
        times.push(t);
        states.extend_from_slice(&y);
        derivs.extend_from_slice(&k[0]);

        if norm_inf(&y) > tol.escape_magnitude {
            events.push(Event {
                kind: EventKind::Escape,
                time: t,
                direction: 0,
            });
            break;
        }

        let mut factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        if rejected_last {
            factor = factor.min(1.0);
        }
        rejected_last = false;
        h *= factor;
    }

    // crossings within a step were found per watch; restore global time order
    let escape = events
        .last()
        .filter(|e: &&Event| e.kind == EventKind::Escape)
        .copied();
    if escape.is_some() {
        events.pop();
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    events.extend(escape);
    finish(times, states, derivs, dense, events)
}

fn initial_step<F>(
    field: &mut F,
    t: f64,
    y: &[f64],
    f0: &[f64],
    tol: &Tolerances,
    length: f64,
) -> Result<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let dim = y.len() as f64;
    let scale: Vec<f64> = y.iter().map(|v| tol.abs_tol + tol.rel_tol * v.abs()).collect();
    let rms = |v: &[f64]| -> f64 {
        (v.iter().zip(&scale).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / dim).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(length);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; y.len()];
    field(t + h0, &y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 || !d2.is_finite() {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(length).max(1e-12 * length))
}
