use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// The watched quantity of the given state component crossed a level.
    ZeroCrossing(usize),
    /// The state left the escape ball or the step size collapsed.
    Escape,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub kind: EventKind,
    pub time: f64,
    /// +1 for an upward crossing, -1 downward, 0 for escapes.
    pub direction: i8,
}

/// How a step is interpolated between nodes.
#[derive(Debug, Clone)]
enum Dense {
    /// Cubic Hermite from node values and derivatives.
    Hermite,
    /// Per-step quartic coefficients (`dim * 4` per step) of the integrator's
    /// continuous extension: `y(t_i + s h) = y_i + sum_j q_j s^(j+1)`.
    Quartic(Vec<f64>),
}

/// Dense numerical solution on an increasing sequence of times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
    dense: Dense,
    events: Vec<Event>,
}

impl Trajectory {
    /// Builds a trajectory from node samples and derivatives; interpolation is
    /// cubic Hermite.
    pub fn from_samples(
        dim: usize,
        times: Vec<f64>,
        states: Vec<f64>,
        derivs: Vec<f64>,
    ) -> Result<Trajectory> {
        if dim == 0 || times.is_empty() {
            return Err(Error::Precondition("empty trajectory".into()));
        }
        if states.len() != times.len() * dim {
            return Err(Error::LengthMismatch {
                expected: times.len() * dim,
                found: states.len(),
            });
        }
        if derivs.len() != states.len() {
            return Err(Error::LengthMismatch {
                expected: states.len(),
                found: derivs.len(),
            });
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("trajectory times not increasing".into()));
        }
        Ok(Trajectory {
            dim,
            times,
            states,
            derivs,
            dense: Dense::Hermite,
            events: Vec::new(),
        })
    }

    pub(crate) fn with_quartic(mut self, coeffs: Vec<f64>) -> Self {
        debug_assert_eq!(coeffs.len(), (self.times.len() - 1) * self.dim * 4);
        self.dense = Dense::Quartic(coeffs);
        self
    }

    pub(crate) fn with_events(mut self, events: Vec<Event>) -> Self {
        self.events = events;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn last_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    /// Node values of one component.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.states.iter().skip(c).step_by(self.dim).copied().collect()
    }

    pub fn component_derivative(&self, c: usize) -> Vec<f64> {
        self.derivs.iter().skip(c).step_by(self.dim).copied().collect()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Times of recorded crossings of component `c`.
    pub fn crossings(&self, c: usize) -> Vec<f64> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::ZeroCrossing(c))
            .map(|e| e.time)
            .collect()
    }

    pub fn escape_time(&self) -> Option<f64> {
        self.events
            .last()
            .filter(|e| e.kind == EventKind::Escape)
            .map(|e| e.time)
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (a, b) = (self.start(), self.end());
        let slack = 1e-12 * (1.0 + a.abs().max(b.abs()));
        if !(t >= a - slack && t <= b + slack) {
            return Err(Error::Precondition(format!(
                "t = {t} outside trajectory span [{a}, {b}]"
            )));
        }
        if self.len() == 1 {
            return Ok((0, 0.0));
        }
        let i = self
            .times
            .partition_point(|&x| x <= t)
            .saturating_sub(1)
            .min(self.len() - 2);
        let h = self.times[i + 1] - self.times[i];
        Ok((i, ((t - self.times[i]) / h).clamp(0.0, 1.0)))
    }

    /// Interpolated value of component `c` at `t`.
    pub fn value_at(&self, t: f64, c: usize) -> Result<f64> {
        let (i, s) = self.locate(t)?;
        if self.len() == 1 {
            return Ok(self.state(0)[c]);
        }
        Ok(self.interp(i, s, c).0)
    }

    /// Interpolated derivative of component `c` at `t`.
    pub fn derivative_at(&self, t: f64, c: usize) -> Result<f64> {
        let (i, s) = self.locate(t)?;
        if self.len() == 1 {
            return Ok(self.deriv(0)[c]);
        }
        Ok(self.interp(i, s, c).1)
    }

    /// Full interpolated state at `t`.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        (0..self.dim).map(|c| self.value_at(t, c)).collect()
    }

    // (value, derivative) on step i at fraction s
    pub(crate) fn interp(&self, i: usize, s: f64, c: usize) -> (f64, f64) {
        let h = self.times[i + 1] - self.times[i];
        let y0 = self.states[i * self.dim + c];
        match &self.dense {
            Dense::Quartic(q) => {
                let q = &q[(i * self.dim + c) * 4..(i * self.dim + c) * 4 + 4];
                let value = y0 + s * (q[0] + s * (q[1] + s * (q[2] + s * q[3])));
                let slope = (q[0] + s * (2.0 * q[1] + s * (3.0 * q[2] + s * 4.0 * q[3]))) / h;
                (value, slope)
            }
            Dense::Hermite => {
                let y1 = self.states[(i + 1) * self.dim + c];
                let d0 = self.derivs[i * self.dim + c] * h;
                let d1 = self.derivs[(i + 1) * self.dim + c] * h;
                let s2 = s * s;
                let s3 = s2 * s;
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                let value = h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
                let dh00 = 6.0 * s2 - 6.0 * s;
                let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
                let dh01 = -6.0 * s2 + 6.0 * s;
                let dh11 = 3.0 * s2 - 2.0 * s;
                let slope = (dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1) / h;
                (value, slope)
            }
        }
    }

    /// Node times refined `per_step` times within each step, with the original
    /// nodes included.
    pub fn refined_times(&self, per_step: usize) -> Vec<f64> {
        let per_step = per_step.max(1);
        let mut out = Vec::with_capacity((self.len() - 1) * per_step + 1);
        for w in self.times.windows(2) {
            for k in 0..per_step {
                out.push(w[0] + (w[1] - w[0]) * (k as f64 / per_step as f64));
            }
        }
        out.push(self.end());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let times = vec![0.0, 0.5, 2.0];
        let traj = Trajectory::from_samples(
            1,
            times.clone(),
            times.iter().map(|&t| f(t)).collect(),
            times.iter().map(|&t| df(t)).collect(),
        )
        .unwrap();
        for t in [0.1, 0.49, 0.7, 1.9] {
            assert!((traj.value_at(t, 0).unwrap() - f(t)).abs() < 1e-13);
            assert!((traj.derivative_at(t, 0).unwrap() - df(t)).abs() < 1e-12);
        }
        assert!(traj.value_at(2.5, 0).is_err());
    }

    #[test]
    fn refined_times_keep_nodes() {
        let traj = Trajectory::from_samples(1, vec![0.0, 1.0, 3.0], vec![0.0; 3], vec![0.0; 3]).unwrap();
        assert_eq!(traj.refined_times(2), vec![0.0, 0.5, 1.0, 2.0, 3.0]);
    }
}
