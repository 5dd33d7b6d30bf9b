use serde::Serialize;

use crate::error::{Error, Result};

/// Strictly increasing, finite sequence of at least two times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid {
    nodes: Vec<f64>,
}

impl Grid {
    pub fn new(nodes: Vec<f64>) -> Result<Grid> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 nodes, got {}",
                nodes.len()
            )));
        }
        if let Some(bad) = nodes.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite node {bad}")));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid(format!(
                "nodes not strictly increasing at index {}",
                i + 1
            )));
        }
        Ok(Grid { nodes })
    }

    /// `n` equally spaced nodes; the last node is exactly `end`.
    pub fn uniform(start: f64, end: f64, n: usize) -> Result<Grid> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 nodes, got {n}")));
        }
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidGrid(format!("bad span [{start}, {end}]")));
        }
        let last = (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n)
            .map(|i| start + (end - start) * (i as f64 / last))
            .collect();
        nodes[n - 1] = end;
        Grid::new(nodes)
    }

    /// Uniform grid on `[start, end]` with `per_unit` cells per unit of
    /// length and at least `min_cells` cells.
    pub fn with_density(start: f64, end: f64, per_unit: usize, min_cells: usize) -> Result<Grid> {
        let cells = ((end - start) * per_unit as f64).ceil();
        if !cells.is_finite() {
            return Err(Error::InvalidGrid(format!("bad span [{start}, {end}]")));
        }
        Grid::uniform(start, end, (cells as usize).max(min_cells).max(1) + 1)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn start(&self) -> f64 {
        self.nodes[0]
    }

    pub fn end(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    pub fn span(&self) -> (f64, f64) {
        (self.start(), self.end())
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.start() && t <= self.end()
    }

    /// Index `i` of the cell `[nodes[i], nodes[i+1]]` holding `t`, clamped to
    /// the valid range.
    pub fn cell(&self, t: f64) -> usize {
        let i = self.nodes.partition_point(|&x| x <= t);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    /// Index range of nodes lying in `[a, b]`.
    pub fn index_range(&self, a: f64, b: f64) -> std::ops::Range<usize> {
        let lo = self.nodes.partition_point(|&x| x < a);
        let hi = self.nodes.partition_point(|&x| x <= b);
        lo..hi.max(lo)
    }

    /// Piecewise-linear interpolation of grid-sampled `values` at `t`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let i = self.cell(t);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let w = (t - x0) / (x1 - x0);
        values[i] + w * (values[i + 1] - values[i])
    }
}
