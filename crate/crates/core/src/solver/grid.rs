use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_NODES: usize = 16;

/// Uniform node-centred grid on `[x_min, x_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter(format!("bad grid bounds [{x_min}, {x_max}]")));
        }
        if n_cells < MIN_NODES {
            return Err(Error::InvalidParameter(format!("need at least {MIN_NODES} nodes, got {n_cells}")));
        }
        let dx = (x_max - x_min) / (n_cells - 1) as f64;
        Ok(Grid { x_min, x_max, n_cells, dx })
    }

    /// Grid whose spacing is `dx` rounded so the nodes hit both ends.
    pub fn with_spacing(x_min: f64, x_max: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(Error::InvalidParameter(format!("dx must be positive, got {dx}")));
        }
        let n = ((x_max - x_min) / dx).round() as usize + 1;
        Grid::new(x_min, x_max, n)
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.x(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.n_cells
    }

    pub fn is_empty(&self) -> bool {
        self.n_cells == 0
    }

    /// Trapezoidal integral of nodal values.
    pub fn integrate(&self, v: &[f64]) -> f64 {
        let n = v.len();
        let inner: f64 = v[1..n - 1].iter().sum();
        self.dx * (inner + 0.5 * (v[0] + v[n - 1]))
    }
}

/// Grid block of a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { x_min: -100.0, x_max: 300.0, dx: 0.25 }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<Grid> {
        Grid::with_spacing(self.x_min, self.x_max, self.dx)
    }
}
