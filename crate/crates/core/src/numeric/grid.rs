use serde::Serialize;

use crate::error::{Error, Result};

/// Uniform grid of `n` strictly interior nodes on `(x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub const MIN_NODES: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::validation(
                "domain",
                format!("need finite x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        if n < Self::MIN_NODES {
            return Err(Error::validation(
                "grid_n",
                format!("need at least {} interior nodes, got {n}", Self::MIN_NODES),
            ));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n + 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        self.x_min + (j + 1) as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Halve the spacing on the same domain: `n -> 2n + 1`, old nodes kept.
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n + 1,
            ..*self
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_nests_nodes() {
        let g = Grid::new(0.0, 3.0, 16).unwrap();
        let f = g.refined();
        assert_eq!(f.n, 33);
        assert!((f.spacing() * 2.0 - g.spacing()).abs() < 1e-15);
        for j in 0..g.n {
            assert!((g.node(j) - f.node(2 * j + 1)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(1.0, 1.0, 20).is_err());
        assert!(Grid::new(0.0, 1.0, 15).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 20).is_err());
    }
}
