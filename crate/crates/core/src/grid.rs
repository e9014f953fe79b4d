//! Uniform position grid and its conjugate momentum grid.
//!
//! Positions are `x_j = x_min + j*dx` with `x_min = -(N/2)*dx`, so index
//! `N/2` sits at the origin. The conjugate momentum grid is
//! `p_k = (k - N/2)*dp` with `dp = 2*pi*hbar / (N*dx)`; it is always derived
//! from the position grid and never stored.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symmetric uniform grid on `[-extent/2, extent/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    num_points: usize,
    x_min: f64,
    dx: f64,
    hbar: f64,
}

impl SpatialGrid {
    /// Builds the grid with `num_points` samples covering `x_extent`.
    ///
    /// `num_points` must be even and at least 8.
    pub fn new(num_points: usize, x_extent: f64, hbar: f64) -> Result<Self> {
        if num_points < 8 {
            return Err(Error::InvalidGrid(format!("need at least 8 points, got {num_points}")));
        }
        if num_points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("point count must be even, got {num_points}")));
        }
        if !(x_extent.is_finite() && x_extent > 0.0) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {x_extent}")));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidGrid(format!("hbar must be positive, got {hbar}")));
        }
        let dx = x_extent / num_points as f64;
        Ok(Self { num_points, x_min: -((num_points / 2) as f64) * dx, dx, hbar })
    }

    /// The reference configuration: 256 points, extent 20, hbar = 1.
    pub fn reference() -> Self {
        Self::new(256, 20.0, 1.0).expect("reference grid is valid")
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn extent(&self) -> f64 {
        self.dx * self.num_points as f64
    }

    /// Momentum spacing `2*pi*hbar / (N*dx)`.
    pub fn dp(&self) -> f64 {
        (2.0 * PI * self.hbar / self.num_points as f64) / self.dx
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - (self.num_points / 2) as f64) * self.dp()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.num_points).map(|j| self.x(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.num_points).map(|k| self.p(k)).collect()
    }

    /// Index of the grid point at `x`, if `x` lies on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.x_min) / self.dx;
        let j = t.round();
        if (t - j).abs() > 1e-9 || j < 0.0 || j >= self.num_points as f64 {
            return None;
        }
        Some(j as usize)
    }

    /// `x` expressed as an integer number of grid spacings, if it is one.
    pub fn steps_of(&self, x: f64) -> Option<i64> {
        let t = x / self.dx;
        let m = t.round();
        ((t - m).abs() <= 1e-9).then_some(m as i64)
    }

    pub fn nearest_index(&self, x: f64) -> usize {
        let j = ((x - self.x_min) / self.dx).round();
        j.clamp(0.0, (self.num_points - 1) as f64) as usize
    }

    /// Momentum grid point closest to `p`.
    pub fn nearest_momentum(&self, p: f64) -> f64 {
        let n = self.num_points as f64;
        let k = (p / self.dp() + n / 2.0).round().clamp(0.0, n - 1.0);
        self.p(k as usize)
    }

    /// Compatibility test used before combining objects defined on grids.
    pub fn same_as(&self, other: &SpatialGrid) -> bool {
        self.num_points == other.num_points
            && self.dx.to_bits() == other.dx.to_bits()
            && self.x_min.to_bits() == other.x_min.to_bits()
            && self.hbar.to_bits() == other.hbar.to_bits()
    }

    pub(crate) fn check_same(&self, other: &SpatialGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Convenience constructor matching the command-line vocabulary.
pub fn make_grid(num_points: usize, x_extent: f64, hbar: f64) -> Result<SpatialGrid> {
    SpatialGrid::new(num_points, x_extent, hbar)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_spacings() {
        let g = make_grid(256, 20.0, 1.0).unwrap();
        assert_eq!(g.dx(), 0.078125);
        assert!((g.dp() - 2.0 * PI / 20.0).abs() < 1e-15);
        assert_eq!(g.x(128), 0.0);
        assert_eq!(g.x(0), -10.0);
    }

    #[test]
    fn eight_point_grid() {
        let g = make_grid(8, 8.0, 1.0).unwrap();
        assert_eq!(g.positions(), vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn hbar_scales_momentum_step() {
        let g = make_grid(256, 20.0, 0.5).unwrap();
        assert!((g.dp() - PI / 20.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_product() {
        for &(n, ext, hbar) in &[(256, 20.0, 1.0), (64, 13.0, 0.3), (1000, 7.5, 2.0)] {
            let g = make_grid(n, ext, hbar).unwrap();
            let lhs = g.dp() * g.dx();
            let rhs = 2.0 * PI * hbar / n as f64;
            assert!((lhs - rhs).abs() <= 2.0 * f64::EPSILON * rhs);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(make_grid(4, 1.0, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(9, 1.0, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(16, 0.0, 1.0), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(16, 1.0, -1.0), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn index_lookup() {
        let g = SpatialGrid::reference();
        assert_eq!(g.index_of(0.0), Some(128));
        assert_eq!(g.index_of(0.03), None);
        assert_eq!(g.steps_of(1.25), Some(16));
        assert_eq!(g.steps_of(1.0), None);
        assert!((g.nearest_momentum(2.0) - 6.0 * g.dp()).abs() < 1e-12);
    }
}
