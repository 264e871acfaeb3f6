use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of sample points for any frequency grid.
pub const MIN_POINTS: usize = 16;

/// Uniform one-dimensional sampling of a dimensionless frequency axis.
///
/// Point `k` sits at `min + k * spacing` with
/// `spacing = (max - min) / (n - 1)`; both endpoints are sample points.
/// All quadrature in the crate is trapezoidal on these grids, which is
/// spectrally accurate for the smooth, rapidly decaying amplitudes used
/// here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    n: usize,
    min: f64,
    max: f64,
}

impl FrequencyGrid {
    pub fn new(n: usize, min: f64, max: f64) -> Result<Self> {
        if n < MIN_POINTS {
            return Err(Error::InvalidInput(format!(
                "grid needs at least {MIN_POINTS} points, got {n}"
            )));
        }
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidInput(format!(
                "grid range must satisfy max > min, got [{min}, {max}]"
            )));
        }
        Ok(Self { n, min, max })
    }

    /// Grid spanning `center ± halfwidth`.
    pub fn centered(center: f64, halfwidth: f64, n: usize) -> Result<Self> {
        if !(halfwidth > 0.0) {
            return Err(Error::InvalidInput(format!(
                "halfwidth must be positive, got {halfwidth}"
            )));
        }
        Self::new(n, center - halfwidth, center + halfwidth)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    /// Coordinate of sample `k`.
    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k < self.n);
        self.min + k as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.point(k)).collect()
    }

    /// Trapezoidal quadrature weight of sample `k`.
    pub fn weight(&self, k: usize) -> f64 {
        let h = self.spacing();
        if k == 0 || k == self.n - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// True when the grid is symmetric about zero, so that reversing the
    /// sample order realizes `omega -> -omega` exactly.
    pub fn is_symmetric(&self) -> bool {
        (self.min + self.max).abs() <= 1e-12 * self.spacing().max(1.0)
    }

    /// Index of the sample equal to `omega`, if `omega` lies on the grid
    /// (within a relative tolerance of the spacing).
    pub fn index_of(&self, omega: f64) -> Option<usize> {
        let h = self.spacing();
        let x = (omega - self.min) / h;
        let k = x.round();
        if k < 0.0 || k as usize >= self.n {
            return None;
        }
        if (x - k).abs() <= 1e-9 {
            Some(k as usize)
        } else {
            None
        }
    }

    /// Error unless this grid covers `[lo, hi]`.
    pub fn require_covers(&self, lo: f64, hi: f64, what: &str) -> Result<()> {
        if self.min <= lo && self.max >= hi {
            Ok(())
        } else {
            Err(Error::GridTooNarrow(format!(
                "{what}: grid [{:.4}, {:.4}] does not cover [{lo:.4}, {hi:.4}]",
                self.min, self.max
            )))
        }
    }

    pub fn same_as(&self, other: &FrequencyGrid) -> bool {
        self.n == other.n && self.min == other.min && self.max == other.max
    }

    pub fn require_same(&self, other: &FrequencyGrid, what: &str) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: [{:.4}, {:.4}] x{} vs [{:.4}, {:.4}] x{}",
                self.min, self.max, self.n, other.min, other.max, other.n
            )))
        }
    }
}

/// Trapezoidal integral of `f` sampled on `grid`.
pub fn trapezoid<F: Fn(usize) -> f64>(grid: &FrequencyGrid, f: F) -> f64 {
    let mut acc = 0.0;
    for k in 0..grid.len() {
        acc += grid.weight(k) * f(k);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_ranges() {
        assert!(FrequencyGrid::new(8, -1.0, 1.0).is_err());
        assert!(FrequencyGrid::new(64, 1.0, 1.0).is_err());
        assert!(FrequencyGrid::new(64, 2.0, -2.0).is_err());
    }

    #[test]
    fn uniform_sampling() {
        let g = FrequencyGrid::new(21, -1.0, 1.0).unwrap();
        assert_eq!(g.spacing(), 0.1);
        assert!((g.point(10) - 0.0).abs() < 1e-15);
        assert_eq!(g.index_of(0.3), Some(13));
        assert_eq!(g.index_of(0.35), None);
        assert!(g.is_symmetric());
    }

    #[test]
    fn trapezoid_weights_sum_to_range() {
        let g = FrequencyGrid::new(33, -2.0, 6.0).unwrap();
        let total: f64 = (0..g.len()).map(|k| g.weight(k)).sum();
        assert!((total - 8.0).abs() < 1e-12);
    }
}
