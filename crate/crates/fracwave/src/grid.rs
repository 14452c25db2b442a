//! Uniform periodic grid with its discrete wavenumber ladder.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Uniform grid of `n` points on the periodic interval `[0, length)`.
///
/// Wavenumbers follow the usual FFT bin layout: bin `i` carries the signed
/// mode `k = i` for `i < n/2` and `k = i - n` for `i >= n/2`, so the ladder is
/// symmetric except for the single Nyquist mode `k = -n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub const MIN_POINTS: usize = 8;

    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n % 2 != 0 {
            return Err(Error::InvalidGrid { n, length, reason: "n must be even" });
        }
        if n < Self::MIN_POINTS {
            return Err(Error::InvalidGrid { n, length, reason: "n must be at least 8" });
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid { n, length, reason: "length must be positive and finite" });
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Grid spacing `L / n`.
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Node `x_j = j L / n`.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j < self.n);
        j as f64 * self.length / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Signed mode number of FFT bin `i`.
    pub fn mode(&self, bin: usize) -> i64 {
        debug_assert!(bin < self.n);
        if bin < self.n / 2 {
            bin as i64
        } else {
            bin as i64 - self.n as i64
        }
    }

    /// Continuous wavenumber of FFT bin `i`: `xi = 2 pi k / L`.
    pub fn wavenumber(&self, bin: usize) -> f64 {
        2.0 * PI * self.mode(bin) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.wavenumber(i)).collect()
    }

    /// FFT bin holding the Nyquist mode `k = -n/2`.
    pub fn nyquist_bin(&self) -> usize {
        self.n / 2
    }

    /// Largest wavenumber magnitude on the grid (the Nyquist one).
    pub fn max_wavenumber(&self) -> f64 {
        PI * self.n as f64 / self.length
    }

    /// Grid for the same samples reinterpreted on a rescaled period.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Grid::new(self.n, length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_matches_definition_on_2pi_box() {
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let mut ks: Vec<f64> = g.wavenumbers();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        for (k, e) in ks.iter().zip(expected.iter()) {
            assert!((k - e).abs() < 1e-15, "got {k}, want {e}");
        }
    }

    #[test]
    fn ladder_halves_on_doubled_period() {
        let g = Grid::new(8, 4.0 * PI).unwrap();
        let mut ks: Vec<f64> = g.wavenumbers();
        ks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5];
        for (k, e) in ks.iter().zip(expected.iter()) {
            assert!((k - e).abs() < 1e-15, "got {k}, want {e}");
        }
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(Grid::new(7, 2.0 * PI).is_err(), "odd n must be rejected");
        assert!(Grid::new(6, 2.0 * PI).is_err(), "n < 8 must be rejected");
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, -1.0).is_err());
        assert!(Grid::new(16, f64::NAN).is_err());
    }

    #[test]
    fn nodes_are_equispaced() {
        let g = Grid::new(12, 5.0).unwrap();
        let xs = g.nodes();
        for w in xs.windows(2) {
            assert!((w[1] - w[0] - g.dx()).abs() < 1e-15);
        }
        assert!((xs[0]).abs() < 1e-15);
    }
}
