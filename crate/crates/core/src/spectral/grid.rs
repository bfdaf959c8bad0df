use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Uniform periodic grid on the torus `[-L/2, L/2)^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self, SpectralError> {
        let g = Grid { dim, n, length };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SpectralError> {
        if self.dim != 1 && self.dim != 2 {
            return Err(SpectralError::InvalidGrid(format!("dim = {} (only 1 and 2)", self.dim)));
        }
        if self.n < 16 || !self.n.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!("n = {} must be a power of two >= 16", self.n)));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(SpectralError::InvalidGrid(format!("box length {} must be positive", self.length)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Volume of one cell, `dx^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Node coordinates along one axis, starting at `-L/2`.
    pub fn axis(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n).map(|j| -0.5 * self.length + j as f64 * dx).collect()
    }

    /// Integer mode numbers in FFT order: `0, 1, .., n/2-1, -n/2, .., -1`.
    pub fn mode_numbers(&self) -> Vec<i64> {
        let n = self.n as i64;
        (0..n).map(|k| if k < n / 2 { k } else { k - n }).collect()
    }

    /// Angular frequencies `2πk/L` in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let scale = 2.0 * PI / self.length;
        self.mode_numbers().into_iter().map(|k| k as f64 * scale).collect()
    }

    /// `|ξ|` at every flat spectral index.
    pub fn frequency_magnitudes(&self) -> Vec<f64> {
        let k = self.wavenumbers();
        match self.dim {
            1 => k.iter().map(|v| v.abs()).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for ki in &k {
                    for kj in &k {
                        out.push((ki * ki + kj * kj).sqrt());
                    }
                }
                out
            }
        }
    }

    /// Per-axis mode numbers at a flat index.
    pub fn modes_at(&self, idx: usize) -> [i64; 2] {
        let n = self.n as i64;
        let wrap = |k: i64| if k < n / 2 { k } else { k - n };
        match self.dim {
            1 => [wrap(idx as i64), 0],
            _ => [wrap((idx / self.n) as i64), wrap((idx % self.n) as i64)],
        }
    }

    /// The same index grid on a box shrunk by `factor`.
    pub fn shrunk(&self, factor: f64) -> Result<Self, SpectralError> {
        Grid::new(self.dim, self.n, self.length / factor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::new(3, 32, 1.0).is_err());
        assert!(Grid::new(1, 8, 1.0).is_err());
        assert!(Grid::new(1, 48, 1.0).is_err());
        assert!(Grid::new(1, 32, 0.0).is_err());
    }

    #[test]
    fn frequencies_symmetric_except_nyquist() {
        let g = Grid::new(1, 16, 2.0 * PI).unwrap();
        let k = g.mode_numbers();
        assert_eq!(k[..3], [0, 1, 2]);
        assert_eq!(k[8], -8);
        for j in 1..8 {
            assert!(k.contains(&-k[j]));
        }
        assert_eq!(g.wavenumbers()[1], 1.0);
    }
}
