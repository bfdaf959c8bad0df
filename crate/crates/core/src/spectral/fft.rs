use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::Grid;

/// Forward and inverse transforms for one grid, owned by a single solver.
///
/// `forward` is the unnormalised DFT `Σ_j u_j e^{-iξx_j}`; `inverse` divides
/// by the number of points, so `inverse(forward(u)) = u`.
#[derive(Clone)]
pub struct SpectralOps {
    grid: Grid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralOps {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralOps").field("grid", &self.grid).finish()
    }
}

impl SpectralOps {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n);
        let inv = planner.plan_fft_inverse(grid.n);
        SpectralOps { grid, fwd, inv }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(&*self.fwd, data);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(&*self.inv, data);
        let scale = 1.0 / data.len() as f64;
        data.iter_mut().for_each(|z| *z *= scale);
    }

    fn apply(&self, plan: &dyn Fft<f64>, data: &mut [Complex64]) {
        let n = self.grid.n;
        match self.grid.dim {
            1 => plan.process(data),
            _ => {
                // rows are contiguous
                plan.process(data);
                let mut col = vec![Complex64::new(0.0, 0.0); n];
                for j in 0..n {
                    for i in 0..n {
                        col[i] = data[i * n + j];
                    }
                    plan.process(&mut col);
                    for i in 0..n {
                        data[i * n + j] = col[i];
                    }
                }
            }
        }
    }

    /// Applies a spectral multiplier in place: `u ← F⁻¹[m(ξ)·F u]`.
    pub fn multiply(&self, data: &mut [Complex64], symbol: &[Complex64]) {
        self.forward(data);
        data.iter_mut().zip(symbol).for_each(|(z, m)| *z *= m);
        self.inverse(data);
    }

    /// Real-symbol variant of [`SpectralOps::multiply`].
    pub fn multiply_real(&self, data: &mut [Complex64], symbol: &[f64]) {
        self.forward(data);
        data.iter_mut().zip(symbol).for_each(|(z, m)| *z *= m);
        self.inverse(data);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_2d() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let ops = SpectralOps::new(g);
        let orig: Vec<Complex64> = (0..g.len()).map(|i| Complex64::new(i as f64, (i % 7) as f64)).collect();
        let mut d = orig.clone();
        ops.forward(&mut d);
        ops.inverse(&mut d);
        for (a, b) in d.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn single_mode_lands_in_one_bin() {
        let g = Grid::new(2, 16, 16.0).unwrap();
        let ops = SpectralOps::new(g);
        let k = g.wavenumbers();
        // mode (2, -3)
        let mut d: Vec<Complex64> = (0..g.len())
            .map(|i| {
                let (x, y) = (g.axis()[i / 16], g.axis()[i % 16]);
                Complex64::from_polar(1.0, k[2] * x + k[13] * y)
            })
            .collect();
        ops.forward(&mut d);
        let peak = d.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
        assert_eq!(g.modes_at(peak), [2, -3]);
    }
}
