use num_complex::Complex64;

use super::{Field, Grid, SpectralOps};

/// The free flow `S_m(t) = F⁻¹ e^{it|ξ|^m} F` on one grid.
#[derive(Debug, Clone)]
pub struct LinearFlow {
    ops: SpectralOps,
    /// `|ξ|^m`
    dispersion: Vec<f64>,
}

impl LinearFlow {
    pub fn new(grid: Grid, m: f64) -> Self {
        let dispersion = grid.frequency_magnitudes().iter().map(|k| k.powf(m)).collect();
        LinearFlow { ops: SpectralOps::new(grid), dispersion }
    }

    pub fn grid(&self) -> &Grid {
        self.ops.grid()
    }

    pub fn ops(&self) -> &SpectralOps {
        &self.ops
    }

    pub fn dispersion(&self) -> &[f64] {
        &self.dispersion
    }

    pub fn propagate(&self, field: &Field, t: f64) -> Field {
        let mut out = field.clone();
        self.propagate_in_place(&mut out.data, t);
        out
    }

    pub fn propagate_in_place(&self, data: &mut [Complex64], t: f64) {
        if t == 0.0 {
            return;
        }
        self.ops.forward(data);
        self.rotate(data, t);
        self.ops.inverse(data);
    }

    /// Unnormalised DFT of `field`, for repeated evaluation via [`LinearFlow::evaluate`].
    pub fn spectrum(&self, field: &Field) -> Vec<Complex64> {
        let mut d = field.data.clone();
        self.ops.forward(&mut d);
        d
    }

    /// `S_m(t)u` from a precomputed spectrum of `u`.
    pub fn evaluate(&self, spectrum: &[Complex64], t: f64) -> Field {
        let mut d = spectrum.to_vec();
        self.rotate(&mut d, t);
        self.ops.inverse(&mut d);
        Field::from_data(*self.grid(), d)
    }

    fn rotate(&self, spec: &mut [Complex64], t: f64) {
        for (z, w) in spec.iter_mut().zip(&self.dispersion) {
            *z *= Complex64::from_polar(1.0, t * w);
        }
    }
}
