use num_complex::Complex64;

use super::Grid;

/// Complex samples on a [`Grid`] in physical space, row-major for `dim = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub data: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Field { grid, data: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples `f` at the grid nodes. `f` receives `[x]` or `[x, y]`.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let axis = grid.axis();
        let data = match grid.dim {
            1 => axis.iter().map(|&x| f(&[x])).collect(),
            _ => {
                let mut d = Vec::with_capacity(grid.len());
                for &x in &axis {
                    for &y in &axis {
                        d.push(f(&[x, y]));
                    }
                }
                d
            }
        };
        Field { grid, data }
    }

    pub fn from_data(grid: Grid, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), grid.len(), "data length does not match the grid");
        Field { grid, data }
    }

    /// Discrete mass `Σ|u|² dx^d`.
    pub fn mass(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `(Σ|u|^p dx^d)^{1/p}`, the max for `p = ∞`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf_norm();
        }
        (self.data.iter().map(|z| z.norm().powf(p)).sum::<f64>() * self.grid.cell_volume()).powf(1.0 / p)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field { grid: self.grid, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Field {
        assert_eq!(self.data.len(), other.data.len(), "fields live on different grids");
        Field { grid: self.grid, data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect() }
    }

    /// `‖self - other‖₂ / ‖other‖₂`, or the absolute distance when `other = 0`.
    pub fn relative_l2_distance(&self, other: &Field) -> f64 {
        let diff = self.sub(other).l2_norm();
        let base = other.l2_norm();
        if base > 0.0 {
            diff / base
        } else {
            diff
        }
    }

    /// Fraction of the mass sitting outside the centred cube `|x_i| < L/4`.
    pub fn edge_mass_fraction(&self) -> f64 {
        let total = self.mass();
        if total == 0.0 {
            return 0.0;
        }
        let quarter = self.grid.length / 4.0;
        let axis = self.grid.axis();
        let n = self.grid.n;
        let outside: f64 = self
            .data
            .iter()
            .enumerate()
            .filter(|(i, _)| match self.grid.dim {
                1 => axis[*i].abs() >= quarter,
                _ => axis[i / n].abs() >= quarter || axis[i % n].abs() >= quarter,
            })
            .map(|(_, z)| z.norm_sqr())
            .sum::<f64>()
            * self.grid.cell_volume();
        outside / total
    }
}
