use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::{Field, Grid, LinearFlow, SpectralError, SpectralOps};
use crate::exponents::{ProblemParams, Sign};
use crate::rational::to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    #[default]
    TwoThirds,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub params: ProblemParams,
    pub grid: Grid,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub dealias: Dealias,
    /// Value of the kernel symbol at `ξ = 0`.
    #[serde(default)]
    pub zero_mode_kernel: f64,
    /// Keep every `k`-th step as a snapshot; `None` keeps only the ends.
    #[serde(default)]
    pub snapshot_every: Option<usize>,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SpectralError> {
        self.grid.validate()?;
        self.params.validate().map_err(|e| SpectralError::InvalidConfig(e.to_string()))?;
        if self.params.d as usize != self.grid.dim {
            return Err(SpectralError::InvalidConfig(format!(
                "params.d = {} but grid.dim = {}",
                self.params.d, self.grid.dim
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SpectralError::InvalidConfig(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(SpectralError::InvalidConfig(format!("t_final = {} must be >= 0", self.t_final)));
        }
        if self.snapshot_every == Some(0) {
            return Err(SpectralError::InvalidConfig("snapshot_every must be positive".into()));
        }
        Ok(())
    }

    /// Number of steps, provided `t_final/dt` is an integer up to rounding.
    pub fn steps(&self) -> Result<usize, SpectralError> {
        steps_for(self.t_final, self.dt)
    }
}

fn steps_for(t_final: f64, dt: f64) -> Result<usize, SpectralError> {
    let ratio = t_final / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(SpectralError::StepMismatch { t_final, dt });
    }
    Ok(n as usize)
}

/// `π^{d/2} 2^{d-γ} Γ((d-γ)/2) / Γ(γ/2)`, the Fourier symbol constant of
/// `|x|^{-γ}` in `R^d`.
pub fn riesz_constant(d: f64, gamma_exp: f64) -> f64 {
    PI.powf(d / 2.0) * 2f64.powf(d - gamma_exp) * gamma((d - gamma_exp) / 2.0) / gamma(gamma_exp / 2.0)
}

/// Time series of a run plus the retained snapshots.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub mass: Vec<f64>,
    pub l2: Vec<f64>,
    pub linf: Vec<f64>,
    /// `(step index, field)`, always including the first and last step.
    pub snapshots: Vec<(usize, Field)>,
}

impl Trajectory {
    pub fn final_field(&self) -> &Field {
        &self.snapshots.last().expect("trajectory has a final snapshot").1
    }

    /// `max_t |M(t) - M(0)| / M(0)`.
    pub fn max_relative_mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        if m0 == 0.0 {
            return self.mass.iter().fold(0.0, |a, m| a.max(m.abs()));
        }
        self.mass.iter().map(|m| ((m - m0) / m0).abs()).fold(0.0, f64::max)
    }
}

/// Strang splitting solver for one configuration.
#[derive(Debug, Clone)]
pub struct Solver {
    config: SolverConfig,
    flow: LinearFlow,
    half_step: Vec<Complex64>,
    kernel: Vec<f64>,
    dealias_mask: Option<Vec<bool>>,
    beta: f64,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self, SpectralError> {
        config.validate()?;
        let grid = config.grid;
        let m = to_f64(&config.params.m);
        let g = to_f64(&config.params.gamma);
        let d = grid.dim as f64;
        let mags = grid.frequency_magnitudes();
        let flow = LinearFlow::new(grid, m);
        let half_step = flow.dispersion().iter().map(|w| Complex64::from_polar(1.0, 0.5 * config.dt * w)).collect();
        let c = riesz_constant(d, g);
        let kernel = mags.iter().map(|&k| if k == 0.0 { config.zero_mode_kernel } else { c * k.powf(g - d) }).collect();
        let dealias_mask = match config.dealias {
            Dealias::None => None,
            Dealias::TwoThirds => {
                let cut = grid.n as i64 / 3;
                Some(
                    (0..grid.len())
                        .map(|i| {
                            let [a, b] = grid.modes_at(i);
                            a.abs() <= cut && b.abs() <= cut
                        })
                        .collect(),
                )
            }
        };
        Ok(Solver { config, flow, half_step, kernel, dealias_mask, beta: to_f64(&config.params.beta) })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn ops(&self) -> &SpectralOps {
        self.flow.ops()
    }

    pub fn flow(&self) -> &LinearFlow {
        &self.flow
    }

    /// `S_m(t) u`: multiplication by `e^{it|ξ|^m}`.
    pub fn propagate_linear(&self, field: &Field, t: f64) -> Field {
        self.flow.propagate(field, t)
    }

    /// `K * ρ` for a real density `ρ` via the kernel symbol.
    pub fn riesz_convolve(&self, density: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = density.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        self.flow.ops().forward(&mut buf);
        for (i, (z, k)) in buf.iter_mut().zip(&self.kernel).enumerate() {
            let keep = self.dealias_mask.as_ref().is_none_or(|m| m[i]);
            *z *= if keep { *k } else { 0.0 };
        }
        self.flow.ops().inverse(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// `|u|^β`, with `0^β = 0`.
    pub fn density(&self, data: &[Complex64]) -> Vec<f64> {
        let half_beta = 0.5 * self.beta;
        data.iter()
            .map(|z| {
                let s = z.norm_sqr();
                if s == 0.0 {
                    0.0
                } else {
                    s.powf(half_beta)
                }
            })
            .collect()
    }

    /// Hartree potential `V = K * |u|^β`.
    pub fn potential(&self, data: &[Complex64]) -> Vec<f64> {
        self.riesz_convolve(&self.density(data))
    }

    /// `(K * |u|^β) u`.
    pub fn hartree_term(&self, field: &Field) -> Field {
        let v = self.potential(&field.data);
        Field { grid: field.grid, data: field.data.iter().zip(&v).map(|(z, p)| z * p).collect() }
    }

    /// `u ← u·e^{-i s·τ·V}` with `s = +1` focusing, `-1` defocusing.
    pub fn nonlinear_phase(&self, data: &mut [Complex64], tau: f64) {
        let v = self.potential(data);
        let s = self.config.params.sign.factor();
        for (z, p) in data.iter_mut().zip(&v) {
            *z *= Complex64::from_polar(1.0, -s * tau * p);
        }
    }

    /// One Strang step of size `dt`.
    pub fn strang_step(&self, field: &mut Field) {
        self.half_linear(&mut field.data);
        self.nonlinear_phase(&mut field.data, self.config.dt);
        self.half_linear(&mut field.data);
    }

    fn half_linear(&self, data: &mut [Complex64]) {
        self.flow.ops().multiply(data, &self.half_step);
    }

    /// Fixed-step evolution from `u0` to `t_final`.
    pub fn solve(&self, u0: &Field) -> Result<Trajectory, SpectralError> {
        let steps = self.config.steps()?;
        self.solve_steps(u0, steps)
    }

    /// `steps` Strang steps from `u0`, with snapshots per the config.
    pub fn solve_steps(&self, u0: &Field, steps: usize) -> Result<Trajectory, SpectralError> {
        if u0.grid != self.config.grid {
            return Err(SpectralError::InvalidConfig("initial data on a different grid".into()));
        }
        if !u0.is_finite() {
            return Err(SpectralError::NonFinite { step: 0 });
        }
        let dt = self.config.dt;
        let mut u = u0.clone();
        let mut traj = Trajectory {
            times: Vec::with_capacity(steps + 1),
            mass: Vec::with_capacity(steps + 1),
            l2: Vec::with_capacity(steps + 1),
            linf: Vec::with_capacity(steps + 1),
            snapshots: vec![(0, u.clone())],
        };
        let record = |traj: &mut Trajectory, k: usize, u: &Field| {
            let mass = u.mass();
            traj.times.push(k as f64 * dt);
            traj.mass.push(mass);
            traj.l2.push(mass.sqrt());
            traj.linf.push(u.linf_norm());
        };
        record(&mut traj, 0, &u);
        for k in 1..=steps {
            self.strang_step(&mut u);
            if !u.is_finite() {
                return Err(SpectralError::NonFinite { step: k });
            }
            record(&mut traj, k, &u);
            let keep = k == steps || self.config.snapshot_every.is_some_and(|e| k % e == 0);
            if keep {
                traj.snapshots.push((k, u.clone()));
            }
        }
        if steps == 0 {
            traj.snapshots.push((0, u));
        }
        Ok(traj)
    }

    /// Relative spectral energy above half the resolved band.
    pub fn spectral_tail(&self, field: &Field) -> f64 {
        let mut d = field.data.clone();
        self.flow.ops().forward(&mut d);
        let quarter = self.config.grid.n as i64 / 4;
        let (mut tail, mut total) = (0.0, 0.0);
        for (i, z) in d.iter().enumerate() {
            let e = z.norm_sqr();
            total += e;
            let [a, b] = self.config.grid.modes_at(i);
            if a.abs() > quarter || b.abs() > quarter {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Errors unless `field` is localised (mass fraction outside `|x| < L/4`)
    /// and band-limited (energy above `n/4`), both below `tol`.
    pub fn check_resolved(&self, field: &Field, tol: f64) -> Result<(), SpectralError> {
        let edge = field.edge_mass_fraction();
        if edge > tol {
            return Err(SpectralError::Resolution(format!("mass fraction {edge:.3e} outside |x| < L/4")));
        }
        let tail = self.spectral_tail(field);
        if tail > tol {
            return Err(SpectralError::Resolution(format!("spectral energy fraction {tail:.3e} above n/4")));
        }
        Ok(())
    }
}

/// Outcome of comparing a run with its rescaled counterpart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub lambda: f64,
    /// `(m + d - γ)/β`
    pub kappa: f64,
    pub base_time: f64,
    pub scaled_time: f64,
    pub base_steps: usize,
    pub scaled_steps: usize,
    /// Relative ℓ² mismatch between `u_λ(T/λ^m)` and `λ^κ u(T)` on matching nodes.
    pub mismatch: f64,
}

/// Checks `u_λ(t, x) = λ^κ u(λ^m t, λx)`.
///
/// The base run evolves `u0` on `(n, L)` to `T`; the scaled run evolves
/// `λ^κ u0` sampled on `(n, L/λ)` (so node `j` holds `λ^κ u0(λ x_j)`) to
/// `T/λ^m`. Both use the configured `dt`, which must divide `T/λ^m`.
pub fn scaling_check(u0: &Field, lambda: f64, config: &SolverConfig) -> Result<ScalingReport, SpectralError> {
    if !(lambda >= 1.0 && lambda.is_finite()) {
        return Err(SpectralError::InvalidConfig(format!("lambda = {lambda} must be >= 1")));
    }
    let p = &config.params;
    let m = to_f64(&p.m);
    let kappa = (m + f64::from(p.d) - to_f64(&p.gamma)) / to_f64(&p.beta);
    let base = Solver::new(*config)?;
    base.check_resolved(u0, 1e-10)?;

    let mut scaled_cfg = *config;
    scaled_cfg.grid = config.grid.shrunk(lambda)?;
    scaled_cfg.t_final = config.t_final / lambda.powf(m);
    scaled_cfg.snapshot_every = None;
    let scaled = Solver::new(scaled_cfg)?;
    let factor = lambda.powf(kappa);
    let v0 = Field::from_data(scaled_cfg.grid, u0.data.iter().map(|z| z * factor).collect());
    scaled.check_resolved(&v0, 1e-10)?;

    let base_steps = config.steps()?;
    let scaled_steps = scaled_cfg.steps()?;
    let ub = base.solve_steps(u0, base_steps)?;
    let us = scaled.solve_steps(&v0, scaled_steps)?;
    let expected: Vec<Complex64> = ub.final_field().data.iter().map(|z| z * factor).collect();
    let got = &us.final_field().data;
    let num: f64 = got.iter().zip(&expected).map(|(a, b)| (a - b).norm_sqr()).sum();
    let den: f64 = expected.iter().map(|b| b.norm_sqr()).sum();
    let mismatch = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(ScalingReport {
        lambda,
        kappa,
        base_time: config.t_final,
        scaled_time: scaled_cfg.t_final,
        base_steps,
        scaled_steps,
        mismatch,
    })
}

/// Sign-aware convenience used in tests and the CLI.
pub fn sign_label(sign: Sign) -> &'static str {
    match sign {
        Sign::Focusing => "focusing",
        Sign::Defocusing => "defocusing",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn cfg(dim: usize, n: usize, length: f64, dt: f64, t: f64) -> SolverConfig {
        let gamma = if dim == 1 { rat(1, 2) } else { int(1) };
        SolverConfig {
            params: ProblemParams::new(dim as u32, int(2), gamma, int(2), Sign::Defocusing).unwrap(),
            grid: Grid::new(dim, n, length).unwrap(),
            dt,
            t_final: t,
            dealias: Dealias::TwoThirds,
            zero_mode_kernel: 0.0,
            snapshot_every: None,
        }
    }

    #[test]
    fn riesz_constant_matches_known_values() {
        // d = 1, γ = 1/2: sqrt(π)·2^{1/2}·Γ(1/4)/Γ(1/4) = sqrt(2π)
        assert!((riesz_constant(1.0, 0.5) - (2.0 * PI).sqrt()).abs() < 1e-12);
        // d = 2, γ = 1: 2π
        assert!((riesz_constant(2.0, 1.0) - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn linear_flow_identity_and_phase() {
        let s = Solver::new(cfg(1, 64, 2.0 * PI, 0.1, 1.0)).unwrap();
        let u = Field::from_fn(s.config().grid, |x| Complex64::from_polar(1.0, 3.0 * x[0]));
        assert_eq!(s.propagate_linear(&u, 0.0), u);
        let v = s.propagate_linear(&u, 0.3);
        let phase = Complex64::from_polar(1.0, 0.3 * 9.0);
        for (a, b) in v.data.iter().zip(&u.data) {
            assert!((a - b * phase).norm() < 1e-12);
        }
    }

    #[test]
    fn step_mismatch_detected() {
        let c = cfg(1, 32, 10.0, 0.3, 1.0);
        assert!(matches!(c.steps(), Err(SpectralError::StepMismatch { .. })));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut c = cfg(1, 32, 10.0, 0.1, 1.0);
        c.grid = Grid::new(2, 32, 10.0).unwrap();
        assert!(Solver::new(c).is_err());
    }
}
