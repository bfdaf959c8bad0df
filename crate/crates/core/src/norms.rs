//! Discrete space-time norms: mixed `L^q_t L^r_x`, the windowed `X^{s,m}_{q,r}`
//! quantity, sharp-cube modulation norms, and growth probes built on them.

use std::f64::consts::PI;
use std::thread;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::rational::{to_f64, Extended, Rational};
use crate::spectral::{Field, Grid, LinearFlow};

#[derive(Debug, thiserror::Error)]
pub enum NormError {
    #[error("invalid norm specification: {0}")]
    InvalidSpec(String),
    #[error("grid does not resolve the decomposition: {0}")]
    Resolution(String),
}

/// Exponent as used by the quadratures: finite `p >= 1` or `∞`.
fn exponent(e: &Extended, what: &str) -> Result<f64, NormError> {
    let v = e.to_f64();
    if v < 1.0 {
        return Err(NormError::InvalidSpec(format!("{what} = {e} must be >= 1")));
    }
    Ok(v)
}

/// `L^q_t L^r_x` over one unit window `[T, T+1]`, weighted by `⟨T⟩^s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixedNormSpec {
    pub q: Extended,
    pub r: Extended,
    #[serde(with = "crate::rational::serde_str")]
    pub s: Rational,
    /// Time nodes per window, endpoints included.
    pub window_nodes: usize,
}

impl MixedNormSpec {
    pub fn new(q: Extended, r: Extended, s: Rational) -> Self {
        MixedNormSpec { q, r, s, window_nodes: 65 }
    }

    pub fn validate(&self) -> Result<(f64, f64), NormError> {
        if self.window_nodes < 2 {
            return Err(NormError::InvalidSpec("window_nodes must be >= 2".into()));
        }
        Ok((exponent(&self.q, "q")?, exponent(&self.r, "r")?))
    }
}

/// `⟨T⟩ = (1 + T²)^{1/2}`
pub fn japanese(t: f64) -> f64 {
    (1.0 + t * t).sqrt()
}

/// `q`-norm in time of equispaced samples `f(t_0), .., f(t_k)` by the
/// trapezoid rule; the maximum for `q = ∞`.
pub fn time_norm(values: &[f64], dt: f64, q: f64) -> f64 {
    if q.is_infinite() {
        return values.iter().fold(0.0, |a, v| a.max(v.abs()));
    }
    if values.len() < 2 {
        return 0.0;
    }
    let p: Vec<f64> = values.iter().map(|v| v.abs().powf(q)).collect();
    let inner: f64 = p[1..p.len() - 1].iter().sum::<f64>() + 0.5 * (p[0] + p[p.len() - 1]);
    (inner * dt).powf(1.0 / q)
}

/// Mixed norm of equispaced snapshots `u(t_0), .., u(t_k)`, `t_{j+1} - t_j = dt`:
/// Riemann sum in space, trapezoid in time.
pub fn mixed_norm(snapshots: &[Field], dt: f64, q: f64, r: f64) -> f64 {
    let space: Vec<f64> = snapshots.iter().map(|u| u.lp_norm(r)).collect();
    time_norm(&space, dt, q)
}

/// `‖S_m(T + t)u‖_{L^q_{[0,1]} L^r_x}` from a precomputed spectrum of `u`.
pub fn window_norm(flow: &LinearFlow, spectrum: &[Complex64], t0: f64, q: f64, r: f64, nodes: usize) -> f64 {
    let dt = 1.0 / (nodes - 1) as f64;
    let space: Vec<f64> = (0..nodes).map(|j| flow.evaluate(spectrum, t0 + j as f64 * dt).lp_norm(r)).collect();
    time_norm(&space, dt, q)
}

/// `{0} ∪` `count` log-spaced points from `t_min` to `t_max`.
pub fn log_time_grid(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0];
    if count == 1 {
        out.push(t_max);
    } else if count > 1 {
        let (a, b) = (t_min.ln(), t_max.ln());
        out.extend((0..count).map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp()));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowRow {
    #[serde(rename = "T")]
    pub t: f64,
    pub window_norm: f64,
    /// `⟨T⟩^s` times the window norm.
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct XNormReport {
    /// Maximum of `weighted` over the grid, a lower bound for the sup over `T > 0`.
    pub value: f64,
    pub argmax: f64,
    pub rows: Vec<WindowRow>,
}

impl XNormReport {
    pub fn write_csv(&self, mut out: impl std::io::Write) -> std::io::Result<()> {
        writeln!(out, "T,window_norm,weighted")?;
        for r in &self.rows {
            writeln!(out, "{:e},{:e},{:e}", r.t, r.window_norm, r.weighted)?;
        }
        Ok(())
    }
}

fn window_norms(flow: &LinearFlow, u0: &Field, t_grid: &[f64], q: f64, r: f64, nodes: usize) -> Vec<f64> {
    let spectrum = flow.spectrum(u0);
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(t_grid.len().max(1));
    let chunk = t_grid.len().div_ceil(workers).max(1);
    thread::scope(|scope| {
        let handles: Vec<_> = t_grid
            .chunks(chunk)
            .map(|ts| {
                let spectrum = &spectrum;
                scope.spawn(move || ts.iter().map(|&t| window_norm(flow, spectrum, t, q, r, nodes)).collect::<Vec<_>>())
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("window worker panicked")).collect()
    })
}

/// `max_{T ∈ t_grid} ⟨T⟩^s ‖S_m(T + t)u0‖_{L^q_{[0,1]} L^r_x}`.
pub fn x_norm(flow: &LinearFlow, u0: &Field, spec: &MixedNormSpec, t_grid: &[f64]) -> Result<XNormReport, NormError> {
    let (q, r) = spec.validate()?;
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(NormError::InvalidSpec("time grid must be nonempty, finite and nonnegative".into()));
    }
    let s = to_f64(&spec.s);
    let norms = window_norms(flow, u0, t_grid, q, r, spec.window_nodes);
    let rows: Vec<WindowRow> = t_grid
        .iter()
        .zip(norms)
        .map(|(&t, w)| WindowRow { t, window_norm: w, weighted: japanese(t).powf(s) * w })
        .collect();
    let best = rows.iter().max_by(|a, b| a.weighted.total_cmp(&b.weighted)).expect("nonempty");
    Ok(XNormReport { value: best.weighted, argmax: best.t, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemigroupRow {
    pub t0: f64,
    /// `X`-norm of `S_m(t0)u0`.
    pub lhs: f64,
    /// `⟨t0⟩^{|s|}` times the `X`-norm of `u0`.
    pub bound: f64,
    pub ratio: f64,
    pub holds: bool,
}

/// Compares `‖S_m(t0)u0‖_X` against `⟨t0⟩^{|s|}‖u0‖_X (1 + slack)` for each `t0`.
pub fn semigroup_probe(
    flow: &LinearFlow,
    u0: &Field,
    spec: &MixedNormSpec,
    t_grid: &[f64],
    t0s: &[f64],
    slack: f64,
) -> Result<Vec<SemigroupRow>, NormError> {
    let base = x_norm(flow, u0, spec, t_grid)?.value;
    let abs_s = to_f64(&spec.s).abs();
    t0s.iter()
        .map(|&t0| {
            let lhs = x_norm(flow, &flow.propagate(u0, t0), spec, t_grid)?.value;
            let bound = japanese(t0).powf(abs_s) * base;
            let ratio = if bound > 0.0 { lhs / bound } else { 0.0 };
            Ok(SemigroupRow { t0, lhs, bound, ratio, holds: lhs <= bound * (1.0 + slack) })
        })
        .collect()
}

/// Sharp unit-cube decomposition in frequency with `ℓ^q` over cubes of
/// `⟨k⟩^s ‖□_k u‖_{L^p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModSpec {
    pub p: Extended,
    pub q: Extended,
    #[serde(with = "crate::rational::serde_str")]
    pub s: Rational,
}

/// Cube containing frequency `ξ`: the integer point nearest to it, ties upward.
fn cube_of(xi: f64) -> i64 {
    (xi + 0.5).floor() as i64
}

/// Flat spectral indices grouped by unit cube, sorted by cube label.
fn cube_partition(grid: &Grid) -> Vec<([i64; 2], Vec<usize>)> {
    let k = grid.wavenumbers();
    let mut cubes: std::collections::BTreeMap<[i64; 2], Vec<usize>> = Default::default();
    for idx in 0..grid.len() {
        let key = match grid.dim {
            1 => [cube_of(k[idx]), 0],
            _ => [cube_of(k[idx / grid.n]), cube_of(k[idx % grid.n])],
        };
        cubes.entry(key).or_default().push(idx);
    }
    cubes.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulationReport {
    pub value: f64,
    /// Cubes containing at least one frequency bin.
    pub cubes: usize,
    /// Cubes carrying more than roundoff.
    pub active_cubes: usize,
}

pub fn modulation_norm(flow: &LinearFlow, u0: &Field, spec: &ModSpec) -> Result<ModulationReport, NormError> {
    let p = exponent(&spec.p, "p")?;
    let q = exponent(&spec.q, "q")?;
    let grid = *flow.grid();
    if grid.length < 2.0 * PI {
        return Err(NormError::Resolution(format!("box length {} < 2π", grid.length)));
    }
    let partition = cube_partition(&grid);
    if partition.len() < 3 {
        return Err(NormError::Resolution(format!("only {} frequency cubes", partition.len())));
    }
    let s = to_f64(&spec.s);
    let spectrum = flow.spectrum(u0);
    // cubes holding only roundoff are skipped
    let floor = 1e-24 * spectrum.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut terms = Vec::new();
    for (label, idx) in &partition {
        let energy: f64 = idx.iter().map(|&i| spectrum[i].norm_sqr()).sum();
        if energy <= floor {
            continue;
        }
        let mut piece = vec![Complex64::new(0.0, 0.0); grid.len()];
        for &i in idx {
            piece[i] = spectrum[i];
        }
        flow.ops().inverse(&mut piece);
        let kk = (label[0] * label[0] + label[1] * label[1]) as f64;
        terms.push((1.0 + kk).powf(s / 2.0) * Field::from_data(grid, piece).lp_norm(p));
    }
    let value = if q.is_infinite() {
        terms.iter().fold(0.0, |a: f64, t| a.max(*t))
    } else {
        terms.iter().map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    };
    Ok(ModulationReport { value, cubes: partition.len(), active_cubes: terms.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    /// Least-squares slope of `ln(window norm)` against `ln⟨T⟩`.
    pub exponent_estimate: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub rows: Vec<WindowRow>,
}

/// Fits `window_norm(T) ~ ⟨T⟩^κ` over `t_grid` (which should span two decades).
pub fn growth_fit(flow: &LinearFlow, u0: &Field, spec: &MixedNormSpec, t_grid: &[f64]) -> Result<GrowthFit, NormError> {
    let report = x_norm(flow, u0, spec, t_grid)?;
    let pts: Vec<(f64, f64)> =
        report.rows.iter().filter(|r| r.window_norm > 0.0).map(|r| (japanese(r.t).ln(), r.window_norm.ln())).collect();
    if pts.len() < 2 {
        return Err(NormError::InvalidSpec("growth fit needs two nonzero window norms".into()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(NormError::InvalidSpec("time grid has a single distinct point".into()));
    }
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let residual = (pts.iter().map(|p| (p.1 - icept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(GrowthFit { exponent_estimate: slope, residual, rows: report.rows })
}

/// `‖u‖_{L^p} / ‖u‖_{M_{p,p'}}`.
pub fn embedding_ratio(flow: &LinearFlow, u0: &Field, p: Rational) -> Result<f64, NormError> {
    let one = crate::rational::int(1);
    let dual = if p == one { Extended::Infinity } else { Extended::Finite(p / (p - one)) };
    let m = modulation_norm(flow, u0, &ModSpec { p: Extended::Finite(p), q: dual, s: crate::rational::int(0) })?;
    let lp = u0.lp_norm(to_f64(&p));
    Ok(if m.value > 0.0 { lp / m.value } else { 0.0 })
}

/// Random-phase unit Fourier coefficients on every bin with `|ξ| <= radius`,
/// normalised so each bin contributes `e^{iφ}e^{iξx}`.
pub fn random_phase_data(grid: Grid, radius: f64, rng: &mut impl Rng) -> Field {
    let mags = grid.frequency_magnitudes();
    let n = grid.len() as f64;
    let mut spec: Vec<Complex64> = mags
        .iter()
        .map(|&k| {
            if k <= radius {
                Complex64::from_polar(n, rng.gen_range(0.0..2.0 * PI))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    crate::spectral::SpectralOps::new(grid).inverse(&mut spec);
    Field::from_data(grid, spec)
}
