//! The JSON run configuration consumed by `solve`, `split` and `norms`.

use std::path::PathBuf;

use hartree_lab::exponents::ProblemParams;
use hartree_lab::rational::{Extended, Rational};
use hartree_lab::spectral::{Dealias, Field, Grid, SolverConfig};
use hartree_lab::splitting::SplitConfig;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub grid: Grid,
    pub solver: SolverSection,
    /// Summed to form `u0`.
    pub initial: Vec<InitialComponent>,
    #[serde(default)]
    pub split: Option<serde_json::Value>,
    #[serde(default)]
    pub norms: Option<NormsSection>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default)]
    pub dealias: Dealias,
    #[serde(default)]
    pub zero_mode_kernel: f64,
    #[serde(default)]
    pub snapshot_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialComponent {
    /// `a·e^{-|x-c|²/(2w²)}·e^{i k x_1}`
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default)]
        wavenumber: f64,
    },
    /// Unit-modulus random phases on every bin with `|ξ| <= radius`, times `amplitude`.
    RandomPhase { amplitude: f64, radius: f64 },
}

fn default_nodes() -> usize {
    65
}
fn default_slack() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl TimeGrid {
    pub fn points(&self) -> Vec<f64> {
        hartree_lab::norms::log_time_grid(self.t_min, self.t_max, self.count)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationSection {
    pub p: Extended,
    pub q: Extended,
    #[serde(with = "hartree_lab::rational::serde_str")]
    pub s: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormsSection {
    pub q: Extended,
    pub r: Extended,
    #[serde(with = "hartree_lab::rational::serde_str")]
    pub s: Rational,
    #[serde(default = "default_nodes")]
    pub window_nodes: usize,
    pub t_grid: TimeGrid,
    #[serde(default)]
    pub semigroup_t0: Vec<f64>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default)]
    pub growth_grid: Option<TimeGrid>,
    #[serde(default)]
    pub modulation: Option<ModulationSection>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))?;
        cfg.params.validate().map_err(|e| CliError::Usage(format!("config params: {e}")))?;
        cfg.solver_config().validate().map_err(|e| CliError::Usage(format!("config: {e}")))?;
        Ok(cfg)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            params: self.params,
            grid: self.grid,
            dt: self.solver.dt,
            t_final: self.solver.t_final,
            dealias: self.solver.dealias,
            zero_mode_kernel: self.solver.zero_mode_kernel,
            snapshot_every: self.solver.snapshot_every,
        }
    }

    /// The `split` section completed with the shared solver settings.
    pub fn split_config(&self) -> Result<SplitConfig, CliError> {
        let mut section = match &self.split {
            Some(serde_json::Value::Object(m)) => m.clone(),
            Some(_) => return Err(CliError::Usage("config: split must be an object".into())),
            None => return Err(CliError::Usage("config: missing split section".into())),
        };
        if section.contains_key("solver") {
            return Err(CliError::Usage("config: split.solver is taken from the top-level sections".into()));
        }
        let solver = serde_json::to_value(self.solver_config()).expect("solver config serialises");
        section.insert("solver".into(), solver);
        serde_json::from_value(serde_json::Value::Object(section))
            .map_err(|e| CliError::Usage(format!("config split: {e}")))
    }

    pub fn norms_section(&self) -> Result<&NormsSection, CliError> {
        self.norms.as_ref().ok_or_else(|| CliError::Usage("config: missing norms section".into()))
    }

    pub fn initial_field(&self) -> Result<Field, CliError> {
        if self.initial.is_empty() {
            return Err(CliError::Usage("config: initial must list at least one component".into()));
        }
        let grid = self.grid;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut u = Field::zeros(grid);
        for c in &self.initial {
            let part = match c {
                InitialComponent::Gaussian { amplitude, width, center, wavenumber } => {
                    if width.is_nan() || *width <= 0.0 {
                        return Err(CliError::Usage(format!("config: gaussian width {width} must be positive")));
                    }
                    if !center.is_empty() && center.len() != grid.dim {
                        return Err(CliError::Usage(
                            "config: gaussian center must have one entry per dimension".into(),
                        ));
                    }
                    let (a, w, k) = (*amplitude, *width, *wavenumber);
                    Field::from_fn(grid, |x| {
                        let r2: f64 =
                            x.iter().enumerate().map(|(i, v)| (v - center.get(i).unwrap_or(&0.0)).powi(2)).sum();
                        Complex64::from_polar(a * (-r2 / (2.0 * w * w)).exp(), k * x[0])
                    })
                }
                InitialComponent::RandomPhase { amplitude, radius } => {
                    hartree_lab::norms::random_phase_data(grid, *radius, &mut rng)
                        .scale(Complex64::new(*amplitude, 0.0))
                }
            };
            u = u.add(&part);
        }
        Ok(u)
    }
}
