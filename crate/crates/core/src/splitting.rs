//! Rough-data splitting scheme: `u = v + w` with `v` carrying the `L²` part
//! (evolved by the Hartree flow) and `w` the rough remainder (evolved by the
//! perturbed equation with `G(v, w) = (K*|v+w|^β)(v+w) - (K*|v|^β)v`), re-split
//! after every step so that `w` always follows the free flow.

use std::thread;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::exponents::{lambda_and_steps, step_exponents, ExponentError, LebesguePair, StepExponents, StepPlan};
use crate::norms::{log_time_grid, mixed_norm, window_norm, x_norm, MixedNormSpec, NormError};
use crate::rational::{int, rat, to_f64, Extended, Rational};
use crate::spectral::{Field, LinearFlow, Solver, SolverConfig, SpectralError};

#[derive(Debug, thiserror::Error)]
pub enum SplitError {
    #[error(transparent)]
    Exponent(#[from] ExponentError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("invalid split configuration: {0}")]
    InvalidConfig(String),
    #[error("budget exceeded at step {k}: {what} = {value:e} > {limit:e}")]
    BudgetExceeded { k: usize, what: &'static str, value: f64, limit: f64 },
    #[error("Picard iteration did not contract after {iterations} iterations (last distance {last_distance:e})")]
    NoContraction { iterations: usize, last_distance: f64, ratios: Vec<f64> },
    #[error("schedule does not diverge: lambda = {lambda} <= alpha*beta/A = {step_exponent}")]
    NonDivergent { lambda: Rational, step_exponent: Rational },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardConfig {
    pub max_iter: usize,
    /// Stop once the sup-in-time `L²` change, relative to `sup‖S(t)w0‖₂`, drops below this.
    pub tol: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig { max_iter: 50, tol: 1e-10 }
    }
}

/// Log-spaced window starts for the `X`-norm proxy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

impl Default for TimeGridSpec {
    fn default() -> Self {
        TimeGridSpec { t_min: 0.1, t_max: 100.0, count: 8 }
    }
}

impl TimeGridSpec {
    pub fn points(&self) -> Vec<f64> {
        log_time_grid(self.t_min, self.t_max, self.count)
    }
}

fn one() -> f64 {
    1.0
}
fn default_cap() -> usize {
    64
}
fn default_threshold() -> f64 {
    0.125
}
fn default_sweep() -> Vec<Rational> {
    vec![int(2), int(4), int(8)]
}
fn default_deviation_tol() -> f64 {
    1e-5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(rename = "N", with = "crate::rational::serde_str")]
    pub n_param: Rational,
    #[serde(with = "crate::rational::serde_str")]
    pub alpha: Rational,
    /// Cutoff radius is `N^rho`.
    #[serde(default = "one")]
    pub rho: f64,
    #[serde(with = "crate::rational::serde_str")]
    pub c0: Rational,
    #[serde(default)]
    pub picard: PicardConfig,
    /// `dt` is an upper bound; each step uses the largest `dt' <= dt` dividing `T_k`.
    /// `t_final` is ignored, the schedule sets the times.
    pub solver: SolverConfig,
    pub point: LebesguePair,
    #[serde(with = "crate::rational::serde_str")]
    pub s: Rational,
    #[serde(default = "default_cap")]
    pub step_cap: usize,
    /// Bound on `T^A‖v0‖₂^β` before each `v` solve.
    #[serde(default = "default_threshold")]
    pub v_threshold: f64,
    /// `C` in the `w` step condition `... <= 1/(8C)`.
    #[serde(default = "one")]
    pub c_const: f64,
    /// Accept `α >= α_max`, for which the schedule does not diverge.
    #[serde(default)]
    pub allow_nondivergent: bool,
    #[serde(default)]
    pub x_grid: TimeGridSpec,
    #[serde(default = "default_sweep", with = "crate::rational::serde_str_vec")]
    pub sweep: Vec<Rational>,
    #[serde(default = "default_deviation_tol")]
    pub deviation_tol: f64,
}

impl SplitConfig {
    pub fn with_n(&self, n: Rational) -> Self {
        SplitConfig { n_param: n, ..self.clone() }
    }
}

/// `u0 = v0 + w0` split at a sharp frequency radius.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub v0: Field,
    pub w0: Field,
    pub radius: f64,
    /// Spectral coefficients of `v0` and `w0`; they sum to those of `u0` bin by bin.
    pub v_hat: Vec<Complex64>,
    pub w_hat: Vec<Complex64>,
    pub v_norm: f64,
    /// `X`-norm proxy of `w0` on the configured time grid.
    pub w_x_norm: f64,
}

#[derive(Debug, Clone)]
pub struct VTrajectory {
    /// `v(j·dt)`, `j = 0..=steps`.
    pub nodes: Vec<Field>,
    pub dt: f64,
    pub sup_l2: f64,
    /// Discrete `L^{γ_m(r)}_t L^r_x` norm over the step.
    pub strichartz_norm: f64,
}

#[derive(Debug, Clone)]
pub struct WTrajectory {
    pub nodes: Vec<Field>,
    pub dt: f64,
    pub iterations: usize,
    /// Successive-distance ratios `d_n / d_{n-1}`.
    pub ratios: Vec<f64>,
    /// Left side of the step condition.
    pub step_condition: f64,
}

#[derive(Debug, Clone)]
pub struct SplitState {
    pub v: Field,
    pub w: Field,
    pub k: usize,
    pub elapsed: f64,
    pub v_norm_series: Vec<f64>,
    pub w_linear_norm_series: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepRecord {
    pub k: usize,
    #[serde(rename = "T_k")]
    pub t_k: f64,
    /// `‖v_k‖₂` at the start of the step.
    pub v_norm: f64,
    /// `‖S_m(t)w_k‖_{L^q_{[0,1]} L^r}`.
    pub w_lin_norm: f64,
    pub w_l2: f64,
    /// Relative `L²` distance of `v_{k+1} + w_{k+1}` from the direct solve.
    pub deviation: f64,
    pub picard_iterations: usize,
    pub max_ratio: f64,
    pub step_condition: f64,
    /// `‖v_{k+1}‖₂ - ‖v_k‖₂`
    pub v_growth: f64,
    /// `(T^E‖v_k‖₂^β + T^F‖S w_k‖^β)‖S w_k‖` with `‖S w_k‖` over `[0, T_k]`.
    pub growth_bound: f64,
}

/// Precomputed pieces for one `N`.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub config: SplitConfig,
    pub plan: StepPlan,
    pub exponents: StepExponents,
    pub solver: Solver,
    /// Sub-steps per `T_k`.
    pub substeps: usize,
    q: f64,
    r: f64,
    gamma_m: f64,
    beta: f64,
}

impl Scheme {
    pub fn new(config: &SplitConfig) -> Result<Self, SplitError> {
        let p = &config.solver.params;
        let exponents = step_exponents(&config.point, p)?;
        let plan = if config.allow_nondivergent {
            // α ≥ α_max is the only way to lose divergence, so the α range check is skipped
            if config.alpha <= int(0) {
                return Err(SplitError::InvalidConfig(format!("alpha = {} must be positive", config.alpha)));
            }
            lambda_and_steps(p, &config.point, rat(1, 1_000_000), config.s, config.n_param, config.c0)?;
            StepPlan::evaluate(&exponents, p, config.alpha, config.s, config.n_param, config.c0)?
        } else {
            lambda_and_steps(p, &config.point, config.alpha, config.s, config.n_param, config.c0)?
        };
        if config.picard.tol.is_nan() || config.picard.tol <= 0.0 || config.picard.max_iter == 0 {
            return Err(SplitError::InvalidConfig("picard.tol must be positive and max_iter nonzero".into()));
        }
        if config.rho.is_nan() || config.rho <= 0.0 {
            return Err(SplitError::InvalidConfig(format!("rho = {} must be positive", config.rho)));
        }
        let t = plan.t_step;
        let substeps = ((t / config.solver.dt) - 1e-9).ceil().max(1.0) as usize;
        let solver =
            Solver::new(SolverConfig { dt: t / substeps as f64, t_final: t, snapshot_every: None, ..config.solver })?;
        let (q, r) = (config.point.inv_q, config.point.inv_r);
        Ok(Scheme {
            config: config.clone(),
            plan,
            exponents,
            solver,
            substeps,
            q: Extended::Finite(q).recip().to_f64(),
            r: Extended::Finite(r).recip().to_f64(),
            gamma_m: Extended::Finite(exponents.inv_gamma_m).recip().to_f64(),
            beta: to_f64(&p.beta),
        })
    }

    pub fn flow(&self) -> &LinearFlow {
        self.solver.flow()
    }

    pub fn t_step(&self) -> f64 {
        self.plan.t_step
    }

    pub fn dt(&self) -> f64 {
        self.solver.config().dt
    }

    /// `2N^α`
    pub fn budget(&self) -> f64 {
        2.0 * to_f64(&self.config.n_param).powf(to_f64(&self.config.alpha))
    }

    pub fn radius(&self) -> f64 {
        to_f64(&self.config.n_param).powf(self.config.rho)
    }

    fn x_spec(&self) -> MixedNormSpec {
        MixedNormSpec::new(
            Extended::Finite(self.config.point.inv_q).recip(),
            Extended::Finite(self.config.point.inv_r).recip(),
            self.config.s,
        )
    }

    /// `‖S_m(t)w‖_{L^q_{[0,1]} L^r}`
    pub fn w_linear_norm(&self, w: &Field) -> f64 {
        window_norm(self.flow(), &self.flow().spectrum(w), 0.0, self.q, self.r, 65)
    }

    /// High frequencies `|ξ| > N^ρ` go to `w0`; `v0 = u0 - w0`.
    pub fn decompose(&self, u0: &Field) -> Result<Decomposition, SplitError> {
        let radius = self.radius();
        let flow = self.flow();
        let spec = flow.spectrum(u0);
        let mags = u0.grid.frequency_magnitudes();
        let zero = Complex64::new(0.0, 0.0);
        let mut v_hat = vec![zero; spec.len()];
        let mut w_hat = vec![zero; spec.len()];
        for (i, z) in spec.iter().enumerate() {
            if mags[i] > radius {
                w_hat[i] = *z;
            } else {
                v_hat[i] = *z;
            }
        }
        let mut w = w_hat.clone();
        flow.ops().inverse(&mut w);
        let w0 = Field::from_data(u0.grid, w);
        let v0 = u0.sub(&w0);
        let w_x_norm = x_norm(flow, &w0, &self.x_spec(), &self.config.x_grid.points())?.value;
        Ok(Decomposition { v_norm: v0.l2_norm(), v0, w0, radius, v_hat, w_hat, w_x_norm })
    }

    /// Hartree flow of `v0` over one step, every sub-step kept.
    pub fn solve_v(&self, v0: &Field, k: usize) -> Result<VTrajectory, SplitError> {
        let t = self.t_step();
        let gate = t.powf(to_f64(&self.exponents.a)) * v0.l2_norm().powf(self.beta);
        if gate > self.config.v_threshold {
            return Err(SplitError::BudgetExceeded {
                k,
                what: "T^A |v_k|_2^beta",
                value: gate,
                limit: self.config.v_threshold,
            });
        }
        let mut nodes = Vec::with_capacity(self.substeps + 1);
        let mut u = v0.clone();
        nodes.push(u.clone());
        for j in 1..=self.substeps {
            self.solver.strang_step(&mut u);
            if !u.is_finite() {
                return Err(SpectralError::NonFinite { step: j }.into());
            }
            nodes.push(u.clone());
        }
        let sup_l2 = nodes.iter().map(Field::l2_norm).fold(0.0, f64::max);
        let strichartz_norm = mixed_norm(&nodes, self.dt(), self.gamma_m, self.r);
        Ok(VTrajectory { nodes, dt: self.dt(), sup_l2, strichartz_norm })
    }

    /// `G(v, w) = (K*|v+w|^β)(v+w) - (K*|v|^β)v`
    pub fn g_term(&self, v: &Field, w: &Field) -> Field {
        self.solver.hartree_term(&v.add(w)).sub(&self.solver.hartree_term(v))
    }

    /// Picard iteration of `w = S(t)w0 ∓ i∫S(t-τ)G(v, w)(τ)dτ` with the
    /// trapezoid rule on the `v` nodes.
    pub fn solve_w(&self, w0: &Field, v: &VTrajectory, k: usize) -> Result<WTrajectory, SplitError> {
        let dt = v.dt;
        let nodes = v.nodes.len();
        let t = dt * (nodes - 1) as f64;
        let step_condition = t.powf(to_f64(&self.exponents.a)) * v.strichartz_norm.powf(self.beta)
            + t.powf(to_f64(&self.exponents.d)) * self.w_linear_norm(w0).powf(self.beta);
        let limit = 1.0 / (8.0 * self.config.c_const);
        if step_condition > limit {
            return Err(SplitError::BudgetExceeded { k, what: "w step condition", value: step_condition, limit });
        }
        let flow = self.flow();
        let mut lin = Vec::with_capacity(nodes);
        lin.push(w0.clone());
        for j in 1..nodes {
            let next = flow.propagate(&lin[j - 1], dt);
            lin.push(next);
        }
        let hv: Vec<Field> = v.nodes.iter().map(|f| self.solver.hartree_term(f)).collect();
        let scale = lin.iter().map(Field::l2_norm).fold(0.0, f64::max);
        // -i·sign
        let coef = Complex64::new(0.0, -self.config.solver.params.sign.factor());
        let half = Complex64::new(0.5 * dt, 0.0);

        let mut w = lin.clone();
        let mut ratios = Vec::new();
        let mut last = f64::INFINITY;
        for it in 1..=self.config.picard.max_iter {
            let f: Vec<Field> =
                (0..nodes).map(|j| self.solver.hartree_term(&v.nodes[j].add(&w[j])).sub(&hv[j])).collect();
            let mut integral = Field::zeros(w0.grid);
            let mut next = Vec::with_capacity(nodes);
            next.push(lin[0].clone());
            for j in 1..nodes {
                integral = flow.propagate(&integral.add(&f[j - 1].scale(half)), dt).add(&f[j].scale(half));
                next.push(lin[j].add(&integral.scale(coef)));
            }
            let dist = next.iter().zip(&w).map(|(a, b)| a.sub(b).l2_norm()).fold(0.0, f64::max);
            if !dist.is_finite() {
                return Err(SplitError::NoContraction { iterations: it, last_distance: dist, ratios });
            }
            if last.is_finite() && last > 0.0 {
                ratios.push(dist / last);
            }
            last = dist;
            w = next;
            if dist <= self.config.picard.tol * scale {
                return Ok(WTrajectory { nodes: w, dt, iterations: it, ratios, step_condition });
            }
        }
        Err(SplitError::NoContraction { iterations: self.config.picard.max_iter, last_distance: last, ratios })
    }

    /// One step of the scheme. Returns the new state and the raw step data.
    pub fn advance(&self, state: &SplitState) -> Result<(SplitState, WTrajectory), SplitError> {
        let k = state.k;
        let vt = self.solve_v(&state.v, k)?;
        let wt = self.solve_w(&state.w, &vt, k)?;
        let t = self.t_step();
        let s_w = self.flow().propagate(&state.w, t);
        let v_end = vt.nodes.last().expect("nonempty");
        let w_end = wt.nodes.last().expect("nonempty");
        let v_next = v_end.add(&w_end.sub(&s_w));
        let v_norm = v_next.l2_norm();
        if v_norm > self.budget() {
            return Err(SplitError::BudgetExceeded { k: k + 1, what: "|v_k|_2", value: v_norm, limit: self.budget() });
        }
        let mut next = SplitState {
            w_linear_norm_series: state.w_linear_norm_series.clone(),
            v_norm_series: state.v_norm_series.clone(),
            v: v_next,
            w: s_w,
            k: k + 1,
            elapsed: (k + 1) as f64 * t,
        };
        next.v_norm_series.push(v_norm);
        next.w_linear_norm_series.push(self.w_linear_norm(&next.w));
        Ok((next, wt))
    }

    pub fn initial_state(&self, v0: Field, w0: Field) -> SplitState {
        let (vn, wn) = (v0.l2_norm(), self.w_linear_norm(&w0));
        SplitState { v: v0, w: w0, k: 0, elapsed: 0.0, v_norm_series: vec![vn], w_linear_norm_series: vec![wn] }
    }

    /// `min(K_N, step_cap)` steps from `u0`, each boundary checked against a
    /// direct solve with the same grid and `dt`.
    pub fn run(&self, u0: &Field) -> Result<Run, SplitError> {
        let dec = self.decompose(u0)?;
        let mut state = self.initial_state(dec.v0.clone(), dec.w0.clone());
        let steps = (self.plan.k_n.min(self.config.step_cap as u64)) as usize;
        let mut direct = u0.clone();
        let mut records = Vec::with_capacity(steps);
        let (e_exp, f_exp) = (to_f64(&self.exponents.e), to_f64(&self.exponents.f));
        let t = self.t_step();
        for _ in 0..steps {
            let w_window = {
                let flow = self.flow();
                let spec = flow.spectrum(&state.w);
                let nodes: Vec<Field> =
                    (0..=self.substeps).map(|j| flow.evaluate(&spec, j as f64 * self.dt())).collect();
                mixed_norm(&nodes, self.dt(), self.q, self.r)
            };
            let v_before = state.v.l2_norm();
            let w_lin = *state.w_linear_norm_series.last().expect("nonempty");
            let (next, wt) = self.advance(&state)?;
            for j in 1..=self.substeps {
                self.solver.strang_step(&mut direct);
                if !direct.is_finite() {
                    return Err(SpectralError::NonFinite { step: state.k * self.substeps + j }.into());
                }
            }
            let deviation = next.v.add(&next.w).relative_l2_distance(&direct);
            records.push(StepRecord {
                k: state.k,
                t_k: t,
                v_norm: v_before,
                w_lin_norm: w_lin,
                w_l2: state.w.l2_norm(),
                deviation,
                picard_iterations: wt.iterations,
                max_ratio: wt.ratios.iter().copied().fold(0.0, f64::max),
                step_condition: wt.step_condition,
                v_growth: next.v.l2_norm() - v_before,
                growth_bound: (t.powf(e_exp) * v_before.powf(self.beta) + t.powf(f_exp) * w_window.powf(self.beta))
                    * w_window,
            });
            state = next;
        }
        Ok(Run { decomposition: dec, state, records, direct })
    }
}

#[derive(Debug, Clone)]
pub struct Run {
    pub decomposition: Decomposition,
    pub state: SplitState,
    pub records: Vec<StepRecord>,
    pub direct: Field,
}

impl Run {
    pub fn max_deviation(&self) -> f64 {
        self.records.iter().map(|r| r.deviation).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    #[serde(rename = "N", with = "crate::rational::serde_str")]
    pub n: Rational,
    pub k_n: u64,
    pub steps_run: usize,
    pub t_step: f64,
    /// `steps_run · T_step`
    pub elapsed: f64,
    /// `K_N · T_step`
    pub planned_elapsed: f64,
    pub capped: bool,
    pub max_deviation: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdicts {
    pub diverges: bool,
    pub deviation_ok: bool,
    pub budget_held: bool,
    pub w_norm_constant: bool,
    /// `elapsed` strictly increasing along the sweep, every run completed.
    pub elapsed_increasing: bool,
    /// Set when the schedule does not diverge and `elapsed` fails to increase.
    pub nondivergent_flag: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignReport {
    pub config: SplitConfig,
    pub plan: StepPlan,
    pub dt: f64,
    pub substeps: usize,
    pub budget: f64,
    pub v0_norm: f64,
    pub w0_x_norm: f64,
    pub steps: Vec<StepRecord>,
    pub max_deviation: f64,
    /// `max_k |‖w_k‖₂ - ‖w_0‖₂| / ‖w_0‖₂`
    pub w_norm_spread: f64,
    pub elapsed_by_n: Vec<SweepEntry>,
    pub verdicts: Verdicts,
}

fn sweep_entry(config: &SplitConfig, u0: &Field) -> SweepEntry {
    let n = config.n_param;
    let fail = |e: SplitError, plan: Option<&StepPlan>| SweepEntry {
        n,
        k_n: plan.map_or(0, |p| p.k_n),
        steps_run: 0,
        t_step: plan.map_or(0.0, |p| p.t_step),
        elapsed: 0.0,
        planned_elapsed: plan.map_or(0.0, StepPlan::elapsed),
        capped: false,
        max_deviation: None,
        error: Some(e.to_string()),
    };
    let scheme = match Scheme::new(config) {
        Ok(s) => s,
        Err(e) => return fail(e, None),
    };
    match scheme.run(u0) {
        Ok(run) => SweepEntry {
            n,
            k_n: scheme.plan.k_n,
            steps_run: run.records.len(),
            t_step: scheme.t_step(),
            elapsed: run.state.elapsed,
            planned_elapsed: scheme.plan.elapsed(),
            capped: (run.records.len() as u64) < scheme.plan.k_n,
            max_deviation: Some(run.max_deviation()),
            error: None,
        },
        Err(e) => fail(e, Some(&scheme.plan)),
    }
}

/// Runs the configured `N`, then the `N` sweep concurrently.
pub fn run_campaign(u0: &Field, config: &SplitConfig) -> Result<(CampaignReport, Run), SplitError> {
    let scheme = Scheme::new(config)?;
    if !scheme.plan.diverges && !config.allow_nondivergent {
        return Err(SplitError::NonDivergent { lambda: scheme.plan.lambda, step_exponent: scheme.plan.step_exponent });
    }
    let run = scheme.run(u0)?;
    let elapsed_by_n: Vec<SweepEntry> = thread::scope(|scope| {
        let handles: Vec<_> = config
            .sweep
            .iter()
            .map(|&n| {
                let cfg = config.with_n(n);
                scope.spawn(move || sweep_entry(&cfg, u0))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    let w0 = run.decomposition.w0.l2_norm();
    let w_norm_spread = run
        .records
        .iter()
        .map(|r| r.w_l2)
        .chain(std::iter::once(run.state.w.l2_norm()))
        .map(|x| if w0 > 0.0 { (x - w0).abs() / w0 } else { x })
        .fold(0.0, f64::max);
    let budget = scheme.budget();
    let max_deviation = run.max_deviation();
    let complete = elapsed_by_n.iter().all(|e| e.error.is_none());
    let increasing = complete && elapsed_by_n.windows(2).all(|p| p[1].elapsed > p[0].elapsed);
    let verdicts = Verdicts {
        diverges: scheme.plan.diverges,
        deviation_ok: max_deviation < config.deviation_tol,
        budget_held: run.state.v_norm_series.iter().all(|v| *v <= budget),
        w_norm_constant: w_norm_spread < 1e-12,
        elapsed_increasing: increasing,
        nondivergent_flag: !scheme.plan.diverges && !increasing,
    };
    let report = CampaignReport {
        config: config.clone(),
        plan: scheme.plan.clone(),
        dt: scheme.dt(),
        substeps: scheme.substeps,
        budget,
        v0_norm: run.decomposition.v_norm,
        w0_x_norm: run.decomposition.w_x_norm,
        steps: run.records.clone(),
        max_deviation,
        w_norm_spread,
        elapsed_by_n,
        verdicts,
    };
    Ok((report, run))
}
