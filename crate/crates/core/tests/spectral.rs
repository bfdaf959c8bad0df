use std::f64::consts::PI;

use hartree_lab::exponents::{ProblemParams, Sign};
use hartree_lab::rational::{int, rat};
use hartree_lab::spectral::{riesz_constant, scaling_check, Dealias, Field, Grid, Solver, SolverConfig};
use num_complex::Complex64;

fn config(params: ProblemParams, grid: Grid, dt: f64, t_final: f64) -> SolverConfig {
    SolverConfig { params, grid, dt, t_final, dealias: Dealias::TwoThirds, zero_mode_kernel: 0.0, snapshot_every: None }
}

fn fixture_params(sign: Sign) -> ProblemParams {
    ProblemParams::new(1, int(2), rat(1, 2), int(2), sign).unwrap()
}

fn gaussian(grid: Grid, s: f64) -> Field {
    Field::from_fn(grid, |x| Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / (2.0 * s * s)).exp(), 0.0))
}

/// Free evolution of `e^{-|x|²/(2s²)}` under `û(t) = e^{it|ξ|²}û(0)`.
fn free_gaussian(grid: Grid, s: f64, t: f64) -> Field {
    let a = Complex64::new(s * s, -2.0 * t);
    let amp = Complex64::new(s, 0.0) / a.sqrt();
    Field::from_fn(grid, |x| x.iter().map(|&v| amp * (-(v * v) / (2.0 * a)).exp()).product())
}

#[test]
fn gaussian_free_evolution_1d_and_2d() {
    for (dim, n, len) in [(1usize, 1024usize, 80.0), (2, 256, 60.0)] {
        let grid = Grid::new(dim, n, len).unwrap();
        let params = if dim == 1 {
            fixture_params(Sign::Defocusing)
        } else {
            ProblemParams::new(2, int(2), int(1), int(1), Sign::Defocusing).unwrap()
        };
        let s = Solver::new(config(params, grid, 0.01, 0.5)).unwrap();
        let u = s.propagate_linear(&gaussian(grid, 1.0), 0.5);
        let err = u.relative_l2_distance(&free_gaussian(grid, 1.0, 0.5));
        assert!(err < 1e-6, "dim {dim}: {err:e}");
    }
}

#[test]
fn linear_semigroup_and_unitarity() {
    let grid = Grid::new(1, 256, 40.0).unwrap();
    let s = Solver::new(config(fixture_params(Sign::Defocusing), grid, 0.01, 0.1)).unwrap();
    let u = Field::from_fn(grid, |x| Complex64::new((-x[0] * x[0]).exp(), x[0] * (-x[0] * x[0] / 3.0).exp()));
    let a = s.propagate_linear(&s.propagate_linear(&u, 0.3), 0.45);
    let b = s.propagate_linear(&u, 0.75);
    assert!(a.relative_l2_distance(&b) < 1e-12);
    assert!(((b.mass() - u.mass()) / u.mass()).abs() < 1e-12);
}

#[test]
fn riesz_single_cosine_mode() {
    for (dim, gamma) in [(1usize, rat(1, 2)), (2, rat(3, 2))] {
        let grid = Grid::new(dim, 32, 2.0 * PI).unwrap();
        let params = ProblemParams::new(dim as u32, int(2), gamma, int(2), Sign::Defocusing).unwrap();
        let mut c = config(params, grid, 0.1, 0.1);
        c.dealias = Dealias::None;
        let s = Solver::new(c).unwrap();
        let axis = grid.axis();
        let rho: Vec<f64> = (0..grid.len()).map(|i| (3.0 * axis[i % grid.n]).cos()).collect();
        let v = s.riesz_convolve(&rho);
        let g = hartree_lab::rational::to_f64(&gamma);
        let factor = riesz_constant(dim as f64, g) * 3f64.powf(g - dim as f64);
        for (a, b) in v.iter().zip(&rho) {
            assert!((a - factor * b).abs() < 1e-10);
        }
        assert!(s.riesz_convolve(&vec![0.0; grid.len()]).iter().all(|&x| x == 0.0));
    }
}

#[test]
fn constant_modulus_gives_global_phase() {
    let grid = Grid::new(1, 64, 20.0).unwrap();
    let mut c = config(fixture_params(Sign::Focusing), grid, 0.05, 0.5);
    c.zero_mode_kernel = 2.0;
    let s = Solver::new(c).unwrap();
    let u0 = Field::from_fn(grid, |_| Complex64::new(0.5, 0.0));
    let traj = s.solve(&u0).unwrap();
    // V = 2 · 0.25 everywhere, focusing: u ← u e^{-i t V}
    let expected = Complex64::from_polar(0.5, -0.5 * 0.5);
    for z in &traj.final_field().data {
        assert!((z - expected).norm() < 1e-12);
    }
}

#[test]
fn zero_data_stays_zero() {
    let grid = Grid::new(2, 16, 10.0).unwrap();
    let params = ProblemParams::new(2, int(2), int(1), int(1), Sign::Focusing).unwrap();
    let s = Solver::new(config(params, grid, 0.1, 1.0)).unwrap();
    let traj = s.solve(&Field::zeros(grid)).unwrap();
    assert!(traj.final_field().data.iter().all(|z| z.norm() == 0.0));
    assert_eq!(traj.times.len(), 11);
}

#[test]
fn mass_conserved_defocusing() {
    let grid = Grid::new(1, 256, 40.0).unwrap();
    let s = Solver::new(config(fixture_params(Sign::Defocusing), grid, 0.01, 1.0)).unwrap();
    let u0 = gaussian(grid, 1.0).scale(Complex64::new(1.5, 0.0));
    let traj = s.solve(&u0).unwrap();
    assert!(traj.max_relative_mass_drift() < 1e-8, "{}", traj.max_relative_mass_drift());
}

#[test]
fn strang_second_order() {
    let grid = Grid::new(1, 256, 40.0).unwrap();
    let u0 = gaussian(grid, 1.0).scale(Complex64::new(2.0, 0.0));
    let run = |dt: f64| {
        let s = Solver::new(config(fixture_params(Sign::Defocusing), grid, dt, 1.0)).unwrap();
        s.solve(&u0).unwrap().final_field().clone()
    };
    let dt = 0.05;
    let reference = run(dt / 8.0);
    let e1 = run(dt).relative_l2_distance(&reference);
    let e2 = run(dt / 2.0).relative_l2_distance(&reference);
    let ratio = e1 / e2;
    println!("strang ratio {ratio} ({e1:e}, {e2:e})");
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn scaling_symmetry() {
    let mut last = f64::INFINITY;
    for (n, dt) in [(256usize, 0.0025), (512, 0.00125)] {
        let grid = Grid::new(1, n, 40.0).unwrap();
        let u0 = gaussian(grid, 1.0);
        let rep = scaling_check(&u0, 2.0, &config(fixture_params(Sign::Defocusing), grid, dt, 0.2)).unwrap();
        println!("scaling n={n} dt={dt}: {:e}", rep.mismatch);
        assert!(rep.mismatch < 1e-4);
        assert!(rep.mismatch < last);
        last = rep.mismatch;
    }
    let grid = Grid::new(1, 256, 40.0).unwrap();
    let rep =
        scaling_check(&gaussian(grid, 1.0), 1.0, &config(fixture_params(Sign::Defocusing), grid, 0.01, 0.4)).unwrap();
    assert_eq!(rep.mismatch, 0.0);
}
