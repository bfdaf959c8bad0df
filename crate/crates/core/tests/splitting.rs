use hartree_lab::exponents::{LebesguePair, ProblemParams, Sign};
use hartree_lab::norms::random_phase_data;
use hartree_lab::rational::{int, rat};
use hartree_lab::spectral::{Dealias, Field, Grid, Solver, SolverConfig};
use hartree_lab::splitting::{run_campaign, PicardConfig, Scheme, SplitConfig, SplitError, TimeGridSpec};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config(n: i128) -> SplitConfig {
    let params = ProblemParams::new(1, int(2), rat(1, 2), int(2), Sign::Defocusing).unwrap();
    SplitConfig {
        n_param: int(n),
        alpha: rat(1, 2),
        rho: 1.0,
        c0: rat(1, 2),
        picard: PicardConfig::default(),
        solver: SolverConfig {
            params,
            grid: Grid::new(1, 256, 40.0).unwrap(),
            dt: 0.005,
            t_final: 0.0,
            dealias: Dealias::TwoThirds,
            zero_mode_kernel: 0.0,
            snapshot_every: None,
        },
        point: LebesguePair::new(rat(2, 5), rat(1, 20)),
        s: rat(-1, 10),
        step_cap: 64,
        v_threshold: 0.125,
        c_const: 1.0,
        allow_nondivergent: false,
        x_grid: TimeGridSpec::default(),
        sweep: vec![int(2), int(4), int(8)],
        deviation_tol: 1e-5,
    }
}

fn smooth_data(grid: Grid) -> Field {
    Field::from_fn(grid, |x| {
        let x = x[0];
        Complex64::new(0.3 * (-x * x / 2.0).exp(), 0.0) + Complex64::from_polar(0.02 * (-x * x / 8.0).exp(), 8.0 * x)
    })
}

#[test]
fn campaign_fixture() {
    let cfg = config(4);
    let u0 = smooth_data(cfg.solver.grid);
    let (rep, _) = run_campaign(&u0, &cfg).unwrap();
    println!("{}", serde_json::to_string_pretty(&rep.elapsed_by_n).unwrap());
    for s in &rep.steps {
        println!(
            "k={} v={:.6} wlin={:.3e} dev={:.3e} it={} ratio={:.3e} cond={:.3e} growth={:.3e} bound={:.3e}",
            s.k,
            s.v_norm,
            s.w_lin_norm,
            s.deviation,
            s.picard_iterations,
            s.max_ratio,
            s.step_condition,
            s.v_growth,
            s.growth_bound
        );
    }
    println!("{:?} spread {:e}", rep.verdicts, rep.w_norm_spread);
    assert_eq!(rep.steps.len(), 8);
    assert!(rep.max_deviation < 1e-5);
    assert!(rep.verdicts.budget_held && rep.verdicts.w_norm_constant && rep.verdicts.elapsed_increasing);
    for s in &rep.steps {
        assert!(s.v_growth <= 10.0 * s.growth_bound);
        assert!(s.max_ratio < 1.0);
    }
    for e in &rep.elapsed_by_n {
        assert!(!e.capped);
        assert_eq!(e.elapsed, e.k_n as f64 * e.t_step);
        assert_eq!(e.elapsed, e.planned_elapsed);
    }
}

#[test]
fn g_identities_and_v_conservation() {
    let cfg = config(4);
    let scheme = Scheme::new(&cfg).unwrap();
    let grid = cfg.solver.grid;
    let v = smooth_data(grid);
    let w = Field::from_fn(grid, |x| Complex64::from_polar(0.1 * (-x[0] * x[0]).exp(), 3.0 * x[0]));
    let zero = Field::zeros(grid);
    assert!(scheme.g_term(&v, &zero).linf_norm() == 0.0);
    let lhs = scheme.g_term(&zero, &w);
    assert!(lhs.relative_l2_distance(&scheme.solver.hartree_term(&w)) < 1e-15);

    let vt = scheme.solve_v(&v, 0).unwrap();
    let m0 = v.l2_norm();
    assert!(vt.nodes.iter().all(|f| ((f.l2_norm() - m0) / m0).abs() < 1e-8));
    let zt = scheme.solve_v(&zero, 0).unwrap();
    assert!(zt.nodes.iter().all(|f| f.linf_norm() == 0.0));
    // w0 = 0 with v a solution: w stays 0
    let wt = scheme.solve_w(&zero, &vt, 0).unwrap();
    assert!(wt.nodes.iter().all(|f| f.linf_norm() == 0.0));
}

#[test]
fn budget_gate_trips_on_large_data() {
    let cfg = config(4);
    let scheme = Scheme::new(&cfg).unwrap();
    let big = smooth_data(cfg.solver.grid).scale(Complex64::new(20.0, 0.0));
    assert!(matches!(scheme.solve_v(&big, 3), Err(SplitError::BudgetExceeded { k: 3, .. })));
}

#[test]
fn zero_w_is_plain_continuation() {
    let cfg = config(4);
    let grid = cfg.solver.grid;
    let u0 = Field::from_fn(grid, |x| Complex64::new(0.3 * (-x[0] * x[0] / 2.0).exp(), 0.0));
    let scheme = Scheme::new(&cfg).unwrap();
    let run = scheme.run(&u0).unwrap();
    assert!(run.max_deviation() < 1e-6, "{}", run.max_deviation());
}

#[test]
fn w_alone_matches_hartree_flow() {
    let cfg = config(4);
    let scheme = Scheme::new(&cfg).unwrap();
    let grid = cfg.solver.grid;
    let w0 = smooth_data(grid).scale(Complex64::new(0.5, 0.0));
    let zero = scheme.solve_v(&Field::zeros(grid), 0).unwrap();
    let w = scheme.solve_w(&w0, &zero, 0).unwrap();
    let direct = Solver::new(*scheme.solver.config()).unwrap().solve(&w0).unwrap();
    let err = w.nodes.last().unwrap().relative_l2_distance(direct.final_field());
    println!("cross-solver {err:e}, ratios {:?}", w.ratios);
    assert!(err < 1e-6);
}

#[test]
fn decompose_sweep_monotone() {
    let base = config(2);
    let grid = Grid::new(1, 512, 2.0 * std::f64::consts::PI * 16.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u0 = random_phase_data(grid, 12.0, &mut rng).scale(Complex64::new(0.05, 0.0));
    let mut last = (0.0, f64::INFINITY);
    for n in [2, 4, 8, 16] {
        let mut cfg = base.with_n(int(n));
        cfg.solver.grid = grid;
        let d = Scheme::new(&cfg).unwrap().decompose(&u0).unwrap();
        println!("N={n} v={} wx={}", d.v_norm, d.w_x_norm);
        assert!(d.v_norm > last.0 && d.w_x_norm < last.1);
        last = (d.v_norm, d.w_x_norm);
        for i in 0..d.v_hat.len() {
            assert!(d.v_hat[i] == Complex64::new(0.0, 0.0) || d.w_hat[i] == Complex64::new(0.0, 0.0));
        }
    }
}

#[test]
fn nondivergent_contrast() {
    // α_max = 3/5 for the fixture; α = 1 loses divergence
    let mut cfg = config(4);
    cfg.alpha = int(1);
    cfg.step_cap = 8;
    let u0 = smooth_data(cfg.solver.grid);
    assert!(matches!(run_campaign(&u0, &cfg), Err(SplitError::Exponent(_))));
    cfg.allow_nondivergent = true;
    let (rep, _) = run_campaign(&u0, &cfg).unwrap();
    println!("{}", serde_json::to_string(&rep.elapsed_by_n).unwrap());
    assert!(!rep.verdicts.diverges);
    assert!(!rep.verdicts.elapsed_increasing && rep.verdicts.nondivergent_flag);
}
