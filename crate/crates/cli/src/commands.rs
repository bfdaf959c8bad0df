use std::fs;
use std::io::Write;

use hartree_lab::exponents::sampling::random_point_in;
use hartree_lab::exponents::{
    alpha_tilde_sup, alpha_tilde_sup_closed_form, derive as derive_exponents, identity_suite, in_omega_gamma,
    in_omega_gamma_sigma, interval_from_definition, interval_from_lwp_system, interval_i, lambda_and_steps,
    p_m_hartree, p_max_nlsh, region_vertices, satisfies_lwp_hypotheses, step_exponents, theta_max, ExponentError,
    LebesguePair, ThetaMax, ToFlat,
};
use hartree_lab::norms::{
    embedding_ratio, growth_fit, modulation_norm, semigroup_probe, x_norm, MixedNormSpec, ModSpec, NormError,
};
use hartree_lab::rational::{exact_string, int, rat, Extended, Rational};
use hartree_lab::spectral::io::{write_csv, write_snapshot, SnapshotMeta};
use hartree_lab::spectral::{Field, LinearFlow, Solver, SpectralError};
use hartree_lab::splitting::{run_campaign, SplitError};
use hartree_lab::strichartz::{verify_region_equivalence_with, StrichartzError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::manifest::Outputs;
use crate::{CliError, ConfigArgs, DeriveArgs, RegionArgs, VerifyArgs};

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn or_error<T: serde::Serialize>(r: Result<T, ExponentError>) -> Value {
    match r {
        Ok(v) => to_value(v),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

pub fn derive(a: &DeriveArgs) -> Result<(), CliError> {
    let p = a.params.params()?;
    let dx = derive_exponents(&p)?;
    let mut out = serde_json::Map::new();
    out.insert("params".into(), to_value(p));
    out.insert("derived".into(), to_value(dx.to_flat()));
    out.insert("interval_I".into(), or_error(interval_i(&p)));
    out.insert("interval_definition".into(), or_error(interval_from_definition(&p)));
    out.insert("interval_lwp_system".into(), or_error(interval_from_lwp_system(&p)));
    out.insert("alpha_tilde_sup".into(), or_error(alpha_tilde_sup(&p).map(|q| exact_string(&q))));
    out.insert(
        "p_m".into(),
        or_error(p_m_hartree(&p).map(|(b, v)| json!({ "branch": b, "inv_p_m": exact_string(&v) }))),
    );
    out.insert(
        "p_max".into(),
        or_error(p_max_nlsh(&p).map(|(b, v)| json!({ "branch": b, "inv_p_max": exact_string(&v) }))),
    );
    if let Some(pt) = &a.point {
        let mut at = serde_json::Map::new();
        at.insert("point".into(), to_value(pt));
        at.insert("in_omega_gamma".into(), to_value(in_omega_gamma(pt, &p)?));
        at.insert("in_omega_gamma_sigma".into(), to_value(in_omega_gamma_sigma(pt, &p)?));
        at.insert("lwp_hypotheses".into(), or_error(satisfies_lwp_hypotheses(pt, &p)));
        at.insert("step".into(), or_error(step_exponents(pt, &p).map(|s| s.to_flat())));
        at.insert("theta_max".into(), or_error(theta_max(pt, &p)));
        if let Some(alpha) = a.alpha {
            at.insert("schedule".into(), or_error(lambda_and_steps(&p, pt, alpha, a.s, a.n_param, a.c0)));
        }
        out.insert("at_point".into(), Value::Object(at));
    }
    let text = if a.json {
        serde_json::to_string(&Value::Object(out))
    } else {
        serde_json::to_string_pretty(&Value::Object(out))
    }
    .expect("json");
    println!("{text}");
    Ok(())
}

pub fn region(a: &RegionArgs) -> Result<(), CliError> {
    let p = a.params.params()?;
    derive_exponents(&p)?;
    if a.grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    if region_vertices(&p)?.is_empty() {
        eprintln!("warning: the region is empty for these parameters");
    }
    let n = a.grid as i128;
    let mut buf = String::with_capacity(32 * a.grid * a.grid);
    buf.push_str("x,y,in_omega_gamma,in_omega_gamma_sigma\n");
    for i in 0..n {
        for j in 0..n {
            let pt = LebesguePair::new(rat(i, n), rat(j, n));
            let g = in_omega_gamma(&pt, &p)?;
            let gs = in_omega_gamma_sigma(&pt, &p)?;
            buf.push_str(&format!("{},{},{g},{gs}\n", i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    match &a.out {
        Some(path) => fs::write(path, buf)?,
        None => std::io::stdout().write_all(buf.as_bytes())?,
    }
    Ok(())
}

const MAX_DUMPED: usize = 50;

fn random_fraction(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.gen_range(2..=64i128);
    rat(rng.gen_range(1..den), den)
}

pub fn verify(a: &VerifyArgs) -> Result<(), CliError> {
    let p = a.params.params()?;
    derive_exponents(&p)?;
    let mut counterexamples: Vec<Value> = Vec::new();

    let member = |pt: &LebesguePair, pp: &_| {
        let inside = in_omega_gamma_sigma(pt, pp).unwrap_or(false);
        inside != a.corrupt_region
    };
    let equivalence = match verify_region_equivalence_with(&p, a.samples, a.seed, &member) {
        Ok(r) => r,
        Err(StrichartzError::EquivalenceFailure(r)) => {
            counterexamples.extend(r.counterexamples.iter().map(|c| json!({ "check": "region", "detail": c })));
            *r
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };

    let table = interval_i(&p);
    let definition = interval_from_definition(&p)?;
    match &table {
        Ok(t) if t.interval == definition => {}
        Ok(t) => counterexamples.push(json!({
            "check": "interval_I",
            "detail": { "branch": t.branch, "table": t.interval, "definition": definition },
        })),
        Err(e) => counterexamples.push(json!({ "check": "interval_I", "detail": e.to_string() })),
    }

    let sup = match alpha_tilde_sup(&p) {
        Ok(v) => json!({ "vertex": exact_string(&v), "closed_form": exact_string(&alpha_tilde_sup_closed_form(&p)) }),
        Err(ExponentError::EmptyRegion) => json!({ "skipped": "empty region" }),
        Err(e) => {
            counterexamples.push(json!({ "check": "alpha_tilde_sup", "detail": e.to_string() }));
            Value::Null
        }
    };

    let vertices = region_vertices(&p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    rng.set_stream(u64::MAX);
    let draws = if vertices.is_empty() { 0 } else { a.samples.div_ceil(10) };
    let mut checked = 0usize;
    for _ in 0..draws {
        let Some(pt) = random_point_in(&mut rng, &vertices, |q| in_omega_gamma_sigma(q, &p).unwrap_or(false)) else {
            continue;
        };
        let step = hartree_lab::exponents::StepExponents::compute(&pt, &p)?;
        let alpha = match ThetaMax::compute(&step, &p).alpha_max {
            Extended::Finite(m) => m * random_fraction(&mut rng),
            Extended::Infinity => int(2) * random_fraction(&mut rng),
        };
        let s = -random_fraction(&mut rng);
        checked += 1;
        if let Err(e) = identity_suite(&p, &pt, alpha, s) {
            counterexamples.push(json!({
                "check": "identities",
                "detail": { "point": pt, "alpha": exact_string(&alpha), "s": exact_string(&s), "error": e.to_string() },
            }));
        }
    }

    let total = counterexamples.len();
    counterexamples.truncate(MAX_DUMPED);
    let report = json!({
        "params": p,
        "seed": a.seed,
        "samples": a.samples,
        "region": {
            "members": equivalence.members,
            "converse_probed": equivalence.converse_probed,
            "sharp_inside": equivalence.sharp_inside,
        },
        "interval_I": { "table": table.ok(), "definition": definition },
        "alpha_tilde_sup": sup,
        "identities": { "checked": checked },
        "counterexample_count": total,
        "counterexamples": counterexamples,
        "verdict": if total == 0 { "pass" } else { "fail" },
    });
    let text = serde_json::to_string_pretty(&report).expect("json") + "\n";
    if let Some(path) = &a.out {
        fs::write(path, &text)?;
    }
    print!("{text}");
    if total > 0 {
        return Err(CliError::Counterexample(format!("{total} counterexample(s)")));
    }
    Ok(())
}

fn load(a: &ConfigArgs) -> Result<(RunConfig, Vec<u8>, Outputs), CliError> {
    let bytes = fs::read(&a.config).map_err(|e| CliError::Usage(format!("{}: {e}", a.config.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Usage(format!("config is not UTF-8: {e}")))?;
    let cfg = RunConfig::parse(text)?;
    let dir = a.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    let outputs = Outputs::create(&dir)?;
    Ok((cfg, bytes, outputs))
}

fn spectral_error(e: SpectralError) -> CliError {
    match e {
        SpectralError::InvalidGrid(_) | SpectralError::InvalidConfig(_) | SpectralError::StepMismatch { .. } => {
            CliError::Usage(e.to_string())
        }
        _ => CliError::Runtime(e.to_string()),
    }
}

fn snapshot(out: &mut Outputs, name: &str, step: usize, t: f64, field: &Field) -> Result<(), CliError> {
    let mut bin = Vec::new();
    write_snapshot(field, t, &mut bin)?;
    out.write(&format!("{name}.bin"), &bin)?;
    out.write_json(&format!("{name}.json"), &SnapshotMeta::new(format!("{name}.bin"), step, t, field))
}

pub fn solve(a: &ConfigArgs) -> Result<(), CliError> {
    let (cfg, bytes, mut out) = load(a)?;
    let u0 = cfg.initial_field()?;
    let solver = Solver::new(cfg.solver_config()).map_err(spectral_error)?;
    let traj = solver.solve(&u0).map_err(spectral_error)?;

    let mut csv = Vec::new();
    write_csv(&traj, &mut csv)?;
    out.write("trajectory.csv", &csv)?;
    for (step, field) in &traj.snapshots {
        snapshot(&mut out, &format!("snap_{step:06}"), *step, *step as f64 * cfg.solver.dt, field)?;
    }
    let drift = traj.max_relative_mass_drift();
    let summary = json!({
        "steps": traj.times.len() - 1,
        "t_final": traj.times.last(),
        "initial_mass": traj.mass[0],
        "final_mass": traj.mass.last(),
        "max_relative_mass_drift": drift,
        "final_linf": traj.linf.last(),
    });
    out.write_json("summary.json", &summary)?;
    let hash = out.finish("solve", &bytes)?;
    println!("steps {} max relative mass drift {drift:.3e} manifest {hash}", traj.times.len() - 1);
    Ok(())
}

pub fn split(a: &ConfigArgs) -> Result<(), CliError> {
    let (cfg, bytes, mut out) = load(a)?;
    let split = cfg.split_config()?;
    let u0 = cfg.initial_field()?;
    let (report, run) = run_campaign(&u0, &split).map_err(|e| match e {
        SplitError::Exponent(_) | SplitError::InvalidConfig(_) | SplitError::NonDivergent { .. } => {
            CliError::Usage(e.to_string())
        }
        SplitError::Spectral(s) => spectral_error(s),
        _ => CliError::Runtime(e.to_string()),
    })?;
    out.write_json("campaign.json", &report)?;
    let t = run.state.elapsed;
    snapshot(&mut out, "v_final", run.state.k, t, &run.state.v)?;
    snapshot(&mut out, "w_final", run.state.k, t, &run.state.w)?;
    snapshot(&mut out, "direct_final", run.state.k, t, &run.direct)?;
    let hash = out.finish("split", &bytes)?;
    println!(
        "steps {} max deviation {:.3e} verdicts {} manifest {hash}",
        report.steps.len(),
        report.max_deviation,
        serde_json::to_string(&report.verdicts).expect("json")
    );
    Ok(())
}

fn norm_error(e: NormError) -> CliError {
    match e {
        NormError::InvalidSpec(_) => CliError::Usage(e.to_string()),
        NormError::Resolution(_) => CliError::Runtime(e.to_string()),
    }
}

pub fn norms(a: &ConfigArgs) -> Result<(), CliError> {
    let (cfg, bytes, mut out) = load(a)?;
    let ns = cfg.norms_section()?;
    let u0 = cfg.initial_field()?;
    let flow = LinearFlow::new(cfg.grid, hartree_lab::rational::to_f64(&cfg.params.m));
    let spec = MixedNormSpec { q: ns.q, r: ns.r, s: ns.s, window_nodes: ns.window_nodes };
    let grid = ns.t_grid.points();

    let x = x_norm(&flow, &u0, &spec, &grid).map_err(norm_error)?;
    let mut csv = Vec::new();
    x.write_csv(&mut csv)?;
    out.write("norms.csv", &csv)?;

    let mut report = serde_json::Map::new();
    report.insert("x_norm".into(), json!({ "value": x.value, "argmax": x.argmax }));
    if !ns.semigroup_t0.is_empty() {
        let rows = semigroup_probe(&flow, &u0, &spec, &grid, &ns.semigroup_t0, ns.slack).map_err(norm_error)?;
        for r in rows.iter().filter(|r| !r.holds) {
            eprintln!("finding: semigroup bound exceeded at t0 = {} (ratio {:.4})", r.t0, r.ratio);
        }
        report.insert("semigroup_probe".into(), to_value(rows));
    }
    if let Some(g) = &ns.growth_grid {
        let fit = growth_fit(&flow, &u0, &spec, &g.points()).map_err(norm_error)?;
        report.insert(
            "growth_fit".into(),
            json!({ "exponent_estimate": fit.exponent_estimate, "residual": fit.residual, "rows": fit.rows }),
        );
    }
    if let Some(m) = &ns.modulation {
        let r = modulation_norm(&flow, &u0, &ModSpec { p: m.p, q: m.q, s: m.s }).map_err(norm_error)?;
        let mut emb = serde_json::Map::new();
        for p in [int(2), int(4)] {
            emb.insert(exact_string(&p), to_value(embedding_ratio(&flow, &u0, p).map_err(norm_error)?));
        }
        report.insert("modulation".into(), json!({ "norm": r, "embedding_ratio": emb }));
    }
    out.write_json("norms.json", &Value::Object(report))?;
    let hash = out.finish("norms", &bytes)?;
    println!("x-norm {:.6e} at T = {} manifest {hash}", x.value, x.argmax);
    Ok(())
}
