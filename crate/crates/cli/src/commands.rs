use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use henon_core::continuation::{
    bracket, continue_parameter, coupled_root, fit_sqrt_law, fit_window, primary_planar_root,
    ContinuationOptions, ContinuationParam, MapKind, ProblemTemplate,
};
use henon_core::dynamics::{
    default_y2_star, horseshoe_strips, iterate_orbits, sample_manifold_grid, slice_4d, vertical_bands,
    MeshSource,
};
use henon_core::homoclinic::distance_profile;
use henon_core::io;
use henon_core::manifold2d::{compute_coeffs_2d, validity_profile_2d, DEFAULT_PROFILE_SAMPLES};
use henon_core::manifold4d::{compute_coeffs_4d, default_thetas, validity_profile_4d};
use henon_core::reproduce::run_all;
use henon_core::{Branch, PhaseMap, Point4D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{config_err, RunConfig};
use crate::{
    BranchArg, ContinueArgs, HomoclinicArgs, HorseshoeArgs, ManifoldArgs, MeshArgs, OrbitArgs, ParamArg,
    ReproduceArgs, SliceArgs,
};

const POLAR_PROFILE_SAMPLES: usize = 201;

fn resolved(cfg: &RunConfig, command: &str, options: Value) -> Value {
    json!({ "command": command, "run": cfg, "options": options })
}

struct Output {
    path: PathBuf,
    w: BufWriter<File>,
}

impl Output {
    fn create(cfg: &RunConfig, name: &str) -> Result<Self> {
        fs::create_dir_all(&cfg.out)
            .with_context(|| format!("cannot create output directory {}", cfg.out.display()))?;
        let path = cfg.out.join(name);
        let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        Ok(Self {
            path,
            w: BufWriter::new(file),
        })
    }

    fn finish(mut self) -> Result<()> {
        self.w
            .flush()
            .with_context(|| format!("cannot write {}", self.path.display()))?;
        println!("wrote {}", self.path.display());
        Ok(())
    }
}

fn write_with(
    cfg: &RunConfig,
    name: &str,
    f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let mut out = Output::create(cfg, name)?;
    f(&mut out.w).with_context(|| format!("cannot write {}", out.path.display()))?;
    out.finish()
}

fn write_json<T: Serialize>(cfg: &RunConfig, name: &str, config: &Value, data: &T) -> Result<()> {
    write_with(cfg, name, |w| io::write_json(w, config, data))
}

fn branches(b: BranchArg) -> Vec<Branch> {
    match b {
        BranchArg::Unstable => vec![Branch::Unstable],
        BranchArg::Stable => vec![Branch::Stable],
        BranchArg::Both => vec![Branch::Unstable, Branch::Stable],
    }
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Unstable => "unstable",
        Branch::Stable => "stable",
    }
}

fn phase_map(cfg: &RunConfig) -> Box<dyn PhaseMap> {
    match cfg.map {
        MapKind::Planar => Box::new(cfg.params_2d()),
        MapKind::Coupled => Box::new(cfg.params_4d()),
    }
}

fn dim(cfg: &RunConfig) -> usize {
    match cfg.map {
        MapKind::Planar => 2,
        MapKind::Coupled => 4,
    }
}

fn template(cfg: &RunConfig, n_u: usize, n_s: usize) -> ProblemTemplate {
    let base = match cfg.map {
        MapKind::Planar => ProblemTemplate::planar(cfg.c, cfg.delta, cfg.order),
        MapKind::Coupled => ProblemTemplate::coupled(cfg.c, cfg.delta, cfg.b, cfg.order),
    };
    ProblemTemplate {
        n_u,
        n_s,
        tol: cfg.tol,
        max_iters: cfg.max_iters,
        ..base
    }
}

fn default_root(t: &ProblemTemplate) -> henon_core::Result<henon_core::homoclinic::HomoclinicSolution> {
    match t.map {
        MapKind::Planar => primary_planar_root(t),
        MapKind::Coupled => coupled_root(t),
    }
}

pub fn manifold(cfg: &RunConfig, a: &ManifoldArgs) -> Result<()> {
    if !(a.radius > 0.0) || a.thetas == 0 || a.samples.is_some_and(|n| n < 2) {
        return Err(config_err("need radius > 0, thetas >= 1 and samples >= 2"));
    }
    for branch in branches(a.branch) {
        let name = branch_name(branch);
        match cfg.map {
            MapKind::Planar => {
                let samples = a.samples.unwrap_or(DEFAULT_PROFILE_SAMPLES);
                let s = compute_coeffs_2d(cfg.params_2d(), branch, cfg.order)?;
                let profile = validity_profile_2d(&s, cfg.epsilon, a.radius, samples)?;
                let config = resolved(cfg, "manifold", json!({"branch": name, "radius": a.radius, "samples": samples}));
                println!("{name}: lambda = {}, tau = {}", s.lambda, profile.tau);
                write_json(cfg, &format!("manifold_{name}.json"), &config, &json!({"series": s, "profile": profile}))?;
            }
            MapKind::Coupled => {
                let samples = a.samples.unwrap_or(POLAR_PROFILE_SAMPLES);
                let s = compute_coeffs_4d(cfg.params_4d(), branch, cfg.order)?;
                let thetas = default_thetas(a.thetas);
                let profile = validity_profile_4d(&s, cfg.epsilon, a.radius, &thetas, samples)?;
                let config = resolved(
                    cfg,
                    "manifold",
                    json!({"branch": name, "radius": a.radius, "samples": samples, "thetas": a.thetas}),
                );
                println!("{name}: lambdas = ({}, {}), r_valid = {}", s.lambdas.0, s.lambdas.1, profile.r_valid);
                write_json(cfg, &format!("manifold_{name}.json"), &config, &json!({"series": s, "profile": profile}))?;
            }
        }
    }
    Ok(())
}

pub fn homoclinic(cfg: &RunConfig, a: &HomoclinicArgs) -> Result<()> {
    if a.n_min > a.n_max || !(a.escape > 0.0) {
        return Err(config_err("need n_min <= n_max and escape > 0"));
    }
    let t = template(cfg, a.n_u, a.n_s);
    let sol = match &a.guess {
        Some(g) if g.len() != dim(cfg) => {
            return Err(config_err(format!("guess needs {} numbers", dim(cfg))))
        }
        Some(g) => t.solve(g)?,
        None => default_root(&t)?,
    };
    let profile = distance_profile(phase_map(cfg).as_ref(), &sol.point, a.n_min, a.n_max, a.escape);
    let config = resolved(
        cfg,
        "homoclinic",
        json!({"n_u": a.n_u, "n_s": a.n_s, "guess": a.guess, "n_min": a.n_min, "n_max": a.n_max, "escape": a.escape}),
    );
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.15}")).collect::<Vec<_>>().join(", ");
    println!("root parameters: ({})", fmt(&sol.root_params));
    println!("homoclinic point: ({})", fmt(&sol.point));
    println!("residual {:e}, transversality det {}", sol.residual, sol.transversality_det);
    println!("min distance {:e} at n = {}", profile.min_distance, profile.argmin);
    write_json(
        cfg,
        "homoclinic.json",
        &config,
        &json!({"solution": sol, "n_u": a.n_u, "n_s": a.n_s, "trust_radius": t.trust_radius}),
    )?;
    write_with(cfg, "distance.csv", |w| io::write_distance_csv(w, &config, &profile))
}

#[derive(Serialize)]
struct TangencyReport {
    param: &'static str,
    from: f64,
    to: f64,
    last_success: Option<f64>,
    first_failure: Option<f64>,
    fit: Option<henon_core::continuation::TangencyFit>,
    fit_error: Option<String>,
    fit_points: Vec<(f64, f64)>,
}

pub fn continuation(cfg: &RunConfig, a: &ContinueArgs) -> Result<()> {
    let param = match a.param {
        ParamArg::Delta => ContinuationParam::Delta,
        ParamArg::B => ContinuationParam::B,
    };
    if param == ContinuationParam::B && cfg.map == MapKind::Planar {
        return Err(config_err("the 2d map has no coupling parameter b"));
    }
    let base = template(cfg, a.n_u, a.n_s);
    let from = a.from.unwrap_or(base.param(param));
    let valid = |v: f64| match param {
        ContinuationParam::Delta => v > 0.0 && v <= 1.0,
        ContinuationParam::B => v >= 0.0 && v.is_finite(),
    };
    if !(valid(from) && valid(a.to)) {
        return Err(config_err(format!("continuation range {from} -> {} is outside the parameter domain", a.to)));
    }
    let mut opts = ContinuationOptions::for_param(param);
    if let Some(h) = a.step {
        opts.initial_step = h;
    }
    if let Some(h) = a.min_step {
        opts.min_step = h;
    }
    if !(opts.min_step > 0.0 && opts.initial_step >= opts.min_step) || !(a.fit_window > 0.0) {
        return Err(config_err("need 0 < min_step <= step and fit_window > 0"));
    }
    let start_template = base.with_param(param, from);
    let start = default_root(&start_template)?;
    let recs = continue_parameter(&start_template, param, &start.root_params, from, a.to, &opts)?;
    let (last_success, first_failure) = bracket(&recs);
    let (fit, fit_error, fit_points) = match param {
        ContinuationParam::Delta => {
            let pts = fit_window(&recs, a.fit_window);
            match fit_sqrt_law(&pts) {
                Ok(f) => (Some(f), None, pts),
                Err(e) => (None, Some(e.to_string()), pts),
            }
        }
        ContinuationParam::B => (None, Some("the square-root law applies to delta".into()), Vec::new()),
    };
    let name = match param {
        ContinuationParam::Delta => "delta",
        ContinuationParam::B => "b",
    };
    let config = resolved(
        cfg,
        "continue",
        json!({
            "param": name, "from": from, "to": a.to, "n_u": a.n_u, "n_s": a.n_s,
            "step": opts.initial_step, "min_step": opts.min_step, "fit_window": a.fit_window,
        }),
    );
    let show = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.8}"));
    println!("last success: {}", show(last_success));
    println!("first failure: {}", show(first_failure));
    match (&fit, &fit_error) {
        (Some(f), _) => println!("fit: delta_c = {:.10}, a = {}, rms {:e}", f.delta_c, f.amplitude_a, f.residual_rms),
        (None, Some(e)) => println!("fit: {e}"),
        _ => {}
    }
    write_with(cfg, "continuation.csv", |w| io::write_continuation_csv(w, &config, &recs))?;
    let report = TangencyReport {
        param: name,
        from,
        to: a.to,
        last_success,
        first_failure,
        fit,
        fit_error,
        fit_points,
    };
    write_json(cfg, "tangency.json", &config, &report)
}

fn period_two(d: usize) -> Vec<f64> {
    let xe = 1.0 / 6f64.sqrt();
    [xe, -xe].iter().copied().cycle().take(d).collect()
}

fn random_starts(rng: &mut ChaCha8Rng, center: &[f64], radius: f64, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|_| center.iter().map(|c| c + rng.gen_range(-radius..=radius)).collect())
        .collect()
}

fn check_points(points: &[Vec<f64>], d: usize) -> Result<()> {
    match points.iter().find(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
        Some(p) => Err(config_err(format!("point {p:?} must have {d} finite coordinates"))),
        None => Ok(()),
    }
}

pub fn orbit(cfg: &RunConfig, a: &OrbitArgs) -> Result<()> {
    let d = dim(cfg);
    if !(a.radius >= 0.0) || !(a.escape > 0.0) {
        return Err(config_err("need radius >= 0 and escape > 0"));
    }
    let center = a.center.clone().unwrap_or_else(|| period_two(d));
    check_points(std::slice::from_ref(&center), d)?;
    check_points(&a.start, d)?;
    let mut starts = a.start.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    starts.extend(random_starts(&mut rng, &center, a.radius, a.random));
    if starts.is_empty() {
        starts.push(period_two(d));
        starts.push([0.6, -0.6].iter().copied().cycle().take(d).collect());
    }
    let orbits = iterate_orbits(phase_map(cfg).as_ref(), &starts, a.steps, a.escape);
    let escaped = orbits.iter().filter(|o| o.escaped).count();
    println!("{} orbits, {escaped} escaped", orbits.len());
    let config = resolved(
        cfg,
        "orbit",
        json!({"starts": starts, "steps": a.steps, "escape": a.escape}),
    );
    write_with(cfg, "orbits.csv", |w| io::write_orbits_csv(w, &config, &orbits))
}

pub fn horseshoe(cfg: &RunConfig, a: &HorseshoeArgs) -> Result<()> {
    if !(a.a > 0.0) || a.grid < 2 {
        return Err(config_err("need a > 0 and grid >= 2"));
    }
    let sets = horseshoe_strips(a.a, a.grid)?;
    let bands = vertical_bands(&sets.forward, sets.grid_n);
    let config = resolved(cfg, "horseshoe", json!({"a": a.a, "grid": a.grid}));
    println!(
        "square {}, Q with f(Q) {}, also f^-1(Q) {}; {} vertical bands",
        sets.square.len(),
        sets.forward.len(),
        sets.both.len(),
        bands.len()
    );
    for (lo, hi) in &bands {
        println!("  band [{lo:.4}, {hi:.4}]");
    }
    write_with(cfg, "horseshoe_forward.csv", |w| {
        io::write_points_csv(w, "horseshoe-forward", &config, &sets.forward)
    })?;
    write_with(cfg, "horseshoe_both.csv", |w| io::write_points_csv(w, "horseshoe-both", &config, &sets.both))?;
    write_json(
        cfg,
        "horseshoe.json",
        &config,
        &json!({
            "counts": {"square": sets.square.len(), "forward": sets.forward.len(), "both": sets.both.len()},
            "bands": bands,
        }),
    )
}

pub fn slice(cfg: &RunConfig, a: &SliceArgs) -> Result<()> {
    if !(a.tolerance > 0.0) || !(a.radius >= 0.0) {
        return Err(config_err("need tolerance > 0 and radius >= 0"));
    }
    check_points(&a.start, 4)?;
    let starts = if a.start.is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        random_starts(&mut rng, &period_two(4), a.radius, a.random)
    } else {
        a.start.clone()
    };
    let seeds: Vec<Point4D> = starts.iter().map(|p| [p[0], p[1], p[2], p[3]]).collect();
    let y2_star = a.y2_star.unwrap_or_else(default_y2_star);
    let points = slice_4d(&cfg.params_4d(), &seeds, a.steps, y2_star, a.tolerance)?;
    println!("{} slice points from {} seeds", points.len(), seeds.len());
    let config = resolved(
        cfg,
        "slice",
        json!({"starts": starts, "steps": a.steps, "tolerance": a.tolerance, "y2_star": y2_star}),
    );
    write_with(cfg, "slice.csv", |w| io::write_slice_csv(w, &config, &points))
}

pub fn mesh(cfg: &RunConfig, a: &MeshArgs) -> Result<()> {
    if a.resolution == 0 {
        return Err(config_err("resolution must be positive"));
    }
    let ranges = match (cfg.map, a.range.len()) {
        (MapKind::Planar, 0) => vec![(-1.5, 1.5)],
        (MapKind::Coupled, 0) => vec![(-1.0, 1.0); 2],
        (MapKind::Planar, 1) | (MapKind::Coupled, 2) => a.range.clone(),
        _ => return Err(config_err("give --range once for 2d and twice for 4d")),
    };
    for branch in branches(a.branch) {
        let name = branch_name(branch);
        let mesh = match cfg.map {
            MapKind::Planar => {
                let s = compute_coeffs_2d(cfg.params_2d(), branch, cfg.order)?;
                sample_manifold_grid(MeshSource::Curve(&s), &ranges, a.resolution)?
            }
            MapKind::Coupled => {
                let s = compute_coeffs_4d(cfg.params_4d(), branch, cfg.order)?;
                sample_manifold_grid(MeshSource::Surface(&s), &ranges, a.resolution)?
            }
        };
        let config = resolved(
            cfg,
            "mesh",
            json!({"branch": name, "ranges": ranges, "resolution": a.resolution}),
        );
        write_with(cfg, &format!("mesh_{name}.txt"), |w| io::write_mesh(w, &config, &mesh))?;
    }
    Ok(())
}

pub fn reproduce(cfg: &RunConfig, a: &ReproduceArgs) -> Result<()> {
    let outcomes = run_all(cfg.seed);
    for o in &outcomes {
        println!("{}", o.line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} checks passed", outcomes.len());
    let config = resolved(cfg, "reproduce-paper", json!({"strict": a.strict}));
    write_json(cfg, "reproduce.json", &config, &outcomes)?;
    if a.strict && passed < outcomes.len() {
        bail!("{} checks failed", outcomes.len() - passed);
    }
    Ok(())
}
