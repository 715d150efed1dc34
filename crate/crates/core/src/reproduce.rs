//! The published reference checks, each reduced to a pass/fail outcome with
//! the measured numbers attached.

use nalgebra::{Matrix2, Matrix4};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::continuation::{
    bracket, continue_parameter, coupled_root, fit_sqrt_law, fit_window, primary_planar_root,
    ContinuationOptions, ContinuationParam, ProblemTemplate, DEFAULT_FIT_WINDOW,
};
use crate::dynamics::{horseshoe_strips, iterate_orbit, vertical_bands, DEFAULT_HORSESHOE_A, DEFAULT_HORSESHOE_GRID};
use crate::exact::{coupled_exact_nonzero, planar_exact_nonzero};
use crate::homoclinic::{
    distance_profile, find_homoclinic, seed_grid, HomoclinicSolution, MismatchProblem, NewtonOptions,
    SeedGridOptions, DEFAULT_ESCAPE_RADIUS, DEFAULT_TRUST_2D,
};
use crate::manifold2d::{compute_coeffs_2d, series_from_symmetry, validity_profile_2d, Branch};
use crate::manifold4d::{compute_coeffs_4d, default_thetas, validity_profile_4d, DEFAULT_THETA_COUNT};
use crate::maps::{MapParams2D, MapParams4D};

pub const CRITERIA_COUNT: usize = 12;

const C: f64 = -2.5;
/// Published homoclinic point of the planar map at `delta = 1`.
pub const PLANAR_POINT: [f64; 2] = [0.545271067753899, -0.545271067753900];
pub const PLANAR_ROOT: [f64; 2] = [1.5849, -1.5849];
pub const PLANAR_DELTA_C: f64 = 0.971397;
pub const PLANAR_DELTA_C_FIT: f64 = 0.9713965579;
pub const COUPLED_POINT: [f64; 4] = [0.46521450, -0.49858860, -0.08725131, 0.08972831];
pub const COUPLED_DELTA_C: f64 = 0.99601;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2}. {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail
        )
    }
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "origin spectrum",
        2 => "planar series validity",
        3 => "symmetry of stable and unstable series",
        4 => "planar homoclinic point",
        5 => "distance diagnostic",
        6 => "planar tangency",
        7 => "no intersection below tangency",
        8 => "uncoupled homoclinic points",
        9 => "coupled homoclinic point",
        10 => "coupled tangency",
        11 => "coupled series validity",
        12 => "property suites",
        _ => "unknown",
    }
}

/// Runs one check; `seed` drives the sampled parts.
pub fn run_criterion(id: usize, seed: u64) -> CriterionOutcome {
    let result = match id {
        1 => spectrum(),
        2 => planar_validity(),
        3 => symmetry(),
        4 => planar_homoclinic().map(|(_, o)| o),
        5 => distance(),
        6 => planar_tangency(),
        7 => nonexistence(),
        8 => uncoupled(),
        9 => coupled_point(),
        10 => coupled_tangency(),
        11 => coupled_validity(),
        12 => properties(seed),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match result {
        Ok(o) => o,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionOutcome {
        id,
        title: title(id).to_string(),
        passed,
        detail,
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    (1..=CRITERIA_COUNT)
        .into_par_iter()
        .map(|id| run_criterion(id, seed))
        .collect()
}

type Outcome = std::result::Result<(bool, String), String>;

fn err(e: crate::Error) -> String {
    e.to_string()
}

fn spectrum() -> Outcome {
    let s = MapParams2D::new(C, 1.0).eigen_origin().map_err(err)?;
    let (lu, ls) = (s.unstable_eigenvalues[0], s.stable_eigenvalues[0]);
    let ok = (lu + 2.0).abs() <= 1e-14 && (ls + 0.5).abs() <= 1e-14;
    Ok((ok, format!("lambda_u = {lu:.17}, lambda_s = {ls:.17}")))
}

fn planar_validity() -> Outcome {
    let p = MapParams2D::new(C, 1.0);
    let s34 = compute_coeffs_2d(p, Branch::Unstable, 34).map_err(err)?;
    let tau34 = validity_profile_2d(&s34, 1e-15, 2.0, 1000).map_err(err)?.tau;
    let s100 = compute_coeffs_2d(p, Branch::Unstable, 100).map_err(err)?;
    let tau100 = validity_profile_2d(&s100, 2e-14, 2.0, 1000).map_err(err)?.tau;
    let e_max = (0..=1000)
        .map(|k| s100.defining_error(-1.6 + 3.2 * k as f64 / 1000.0))
        .fold(0.0, f64::max);
    let ok = tau34 >= 0.75 && tau100 >= 1.5 && e_max < 4e-14;
    Ok((
        ok,
        format!("tau(N=34, 1e-15) = {tau34:.4}, tau(N=100, 2e-14) = {tau100:.4}, max E on |t|<=1.6 = {e_max:.2e}"),
    ))
}

fn symmetry() -> Outcome {
    let p = MapParams2D::new(C, 1.0);
    let swapped = series_from_symmetry(&compute_coeffs_2d(p, Branch::Unstable, 100).map_err(err)?).map_err(err)?;
    let direct = compute_coeffs_2d(p, Branch::Stable, 100).map_err(err)?;
    let diff = swapped
        .coeffs_a
        .iter()
        .zip(&direct.coeffs_a)
        .chain(swapped.coeffs_b.iter().zip(&direct.coeffs_b))
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok((diff <= 1e-12, format!("max coefficient difference over orders <= 100: {diff:.2e}")))
}

fn planar_problem(delta: f64) -> Result<MismatchProblem, String> {
    let p = MapParams2D::new(C, delta);
    MismatchProblem::new(
        compute_coeffs_2d(p, Branch::Unstable, 100).map_err(err)?,
        compute_coeffs_2d(p, Branch::Stable, 100).map_err(err)?,
        0,
        0,
        DEFAULT_TRUST_2D,
    )
    .map_err(err)
}

fn grid_bounds_2d() -> Vec<(f64, f64)> {
    vec![(-DEFAULT_TRUST_2D, DEFAULT_TRUST_2D); 2]
}

/// The primary root on the branch with positive unstable parameter.
fn planar_homoclinic() -> Result<(HomoclinicSolution, (bool, String)), String> {
    let template = ProblemTemplate {
        n_s: 0,
        ..ProblemTemplate::planar(C, 1.0, 100)
    };
    let sol = primary_planar_root(&template).map_err(err)?;
    let (t, x) = (&sol.root_params, &sol.point);
    let root_ok = (t[0] - PLANAR_ROOT[0]).abs() <= 1e-3 && (t[1] - PLANAR_ROOT[1]).abs() <= 1e-3;
    let point_ok = (x[0] - PLANAR_POINT[0]).abs() <= 1e-9 && (x[1] - PLANAR_POINT[1]).abs() <= 1e-9;
    let anti_t = (t[0] + t[1]).abs();
    let anti_x = (x[0] + x[1]).abs();
    let ok = root_ok && point_ok && anti_t < 1e-9 && anti_x < 1e-9;
    let detail = format!(
        "root ({:.6}, {:.6}), point ({:.15}, {:.15}), |t_u+t_s| = {anti_t:.1e}, |x+y| = {anti_x:.1e}, det = {:.5}",
        t[0], t[1], x[0], x[1], sol.transversality_det
    );
    Ok((sol, (ok, detail)))
}

fn distance() -> Outcome {
    let (sol, _) = planar_homoclinic()?;
    let p = MapParams2D::new(C, 1.0);
    let prof = distance_profile(&p, &sol.point, -20, 20, DEFAULT_ESCAPE_RADIUS);
    let wide = distance_profile(&p, &sol.point, -40, 40, DEFAULT_ESCAPE_RADIUS);
    Ok((
        prof.min_distance < 1e-8,
        format!(
            "min d_n over [-20, 20] = {:.3e} at n = {}; over [-40, 40] = {:.3e} at n = {}",
            prof.min_distance, prof.argmin, wide.min_distance, wide.argmin
        ),
    ))
}

fn planar_tangency() -> Outcome {
    let (sol, _) = planar_homoclinic()?;
    let template = ProblemTemplate::planar(C, 1.0, 100);
    let direct = ProblemTemplate { n_s: 0, ..template }.build().map_err(err)?;
    let seed = direct.transfer_root(&sol.root_params, template.n_u, template.n_s);
    let param = ContinuationParam::Delta;
    let recs = continue_parameter(&template, param, &seed, 1.0, 0.9, &ContinuationOptions::for_param(param))
        .map_err(err)?;
    let (ok, fail) = bracket(&recs);
    let ok = ok.ok_or("continuation produced no solution")?;
    let fit = fit_sqrt_law(&fit_window(&recs, DEFAULT_FIT_WINDOW)).map_err(err)?;
    let pass = (ok - PLANAR_DELTA_C).abs() <= 1e-5
        && fail.is_some()
        && (fit.delta_c - PLANAR_DELTA_C_FIT).abs() <= 1e-5
        && fit.residual_rms.is_finite();
    Ok((
        pass,
        format!(
            "last success {ok:.8}, first failure {}, fit delta_c = {:.10} (a = {:.5}, rms {:.1e}, {} points)",
            fail.map_or("none".into(), |f| format!("{f:.8}")),
            fit.delta_c,
            fit.amplitude_a,
            fit.residual_rms,
            fit.points_used
        ),
    ))
}

fn nonexistence() -> Outcome {
    let prob = planar_problem(0.96)?;
    let seeds = seed_grid(&prob, &grid_bounds_2d(), &SeedGridOptions::default()).map_err(err)?;
    let roots: Vec<Vec<f64>> = seeds
        .par_iter()
        .filter_map(|s| find_homoclinic(&prob, s, NewtonOptions::default()).ok())
        .map(|s| s.root_params)
        .collect();
    Ok((
        roots.is_empty(),
        format!("{} seeds tried, {} non-trivial roots found", seeds.len(), roots.len()),
    ))
}

fn uncoupled() -> Outcome {
    let (sol, _) = planar_homoclinic()?;
    let xh = &sol.point;
    let template = ProblemTemplate {
        n_s: 0,
        ..ProblemTemplate::coupled(C, 1.0, 0.0, 50)
    };
    // the b = 0 surfaces are products of planar curves along (u +- v)/sqrt 2
    let (tu, ts) = (sol.root_params[0] / 2f64.sqrt(), sol.root_params[1] / 2f64.sqrt());
    let first = template.solve(&[tu, tu, ts, ts]).map_err(err)?;
    let second = template.solve(&[tu, -tu, ts, -ts]).map_err(err)?;
    let d1 = max_diff(&first.point, &[xh[0], xh[1], 0.0, 0.0]);
    let d2 = max_diff(&second.point, &[0.0, 0.0, xh[0], xh[1]]);
    Ok((
        d1 <= 1e-9 && d2 <= 1e-9,
        format!("deviation from (x, y, 0, 0): {d1:.1e}; from (0, 0, x, y): {d2:.1e}"),
    ))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Root at `b = 0.1, delta = 1` reached from the uncoupled one by raising `b`.
fn coupled_start(template: &ProblemTemplate) -> Result<Vec<f64>, String> {
    coupled_root(template).map(|s| s.root_params).map_err(err)
}

fn coupled_point() -> Outcome {
    let template = ProblemTemplate {
        n_s: 0,
        ..ProblemTemplate::coupled(C, 1.0, 0.1, 50)
    };
    let start = coupled_start(&template)?;
    let param = ContinuationParam::Delta;
    let recs = continue_parameter(&template, param, &start, 1.0, 0.997, &ContinuationOptions::for_param(param))
        .map_err(err)?;
    let last = recs.last().ok_or("empty delta continuation")?;
    let sol = match &last.solution {
        Some(s) if last.param_value == 0.997 => s.clone(),
        _ => return Err(format!("delta continuation stopped at {}", last.param_value)),
    };
    let d = max_diff(&sol.point, &COUPLED_POINT);
    let r = sol.root_params.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let p = &sol.point;
    Ok((
        d <= 1e-6 && r < 1.16,
        format!(
            "point ({:.8}, {:.8}, {:.8}, {:.8}), max deviation {d:.1e}, max |root parameter| {r:.4}",
            p[0], p[1], p[2], p[3]
        ),
    ))
}

fn coupled_tangency() -> Outcome {
    let template = ProblemTemplate::coupled(C, 1.0, 0.1, 50);
    let start = coupled_start(&template)?;
    let param = ContinuationParam::Delta;
    let recs = continue_parameter(&template, param, &start, 1.0, 0.98, &ContinuationOptions::for_param(param))
        .map_err(err)?;
    let (ok, fail) = bracket(&recs);
    let ok = ok.ok_or("continuation produced no solution")?;
    let fit = fit_sqrt_law(&fit_window(&recs, DEFAULT_FIT_WINDOW)).map_err(err)?;
    let last_root = recs
        .iter()
        .rev()
        .find_map(|r| r.solution.as_ref())
        .map(|s| s.root_params.clone())
        .expect("bracket found a success");
    // at delta = 0.99: the continued root and the best cells of a coarse grid
    let at = template.with_param(param, 0.99);
    let prob = at.build().map_err(err)?;
    let mut seeds = seed_grid(
        &prob,
        &[(-1.2, 1.2); 4],
        &SeedGridOptions {
            resolution: 9,
            limit: 200,
            ..Default::default()
        },
    )
    .map_err(err)?;
    seeds.push(last_root);
    let found = seeds
        .par_iter()
        .filter(|s| find_homoclinic(&prob, s, at.newton()).is_ok())
        .count();
    let pass = (ok - COUPLED_DELTA_C).abs() <= 5e-4 && fail.is_some() && found == 0;
    Ok((
        pass,
        format!(
            "last success {ok:.6}, fit delta_c = {:.6}; roots at delta = 0.99 from {} seeds: {found}",
            fit.delta_c,
            seeds.len()
        ),
    ))
}

fn coupled_validity() -> Outcome {
    let thetas = default_thetas(DEFAULT_THETA_COUNT);
    let mut parts = Vec::new();
    let mut ok = true;
    for b in [0.0, 0.1] {
        let p = MapParams4D::new(C, 1.0, b);
        for branch in [Branch::Unstable, Branch::Stable] {
            let s = compute_coeffs_4d(p, branch, 50).map_err(err)?;
            let r = validity_profile_4d(&s, 1e-15, 2.0, &thetas, 201).map_err(err)?.r_valid;
            ok &= r >= 1.0;
            parts.push(format!("b={b} {branch:?}: {r:.3}"));
        }
    }
    Ok((ok, format!("r_valid at 1e-15: {}", parts.join(", "))))
}

fn exact_det(m: &[f64], n: usize) -> BigRational {
    // Laplace expansion along the first row, exact in rationals
    if n == 1 {
        return BigRational::from_float(m[0]).expect("finite entry");
    }
    let mut total = BigRational::zero();
    for col in 0..n {
        if m[col] == 0.0 {
            continue;
        }
        let minor: Vec<f64> = (1..n)
            .flat_map(|r| (0..n).filter(move |&c| c != col).map(move |c| (r, c)))
            .map(|(r, c)| m[r * n + c])
            .collect();
        let term = BigRational::from_float(m[col]).expect("finite entry") * exact_det(&minor, n - 1);
        if col % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

fn row_major2(j: Matrix2<f64>) -> Vec<f64> {
    (0..2).flat_map(|r| (0..2).map(move |c| j[(r, c)])).collect()
}

fn row_major4(j: Matrix4<f64>) -> Vec<f64> {
    (0..4).flat_map(|r| (0..4).map(move |c| j[(r, c)])).collect()
}

fn properties(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round_trip = 0.0f64;
    let mut det_exact = true;
    for _ in 0..2000 {
        let c = rng.gen_range(-3.0..-2.1);
        let delta = rng.gen_range(0.5..=1.0);
        let b = rng.gen_range(0.0..0.15);
        let p2 = MapParams2D::new(c, delta);
        let z2 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let back = p2.inverse(p2.apply(z2).map_err(err)?).map_err(err)?;
        round_trip = round_trip.max(max_diff(&back, &z2));
        let p4 = MapParams4D::new(c, delta, b);
        let z4: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let back = p4.inverse(p4.apply(z4).map_err(err)?).map_err(err)?;
        round_trip = round_trip.max(max_diff(&back, &z4));
        let d = BigRational::from_float(delta).expect("finite delta");
        det_exact &= exact_det(&row_major2(p2.jacobian(z2)), 2) == d;
        det_exact &= exact_det(&row_major4(p4.jacobian(z4)), 4) == &d * &d;
    }
    let exact_2d = planar_exact_nonzero(5);
    let exact_4d = coupled_exact_nonzero(5);
    let sets = horseshoe_strips(DEFAULT_HORSESHOE_A, DEFAULT_HORSESHOE_GRID).map_err(err)?;
    let bands = vertical_bands(&sets.forward, sets.grid_n).len();
    let e = 1.0 / 6f64.sqrt();
    let orbit = iterate_orbit(&MapParams2D::new(C, 1.0), &[e, -e], 2, DEFAULT_ESCAPE_RADIUS);
    let cycle = max_diff(&orbit.points[2], &[e, -e]).max(max_diff(&orbit.points[1], &[-e, e]));
    let ok = round_trip < 1e-11 && det_exact && exact_2d == 0 && exact_4d == 0 && bands == 3 && cycle < 1e-12;
    Ok((
        ok,
        format!(
            "round trip {round_trip:.1e}; Jacobian determinants exact: {det_exact}; nonzero exact residual coefficients (N=5) 2-D {exact_2d}, 4-D {exact_4d}; horseshoe bands {bands}; period-2 residual {cycle:.1e}"
        ),
    ))
}
