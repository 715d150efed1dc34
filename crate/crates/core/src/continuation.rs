//! Natural-parameter continuation of homoclinic roots in `delta` or `b`, with
//! step halving to bracket the tangency and a square-root law fit of the
//! transversality determinant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homoclinic::{
    find_homoclinic, seed_grid, HomoclinicSolution, MismatchProblem, NewtonOptions, SeedGridOptions,
    DEFAULT_MAX_ITERS, DEFAULT_TOL, DEFAULT_TRUST_2D, DEFAULT_TRUST_4D,
};
use crate::manifold2d::{compute_coeffs_2d, Branch};
use crate::manifold4d::compute_coeffs_4d;
use crate::maps::{MapParams2D, MapParams4D};

pub const DEFAULT_DELTA_STEP: f64 = 1e-3;
pub const DEFAULT_DELTA_MIN_STEP: f64 = 1e-6;
pub const DEFAULT_B_STEP: f64 = 5e-3;
/// `det^2` is visibly curved over a few hundredths in `delta`, so only records
/// this close to the last success enter the linear fit.
pub const DEFAULT_FIT_WINDOW: f64 = 1e-3;
pub const DEFAULT_JUMP_FACTOR: f64 = 10.0;
/// Jumps below this size are always accepted. Close to a tangency the root
/// moves like `sqrt(delta - delta_c)`, far faster than any multiple of the
/// step.
pub const DEFAULT_JUMP_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    #[serde(rename = "2d")]
    Planar,
    #[serde(rename = "4d")]
    Coupled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContinuationParam {
    Delta,
    B,
}

/// Everything needed to rebuild a [`MismatchProblem`] at a new parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemTemplate {
    pub map: MapKind,
    pub c: f64,
    pub delta: f64,
    pub b: f64,
    pub order: usize,
    pub n_u: usize,
    pub n_s: usize,
    pub trust_radius: f64,
    pub tol: f64,
    pub max_iters: usize,
}

impl ProblemTemplate {
    /// One inverse map application on the stable side keeps the stable
    /// arguments of the primary root well inside the trusted range all the
    /// way to the tangency, for both maps.
    pub fn planar(c: f64, delta: f64, order: usize) -> Self {
        Self {
            map: MapKind::Planar,
            c,
            delta,
            b: 0.0,
            order,
            n_u: 0,
            n_s: 1,
            trust_radius: DEFAULT_TRUST_2D,
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn coupled(c: f64, delta: f64, b: f64, order: usize) -> Self {
        Self {
            map: MapKind::Coupled,
            b,
            trust_radius: DEFAULT_TRUST_4D,
            ..Self::planar(c, delta, order)
        }
    }

    pub fn with_param(&self, param: ContinuationParam, value: f64) -> Self {
        let mut t = *self;
        match param {
            ContinuationParam::Delta => t.delta = value,
            ContinuationParam::B => t.b = value,
        }
        t
    }

    pub fn param(&self, param: ContinuationParam) -> f64 {
        match param {
            ContinuationParam::Delta => self.delta,
            ContinuationParam::B => self.b,
        }
    }

    pub fn newton(&self) -> NewtonOptions {
        NewtonOptions {
            tol: self.tol,
            max_iters: self.max_iters,
        }
    }

    pub fn build(&self) -> Result<MismatchProblem> {
        match self.map {
            MapKind::Planar => {
                let p = MapParams2D::new(self.c, self.delta);
                MismatchProblem::new(
                    compute_coeffs_2d(p, Branch::Unstable, self.order)?,
                    compute_coeffs_2d(p, Branch::Stable, self.order)?,
                    self.n_u,
                    self.n_s,
                    self.trust_radius,
                )
            }
            MapKind::Coupled => {
                let p = MapParams4D::new(self.c, self.delta, self.b);
                MismatchProblem::new(
                    compute_coeffs_4d(p, Branch::Unstable, self.order)?,
                    compute_coeffs_4d(p, Branch::Stable, self.order)?,
                    self.n_u,
                    self.n_s,
                    self.trust_radius,
                )
            }
        }
    }

    pub fn solve(&self, seed: &[f64]) -> Result<HomoclinicSolution> {
        find_homoclinic(&self.build()?, seed, self.newton())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationRecord {
    pub param_value: f64,
    pub solution: Option<HomoclinicSolution>,
    pub step_used: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub initial_step: f64,
    pub min_step: f64,
    /// A step is rejected when the root moves by more than
    /// `max(jump_factor * step, jump_floor)`.
    pub jump_factor: f64,
    pub jump_floor: f64,
}

impl ContinuationOptions {
    pub fn for_param(param: ContinuationParam) -> Self {
        match param {
            ContinuationParam::Delta => Self {
                initial_step: DEFAULT_DELTA_STEP,
                min_step: DEFAULT_DELTA_MIN_STEP,
                jump_factor: DEFAULT_JUMP_FACTOR,
                jump_floor: DEFAULT_JUMP_FLOOR,
            },
            ContinuationParam::B => Self {
                initial_step: DEFAULT_B_STEP,
                min_step: DEFAULT_DELTA_MIN_STEP,
                jump_factor: DEFAULT_JUMP_FACTOR,
                jump_floor: DEFAULT_JUMP_FLOOR,
            },
        }
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Steps `param` from `start` toward `end`, re-solving from a secant
/// prediction of the previous roots. A failed step is halved and retried; the
/// run stops at `end` or after a failure with step `<= min_step`, which is
/// recorded with no solution.
pub fn continue_parameter(
    template: &ProblemTemplate,
    param: ContinuationParam,
    start_seed: &[f64],
    start: f64,
    end: f64,
    opts: &ContinuationOptions,
) -> Result<Vec<ContinuationRecord>> {
    if !(opts.min_step > 0.0 && opts.initial_step >= opts.min_step) {
        return Err(Error::InvalidArgument(
            "need 0 < min_step <= initial_step".into(),
        ));
    }
    if !(start.is_finite() && end.is_finite()) {
        return Err(Error::InvalidArgument("non-finite parameter range".into()));
    }
    let first = template
        .with_param(param, start)
        .solve(start_seed)
        .map_err(|e| Error::CannotBegin(e.to_string()))?;
    let dir = (end - start).signum();
    let mut records = vec![ContinuationRecord {
        param_value: start,
        solution: Some(first),
        step_used: 0.0,
    }];
    let mut current = start;
    let mut step = opts.initial_step;
    // previous accepted (param, root) for the secant predictor
    let mut previous: Option<(f64, Vec<f64>)> = None;

    while dir != 0.0 && (end - current) * dir > 0.0 {
        let h = step.min((end - current).abs());
        let next = if (end - current).abs() <= step { end } else { current + dir * h };
        let last_root = records
            .last()
            .and_then(|r| r.solution.as_ref())
            .map(|s| s.root_params.clone())
            .expect("last record holds a solution");
        let seed = match &previous {
            Some((p0, r0)) => {
                let ratio = (next - current) / (current - p0);
                last_root
                    .iter()
                    .zip(r0)
                    .map(|(x1, x0)| x1 + ratio * (x1 - x0))
                    .collect()
            }
            None => last_root.clone(),
        };
        let attempt = template
            .with_param(param, next)
            .solve(&seed)
            .or_else(|_| template.with_param(param, next).solve(&last_root));
        let limit = (opts.jump_factor * h).max(opts.jump_floor);
        match attempt {
            Ok(sol) if distance(&sol.root_params, &last_root) <= limit => {
                previous = Some((current, last_root));
                current = next;
                records.push(ContinuationRecord {
                    param_value: next,
                    solution: Some(sol),
                    step_used: h,
                });
            }
            _ => {
                if h <= opts.min_step {
                    records.push(ContinuationRecord {
                        param_value: next,
                        solution: None,
                        step_used: h,
                    });
                    break;
                }
                step = h / 2.0;
            }
        }
    }
    Ok(records)
}

/// Last parameter value with a solution and, if the run stopped early, the
/// first value without one.
pub fn bracket(records: &[ContinuationRecord]) -> (Option<f64>, Option<f64>) {
    let last_ok = records
        .iter()
        .rev()
        .find(|r| r.solution.is_some())
        .map(|r| r.param_value);
    let fail = records
        .iter()
        .find(|r| r.solution.is_none())
        .map(|r| r.param_value);
    (last_ok, fail)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangencyFit {
    pub amplitude_a: f64,
    pub delta_c: f64,
    pub residual_rms: f64,
    pub points_used: usize,
}

/// Least-squares line through `(delta, det^2)`: `det^2 = a^2 (delta - delta_c)`.
pub fn fit_sqrt_law(records: &[(f64, f64)]) -> Result<TangencyFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|(d, det)| d.is_finite() && det.is_finite() && *det != 0.0)
        .map(|&(d, det)| (d, det * det))
        .collect();
    let n = pts.len();
    if n < 3 {
        return Err(Error::FitInvalid(format!(
            "need at least 3 records with nonzero determinant, got {n}"
        )));
    }
    let nf = n as f64;
    // center for conditioning
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::FitInvalid("all records share one delta".into()));
    }
    let slope = sxy / sxx;
    if !(slope > 0.0) {
        return Err(Error::FitInvalid(format!(
            "slope {slope} is not positive; data do not follow a square-root law"
        )));
    }
    let intercept = my - slope * mx;
    let delta_c = -intercept / slope;
    let residual_rms = (pts
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Ok(TangencyFit {
        amplitude_a: slope.sqrt(),
        delta_c,
        residual_rms,
        points_used: n,
    })
}

/// `(delta, det)` pairs of successful records within `window` of the last
/// success.
pub fn fit_window(records: &[ContinuationRecord], window: f64) -> Vec<(f64, f64)> {
    let Some(edge) = bracket(records).0 else {
        return Vec::new();
    };
    records
        .iter()
        .filter_map(|r| {
            let s = r.solution.as_ref()?;
            ((r.param_value - edge).abs() < window).then_some((r.param_value, s.transversality_det))
        })
        .collect()
}

/// Best grid cells tried by [`primary_planar_root`].
pub const PRIMARY_SEED_LIMIT: usize = 40;

/// Distinct roots reached by Newton from the ranked cells of a seed grid
/// over `bounds`.
pub fn grid_roots(
    template: &ProblemTemplate,
    bounds: &[(f64, f64)],
    opts: &SeedGridOptions,
) -> Result<Vec<HomoclinicSolution>> {
    let prob = template.build()?;
    let seeds = seed_grid(&prob, bounds, opts)?;
    let found: Vec<HomoclinicSolution> = seeds
        .par_iter()
        .filter_map(|s| find_homoclinic(&prob, s, template.newton()).ok())
        .collect();
    let mut distinct: Vec<HomoclinicSolution> = Vec::new();
    for s in found {
        let new = distinct.iter().all(|d| {
            d.root_params
                .iter()
                .zip(&s.root_params)
                .any(|(a, b)| (a - b).abs() > 1e-8)
        });
        if new {
            distinct.push(s);
        }
    }
    Ok(distinct)
}

fn l1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// The planar root with positive unstable parameter closest to the origin in
/// parameter space, searched with no map iterations and re-solved for the
/// iteration counts of `template`.
pub fn primary_planar_root(template: &ProblemTemplate) -> Result<HomoclinicSolution> {
    if template.map != MapKind::Planar {
        return Err(Error::InvalidArgument("primary planar root needs a 2d template".into()));
    }
    let direct = ProblemTemplate {
        n_u: 0,
        n_s: 0,
        ..*template
    };
    let r = template.trust_radius;
    let roots = grid_roots(
        &direct,
        &[(-r, r); 2],
        &SeedGridOptions {
            limit: PRIMARY_SEED_LIMIT,
            ..Default::default()
        },
    )?;
    let sol = roots
        .into_iter()
        .filter(|s| s.root_params[0] > 0.0)
        .min_by(|a, b| l1(&a.root_params).total_cmp(&l1(&b.root_params)))
        .ok_or_else(|| Error::NoRoot(format!("seed grid at delta = {}", template.delta)))?;
    if (template.n_u, template.n_s) == (0, 0) {
        return Ok(sol);
    }
    let seed = direct
        .build()?
        .transfer_root(&sol.root_params, template.n_u, template.n_s);
    template.solve(&seed)
}

fn last_solution(recs: &[ContinuationRecord], target: f64, what: &str) -> Result<HomoclinicSolution> {
    match recs.last() {
        Some(ContinuationRecord {
            param_value,
            solution: Some(s),
            ..
        }) if *param_value == target => Ok(s.clone()),
        last => Err(Error::NoRoot(format!(
            "{what} continuation stopped at {}",
            last.map_or(f64::NAN, |r| r.param_value)
        ))),
    }
}

/// Coupled root obtained by embedding the primary planar root of the
/// `delta = 1` map in the symmetric mode at `b = 0`, continuing `b` up to
/// the template value and then `delta` to the template value.
pub fn coupled_root(template: &ProblemTemplate) -> Result<HomoclinicSolution> {
    if template.map != MapKind::Coupled {
        return Err(Error::InvalidArgument("coupled root needs a 4d template".into()));
    }
    let planar = primary_planar_root(&ProblemTemplate {
        n_u: 0,
        n_s: 0,
        ..ProblemTemplate::planar(template.c, 1.0, template.order)
    })?;
    // the b = 0 surfaces are products of planar curves along (u +- v)/sqrt 2
    let [tu, ts] = planar.root_params[..] else {
        unreachable!("planar roots have two parameters")
    };
    let (tu, ts) = (tu / 2f64.sqrt(), ts / 2f64.sqrt());
    let at_unit = template.with_param(ContinuationParam::Delta, 1.0);
    let start = at_unit.with_param(ContinuationParam::B, 0.0);
    let seed = ProblemTemplate {
        n_u: 0,
        n_s: 0,
        ..start
    }
    .build()?
    .transfer_root(&[tu, tu, ts, ts], template.n_u, template.n_s);
    let mut sol = start.solve(&seed)?;
    for (param, from, to, from_template) in [
        (ContinuationParam::B, 0.0, template.b, start),
        (ContinuationParam::Delta, 1.0, template.delta, at_unit),
    ] {
        if to != from {
            let opts = ContinuationOptions::for_param(param);
            let recs = continue_parameter(&from_template, param, &sol.root_params, from, to, &opts)?;
            sol = last_solution(&recs, to, &format!("{param:?}"))?;
        }
    }
    Ok(sol)
}
