//! Homoclinic points as non-trivial zeros of the manifold mismatch
//! `Phi(s_u, s_s) = f^{n_u}(P_u(s_u)) - f^{-n_s}(P_s(s_s))`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold2d::{Branch, Series2D};
use crate::manifold4d::Series4D;
use crate::maps::PhaseMap;

/// Radius of the ball around the origin whose roots count as trivial.
pub const TRIVIAL_ROOT_RADIUS: f64 = 1e-6;
/// Componentwise residual accepted as a root.
pub const DEFAULT_TOL: f64 = 1e-13;
pub const DEFAULT_MAX_ITERS: usize = 50;
pub const MAX_HALVINGS: usize = 30;
pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e3;
/// Trusted parameter range for degree-100 planar series.
pub const DEFAULT_TRUST_2D: f64 = 1.6;
/// Trusted sup-norm range of the surface parameters for degree-50 series.
pub const DEFAULT_TRUST_4D: f64 = 1.2;

/// A local (un)stable manifold parametrization of either map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Parametrization {
    Curve(Series2D),
    Surface(Series4D),
}

impl Parametrization {
    pub fn branch(&self) -> Branch {
        match self {
            Self::Curve(s) => s.branch,
            Self::Surface(s) => s.branch,
        }
    }

    /// Number of parameters (1 or 2).
    pub fn param_dim(&self) -> usize {
        match self {
            Self::Curve(_) => 1,
            Self::Surface(_) => 2,
        }
    }

    pub fn phase_dim(&self) -> usize {
        2 * self.param_dim()
    }

    pub fn map(&self) -> &dyn PhaseMap {
        match self {
            Self::Curve(s) => &s.params,
            Self::Surface(s) => &s.params,
        }
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Self::Curve(s) => s.eval(x[0]).to_vec(),
            Self::Surface(s) => s.eval(x[0], x[1]).to_vec(),
        }
    }

    /// Phase-dim x param-dim matrix of partial derivatives.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            Self::Curve(s) => {
                let t = s.tangent(x[0]);
                DMatrix::from_column_slice(2, 1, &t)
            }
            Self::Surface(s) => {
                let j = s.jacobian(x[0], x[1]);
                DMatrix::from_fn(4, 2, |r, c| j[r][c])
            }
        }
    }

    pub fn defining_error(&self, x: &[f64]) -> f64 {
        match self {
            Self::Curve(s) => s.defining_error(x[0]),
            Self::Surface(s) => s.defining_error(x[0], x[1]),
        }
    }

    /// Eigenvalues driving each parameter.
    pub fn lambdas(&self) -> Vec<f64> {
        match self {
            Self::Curve(s) => vec![s.lambda],
            Self::Surface(s) => vec![s.lambdas.0, s.lambdas.1],
        }
    }

    fn params_json(&self) -> serde_json::Value {
        match self {
            Self::Curve(s) => serde_json::to_value(s.params),
            Self::Surface(s) => serde_json::to_value(s.params),
        }
        .expect("parameters serialize")
    }
}

impl From<Series2D> for Parametrization {
    fn from(s: Series2D) -> Self {
        Self::Curve(s)
    }
}

impl From<Series4D> for Parametrization {
    fn from(s: Series4D) -> Self {
        Self::Surface(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MismatchProblem {
    pub unstable: Parametrization,
    pub stable: Parametrization,
    pub n_u: usize,
    pub n_s: usize,
    /// Sup-norm bound on root parameters beyond which the series are not
    /// trusted.
    pub trust_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomoclinicSolution {
    pub root_params: Vec<f64>,
    pub point: Vec<f64>,
    pub residual: f64,
    pub transversality_det: f64,
    pub newton_iters: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub entries: Vec<(i64, f64)>,
    pub min_distance: f64,
    pub argmin: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl MismatchProblem {
    pub fn new(
        unstable: impl Into<Parametrization>,
        stable: impl Into<Parametrization>,
        n_u: usize,
        n_s: usize,
        trust_radius: f64,
    ) -> Result<Self> {
        let (unstable, stable) = (unstable.into(), stable.into());
        if unstable.branch() != Branch::Unstable || stable.branch() != Branch::Stable {
            return Err(Error::InvalidArgument(
                "mismatch needs an unstable and a stable parametrization".into(),
            ));
        }
        if unstable.param_dim() != stable.param_dim()
            || unstable.params_json() != stable.params_json()
        {
            return Err(Error::InvalidArgument(
                "parametrizations belong to different maps".into(),
            ));
        }
        Ok(Self {
            unstable,
            stable,
            n_u,
            n_s,
            trust_radius,
        })
    }

    /// Dimension of the unknown (and of phase space).
    pub fn dim(&self) -> usize {
        self.unstable.phase_dim()
    }

    pub fn map(&self) -> &dyn PhaseMap {
        self.unstable.map()
    }

    /// Re-expresses a root of this problem for the same series with different
    /// iteration counts, using `f^k(P(s)) = P(Lambda^k s)`.
    pub fn transfer_root(&self, x: &[f64], n_u: usize, n_s: usize) -> Vec<f64> {
        let (xu, xs) = self.split(x);
        let ku = self.n_u as i32 - n_u as i32;
        let ks = n_s as i32 - self.n_s as i32;
        let lu = self.unstable.lambdas();
        let ls = self.stable.lambdas();
        xu.iter()
            .zip(&lu)
            .map(|(s, l)| s * l.powi(ku))
            .chain(xs.iter().zip(&ls).map(|(s, l)| s * l.powi(ks)))
            .collect()
    }

    fn split<'a>(&self, x: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        x.split_at(self.unstable.param_dim())
    }

    fn unstable_point(&self, xu: &[f64]) -> Result<Vec<f64>> {
        let mut p = self.unstable.eval(xu);
        for _ in 0..self.n_u {
            p = self.map().forward(&p)?;
        }
        Ok(p)
    }

    fn stable_point(&self, xs: &[f64]) -> Result<Vec<f64>> {
        let mut p = self.stable.eval(xs);
        for _ in 0..self.n_s {
            p = self.map().backward(&p)?;
        }
        Ok(p)
    }

    /// Homoclinic point candidate on the unstable side.
    pub fn point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.unstable_point(self.split(x).0)
    }

    pub fn mismatch(&self, x: &[f64]) -> Result<Vec<f64>> {
        let (xu, xs) = self.split(x);
        let pu = self.unstable_point(xu)?;
        let ps = self.stable_point(xs)?;
        Ok(pu.iter().zip(&ps).map(|(a, b)| a - b).collect())
    }

    /// Tangent vectors of the unstable and stable sides, pushed through the
    /// extra map applications.
    pub fn tangents(&self, x: &[f64]) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let (xu, xs) = self.split(x);
        let map = self.map();
        let mut pu = self.unstable.eval(xu);
        let mut tu = self.unstable.jacobian(xu);
        for _ in 0..self.n_u {
            tu = map.forward_jacobian(&pu) * tu;
            pu = map.forward(&pu)?;
        }
        let mut ps = self.stable.eval(xs);
        let mut ts = self.stable.jacobian(xs);
        for _ in 0..self.n_s {
            ts = map.backward_jacobian(&ps) * ts;
            ps = map.backward(&ps)?;
        }
        Ok((tu, ts))
    }

    pub fn mismatch_jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let (tu, ts) = self.tangents(x)?;
        let k = tu.ncols();
        let mut j = DMatrix::zeros(self.dim(), self.dim());
        j.columns_mut(0, k).copy_from(&tu);
        j.columns_mut(k, k).copy_from(&(-ts));
        Ok(j)
    }

    /// Determinant of `[unstable tangents | stable tangents]` at `x`.
    pub fn transversality_det_at(&self, x: &[f64]) -> Result<f64> {
        let (tu, ts) = self.tangents(x)?;
        let k = tu.ncols();
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        m.columns_mut(0, k).copy_from(&tu);
        m.columns_mut(k, k).copy_from(&ts);
        Ok(m.determinant())
    }
}

pub fn mismatch(prob: &MismatchProblem, x: &[f64]) -> Result<Vec<f64>> {
    prob.mismatch(x)
}

pub fn mismatch_jacobian(prob: &MismatchProblem, x: &[f64]) -> Result<DMatrix<f64>> {
    prob.mismatch_jacobian(x)
}

pub fn transversality_det(prob: &MismatchProblem, solution: &HomoclinicSolution) -> Result<f64> {
    prob.transversality_det_at(&solution.root_params)
}

/// Damped Newton iteration on the mismatch. Full steps are halved up to
/// [`MAX_HALVINGS`] times until the residual norm decreases.
pub fn find_homoclinic(
    prob: &MismatchProblem,
    seed: &[f64],
    opts: NewtonOptions,
) -> Result<HomoclinicSolution> {
    if seed.len() != prob.dim() || seed.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "seed must be {} finite numbers",
            prob.dim()
        )));
    }
    let mut x = seed.to_vec();
    let mut r = prob.mismatch(&x).map_err(|_| Error::NoConvergence {
        iters: 0,
        residual: f64::INFINITY,
    })?;
    let mut iters = 0;
    let mut polished = false;
    loop {
        let converged = max_abs(&r) < opts.tol;
        if (converged && polished) || iters >= opts.max_iters {
            break;
        }
        let Some(dx) = newton_step(prob, &x, &r) else {
            break;
        };
        iters += 1;
        let r_norm = norm(&r);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + alpha * d).collect();
            if let Ok(rt) = prob.mismatch(&trial) {
                // once converged, accept a polishing step that does not worsen
                let better = if converged {
                    norm(&rt) <= r_norm
                } else {
                    norm(&rt) < r_norm
                };
                if better {
                    accepted = Some((trial, rt));
                    break;
                }
            }
            if converged {
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((xn, rn)) => {
                x = xn;
                r = rn;
            }
            None if converged => {}
            None => break,
        }
        polished = converged;
    }
    let residual = max_abs(&r);
    if !(residual < opts.tol) {
        return Err(Error::NoConvergence { iters, residual });
    }
    if norm(&x) < TRIVIAL_ROOT_RADIUS {
        return Err(Error::TrivialRoot);
    }
    let radius = max_abs(&x);
    if radius > prob.trust_radius {
        return Err(Error::OutsideValidity {
            radius,
            trusted: prob.trust_radius,
        });
    }
    Ok(HomoclinicSolution {
        point: prob.point(&x)?,
        transversality_det: prob.transversality_det_at(&x)?,
        root_params: x,
        residual,
        newton_iters: iters,
    })
}

fn newton_step(prob: &MismatchProblem, x: &[f64], r: &[f64]) -> Option<Vec<f64>> {
    let j = prob.mismatch_jacobian(x).ok()?;
    let rhs = -DVector::from_column_slice(r);
    let dx = j.lu().solve(&rhs)?;
    dx.iter().all(|v| v.is_finite()).then(|| dx.iter().copied().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedGridOptions {
    /// Points per axis.
    pub resolution: usize,
    /// Grid points closer than this to the origin are dropped.
    pub exclusion_radius: f64,
    /// Grid points with `||Phi||` above this are dropped.
    pub cutoff: f64,
    /// Keep at most this many candidates.
    pub limit: usize,
}

impl Default for SeedGridOptions {
    fn default() -> Self {
        Self {
            resolution: 65,
            exclusion_radius: 0.2,
            cutoff: f64::INFINITY,
            limit: usize::MAX,
        }
    }
}

/// Uniform grid over `bounds` ranked by ascending `||Phi||`.
pub fn seed_grid(
    prob: &MismatchProblem,
    bounds: &[(f64, f64)],
    opts: &SeedGridOptions,
) -> Result<Vec<Vec<f64>>> {
    if bounds.len() != prob.dim() || opts.resolution == 0 {
        return Err(Error::InvalidArgument(format!(
            "seed grid needs {} bounds and a positive resolution",
            prob.dim()
        )));
    }
    let res = opts.resolution;
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        if res == 1 {
            vec![lo]
        } else {
            (0..res)
                .map(|k| lo + (hi - lo) * k as f64 / (res - 1) as f64)
                .collect()
        }
    };
    let axes: Vec<Vec<f64>> = bounds.iter().map(|&b| axis(b)).collect();
    let total = res.pow(bounds.len() as u32);
    let mut ranked: Vec<(f64, Vec<f64>)> = (0..total)
        .into_par_iter()
        .filter_map(|mut flat| {
            let x: Vec<f64> = axes
                .iter()
                .map(|ax| {
                    let v = ax[flat % res];
                    flat /= res;
                    v
                })
                .collect();
            if norm(&x) < opts.exclusion_radius {
                return None;
            }
            let phi = prob.mismatch(&x).ok()?;
            let n = norm(&phi);
            (n.is_finite() && n <= opts.cutoff).then_some((n, x))
        })
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    ranked.truncate(opts.limit);
    Ok(ranked.into_iter().map(|(_, x)| x).collect())
}

/// Distances of `f^n(point)` from the origin for `n` in `n_min..=n_max`.
/// A direction stops early once an iterate leaves `escape_radius`.
pub fn distance_profile(
    map: &dyn PhaseMap,
    point: &[f64],
    n_min: i64,
    n_max: i64,
    escape_radius: f64,
) -> DistanceProfile {
    let mut entries = vec![(0, norm(point))];
    let walk = |steps: i64, forward: bool, out: &mut Vec<(i64, f64)>| {
        let mut p = point.to_vec();
        for k in 1..=steps {
            let next = if forward {
                map.forward(&p)
            } else {
                map.backward(&p)
            };
            let Ok(next) = next else { break };
            p = next;
            let d = norm(&p);
            out.push((if forward { k } else { -k }, d));
            if d > escape_radius {
                break;
            }
        }
    };
    walk(n_max.max(0), true, &mut entries);
    walk((-n_min).max(0), false, &mut entries);
    entries.retain(|(n, _)| (n_min..=n_max).contains(n));
    entries.sort_by_key(|e| e.0);
    let (argmin, min_distance) = entries
        .iter()
        .copied()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::NAN));
    DistanceProfile {
        entries,
        min_distance,
        argmin,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold2d::{compute_coeffs_2d, compute_coeffs_2d_scaled};
    use crate::manifold4d::compute_coeffs_4d;
    use crate::maps::{MapParams2D, MapParams4D};
    use approx::assert_abs_diff_eq;

    fn planar(delta: f64, order: usize) -> MismatchProblem {
        let p = MapParams2D::new(-2.5, delta);
        MismatchProblem::new(
            compute_coeffs_2d(p, Branch::Unstable, order).unwrap(),
            compute_coeffs_2d(p, Branch::Stable, order).unwrap(),
            0,
            0,
            DEFAULT_TRUST_2D,
        )
        .unwrap()
    }

    fn fd_check(prob: &MismatchProblem, x: &[f64]) {
        let j = prob.mismatch_jacobian(x).unwrap();
        let h = 1e-6;
        for c in 0..x.len() {
            let (mut xp, mut xm) = (x.to_vec(), x.to_vec());
            xp[c] += h;
            xm[c] -= h;
            let (fp, fm) = (prob.mismatch(&xp).unwrap(), prob.mismatch(&xm).unwrap());
            for r in 0..x.len() {
                assert_abs_diff_eq!((fp[r] - fm[r]) / (2.0 * h), j[(r, c)], epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn constructor_checks() {
        let p = MapParams2D::new(-2.5, 1.0);
        let u = compute_coeffs_2d(p, Branch::Unstable, 10).unwrap();
        let s = compute_coeffs_2d(p, Branch::Stable, 10).unwrap();
        assert!(MismatchProblem::new(s.clone(), u.clone(), 0, 0, 1.6).is_err());
        let other = compute_coeffs_2d(MapParams2D::new(-2.5, 0.99), Branch::Stable, 10).unwrap();
        assert!(MismatchProblem::new(u.clone(), other, 0, 0, 1.6).is_err());
        let surf =
            compute_coeffs_4d(MapParams4D::new(-2.5, 1.0, 0.0), Branch::Stable, 5).unwrap();
        assert!(MismatchProblem::new(u, surf, 0, 0, 1.6).is_err());
    }

    #[test]
    fn mismatch_basics() {
        let prob = planar(1.0, 100);
        assert_eq!(prob.mismatch(&[0.0, 0.0]).unwrap(), vec![0.0, 0.0]);
        let x = [0.7, -1.1];
        let (a, b) = (prob.mismatch(&x).unwrap(), prob.mismatch(&[-0.7, 1.1]).unwrap());
        assert_abs_diff_eq!(a[0], -b[0], epsilon = 1e-15);
        assert_abs_diff_eq!(a[1], -b[1], epsilon = 1e-15);
        fd_check(&prob, &x);
        let j = prob.mismatch_jacobian(&x).unwrap();
        let (tu, ts) = (
            prob.unstable.jacobian(&x[..1]),
            prob.stable.jacobian(&x[1..]),
        );
        assert_eq!(j[(0, 0)], tu[(0, 0)]);
        assert_eq!(j[(1, 1)], -ts[(1, 0)]);
        let j0 = prob.mismatch_jacobian(&[0.0, 0.0]).unwrap();
        let spec = MapParams2D::new(-2.5, 1.0).eigen_origin().unwrap();
        assert_eq!(j0[(0, 0)], spec.unstable_eigenvectors[0][0]);
        assert_eq!(j0[(1, 1)], -spec.stable_eigenvectors[0][1]);
    }

    #[test]
    fn mismatch_jacobian_with_extra_iterations() {
        let mut prob = planar(0.99, 40);
        prob.n_u = 2;
        prob.n_s = 1;
        fd_check(&prob, &[0.3, -0.25]);
        let p = MapParams4D::new(-2.5, 0.997, 0.1);
        let mut prob4 = MismatchProblem::new(
            compute_coeffs_4d(p, Branch::Unstable, 30).unwrap(),
            compute_coeffs_4d(p, Branch::Stable, 30).unwrap(),
            0,
            0,
            DEFAULT_TRUST_4D,
        )
        .unwrap();
        fd_check(&prob4, &[0.3, 0.2, -0.4, 0.1]);
        prob4.n_u = 1;
        prob4.n_s = 1;
        fd_check(&prob4, &[0.3, 0.2, -0.4, 0.1]);
    }

    #[test]
    fn transferred_root_solves_iterated_problem() {
        let prob = planar(1.0, 100);
        let sol = find_homoclinic(&prob, &[1.5, -1.5], NewtonOptions::default()).unwrap();
        let mut iterated = prob.clone();
        iterated.n_u = 1;
        iterated.n_s = 1;
        let x = prob.transfer_root(&sol.root_params, 1, 1);
        assert_abs_diff_eq!(x[0], sol.root_params[0] / -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], sol.root_params[1] * -0.5, epsilon = 1e-15);
        assert!(max_abs(&iterated.mismatch(&x).unwrap()) < 1e-12);
        let back = iterated.transfer_root(&x, 0, 0);
        assert_abs_diff_eq!(back[0], sol.root_params[0], epsilon = 1e-15);
        assert_abs_diff_eq!(back[1], sol.root_params[1], epsilon = 1e-15);
    }

    #[test]
    fn trivial_root_from_zero_seed() {
        let prob = planar(1.0, 60);
        assert_eq!(
            find_homoclinic(&prob, &[1e-3, -2e-3], NewtonOptions::default()),
            Err(Error::TrivialRoot)
        );
        assert_eq!(
            find_homoclinic(&prob, &[0.0, 0.0], NewtonOptions::default()),
            Err(Error::TrivialRoot)
        );
    }

    #[test]
    fn planar_root_at_unit_delta() {
        let prob = planar(1.0, 100);
        let sol = find_homoclinic(&prob, &[1.5, -1.5], NewtonOptions::default()).unwrap();
        assert!(sol.residual < 1e-13);
        assert_abs_diff_eq!(sol.root_params[0], 1.5849, epsilon = 1e-3);
        assert_abs_diff_eq!(sol.root_params[0] + sol.root_params[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.point[0], 0.545271067753899, epsilon = 1e-9);
        assert_abs_diff_eq!(sol.point[0] + sol.point[1], 0.0, epsilon = 1e-12);
        assert!(sol.transversality_det.abs() > 0.01);
        // mirrored seed gives the mirrored root
        let mirror = find_homoclinic(&prob, &[-1.5, 1.5], NewtonOptions::default()).unwrap();
        assert_abs_diff_eq!(mirror.root_params[0], -sol.root_params[0], epsilon = 1e-12);
        // forward/backward consistency
        let pu = prob.unstable.eval(&sol.root_params[..1]);
        let ps = prob.stable.eval(&sol.root_params[1..]);
        assert!((pu[0] - ps[0]).abs() < 1e-13 && (pu[1] - ps[1]).abs() < 1e-13);
    }

    #[test]
    fn determinant_covariance_under_rescaling() {
        let p = MapParams2D::new(-2.5, 1.0);
        let base = planar(1.0, 100);
        let sol = find_homoclinic(&base, &[1.5, -1.5], NewtonOptions::default()).unwrap();
        let (su, ss) = (0.9, 1.1);
        let scaled = MismatchProblem::new(
            compute_coeffs_2d_scaled(p, Branch::Unstable, 100, su).unwrap(),
            compute_coeffs_2d_scaled(p, Branch::Stable, 100, ss).unwrap(),
            0,
            0,
            2.0,
        )
        .unwrap();
        let seed = [sol.root_params[0] / su, sol.root_params[1] / ss];
        let sol2 = find_homoclinic(&scaled, &seed, NewtonOptions::default()).unwrap();
        assert_abs_diff_eq!(
            sol2.transversality_det,
            sol.transversality_det * su * ss,
            epsilon = 1e-10
        );
    }

    #[test]
    fn no_root_far_below_tangency() {
        let prob = planar(0.96, 100);
        let seeds = seed_grid(
            &prob,
            &[(-1.6, 1.6), (-1.6, 1.6)],
            &SeedGridOptions {
                limit: 20,
                ..Default::default()
            },
        )
        .unwrap();
        for s in seeds {
            assert!(find_homoclinic(&prob, &s, NewtonOptions::default()).is_err());
        }
    }

    #[test]
    fn seed_grid_ranking() {
        let prob = planar(1.0, 100);
        let seeds = seed_grid(&prob, &[(-1.6, 1.6), (-1.6, 1.6)], &SeedGridOptions::default())
            .unwrap();
        let best = &seeds[0];
        let d = (best[0].abs() - 1.5849).hypot(best[1].abs() - 1.5849);
        assert!(d < 0.2, "best seed {best:?}");
        assert!(best[0] * best[1] < 0.0);
        let none = seed_grid(
            &prob,
            &[(-1.6, 1.6), (-1.6, 1.6)],
            &SeedGridOptions {
                cutoff: 0.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(none.is_empty());
        let single = seed_grid(
            &prob,
            &[(-1.6, 1.6), (-1.6, 1.6)],
            &SeedGridOptions {
                resolution: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(single.len() <= 1);
        for s in single {
            assert_eq!(s, vec![-1.6, -1.6]);
        }
    }

    #[test]
    fn outside_trust_rejected() {
        let mut prob = planar(1.0, 100);
        prob.trust_radius = 1.0;
        let err = find_homoclinic(&prob, &[1.5, -1.5], NewtonOptions::default()).unwrap_err();
        assert!(matches!(err, Error::OutsideValidity { .. }), "{err:?}");
    }

    #[test]
    fn distance_profile_basics() {
        let p = MapParams2D::new(-2.5, 1.0);
        let prof = distance_profile(&p, &[0.0, 0.0], -5, 5, DEFAULT_ESCAPE_RADIUS);
        assert_eq!(prof.entries.len(), 11);
        assert!(prof.entries.iter().all(|e| e.1 == 0.0));
        let prof = distance_profile(&p, &[2.0, 2.0], -50, 50, DEFAULT_ESCAPE_RADIUS);
        assert!(prof.entries.len() < 20, "{:?}", prof.entries);
        assert!(prof.entries.last().unwrap().1 > DEFAULT_ESCAPE_RADIUS);
        assert_eq!(prof.argmin, 0);
        assert!(prof.entries.windows(2).all(|w| w[0].0 < w[1].0));
    }
}
