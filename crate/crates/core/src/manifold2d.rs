//! One-dimensional stable and unstable manifolds of the planar map's origin as
//! truncated power series `t -> (sum a_n t^n, sum b_n t^n)` solving
//! `f(P(t)) = P(lambda t)` order by order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{MapParams2D, Point2D};
use crate::scalar::{powers, Scalar};

/// Below this the per-order 2x2 (or 4x4) system is treated as resonant.
pub const RESONANCE_TOL: f64 = 1e-12;

/// Default sample count for validity profiles.
pub const DEFAULT_PROFILE_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Unstable,
    Stable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series2D {
    pub branch: Branch,
    pub lambda: f64,
    pub order: usize,
    pub coeffs_a: Vec<f64>,
    pub coeffs_b: Vec<f64>,
    pub params: MapParams2D,
}

/// Sampled defining-equation error and the radius it certifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityProfile {
    pub samples: Vec<(f64, f64)>,
    pub tau: f64,
    pub epsilon: f64,
}

/// Solves the order-by-order system for the coefficients of a planar series.
///
/// Order `n` satisfies `b_n = mu a_n` and
/// `-delta a_n + (c - mu) b_n = -3 [B^3]_n` with `mu = lambda^n`, where
/// `[B^3]_n` only involves `b_1 .. b_{n-2}` because `b_0 = 0`.
pub fn recurrence_2d<T: Scalar>(
    c: &T,
    delta: &T,
    lambda: &T,
    eigenvector: [T; 2],
    order: usize,
) -> Result<(Vec<T>, Vec<T>)> {
    if order < 1 {
        return Err(Error::InvalidArgument("series order must be >= 1".into()));
    }
    let mut a = vec![T::zero(); order + 1];
    let mut b = vec![T::zero(); order + 1];
    let [a1, b1] = eigenvector;
    a[1] = a1;
    b[1] = b1;
    let mu = powers(lambda, order);
    let three = T::from(3);
    for n in 2..=order {
        let mut cube = T::zero();
        for i in 1..n {
            for j in 1..(n - i) {
                let k = n - i - j;
                cube = cube + b[i].clone() * b[j].clone() * b[k].clone();
            }
        }
        let rhs = -(three.clone() * cube);
        // eliminate b_n = mu a_n
        let g = -delta.clone() + mu[n].clone() * (c.clone() - mu[n].clone());
        if g.magnitude() < RESONANCE_TOL {
            return Err(Error::Resonance {
                order: (n, 0),
                det: g.magnitude(),
            });
        }
        a[n] = rhs / g;
        b[n] = mu[n].clone() * a[n].clone();
    }
    Ok((a, b))
}

/// Coefficients of the stable or unstable branch at the origin, with the
/// canonical unit eigenvector at order one.
pub fn compute_coeffs_2d(params: MapParams2D, branch: Branch, order: usize) -> Result<Series2D> {
    compute_coeffs_2d_scaled(params, branch, order, 1.0)
}

/// Same as [`compute_coeffs_2d`] with the order-one eigenvector multiplied by
/// `scale`; coefficient `n` then scales by `scale^n`.
pub fn compute_coeffs_2d_scaled(
    params: MapParams2D,
    branch: Branch,
    order: usize,
    scale: f64,
) -> Result<Series2D> {
    let spec = params.eigen_origin()?;
    let (lambda, v) = match branch {
        Branch::Unstable => (spec.unstable_eigenvalues[0], &spec.unstable_eigenvectors[0]),
        Branch::Stable => (spec.stable_eigenvalues[0], &spec.stable_eigenvectors[0]),
    };
    let (coeffs_a, coeffs_b) = recurrence_2d(
        &params.c,
        &params.delta,
        &lambda,
        [scale * v[0], scale * v[1]],
        order,
    )?;
    Ok(Series2D {
        branch,
        lambda,
        order,
        coeffs_a,
        coeffs_b,
        params,
    })
}

/// For `delta = 1` the map is conjugate to its inverse by `(x, y) -> (y, x)`,
/// so swapping the coordinate series of the unstable branch parametrizes the
/// stable one.
pub fn series_from_symmetry(s: &Series2D) -> Result<Series2D> {
    if s.params.delta != 1.0 {
        return Err(Error::SymmetryNotApplicable);
    }
    let branch = match s.branch {
        Branch::Unstable => Branch::Stable,
        Branch::Stable => Branch::Unstable,
    };
    Ok(Series2D {
        branch,
        lambda: 1.0 / s.lambda,
        order: s.order,
        coeffs_a: s.coeffs_b.clone(),
        coeffs_b: s.coeffs_a.clone(),
        params: s.params,
    })
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn horner_derivative(coeffs: &[f64], t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (n, &c)| acc * t + n as f64 * c)
}

impl Series2D {
    pub fn eval(&self, t: f64) -> Point2D {
        [horner(&self.coeffs_a, t), horner(&self.coeffs_b, t)]
    }

    pub fn tangent(&self, t: f64) -> [f64; 2] {
        [
            horner_derivative(&self.coeffs_a, t),
            horner_derivative(&self.coeffs_b, t),
        ]
    }

    /// `|| f(P(t)) - P(lambda t) ||`, infinite if the map overflows.
    pub fn defining_error(&self, t: f64) -> f64 {
        let Ok(lhs) = self.params.apply(self.eval(t)) else {
            return f64::INFINITY;
        };
        let rhs = self.eval(self.lambda * t);
        (lhs[0] - rhs[0]).hypot(lhs[1] - rhs[1])
    }

    /// Flip the orientation of the parameter: coefficient `n` picks up `(-1)^n`.
    pub fn reflected(&self) -> Series2D {
        let flip = |c: &Vec<f64>| {
            c.iter()
                .enumerate()
                .map(|(n, x)| if n % 2 == 1 { -x } else { *x })
                .collect()
        };
        Series2D {
            coeffs_a: flip(&self.coeffs_a),
            coeffs_b: flip(&self.coeffs_b),
            ..self.clone()
        }
    }
}

pub fn eval_series_2d(s: &Series2D, t: f64) -> Point2D {
    s.eval(t)
}

pub fn eval_tangent_2d(s: &Series2D, t: f64) -> [f64; 2] {
    s.tangent(t)
}

/// Largest sampled radius `tau` such that every sample with `|t| <= tau` has
/// error below `epsilon`. Zero when the innermost sample already fails.
pub(crate) fn certified_radius(samples: &[(f64, f64)], epsilon: f64) -> f64 {
    let mut sorted: Vec<(f64, f64)> = samples.iter().map(|&(t, e)| (t.abs(), e)).collect();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut tau = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        // samples sharing a radius pass or fail together
        let r = sorted[i].0;
        let mut ok = true;
        while i < sorted.len() && sorted[i].0 == r {
            ok &= sorted[i].1 < epsilon;
            i += 1;
        }
        if !ok {
            break;
        }
        tau = r;
    }
    tau
}

pub fn validity_profile_2d(
    s: &Series2D,
    epsilon: f64,
    t_max: f64,
    n_samples: usize,
) -> Result<ValidityProfile> {
    if !(epsilon > 0.0) || n_samples < 2 {
        return Err(Error::InvalidArgument(
            "validity profile needs epsilon > 0 and at least 2 samples".into(),
        ));
    }
    let step = 2.0 * t_max / (n_samples - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..n_samples)
        .map(|i| {
            let t = -t_max + step * i as f64;
            (t, s.defining_error(t))
        })
        .collect();
    let tau = certified_radius(&samples, epsilon);
    Ok(ValidityProfile {
        samples,
        tau,
        epsilon,
    })
}
