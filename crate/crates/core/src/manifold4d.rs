//! Two-dimensional stable and unstable manifolds of the coupled map's origin as
//! bivariate truncated power series `S(u, v) = sum a^{nm} u^n v^m` solving
//! `f(S(u, v)) = S(lambda_A u, lambda_B v)`.
//!
//! Coefficients are stored per coordinate as dense triangles in degree-major
//! order: degree `d = n + m` ascending, then `m` ascending within a degree.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold2d::{certified_radius, Branch, RESONANCE_TOL};
use crate::maps::{MapParams4D, Point4D};
use crate::scalar::{powers, Scalar};

/// Default polar sweep: radii up to 2 on 17 rays spanning `[0, pi]`.
pub const DEFAULT_R_MAX: f64 = 2.0;
pub const DEFAULT_THETA_COUNT: usize = 17;

#[inline]
pub fn tri_index(n: usize, m: usize) -> usize {
    let d = n + m;
    d * (d + 1) / 2 + m
}

#[inline]
pub fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series4D {
    pub branch: Branch,
    pub lambdas: (f64, f64),
    pub order: usize,
    /// Four degree-major coefficient triangles, one per phase-space coordinate.
    pub coeffs: [Vec<f64>; 4],
    pub params: MapParams4D,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarValidityProfile {
    pub thetas: Vec<f64>,
    /// `rays[k]` holds `(r, error)` samples along `thetas[k]`.
    pub rays: Vec<Vec<(f64, f64)>>,
    pub r_valid: f64,
    pub epsilon: f64,
}

/// `p * q` restricted to total degree `target`, where `p` and `q` are
/// degree-major triangles and only degrees `p_degrees` of `p` contribute.
fn product_at_degree<T: Scalar>(
    p: &[T],
    q: &[T],
    target: usize,
    p_degrees: std::ops::RangeInclusive<usize>,
    out: &mut [T],
) {
    for m in 0..=target {
        let n = target - m;
        let mut acc = T::zero();
        for e in p_degrees.clone() {
            if e > target {
                break;
            }
            let rest = target - e;
            // (k, l) in p with k + l = e, (n - k, m - l) in q
            let l_lo = m.saturating_sub(rest);
            let l_hi = m.min(e);
            for l in l_lo..=l_hi {
                let k = e - l;
                if k > n {
                    continue;
                }
                acc = acc + p[tri_index(k, l)].clone() * q[tri_index(n - k, m - l)].clone();
            }
        }
        out[tri_index(n, m)] = acc;
    }
}

/// Solves the coefficient system of the coupled map degree by degree.
///
/// For each `(n, m)` with `mu = lambda_A^n lambda_B^m`, rows one and three
/// give `a2 = mu a1`, `a4 = mu a3`; the remaining two rows reduce to
/// `[g h; h g] (a1, a3) = (R2, R4)` with `g = -delta + mu (c + b - mu)`,
/// `h = -b mu` and `R = -3 [A^3]` built from strictly lower degrees. The
/// 4x4 determinant equals `g^2 - h^2` up to sign.
#[allow(clippy::too_many_arguments)]
pub fn recurrence_4d<T: Scalar>(
    c: &T,
    delta: &T,
    b: &T,
    lambdas: [T; 2],
    eigenvectors: [[T; 4]; 2],
    order: usize,
) -> Result<[Vec<T>; 4]> {
    if order < 1 {
        return Err(Error::InvalidArgument("series order must be >= 1".into()));
    }
    let len = tri_len(order);
    let mut a: [Vec<T>; 4] = std::array::from_fn(|_| vec![T::zero(); len]);
    let [va, vb] = eigenvectors;
    for i in 0..4 {
        a[i][tri_index(1, 0)] = va[i].clone();
        a[i][tri_index(0, 1)] = vb[i].clone();
    }
    let [la, lb] = lambdas;
    let pa = powers(&la, order);
    let pb = powers(&lb, order);
    let three = T::from(3);
    let cb = c.clone() + b.clone();

    // squares and cubes of the y-coordinate series, filled per degree
    let mut sq2 = vec![T::zero(); len];
    let mut sq4 = vec![T::zero(); len];
    let mut cu2 = vec![T::zero(); len];
    let mut cu4 = vec![T::zero(); len];

    for d in 2..=order {
        // square at degree d-1 uses degrees 1..=d-2 of the series
        if d >= 3 {
            product_at_degree(&a[1], &a[1], d - 1, 1..=d - 2, &mut sq2);
            product_at_degree(&a[3], &a[3], d - 1, 1..=d - 2, &mut sq4);
        }
        // cube at degree d pairs square degrees 2..=d-1 with series degrees >= 1
        product_at_degree(&sq2, &a[1], d, 2..=d - 1, &mut cu2);
        product_at_degree(&sq4, &a[3], d, 2..=d - 1, &mut cu4);

        for m in 0..=d {
            let n = d - m;
            let idx = tri_index(n, m);
            let mu = pa[n].clone() * pb[m].clone();
            let g = -delta.clone() + mu.clone() * (cb.clone() - mu.clone());
            let h = -(b.clone() * mu.clone());
            let det = g.clone() * g.clone() - h.clone() * h.clone();
            if det.magnitude() < RESONANCE_TOL {
                return Err(Error::Resonance {
                    order: (n, m),
                    det: det.magnitude(),
                });
            }
            let r2 = -(three.clone() * cu2[idx].clone());
            let r4 = -(three.clone() * cu4[idx].clone());
            let a1 = (g.clone() * r2.clone() - h.clone() * r4.clone()) / det.clone();
            let a3 = (g * r4 - h * r2) / det;
            a[1][idx] = mu.clone() * a1.clone();
            a[3][idx] = mu * a3.clone();
            a[0][idx] = a1;
            a[2][idx] = a3;
        }
    }
    Ok(a)
}

/// Eigen-data `(lambda_A, lambda_B)` and matching unit vectors for a branch:
/// the symmetric mode drives the first parameter, the antisymmetric mode the
/// second.
pub fn branch_eigendata(params: &MapParams4D, branch: Branch) -> Result<([f64; 2], [[f64; 4]; 2])> {
    let [sym, anti] = params.modes()?;
    let (a, b) = match branch {
        Branch::Unstable => (sym.unstable, anti.unstable),
        Branch::Stable => (sym.stable, anti.stable),
    };
    let arr = |v: Vec<f64>| -> [f64; 4] { v.try_into().expect("4-vector") };
    Ok(([a.0, b.0], [arr(a.1), arr(b.1)]))
}

pub fn compute_coeffs_4d(params: MapParams4D, branch: Branch, order: usize) -> Result<Series4D> {
    let (lambdas, vectors) = branch_eigendata(&params, branch)?;
    compute_coeffs_4d_with_basis(params, branch, order, lambdas, vectors)
}

/// Builds a series from caller-supplied eigen-data. Useful at `b = 0`, where
/// the eigenvalues are degenerate and any basis of each eigenspace works.
pub fn compute_coeffs_4d_with_basis(
    params: MapParams4D,
    branch: Branch,
    order: usize,
    lambdas: [f64; 2],
    vectors: [[f64; 4]; 2],
) -> Result<Series4D> {
    let coeffs = recurrence_4d(&params.c, &params.delta, &params.b, lambdas, vectors, order)?;
    Ok(Series4D {
        branch,
        lambdas: (lambdas[0], lambdas[1]),
        order,
        coeffs,
        params,
    })
}

impl Series4D {
    #[inline]
    pub fn coeff(&self, i: usize, n: usize, m: usize) -> f64 {
        self.coeffs[i][tri_index(n, m)]
    }

    /// Nested Horner: outer in `u`, inner in `v`.
    pub fn eval(&self, u: f64, v: f64) -> Point4D {
        let n_max = self.order;
        std::array::from_fn(|i| {
            let mut acc = 0.0;
            for n in (0..=n_max).rev() {
                let mut inner = 0.0;
                for m in (0..=n_max - n).rev() {
                    inner = inner * v + self.coeff(i, n, m);
                }
                acc = acc * u + inner;
            }
            acc
        })
    }

    /// Columns `dS/du` and `dS/dv`, returned as `[row][col]`.
    pub fn jacobian(&self, u: f64, v: f64) -> [[f64; 2]; 4] {
        let n_max = self.order;
        std::array::from_fn(|i| {
            // d/du: sum n a^{nm} u^{n-1} v^m
            let mut du = 0.0;
            for n in (1..=n_max).rev() {
                let mut inner = 0.0;
                for m in (0..=n_max - n).rev() {
                    inner = inner * v + self.coeff(i, n, m);
                }
                du = du * u + n as f64 * inner;
            }
            // d/dv: sum m a^{nm} u^n v^{m-1}
            let mut dv = 0.0;
            for n in (0..n_max).rev() {
                let mut inner = 0.0;
                for m in (1..=n_max - n).rev() {
                    inner = inner * v + m as f64 * self.coeff(i, n, m);
                }
                dv = dv * u + inner;
            }
            [du, dv]
        })
    }

    pub fn defining_error(&self, u: f64, v: f64) -> f64 {
        let Ok(lhs) = self.params.apply(self.eval(u, v)) else {
            return f64::INFINITY;
        };
        let rhs = self.eval(self.lambdas.0 * u, self.lambdas.1 * v);
        lhs.iter()
            .zip(&rhs)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

pub fn eval_series_4d(s: &Series4D, u: f64, v: f64) -> Point4D {
    s.eval(u, v)
}

pub fn eval_jacobian_4d(s: &Series4D, u: f64, v: f64) -> [[f64; 2]; 4] {
    s.jacobian(u, v)
}

/// `count` uniformly spaced angles over `[0, pi]`. Odd parity of the series
/// makes the opposite half-plane redundant.
pub fn default_thetas(count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count)
        .map(|k| std::f64::consts::PI * k as f64 / (count - 1) as f64)
        .collect()
}

pub fn validity_profile_4d(
    s: &Series4D,
    epsilon: f64,
    r_max: f64,
    thetas: &[f64],
    n_samples: usize,
) -> Result<PolarValidityProfile> {
    if !(epsilon > 0.0) || n_samples < 2 || thetas.is_empty() {
        return Err(Error::InvalidArgument(
            "polar profile needs epsilon > 0, at least 2 samples and one angle".into(),
        ));
    }
    let step = r_max / (n_samples - 1) as f64;
    let rays: Vec<Vec<(f64, f64)>> = thetas
        .par_iter()
        .map(|&theta| {
            let (sn, cs) = theta.sin_cos();
            (0..n_samples)
                .map(|k| {
                    let r = step * k as f64;
                    (r, s.defining_error(r * cs, r * sn))
                })
                .collect()
        })
        .collect();
    let r_valid = rays
        .iter()
        .map(|ray| certified_radius(ray, epsilon))
        .fold(f64::INFINITY, f64::min);
    Ok(PolarValidityProfile {
        thetas: thetas.to_vec(),
        rays,
        r_valid,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold2d::compute_coeffs_2d;
    use crate::maps::MapParams2D;
    use approx::assert_abs_diff_eq;

    #[test]
    fn triangle_indexing() {
        assert_eq!(tri_index(0, 0), 0);
        assert_eq!(tri_index(1, 0), 1);
        assert_eq!(tri_index(0, 1), 2);
        assert_eq!(tri_index(2, 0), 3);
        assert_eq!(tri_index(0, 3), tri_len(3) - 1);
    }

    #[test]
    fn structural_invariants() {
        let p = MapParams4D::new(-2.5, 0.998, 0.1);
        for branch in [Branch::Unstable, Branch::Stable] {
            let s = compute_coeffs_4d(p, branch, 21).unwrap();
            let (_, vecs) = branch_eigendata(&p, branch).unwrap();
            for i in 0..4 {
                assert_eq!(s.coeff(i, 0, 0), 0.0);
                assert_eq!(s.coeff(i, 1, 0), vecs[0][i]);
                assert_eq!(s.coeff(i, 0, 1), vecs[1][i]);
            }
            for d in 0..=21 {
                for m in 0..=d {
                    let n = d - m;
                    let mu = s.lambdas.0.powi(n as i32) * s.lambdas.1.powi(m as i32);
                    let tol = 1e-14 * (mu * s.coeff(0, n, m)).abs();
                    assert_abs_diff_eq!(s.coeff(1, n, m), mu * s.coeff(0, n, m), epsilon = tol);
                    assert_abs_diff_eq!(s.coeff(3, n, m), mu * s.coeff(2, n, m), epsilon = tol);
                    if d % 2 == 0 {
                        for i in 0..4 {
                            assert_eq!(s.coeff(i, n, m), 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn uncoupled_reduces_to_planar_series() {
        let p = MapParams4D::new(-2.5, 1.0, 0.0);
        let s = compute_coeffs_4d(p, Branch::Unstable, 30).unwrap();
        let planar = compute_coeffs_2d(MapParams2D::new(-2.5, 1.0), Branch::Unstable, 30).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // along u the symmetric mode direction is (v, v)/sqrt 2
        for n in 1..=30 {
            let scale = h.powi(n as i32);
            assert_abs_diff_eq!(s.coeff(0, n, 0), planar.coeffs_a[n] * scale, epsilon = 1e-15);
            assert_abs_diff_eq!(s.coeff(2, n, 0), planar.coeffs_a[n] * scale, epsilon = 1e-15);
            assert_abs_diff_eq!(s.coeff(0, 0, n), planar.coeffs_a[n] * scale, epsilon = 1e-15);
            assert_abs_diff_eq!(s.coeff(2, 0, n), -planar.coeffs_a[n] * scale, epsilon = 1e-15);
        }
        // product structure S(u, v) = (P((u+v)/sqrt 2), P((u-v)/sqrt 2))
        for (u, v) in [(0.3, 0.2), (-0.5, 0.7), (0.9, -0.1)] {
            let q = s.eval(u, v);
            let a = planar.eval((u + v) * h);
            let b = planar.eval((u - v) * h);
            for (x, y) in q.iter().zip([a[0], a[1], b[0], b[1]]) {
                assert_abs_diff_eq!(*x, y, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn chain_basis_confines_to_first_plane() {
        let p = MapParams4D::new(-2.5, 1.0, 0.0);
        let r5 = 5f64.sqrt();
        let vecs = [[1.0 / r5, -2.0 / r5, 0.0, 0.0], [0.0, 0.0, 1.0 / r5, -2.0 / r5]];
        let s = compute_coeffs_4d_with_basis(p, Branch::Unstable, 25, [-2.0, -2.0], vecs).unwrap();
        for u in [0.2, 0.6, -1.0] {
            let q = s.eval(u, 0.0);
            assert_eq!(q[2], 0.0);
            assert_eq!(q[3], 0.0);
        }
    }

    #[test]
    fn evaluation_parity_and_jacobian() {
        let p = MapParams4D::new(-2.5, 1.0, 0.1);
        let s = compute_coeffs_4d(p, Branch::Unstable, 40).unwrap();
        assert_eq!(s.eval(0.0, 0.0), [0.0; 4]);
        let j0 = s.jacobian(0.0, 0.0);
        for i in 0..4 {
            assert_eq!(j0[i][0], s.coeff(i, 1, 0));
            assert_eq!(j0[i][1], s.coeff(i, 0, 1));
        }
        let (u, v) = (0.3, 0.2);
        let (a, b) = (s.eval(u, v), s.eval(-u, -v));
        for i in 0..4 {
            assert_abs_diff_eq!(a[i], -b[i], epsilon = 1e-13);
        }
        let (ja, jb) = (s.jacobian(u, v), s.jacobian(-u, -v));
        let h = 1e-6;
        let (up, um) = (s.eval(u + h, v), s.eval(u - h, v));
        let (vp, vm) = (s.eval(u, v + h), s.eval(u, v - h));
        for i in 0..4 {
            assert_abs_diff_eq!(ja[i][0], jb[i][0], epsilon = 1e-13);
            assert_abs_diff_eq!(ja[i][1], jb[i][1], epsilon = 1e-13);
            assert_abs_diff_eq!((up[i] - um[i]) / (2.0 * h), ja[i][0], epsilon = 1e-7);
            assert_abs_diff_eq!((vp[i] - vm[i]) / (2.0 * h), ja[i][1], epsilon = 1e-7);
        }
    }

    #[test]
    fn degree_ordering_is_irrelevant() {
        // solving degree d only reads degrees < d, so solving in reversed m
        // order within each degree gives identical results: checked by
        // recomputing with the chains swapped and permuting back
        let p = MapParams4D::new(-2.5, 1.0, 0.1);
        let s = compute_coeffs_4d(p, Branch::Unstable, 15).unwrap();
        let (l, v) = branch_eigendata(&p, Branch::Unstable).unwrap();
        let swapped =
            compute_coeffs_4d_with_basis(p, Branch::Unstable, 15, [l[1], l[0]], [v[1], v[0]])
                .unwrap();
        for d in 0..=15 {
            for m in 0..=d {
                for i in 0..4 {
                    assert_abs_diff_eq!(
                        s.coeff(i, d - m, m),
                        swapped.coeff(i, m, d - m),
                        epsilon = 1e-12 * s.coeff(i, d - m, m).abs().max(1e-300)
                    );
                }
            }
        }
    }

    #[test]
    fn swap_symmetry_of_chains() {
        // exchanging (x1, y1) <-> (x2, y2) fixes the symmetric eigenvector and
        // negates the antisymmetric one, i.e. S(u, v) -> S(u, -v)
        let p = MapParams4D::new(-2.5, 1.0, 0.1);
        let s = compute_coeffs_4d(p, Branch::Unstable, 30).unwrap();
        for (u, v) in [(0.4, 0.3), (-0.2, 0.9)] {
            let a = s.eval(u, v);
            let b = s.eval(u, -v);
            assert_abs_diff_eq!(a[0], b[2], epsilon = 1e-14);
            assert_abs_diff_eq!(a[1], b[3], epsilon = 1e-14);
            assert_abs_diff_eq!(a[2], b[0], epsilon = 1e-14);
            assert_abs_diff_eq!(a[3], b[1], epsilon = 1e-14);
        }
    }

    #[test]
    fn continuity_in_coupling() {
        let s0 = compute_coeffs_4d(MapParams4D::new(-2.5, 1.0, 0.0), Branch::Unstable, 20).unwrap();
        let s1 =
            compute_coeffs_4d(MapParams4D::new(-2.5, 1.0, 1e-8), Branch::Unstable, 20).unwrap();
        let max_diff = (0..4)
            .flat_map(|i| s0.coeffs[i].iter().zip(&s1.coeffs[i]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-6, "max coefficient change {max_diff}");
    }

    #[test]
    fn polar_profile_basics() {
        let p = MapParams4D::new(-2.5, 1.0, 0.1);
        let s = compute_coeffs_4d(p, Branch::Unstable, 20).unwrap();
        let thetas = default_thetas(DEFAULT_THETA_COUNT);
        assert_eq!(thetas.len(), 17);
        assert_abs_diff_eq!(thetas[4], std::f64::consts::FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(thetas[8], std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
        let prof = validity_profile_4d(&s, 1e-12, 1.0, &thetas, 50).unwrap();
        for ray in &prof.rays {
            assert_eq!(ray[0], (0.0, 0.0));
        }
        for (ray, _) in prof.rays.iter().zip(&prof.thetas) {
            for &(r, e) in ray {
                if r <= prof.r_valid {
                    assert!(e < 1e-12);
                }
            }
        }
    }
}
