//! The planar cubic map `(x, y) -> (y, -delta x + c y + 3 y^3)` and the 4-D map
//! obtained by linearly coupling two copies of it.

use nalgebra::{DMatrix, Matrix2, Matrix4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point2D = [f64; 2];
pub type Point4D = [f64; 4];

/// Parameters `(c, delta)` of the planar map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams2D {
    pub c: f64,
    pub delta: f64,
}

/// Parameters `(c, delta, b)` of the coupled 4-D map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams4D {
    pub c: f64,
    pub delta: f64,
    pub b: f64,
}

/// Eigen-decomposition of the origin linearization split into unstable and
/// stable parts, each sorted by descending `|lambda|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumAtOrigin {
    pub unstable_eigenvalues: Vec<f64>,
    pub stable_eigenvalues: Vec<f64>,
    pub unstable_eigenvectors: Vec<Vec<f64>>,
    pub stable_eigenvectors: Vec<Vec<f64>>,
}

/// Real roots `(r1, r2)` of `lambda^2 - trace lambda + det = 0` with
/// `|r1| >= |r2|`, or `None` when the discriminant is not positive.
fn quadratic_roots(trace: f64, det: f64) -> Option<(f64, f64)> {
    let disc = trace * trace - 4.0 * det;
    if !(disc > 0.0) {
        return None;
    }
    let q = 0.5 * (trace + trace.signum() * disc.sqrt());
    if q == 0.0 {
        return None;
    }
    let (r1, r2) = (q, det / q);
    if r1.abs() >= r2.abs() {
        Some((r1, r2))
    } else {
        Some((r2, r1))
    }
}

/// Orientation of an eigenvector: sign of its first nonzero component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Orientation {
    Positive,
    Negative,
}

/// Unstable vectors lead with a positive component and stable vectors with a
/// negative one. At `delta = 1` this makes the stable vector the coordinate
/// swap of the unstable one, e.g. `(1, -2)/sqrt 5` and `(-2, 1)/sqrt 5`.
pub(crate) const UNSTABLE_ORIENTATION: Orientation = Orientation::Positive;
pub(crate) const STABLE_ORIENTATION: Orientation = Orientation::Negative;

/// Normalize to unit length with the requested sign of the first nonzero
/// component.
pub(crate) fn canonical_unit(mut v: Vec<f64>, orientation: Orientation) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let first = v.iter().copied().find(|x| *x != 0.0).unwrap_or(0.0);
    let want_positive = orientation == Orientation::Positive;
    let scale = if (first > 0.0) == want_positive {
        1.0 / norm
    } else {
        -1.0 / norm
    };
    v.iter_mut().for_each(|x| *x *= scale);
    v
}

fn check_finite<const D: usize>(p: [f64; D]) -> Result<[f64; D]> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(p)
    } else {
        Err(Error::Divergence)
    }
}

impl MapParams2D {
    pub fn new(c: f64, delta: f64) -> Self {
        Self { c, delta }
    }

    /// `delta in (0, 1]` and a real saddle at the origin.
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta = {} outside (0, 1]",
                self.delta
            )));
        }
        let disc = self.c * self.c - 4.0 * self.delta;
        if !(disc > 0.0) {
            return Err(Error::NonSaddle { discriminant: disc });
        }
        Ok(())
    }

    pub fn apply(&self, [x, y]: Point2D) -> Result<Point2D> {
        check_finite([y, -self.delta * x + self.c * y + 3.0 * y * y * y])
    }

    pub fn inverse(&self, [x, y]: Point2D) -> Result<Point2D> {
        if self.delta == 0.0 {
            return Err(Error::NonInvertible);
        }
        let d = self.delta;
        check_finite([(self.c * x - y + 3.0 * x * x * x) / d, x])
    }

    pub fn jacobian(&self, [_, y]: Point2D) -> Matrix2<f64> {
        Matrix2::new(0.0, 1.0, -self.delta, self.c + 9.0 * y * y)
    }

    /// Differential of the inverse map at `pt`.
    pub fn inverse_jacobian(&self, [x, _]: Point2D) -> Matrix2<f64> {
        let d = self.delta;
        Matrix2::new((self.c + 9.0 * x * x) / d, -1.0 / d, 1.0, 0.0)
    }

    /// The origin, plus the symmetric pair `(s, s)`, `(-s, -s)` with
    /// `s = sqrt((1 - c + delta) / 3)` when it is real.
    pub fn fixed_points(&self) -> Vec<Point2D> {
        let mut out = vec![[0.0, 0.0]];
        let arg = 1.0 - self.c + self.delta;
        if arg > 0.0 {
            let s = (arg / 3.0).sqrt();
            out.push([s, s]);
            out.push([-s, -s]);
        }
        out
    }

    pub fn eigen_origin(&self) -> Result<SpectrumAtOrigin> {
        let disc = self.c * self.c - 4.0 * self.delta;
        let (lu, ls) = quadratic_roots(self.c, self.delta)
            .ok_or(Error::NonSaddle { discriminant: disc })?;
        if !(lu.abs() > 1.0 && ls.abs() < 1.0) {
            return Err(Error::NonSaddle { discriminant: disc });
        }
        Ok(SpectrumAtOrigin {
            unstable_eigenvalues: vec![lu],
            stable_eigenvalues: vec![ls],
            unstable_eigenvectors: vec![canonical_unit(vec![1.0, lu], UNSTABLE_ORIENTATION)],
            stable_eigenvectors: vec![canonical_unit(vec![1.0, ls], STABLE_ORIENTATION)],
        })
    }
}

/// One decoupled mode of the 4-D origin linearization.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub unstable: (f64, Vec<f64>),
    pub stable: (f64, Vec<f64>),
}

impl MapParams4D {
    pub fn new(c: f64, delta: f64, b: f64) -> Self {
        Self { c, delta, b }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "delta = {} outside (0, 1]",
                self.delta
            )));
        }
        if !(self.b >= 0.0) {
            return Err(Error::InvalidArgument(format!("b = {} is negative", self.b)));
        }
        self.modes().map(|_| ())
    }

    /// Planar map of a single uncoupled chain.
    pub fn chain(&self) -> MapParams2D {
        MapParams2D::new(self.c, self.delta)
    }

    pub fn apply(&self, [x1, y1, x2, y2]: Point4D) -> Result<Point4D> {
        let (c, d, b) = (self.c, self.delta, self.b);
        check_finite([
            y1,
            c * y1 - d * x1 + 3.0 * y1 * y1 * y1 + b * (y1 - y2),
            y2,
            c * y2 - d * x2 + 3.0 * y2 * y2 * y2 - b * (y1 - y2),
        ])
    }

    pub fn inverse(&self, [x1, y1, x2, y2]: Point4D) -> Result<Point4D> {
        if self.delta == 0.0 {
            return Err(Error::NonInvertible);
        }
        let (c, d, b) = (self.c, self.delta, self.b);
        check_finite([
            ((c + b) * x1 + 3.0 * x1 * x1 * x1 - b * x2 - y1) / d,
            x1,
            ((c + b) * x2 + 3.0 * x2 * x2 * x2 - b * x1 - y2) / d,
            x2,
        ])
    }

    pub fn jacobian(&self, [_, y1, _, y2]: Point4D) -> Matrix4<f64> {
        let (c, d, b) = (self.c, self.delta, self.b);
        #[rustfmt::skip]
        let m = Matrix4::new(
            0.0, 1.0,                    0.0, 0.0,
            -d,  c + b + 9.0 * y1 * y1,  0.0, -b,
            0.0, 0.0,                    0.0, 1.0,
            0.0, -b,                     -d,  c + b + 9.0 * y2 * y2,
        );
        m
    }

    pub fn inverse_jacobian(&self, [x1, _, x2, _]: Point4D) -> Matrix4<f64> {
        let (c, d, b) = (self.c, self.delta, self.b);
        #[rustfmt::skip]
        let m = Matrix4::new(
            (c + b + 9.0 * x1 * x1) / d, -1.0 / d, -b / d,                      0.0,
            1.0,                         0.0,      0.0,                         0.0,
            -b / d,                      0.0,      (c + b + 9.0 * x2 * x2) / d, -1.0 / d,
            0.0,                         0.0,      1.0,                         0.0,
        );
        m
    }

    /// Symmetric (`y1 = y2`) and antisymmetric (`y1 = -y2`) modes of the
    /// origin linearization, in that order.
    pub fn modes(&self) -> Result<[Mode; 2]> {
        let sym = self.mode(self.c, 1.0)?;
        let anti = self.mode(self.c + 2.0 * self.b, -1.0)?;
        Ok([sym, anti])
    }

    fn mode(&self, trace: f64, sign: f64) -> Result<Mode> {
        let (lu, ls) = quadratic_roots(trace, self.delta).ok_or_else(|| {
            Error::NonHyperbolic(format!(
                "lambda^2 - ({trace}) lambda + {} has no distinct real roots",
                self.delta
            ))
        })?;
        if !(lu.abs() > 1.0 && ls.abs() < 1.0) {
            return Err(Error::NonHyperbolic(format!(
                "mode eigenvalues {lu}, {ls} do not split across the unit circle"
            )));
        }
        let vec = |l: f64, o| canonical_unit(vec![1.0, l, sign, sign * l], o);
        Ok(Mode {
            unstable: (lu, vec(lu, UNSTABLE_ORIENTATION)),
            stable: (ls, vec(ls, STABLE_ORIENTATION)),
        })
    }

    pub fn eigen_origin(&self) -> Result<SpectrumAtOrigin> {
        let [sym, anti] = self.modes()?;
        let mut unstable = vec![sym.unstable, anti.unstable];
        let mut stable = vec![sym.stable, anti.stable];
        // stable sort keeps the symmetric mode first on ties
        unstable.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        stable.sort_by(|a, b| b.0.abs().total_cmp(&a.0.abs()));
        Ok(SpectrumAtOrigin {
            unstable_eigenvalues: unstable.iter().map(|m| m.0).collect(),
            stable_eigenvalues: stable.iter().map(|m| m.0).collect(),
            unstable_eigenvectors: unstable.into_iter().map(|m| m.1).collect(),
            stable_eigenvectors: stable.into_iter().map(|m| m.1).collect(),
        })
    }
}

/// Dimension-erased view of a map, used by the orbit, root-finding and
/// distance tools.
pub trait PhaseMap: Send + Sync {
    fn dim(&self) -> usize;
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn backward(&self, x: &[f64]) -> Result<Vec<f64>>;
    fn forward_jacobian(&self, x: &[f64]) -> DMatrix<f64>;
    fn backward_jacobian(&self, x: &[f64]) -> DMatrix<f64>;
}

fn arr<const D: usize>(x: &[f64]) -> [f64; D] {
    x.try_into().expect("point dimension mismatch")
}

impl PhaseMap for MapParams2D {
    fn dim(&self) -> usize {
        2
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply(arr(x)).map(|p| p.to_vec())
    }
    fn backward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inverse(arr(x)).map(|p| p.to_vec())
    }
    fn forward_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_iterator(2, 2, self.jacobian(arr(x)).iter().copied())
    }
    fn backward_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_iterator(2, 2, self.inverse_jacobian(arr(x)).iter().copied())
    }
}

impl PhaseMap for MapParams4D {
    fn dim(&self) -> usize {
        4
    }
    fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply(arr(x)).map(|p| p.to_vec())
    }
    fn backward(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.inverse(arr(x)).map(|p| p.to_vec())
    }
    fn forward_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_iterator(4, 4, self.jacobian(arr(x)).iter().copied())
    }
    fn backward_jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_iterator(4, 4, self.inverse_jacobian(arr(x)).iter().copied())
    }
}
