//! Exact arithmetic in Q(sqrt 129) and an independent recomposition of the
//! defining equations by plain polynomial products. Running the recurrences
//! over this field and recomposing checks the algebra with no rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::manifold2d::recurrence_2d;
use crate::manifold4d::{recurrence_4d, tri_index};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Discriminant of the antisymmetric mode at c = -5/2, delta = 1, b = 1/10,
/// scaled to an integer: lambda = (-23 - sqrt 129) / 20.
pub const D: i64 = 129;

/// `re + im * sqrt(D)` with rational parts.
#[derive(Clone, Debug, PartialEq)]
pub struct QS {
    pub re: BigRational,
    pub im: BigRational,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QS {
    pub fn rational(n: i64, d: i64) -> Self {
        Self { re: rat(n, d), im: BigRational::zero() }
    }

    pub fn new(re: (i64, i64), im: (i64, i64)) -> Self {
        Self { re: rat(re.0, re.1), im: rat(im.0, im.1) }
    }

    fn to_f64(&self) -> f64 {
        self.re.to_f64().unwrap() + self.im.to_f64().unwrap() * (D as f64).sqrt()
    }
}

impl Add for QS {
    type Output = QS;
    fn add(self, o: QS) -> QS {
        QS { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for QS {
    type Output = QS;
    fn sub(self, o: QS) -> QS {
        QS { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for QS {
    type Output = QS;
    fn mul(self, o: QS) -> QS {
        let d = BigRational::from_integer(BigInt::from(D));
        QS {
            re: &self.re * &o.re + &self.im * &o.im * d,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for QS {
    type Output = QS;
    fn div(self, o: QS) -> QS {
        let d = BigRational::from_integer(BigInt::from(D));
        let norm = &o.re * &o.re - &o.im * &o.im * d;
        assert!(!norm.is_zero(), "division by zero in Q(sqrt D)");
        let conj = QS { re: o.re / &norm, im: -o.im / &norm };
        self * conj
    }
}

impl Neg for QS {
    type Output = QS;
    fn neg(self) -> QS {
        QS { re: -self.re, im: -self.im }
    }
}

impl Zero for QS {
    fn zero() -> Self {
        QS::rational(0, 1)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for QS {
    fn one() -> Self {
        QS::rational(1, 1)
    }
}

impl From<i32> for QS {
    fn from(v: i32) -> Self {
        QS::rational(v as i64, 1)
    }
}

impl Scalar for QS {
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

fn pow(x: &QS, n: usize) -> QS {
    (0..n).fold(QS::one(), |acc, _| acc * x.clone())
}

/// Univariate product truncated at degree `n`.
fn mul1(p: &[QS], q: &[QS], n: usize) -> Vec<QS> {
    let mut out = vec![QS::zero(); n + 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            if i + j <= n && !a.is_zero() && !b.is_zero() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
    }
    out
}

/// Coefficients of `f(P(t)) - P(lambda t)` up to degree `n` for the planar
/// cubic map.
pub fn planar_residual(c: &QS, delta: &QS, lambda: &QS, a: &[QS], b: &[QS], n: usize) -> Vec<[QS; 2]> {
    let b3 = mul1(&mul1(b, b, n), b, n);
    (0..=n)
        .map(|k| {
            let mu = pow(lambda, k);
            let r0 = b[k].clone() - mu.clone() * a[k].clone();
            let r1 = -(delta.clone() * a[k].clone()) + c.clone() * b[k].clone()
                + QS::from(3) * b3[k].clone()
                - mu * b[k].clone();
            [r0, r1]
        })
        .collect()
}

/// Bivariate polynomial as a dense `(n+1) x (n+1)` grid, entries with
/// `i + j > n` ignored.
type Grid = Vec<Vec<QS>>;

fn grid_from_tri(tri: &[QS], n: usize) -> Grid {
    (0..=n)
        .map(|i| (0..=n).map(|j| if i + j <= n { tri[tri_index(i, j)].clone() } else { QS::zero() }).collect())
        .collect()
}

fn mul2(p: &Grid, q: &Grid, n: usize) -> Grid {
    let mut out = vec![vec![QS::zero(); n + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=n - i {
            if p[i][j].is_zero() {
                continue;
            }
            for k in 0..=n - i - j {
                for l in 0..=n - i - j - k {
                    if !q[k][l].is_zero() {
                        out[i + k][j + l] = out[i + k][j + l].clone() + p[i][j].clone() * q[k][l].clone();
                    }
                }
            }
        }
    }
    out
}

/// Coefficients of `f(S(u, v)) - S(la u, lb v)` up to total degree `n` for
/// the coupled map, one grid per coordinate.
pub fn coupled_residual(
    c: &QS,
    delta: &QS,
    b: &QS,
    la: &QS,
    lb: &QS,
    coeffs: &[Vec<QS>; 4],
    n: usize,
) -> [Grid; 4] {
    let g: Vec<Grid> = coeffs.iter().map(|t| grid_from_tri(t, n)).collect();
    let y1c = mul2(&mul2(&g[1], &g[1], n), &g[1], n);
    let y2c = mul2(&mul2(&g[3], &g[3], n), &g[3], n);
    std::array::from_fn(|coord| {
        let mut out = vec![vec![QS::zero(); n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n - i {
                let mu = pow(la, i) * pow(lb, j);
                let coupling = b.clone() * (g[1][i][j].clone() - g[3][i][j].clone());
                let image = match coord {
                    0 => g[1][i][j].clone(),
                    1 => c.clone() * g[1][i][j].clone() - delta.clone() * g[0][i][j].clone()
                        + QS::from(3) * y1c[i][j].clone()
                        + coupling,
                    2 => g[3][i][j].clone(),
                    _ => c.clone() * g[3][i][j].clone() - delta.clone() * g[2][i][j].clone()
                        + QS::from(3) * y2c[i][j].clone()
                        - coupling,
                };
                out[i][j] = image - mu * g[coord][i][j].clone();
            }
        }
        out
    })
}

/// Runs the planar recurrence exactly at c = -5/2, delta = 1 on the unstable
/// direction (1, -2) and counts the nonzero residual coefficients up to
/// `order` (0 means exact).
pub fn planar_exact_nonzero(order: usize) -> usize {
    let c = QS::rational(-5, 2);
    let delta = QS::rational(1, 1);
    let lambda = QS::rational(-2, 1);
    let (a, b) = recurrence_2d(&c, &delta, &lambda, [QS::rational(1, 1), QS::rational(-2, 1)], order).unwrap();
    planar_residual(&c, &delta, &lambda, &a, &b, order)
        .iter()
        .flatten()
        .filter(|x| !x.is_zero())
        .count()
}

/// Same for the coupled map at b = 1/10 with the symmetric eigenvalue -2 and
/// the antisymmetric eigenvalue (-23 - sqrt 129)/20.
pub fn coupled_exact_nonzero(order: usize) -> usize {
    let c = QS::rational(-5, 2);
    let delta = QS::rational(1, 1);
    let b = QS::rational(1, 10);
    let la = QS::rational(-2, 1);
    let lb = QS::new((-23, 20), (-1, 20));
    // lb solves lambda^2 - (c + 2b) lambda + delta = 0
    let check = lb.clone() * lb.clone() - (c.clone() + QS::from(2) * b.clone()) * lb.clone() + delta.clone();
    assert!(check.is_zero());
    let one = QS::one();
    let va = [one.clone(), la.clone(), one.clone(), la.clone()];
    let vb = [one.clone(), lb.clone(), -one, -lb.clone()];
    let coeffs = recurrence_4d(&c, &delta, &b, [la.clone(), lb.clone()], [va, vb], order).unwrap();
    coupled_residual(&c, &delta, &b, &la, &lb, &coeffs, order)
        .iter()
        .flatten()
        .flatten()
        .filter(|x| !x.is_zero())
        .count()
}

