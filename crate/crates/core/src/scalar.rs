//! Minimal field abstraction used by the coefficient recurrences.
//!
//! The recurrences run on `f64` in production; tests instantiate them over an
//! exact quadratic number field to check the algebra without rounding.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

pub trait Scalar:
    Clone
    + Zero
    + One
    + From<i32>
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Absolute value as a float, used for singularity checks.
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

/// `base^0, base^1, ..., base^n`.
pub(crate) fn powers<T: Scalar>(base: &T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    for k in 1..=n {
        let next = out[k - 1].clone() * base.clone();
        out.push(next);
    }
    out
}
