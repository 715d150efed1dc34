//! Invariant manifolds of the cubic generalized Henon map and of two linearly
//! coupled copies of it, computed as truncated power series by the
//! parametrization method, together with homoclinic root finding, parameter
//! continuation up to homoclinic tangency, and figure-data generators.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod continuation;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod homoclinic;
pub mod io;
pub mod maps;
pub mod manifold2d;
pub mod manifold4d;
pub mod reproduce;
pub mod scalar;

pub use error::{Error, Result};
pub use maps::{MapParams2D, MapParams4D, PhaseMap, Point2D, Point4D, SpectrumAtOrigin};
pub use manifold2d::{Branch, Series2D, ValidityProfile};
