//! Rotationally symmetric mean curvature flow out of catenoids.
//!
//! The crate samples catenoid profiles and their normal offsets, evolves
//! profile curves under the flow, runs the escape-time construction of
//! ancient and eternal solutions, and checks their predicted behaviour:
//! mean convexity, avoidance, convergence to a grim reaper, flattening,
//! density monotonicity and instability of the catenoid.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod analysis;
pub mod construction;
pub mod error;
pub mod geometry;
pub mod integrator;
pub mod interface;
pub mod numerics;

pub use error::{Error, Result};
