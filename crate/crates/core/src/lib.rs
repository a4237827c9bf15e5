//! Illumination-aware volume rendering building blocks.
//!
//! * [`envmap`]: equirectangular HDR environment maps (`.hdr`, `.pfm`).
//! * [`baker`]: Phong-lobe prefiltering into diffuse and specular lightmaps,
//!   plus the brute-force oracle the lookups replace.
//! * [`mls`]: moving-least-squares rigid and rotation deformation fields and
//!   the nearest-triangle surface-field baseline.
//! * [`shading`]: per-point Phong composition with a residual term.
//! * [`volume`]: emission-absorption ray marching over procedural scenes,
//!   producing intrinsic channels.
//! * [`bench`]: timing and continuity measurements.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baker;
pub mod bench;
pub mod color;
pub mod envmap;
mod error;
pub mod mls;
pub mod par;
pub mod shading;
pub mod validate;
pub mod volume;

pub use color::Rgb;
pub use envmap::{Direction, EnvironmentMap, LatLongMap};
pub use error::{Error, Result};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
