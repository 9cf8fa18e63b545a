//! Physical-optics simulation of a prime-focus paraboloidal reflector whose
//! outer rim is replaced by a conformal, 1-bit reconfigurable reflectarray,
//! plus the serial-search state selection that steers a pattern null.
//!
//! The pipeline is:
//!
//! 1. [`geometry`] meshes the solid reflector and tessellates the rim annulus
//!    into half-wavelength unit cells.
//! 2. [`feed`] evaluates the raised-cosine feed field on every sample.
//! 3. [`scattering`] turns incident fields into physical-optics surface
//!    currents through per-sample reflection dyads.
//! 4. [`farfield`] integrates the currents into far-field co/cross-polar
//!    patterns and directivities.
//! 5. [`nullsteer`] picks the per-cell switch states, [`efficiency`] reports
//!    radiation efficiency and gain, and [`sweep`] maps null directions in
//!    parallel.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod efficiency;
pub mod error;
pub mod farfield;
pub mod feed;
pub mod geometry;
pub mod model;
pub mod nullsteer;
pub mod output;
pub mod parallel;
pub mod pipeline;
pub mod scattering;
pub mod svg;
pub mod sweep;
pub mod vector;

pub use error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wave impedance of free space, ohms.
pub const ETA0: f64 = 376.730_313_668;

/// Crate version string embedded in output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
