//! Link-level models for joint transmission between a multi-antenna base
//! station (BS) and waveguide-mounted pinching antennas.
//!
//! The crate is `no_std` (with `alloc`) and covers the whole numerical
//! pipeline:
//!
//! - [`config`]: system parameters, wavelengths, path-loss constant, noise power
//! - [`geometry`]: phase delays and the pinching-antenna placement solvers
//! - [`channel`]: Rayleigh BS channel, coherent waveguide ports, joint channel
//! - [`beamforming`]: power splits and unit-norm weights for BS-only/SD/SCD/FCD
//! - [`analytics`]: closed-form average SNRs, joint transmission gains, limits
//! - [`montecarlo`]: counter-based trial kernels, order-fixed reduction and
//!   statistical validators for the closed forms
//!
//! IO, the parallel driver and the command-line front end live in the
//! `pinchlink` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytics;
pub mod beamforming;
pub mod channel;
pub mod config;
mod error;
pub mod geometry;
pub mod montecarlo;
pub mod stats;

pub use analytics::{analytic_snr, gain_ratios, GainReport, SnrReport};
pub use beamforming::{Beamformer, PowerAllocation, Scheme};
pub use channel::{BsChannel, JointChannel};
pub use config::{PhysicalConstants, SystemConfig};
pub use error::{Error, Result};
pub use geometry::{PlacementResult, Point3, WaveguideSpec};
pub use montecarlo::McEstimate;

/// Tolerance for "equal modulo 2π" checks on phases, in radians.
pub const PHASE_TOLERANCE: f64 = 1e-6;

/// Tolerance on the Euclidean norm of a beamforming vector.
pub const UNIT_NORM_TOLERANCE: f64 = 1e-9;
