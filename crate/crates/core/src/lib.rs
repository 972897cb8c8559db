//! Model-based channel charting.
//!
//! A channel chart places every user equipment (UE) on a 2-D map using only
//! the channel state information (CSI) observed at a base station with a
//! uniform linear array. This crate estimates each UE's angle of arrival and
//! range directly from the CSI structure (subspace MUSIC, magnitude-based
//! range proxies, joint smoothed MUSIC, and rotate-and-sum spectral search),
//! synthesizes CSI for test scenes, implements the PCA and Sammon baselines,
//! and scores charts with the rank-based trustworthiness/continuity metrics.
//!
//! The crate is `no_std` and needs only `alloc`. File formats, timing,
//! parallel fan-out and the command line live in the `chartkit` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod channel;
mod error;
pub mod estimators;
pub mod metrics;
pub mod numerics;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
