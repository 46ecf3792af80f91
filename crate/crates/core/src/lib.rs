//! Outage analysis of NOMA downlinks where every user is served by its own
//! intelligent reflecting surface with finite phase resolution.
//!
//! - [`fading`]: Nakagami-m sampling and reproducible random streams.
//! - [`phase`]: discrete phase codebooks and optimal per-element phases.
//! - [`channel`]: equivalent channel gains and their ordering.
//! - [`analytic`]: high-SNR outage bounds and diversity orders.
//! - [`montecarlo`]: trial-based outage estimates, gain ratios and a
//!   full-duplex relay baseline.
//! - [`experiments`]: config files, sweeps, CSV output and slope fits.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
pub mod error;
pub mod experiments;
pub mod fading;
pub mod montecarlo;
pub mod phase;
pub mod special;

pub use error::{Error, Result};
