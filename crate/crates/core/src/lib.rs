//! Signal design and link-level simulation for far-field wireless power
//! transfer.
//!
//! The library models the four transmit strategies that exploit a
//! rectenna's fourth-order nonlinearity — multisine waveforms (with and
//! without channel knowledge), energy beamforming, energy modulation and
//! phase-sweeping transmit diversity — together with flat/selective fading
//! channels, first-order Gauss-Markov channel aging under mobility, the
//! closed-form scaling laws those strategies obey, and a seeded Monte
//! Carlo harness that ties it all together.

// Validation sites use `!(x > 0.0)` so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod diversity;
pub mod error;
pub mod harness;
pub mod math;
pub mod modulation;
pub mod presets;
pub mod rectenna;
pub mod scaling;
pub mod waveform;

pub use error::{Error, Result};
