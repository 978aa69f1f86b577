//! Baseband simulator for a direct-sequence spread spectrum (DSSS) link using
//! the IEEE 802.15.4 2450 MHz O-QPSK chip mapping.
//!
//! Two receivers are provided:
//!
//! * a classic receiver that samples every chip with a half-sine matched
//!   filter and classifies each symbol by least squares, and
//! * a compressive receiver that integrates `1/κ` consecutive chips per sample
//!   (a repeated matched filter) and classifies in the compressed domain.
//!
//! The [`harness`] module runs seeded, parallel Monte Carlo bit-error-rate
//! sweeps and [`theory`] evaluates the M-ary FSK reference curves.

pub mod channel;
pub mod chipmap;
mod error;
pub mod harness;
pub mod rx;
pub mod theory;
pub mod tx;

pub use error::{Error, Result};
