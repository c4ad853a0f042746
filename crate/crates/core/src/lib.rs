//! Spatial coded modulation (SCM) link-level simulator.
//!
//! Antenna activation patterns are codewords of a binary code with enlarged
//! minimum Hamming distance. This crate builds the codebooks and the
//! composite transmit alphabet, samples correlated Rayleigh/Rician/Nakagami
//! channels, runs ML and angle-pruned detection, evaluates the MGF-based
//! capacity lower bound and BER union bound, and drives reproducible Monte
//! Carlo sweeps.
//!
//! SNR is `1/sigma2` throughout since every alphabet has unit average power.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod detect;
mod error;
pub mod experiment;
pub mod linalg;
pub mod rng;
pub mod signal_space;
pub mod simulate;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Noise variance for an SNR given in dB, with unit transmit power.
pub fn noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}
