//! Link-level simulation and semi-analytic BER evaluation of phase precoding
//! that nulls equal-strength co-channel interference between two
//! single-antenna users sharing an access point.
//!
//! The access point knows both fading coefficients, picks a precoding phase
//! for user 1 and feeds back a (possibly quantized) phase for user 2 so that
//! the interference lands in the quadrature dimension, which a one-dimensional
//! (PAM) detector ignores. The crate provides:
//!
//! * [`constellation`]: Gray-labelled M-PAM and M-QAM alphabets.
//! * [`channel`]: Rayleigh links, AWGN and the received-signal model.
//! * [`precoding`]: the nulling phase rule, the feedback codebook and the
//!   multi-antenna phase rule.
//! * [`detection`]: single-user statistic, joint-ML baseline, MRC.
//! * [`analysis`]: Q-function, quadrature, the law of the effective amplitude
//!   under quantized feedback and the semi-analytic BER.
//! * [`montecarlo`]: reproducible, chunked BER sweeps.
//! * [`io`]: command-line parsing and CSV / manifest output.

pub mod analysis;
pub mod channel;
pub mod constellation;
pub mod detection;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod precoding;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub(crate) use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Reduce an angle to `[0, 2π)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_pi(x: f64) -> f64 {
    let r = wrap_2pi(x);
    if r > PI {
        r - TAU
    } else {
        r
    }
}
