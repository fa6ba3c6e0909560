//! Semi-analytic BER machinery for the limited-feedback precoder.
//!
//! Under quantized feedback user 1 sees the effective amplitude
//! `z = gamma1 + gamma2 * v`, with `gamma1, gamma2` Rayleigh and `v` the sine
//! of the phase quantization error, modelled as uniform on `[-pi/B, pi/B]`.
//! The average BER is `E{ Q(sqrt(2 Es / sigma^2) z) }`, and `z` may be
//! negative. [`zlaw`] evaluates the CDF of `z`, [`grid`] tabulates it and
//! differentiates it, and [`ber`] integrates the Q-function against the
//! resulting density.

pub mod ber;
pub mod grid;
pub mod quadrature;
pub mod special;
pub mod zlaw;

pub use ber::{ber_ideal_bpsk_rayleigh, ber_ideal_bpsk_rayleigh_quadrature, ber_semi_analytic};
pub use grid::{DistributionGrid, GridSpec};
pub use quadrature::{QuadratureMethod, QuadratureSpec};
pub use special::{erf, erfc, psi, q_func};
pub use zlaw::{cdf_sin_eps_exact, cdf_v, ZLaw};
