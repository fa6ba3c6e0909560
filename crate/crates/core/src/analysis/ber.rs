//! Average BER of BPSK under Rayleigh fading: the interference-free closed
//! form and the semi-analytic value under quantized feedback.

use super::grid::DistributionGrid;
use super::quadrature::QuadratureSpec;
use super::special::q_func;
use crate::error::Result;

fn ebno_linear(ebno_db: f64) -> f64 {
    10f64.powf(ebno_db / 10.0)
}

/// `0.5 (1 - sqrt(snr / (1 + snr)))` with `snr = Es g / sigma^2`.
pub fn ber_ideal_bpsk_rayleigh(ebno_db: f64) -> f64 {
    let snr = ebno_linear(ebno_db);
    0.5 * (1.0 - (snr / (1.0 + snr)).sqrt())
}

/// Same quantity by quadrature of `E{ Q(sqrt(2 Es gamma^2 / sigma^2)) }` over
/// the Rayleigh density of `gamma`, with `Es = 1`.
pub fn ber_ideal_bpsk_rayleigh_quadrature(ebno_db: f64, g: f64, quad: &QuadratureSpec) -> Result<f64> {
    let sigma2 = g / ebno_linear(ebno_db);
    let c = (2.0 / sigma2).sqrt();
    quad.integrate(
        |x| q_func(c * x) * 2.0 * x / g * (-x * x / g).exp(),
        0.0,
        10.0 * g.sqrt(),
    )
}

/// `integral of Q(sqrt(2 Es / sigma^2) t) f_z(t) dt` over the grid, `Es = 1`.
pub fn ber_semi_analytic(ebno_db: f64, grid: &DistributionGrid) -> f64 {
    let sigma2 = grid.g() / ebno_linear(ebno_db);
    let c = (2.0 / sigma2).sqrt();
    grid.integrate_nodes(|t, p| q_func(c * t) * p).clamp(0.0, 1.0)
}
