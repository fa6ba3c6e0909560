//! Gaussian tail and the auxiliary function of the CDF of `z`.

use crate::PI;

pub fn erf(x: f64) -> f64 {
    statrs::function::erf::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// Gaussian tail probability `Q(x) = P(N(0,1) > x)`, valid for negative `x`.
pub fn q_func(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `sqrt(pi / (g (1+v^2))) * t v / (1+v^2) * exp(-t^2 / (g (1+v^2)))`
pub fn psi(t: f64, v: f64, g: f64) -> f64 {
    let w = 1.0 + v * v;
    (PI / (g * w)).sqrt() * t * v / w * (-t * t / (g * w)).exp()
}
