//! CDF of the effective amplitude `z = gamma1 + gamma2 * v`.
//!
//! `gamma1, gamma2` are Rayleigh with `E{gamma^2} = g` and `v` is uniform on
//! `[-pi/B, pi/B]`. Conditioning on `(gamma2, v)`,
//!
//! ```text
//! F_z(t) = E{ F_gamma1(t - gamma2 v) },   F_gamma1(x) = 1 - exp(-x^2 / g), x >= 0
//! ```
//!
//! Two evaluation routes are provided and cross-checked in tests:
//!
//! * the *region* form integrates over `(v, y)` directly with nested
//!   quadrature (reference);
//! * the *closed-inner* form solves the `y` integral analytically, leaving a
//!   single integral over `v` built from `exp(-t^2/(g v^2))`, `psi(t, v)` and
//!   error functions of `t v / sqrt(g(1+v^2))` and `t / (v sqrt(g(1+v^2)))`.
//!
//! All exponentials carry negative arguments. Integration runs over the
//! normalised variable `u = v B / pi` on `[-1, 1]` with density `1/2`, so
//! quadrature tolerances apply on the probability scale.

use std::cell::Cell;

use rand::Rng;

use super::quadrature::QuadratureSpec;
use super::special::{erf, erfc, psi};
use crate::channel::complex_gaussian;
use crate::error::{invalid, Error, Result};
use crate::PI;

/// Rayleigh tail beyond `Y_MAX_SIGMAS * sqrt(g)` is `exp(-64)`.
pub const Y_MAX_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZLaw {
    g: f64,
    levels: usize,
}

impl ZLaw {
    pub fn new(g: f64, levels: usize) -> Result<Self> {
        if !(g > 0.0 && g.is_finite()) {
            return Err(invalid(format!("average link power must be positive, got {g}")));
        }
        if levels < 2 {
            return Err(invalid(format!("feedback levels must be at least 2, got {levels}")));
        }
        Ok(Self { g, levels })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// `pi / B`, the edge of the support of `v`.
    pub fn half_width(&self) -> f64 {
        PI / self.levels as f64
    }

    fn y_max(&self) -> f64 {
        Y_MAX_SIGMAS * self.g.sqrt()
    }

    /// Draw `z` directly from its definition.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g1 = complex_gaussian(self.g, rng).norm();
        let g2 = complex_gaussian(self.g, rng).norm();
        let v = rng.gen_range(-1.0..=1.0) * self.half_width();
        g1 + g2 * v
    }

    /// `F_z(t)` through the closed-inner route on either side of zero.
    pub fn cdf(&self, t: f64, quad: &QuadratureSpec) -> Result<f64> {
        if t >= 0.0 {
            self.cdf_pos(t, quad)
        } else {
            self.cdf_neg_closed(t, quad)
        }
    }

    /// `F_z(t)` for `t >= 0`, closed-inner route.
    pub fn cdf_pos(&self, t: f64, quad: &QuadratureSpec) -> Result<f64> {
        debug_assert!(t >= 0.0);
        let (g, w) = (self.g, self.half_width());
        let base = (-t * t / g).exp();
        let integrand = |u: f64| {
            let v = u * w;
            if v == 0.0 {
                return 1.0 - base;
            }
            let q = 1.0 + v * v;
            let s = (g * q).sqrt();
            let p = psi(t, v, g);
            let common = 1.0 - base / q;
            if v < 0.0 {
                common - p * erfc(-t * v / s)
            } else {
                let edge = (-t * t / (g * v * v)).exp();
                common - edge * v * v / q - p * (erf(t / (v * s)) + erf(t * v / s))
            }
        };
        let half = 0.5 * (quad.integrate(integrand, -1.0, 0.0)? + quad.integrate(integrand, 0.0, 1.0)?);
        Ok(half.clamp(0.0, 1.0))
    }

    /// `F_z(t)` for `t < 0`, closed-inner route. Only `v < 0` contributes.
    pub fn cdf_neg_closed(&self, t: f64, quad: &QuadratureSpec) -> Result<f64> {
        debug_assert!(t < 0.0);
        let (g, w) = (self.g, self.half_width());
        let integrand = |u: f64| {
            let v = u * w;
            if v == 0.0 {
                return 0.0;
            }
            let q = 1.0 + v * v;
            let s = (g * q).sqrt();
            let edge = (-t * t / (g * v * v)).exp();
            edge * v * v / q - psi(t, v, g) * erfc(t / (v * s))
        };
        let half = 0.5 * quad.integrate(integrand, -1.0, 0.0)?;
        Ok(half.clamp(0.0, 1.0))
    }

    fn inner_density(&self, t: f64, v: f64) -> impl Fn(f64) -> f64 {
        let g = self.g;
        move |y: f64| {
            let d = t - y * v;
            (1.0 - (-d * d / g).exp()) * 2.0 * y / g * (-y * y / g).exp()
        }
    }

    /// `F_z(t)` for `t >= 0` by nested quadrature over the region
    /// `{(v, y): t >= y v}`.
    pub fn cdf_pos_region(&self, t: f64, quad: &QuadratureSpec) -> Result<f64> {
        debug_assert!(t >= 0.0);
        let inner_quad = quad.tightened(10.0);
        let y_max = self.y_max();
        let failure: Cell<Option<Error>> = Cell::new(None);
        let outer = |u: f64| {
            let v = u * self.half_width();
            let upper = if v > 0.0 { (t / v).min(y_max) } else { y_max };
            match inner_quad.integrate(self.inner_density(t, v), 0.0, upper) {
                Ok(x) => x,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        };
        let res = quad
            .integrate(outer, -1.0, 0.0)
            .and_then(|a| Ok(a + quad.integrate(outer, 0.0, 1.0)?));
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(0.5 * res?)
    }

    /// `F_z(t)` for `t < 0` by nested quadrature over `v in [-pi/B, 0)`,
    /// `y in [t / v, y_max]`.
    pub fn cdf_neg(&self, t: f64, quad: &QuadratureSpec) -> Result<f64> {
        debug_assert!(t < 0.0);
        let inner_quad = quad.tightened(10.0);
        let y_max = self.y_max();
        let failure: Cell<Option<Error>> = Cell::new(None);
        let outer = |u: f64| {
            let v = u * self.half_width();
            if v >= 0.0 {
                return 0.0;
            }
            let lower = t / v;
            if lower >= y_max {
                return 0.0;
            }
            match inner_quad.integrate(self.inner_density(t, v), lower, y_max) {
                Ok(x) => x,
                Err(e) => {
                    failure.set(Some(e));
                    f64::NAN
                }
            }
        };
        // the inner integral vanishes for v in (t / y_max, 0); start the
        // outer range there
        let u_cut = ((t / y_max) / self.half_width()).max(-1.0);
        let res = quad.integrate(outer, -1.0, u_cut);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(0.5 * res?)
    }
}

/// CDF of the uniform law on `[-pi/B, pi/B]`.
pub fn cdf_v(x: f64, levels: usize) -> f64 {
    let w = PI / levels as f64;
    ((x + w) / (2.0 * w)).clamp(0.0, 1.0)
}

/// Exact CDF of `sin(eps)` for `eps` uniform on `[-pi/B, pi/B]` (B >= 2).
pub fn cdf_sin_eps_exact(x: f64, levels: usize) -> f64 {
    let w = PI / levels as f64;
    ((x.clamp(-1.0, 1.0).asin() + w) / (2.0 * w)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;
    use crate::stats::{ks_statistic, sort_samples};

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default().with_tolerance(1e-11, 1e-10)
    }

    #[test]
    fn closed_inner_matches_region_form() {
        let q = quad();
        for (g, b) in [(1.0, 16), (1.0, 8), (2.5, 64), (0.4, 4)] {
            let law = ZLaw::new(g, b).unwrap();
            for k in 0..=20 {
                let t = k as f64 * 0.2 * g.sqrt();
                let a = law.cdf_pos(t, &q).unwrap();
                let r = law.cdf_pos_region(t, &q).unwrap();
                assert!((a - r).abs() < 1e-8, "g={g} B={b} t={t}: {a} vs {r}");
            }
            for k in 1..=10 {
                let t = -(k as f64) * 0.1 * law.half_width() * Y_MAX_SIGMAS * g.sqrt();
                let a = law.cdf_neg_closed(t, &q).unwrap();
                let r = law.cdf_neg(t, &q).unwrap();
                assert!((a - r).abs() < 1e-8, "g={g} B={b} t={t}: {a} vs {r}");
            }
        }
    }

    #[test]
    fn limits_and_continuity() {
        let q = QuadratureSpec::default();
        let law = ZLaw::new(1.0, 16).unwrap();
        assert!((law.cdf(10.0, &q).unwrap() - 1.0).abs() < 1e-4);
        assert!(law.cdf_neg(-10.0, &q).unwrap() < 1e-6);
        assert!(law.cdf_neg(-1e3, &q).unwrap() < 1e-6);
        let at_zero = law.cdf_pos(0.0, &q).unwrap();
        assert!((law.cdf_neg(-1e-4, &q).unwrap() - at_zero).abs() < 1e-3);
        assert!((law.cdf_neg_closed(-1e-4, &q).unwrap() - at_zero).abs() < 1e-3);
        // F(0) = (1/2) * mean of v^2/(1+v^2) over v in [-pi/B, 0]
        let w = law.half_width();
        let expect = 0.5 * (1.0 - w.atan() / w);
        assert!((at_zero - expect).abs() < 1e-9, "{at_zero} vs {expect}");
    }

    #[test]
    fn many_levels_degenerate_to_rayleigh() {
        let q = QuadratureSpec::default();
        let law = ZLaw::new(1.0, 1 << 20).unwrap();
        for k in 0..30 {
            let t = k as f64 * 0.1;
            assert!((law.cdf(t, &q).unwrap() - (1.0 - (-t * t).exp())).abs() < 1e-5);
        }
    }

    #[test]
    fn cdf_matches_samples() {
        let law = ZLaw::new(1.0, 16).unwrap();
        let mut rng = StreamFactory::new(31).stream(0);
        let n = 2_000_000;
        let mut z: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
        sort_samples(&mut z);
        let q = QuadratureSpec::default();
        for t in [-0.05, 0.0, 0.3, 1.0, 2.0] {
            let emp = z.partition_point(|&x| x <= t) as f64 / n as f64;
            let f = law.cdf(t, &q).unwrap();
            assert!((emp - f).abs() < 0.003, "t={t}: {emp} vs {f}");
        }
    }

    #[test]
    fn uniform_cdf_of_v() {
        assert_eq!(cdf_v(0.0, 8), 0.5);
        assert_eq!(cdf_v(PI / 8.0, 8), 1.0);
        assert_eq!(cdf_v(-PI / 8.0, 8), 0.0);
        assert_eq!(cdf_v(5.0, 8), 1.0);
        assert_eq!(cdf_v(-5.0, 8), 0.0);
    }

    #[test]
    fn exact_law_of_sine_error() {
        let levels = 8;
        let mut rng = StreamFactory::new(32).stream(0);
        let w = PI / levels as f64;
        let mut s: Vec<f64> = (0..200_000).map(|_| rng.gen_range(-w..w).sin()).collect();
        sort_samples(&mut s);
        assert!(ks_statistic(&s, |x| cdf_sin_eps_exact(x, levels)) < 0.005);
    }

    #[test]
    fn uniform_approximation_improves_with_levels() {
        let sup = |b: usize| {
            let w = PI / b as f64;
            (0..=4000)
                .map(|i| -w + 2.0 * w * i as f64 / 4000.0)
                .map(|x| (cdf_sin_eps_exact(x, b) - cdf_v(x, b)).abs())
                .fold(0.0, f64::max)
        };
        let d: Vec<f64> = [8, 16, 32, 64].into_iter().map(sup).collect();
        assert!(d.windows(2).all(|p| p[1] < p[0]), "{d:?}");
        assert!(d[0] < 0.02);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ZLaw::new(0.0, 16).is_err());
        assert!(ZLaw::new(1.0, 1).is_err());
    }
}
