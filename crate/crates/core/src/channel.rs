//! Rayleigh links, AWGN and the two-user received signal.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::{wrap_2pi, Complex64};

/// One fading coefficient `h = gamma * exp(j alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub gamma: f64,
    pub alpha: f64,
    pub h: Complex64,
}

impl Link {
    pub fn from_complex(h: Complex64) -> Self {
        Self {
            gamma: h.norm(),
            alpha: wrap_2pi(h.arg()),
            h,
        }
    }
}

/// Complex AWGN sample, `n_i` and `n_q` each of variance `sigma2 / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSample {
    pub n: Complex64,
}

impl NoiseSample {
    pub fn zero() -> Self {
        Self { n: Complex64::new(0.0, 0.0) }
    }

    pub fn n_i(&self) -> f64 {
        self.n.re
    }

    pub fn n_q(&self) -> f64 {
        self.n.im
    }
}

/// Per-antenna coefficients of one user towards an `n_r`-antenna receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkVector {
    pub h: Vec<Complex64>,
}

impl LinkVector {
    pub fn n_r(&self) -> usize {
        self.h.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.h.iter().map(|x| x.norm_sqr()).sum()
    }

    /// `self^H other`
    pub fn inner(&self, other: &LinkVector) -> Complex64 {
        self.h.iter().zip(&other.h).map(|(a, b)| a.conj() * b).sum()
    }
}

fn check_power(g: f64) -> Result<()> {
    if g > 0.0 && g.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("average link power must be positive, got {g}")))
    }
}

/// Circularly symmetric complex Gaussian with total variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(var: f64, rng: &mut R) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Rayleigh link with `E|h|^2 = g`.
pub fn draw_link<R: Rng + ?Sized>(g: f64, rng: &mut R) -> Result<Link> {
    check_power(g)?;
    Ok(Link::from_complex(complex_gaussian(g, rng)))
}

pub fn draw_noise<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> NoiseSample {
    NoiseSample {
        n: complex_gaussian(sigma2, rng),
    }
}

pub fn draw_link_vector<R: Rng + ?Sized>(n_r: usize, g: f64, rng: &mut R) -> Result<LinkVector> {
    if n_r < 1 {
        return Err(invalid("antenna count must be at least 1"));
    }
    check_power(g)?;
    Ok(LinkVector {
        h: (0..n_r).map(|_| complex_gaussian(g, rng)).collect(),
    })
}

/// `h1 x1 + h2 x2 + n`
pub fn received_signal(h1: &Link, h2: &Link, x1: Complex64, x2: Complex64, n: NoiseSample) -> Complex64 {
    h1.h * x1 + h2.h * x2 + n.n
}

/// Vector form for a multi-antenna receiver; `noise` has one entry per antenna.
pub fn received_vector(
    h1: &LinkVector,
    h2: &LinkVector,
    x1: Complex64,
    x2: Complex64,
    noise: &[Complex64],
) -> Vec<Complex64> {
    h1.h
        .iter()
        .zip(&h2.h)
        .zip(noise)
        .map(|((a, b), n)| a * x1 + b * x2 + n)
        .collect()
}

/// Noise variance for a target `Es * g / sigma^2` in dB. No per-bit scaling
/// is applied for higher-order alphabets.
pub fn ebno_to_sigma2(ebno_db: f64, es: f64, g: f64) -> Result<f64> {
    if es.is_nan() || es <= 0.0 {
        return Err(invalid(format!("symbol energy must be positive, got {es}")));
    }
    check_power(g)?;
    Ok(es * g / 10f64.powf(ebno_db / 10.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;
    use crate::stats::{ks_statistic, ks_two_sample, sort_samples};
    use crate::{Error, TAU};
    use approx::assert_relative_eq;

    const N: usize = 1_000_000;

    #[test]
    fn rayleigh_power_and_phase() {
        let mut rng = StreamFactory::new(1).stream(0);
        let links: Vec<Link> = (0..N).map(|_| draw_link(1.0, &mut rng).unwrap()).collect();
        let mean_pow = links.iter().map(|l| l.gamma * l.gamma).sum::<f64>() / N as f64;
        assert!((0.99..=1.01).contains(&mean_pow), "{mean_pow}");

        for l in links.iter().take(1000) {
            assert!((l.h.norm() - l.gamma).abs() < 1e-12);
            assert!((0.0..TAU).contains(&l.alpha));
        }

        let mut alpha: Vec<f64> = links.iter().map(|l| l.alpha).collect();
        sort_samples(&mut alpha);
        assert!(ks_statistic(&alpha, |x| x / TAU) < 0.01);

        let mut gamma: Vec<f64> = links.iter().map(|l| l.gamma).collect();
        sort_samples(&mut gamma);
        assert!(ks_statistic(&gamma, |x| 1.0 - (-x * x).exp()) < 0.01);

        // magnitude / phase independence
        let (mg, ma) = (
            links.iter().map(|l| l.gamma).sum::<f64>() / N as f64,
            links.iter().map(|l| l.alpha).sum::<f64>() / N as f64,
        );
        let (mut sgg, mut saa, mut sga) = (0.0, 0.0, 0.0);
        for l in &links {
            let (dg, da) = (l.gamma - mg, l.alpha - ma);
            sgg += dg * dg;
            saa += da * da;
            sga += dg * da;
        }
        assert!((sga / (sgg * saa).sqrt()).abs() < 0.01);
    }

    #[test]
    fn noise_isotropic() {
        let mut rng = StreamFactory::new(2).stream(0);
        let sigma2 = 0.3;
        let (mut vi, mut vq) = (0.0, 0.0);
        for _ in 0..N {
            let n = draw_noise(sigma2, &mut rng);
            vi += n.n_i() * n.n_i();
            vq += n.n_q() * n.n_q();
        }
        vi /= N as f64;
        vq /= N as f64;
        assert_relative_eq!(vi, sigma2 / 2.0, max_relative = 0.02);
        assert_relative_eq!(vq, sigma2 / 2.0, max_relative = 0.02);
        assert_relative_eq!(vi + vq, sigma2, max_relative = 0.02);
    }

    #[test]
    fn invalid_parameters() {
        let mut rng = StreamFactory::new(0).stream(0);
        assert!(matches!(draw_link(0.0, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(matches!(draw_link(-1.0, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(matches!(draw_link_vector(0, 1.0, &mut rng), Err(Error::InvalidParameter(_))));
        assert!(ebno_to_sigma2(0.0, 0.0, 1.0).is_err());
        assert!(ebno_to_sigma2(0.0, 1.0, -2.0).is_err());
    }

    #[test]
    fn ebno_conversion() {
        assert_relative_eq!(ebno_to_sigma2(0.0, 1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(ebno_to_sigma2(10.0, 1.0, 1.0).unwrap(), 0.1, max_relative = 1e-14);
        assert_relative_eq!(ebno_to_sigma2(20.0, 2.0, 1.0).unwrap(), 0.02, max_relative = 1e-14);
    }

    #[test]
    fn received_signal_cases() {
        let one = Link::from_complex(Complex64::new(1.0, 0.0));
        let r = received_signal(&one, &one, 1.0.into(), (-1.0).into(), NoiseSample::zero());
        assert_eq!(r, Complex64::new(0.0, 0.0));

        let h1 = Link::from_complex(Complex64::new(0.3, -1.2));
        let x1 = Complex64::new(0.5, 0.25);
        let r = received_signal(&h1, &one, x1, 0.0.into(), NoiseSample::zero());
        assert_eq!(r, h1.h * x1);

        // recompute via polar form on random draws
        let mut rng = StreamFactory::new(3).stream(0);
        for _ in 0..1000 {
            let a = draw_link(1.0, &mut rng).unwrap();
            let b = draw_link(2.0, &mut rng).unwrap();
            let x1 = complex_gaussian(1.0, &mut rng);
            let x2 = complex_gaussian(1.0, &mut rng);
            let n = draw_noise(0.1, &mut rng);
            let r = received_signal(&a, &b, x1, x2, n);
            let re = a.gamma * x1.norm() * (a.alpha + x1.arg()).cos()
                + b.gamma * x2.norm() * (b.alpha + x2.arg()).cos()
                + n.n_i();
            let im = a.gamma * x1.norm() * (a.alpha + x1.arg()).sin()
                + b.gamma * x2.norm() * (b.alpha + x2.arg()).sin()
                + n.n_q();
            assert!((r.re - re).abs() < 1e-12 && (r.im - im).abs() < 1e-12);
        }
    }

    #[test]
    fn link_vectors() {
        let mut rng = StreamFactory::new(4).stream(0);
        let n = 200_000;
        let mut single: Vec<f64> = (0..n)
            .map(|_| draw_link_vector(1, 1.0, &mut rng).unwrap().h[0].norm())
            .collect();
        let mut scalar: Vec<f64> = (0..n).map(|_| draw_link(1.0, &mut rng).unwrap().gamma).collect();
        sort_samples(&mut single);
        sort_samples(&mut scalar);
        // two-sample KS critical value at alpha=0.001 is 1.95*sqrt(2/n) ~ 0.0062
        assert!(ks_two_sample(&single, &scalar) < 0.0062);

        let mut rng = StreamFactory::new(5).stream(0);
        let n_r = 3;
        let mean = (0..N / 4)
            .map(|_| draw_link_vector(n_r, 1.0, &mut rng).unwrap().norm_sqr())
            .sum::<f64>()
            / (N / 4) as f64;
        assert_relative_eq!(mean, n_r as f64, max_relative = 0.01);
    }
}
