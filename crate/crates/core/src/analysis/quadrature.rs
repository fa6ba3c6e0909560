//! One-dimensional quadrature: adaptive Simpson and composite Gauss-Legendre.

use std::sync::OnceLock;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureMethod {
    AdaptiveSimpson,
    GaussLegendre,
}

/// Tolerances and limits for a single integral.
///
/// The acceptance threshold is `max(abs_tol, rel_tol * |I|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// recursion limit for adaptive Simpson
    pub max_depth: u32,
    /// initial panels (Simpson) or panel count (Gauss-Legendre)
    pub panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadratureMethod::AdaptiveSimpson,
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_depth: 40,
            panels: 4,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    /// Same settings with both tolerances scaled by `factor`.
    pub fn tightened(self, factor: f64) -> Self {
        self.with_tolerance(self.abs_tol / factor, self.rel_tol / factor)
    }

    pub fn gauss_legendre(panels: usize) -> Self {
        Self {
            method: QuadratureMethod::GaussLegendre,
            panels,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.panels > 0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("quadrature tolerances and panel count must be positive".into()))
        }
    }

    /// Integrate `f` over `[a, b]`. `a > b` flips the sign, `a == b` gives 0.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        self.validate()?;
        if a == b {
            return Ok(0.0);
        }
        if a > b {
            return self.integrate(f, b, a).map(|v| -v);
        }
        let value = match self.method {
            QuadratureMethod::AdaptiveSimpson => self.simpson(&f, a, b)?,
            QuadratureMethod::GaussLegendre => self.gauss_legendre_composite(&f, a, b)?,
        };
        if !value.is_finite() {
            return Err(Error::NumericFailure {
                achieved: f64::INFINITY,
                requested: self.abs_tol,
            });
        }
        Ok(value)
    }

    fn simpson<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Result<f64> {
        // coarse pass sets the relative threshold
        let n = self.panels;
        let h = (b - a) / n as f64;
        let mut panels = Vec::with_capacity(n);
        let mut coarse = 0.0;
        for i in 0..n {
            let (x0, x1) = (a + i as f64 * h, if i + 1 == n { b } else { a + (i + 1) as f64 * h });
            let xm = 0.5 * (x0 + x1);
            let (f0, fm, f1) = (f(x0), f(xm), f(x1));
            let s = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
            coarse += s;
            panels.push((x0, x1, f0, fm, f1, s));
        }
        let tol = self.abs_tol.max(self.rel_tol * coarse.abs());
        let mut state = SimpsonState {
            failed: false,
            err: 0.0,
        };
        let mut total = 0.0;
        for (x0, x1, f0, fm, f1, s) in panels {
            total += simpson_step(f, x0, x1, f0, fm, f1, s, tol / n as f64, self.max_depth, &mut state);
        }
        if state.failed && state.err > tol {
            return Err(Error::NumericFailure {
                achieved: state.err,
                requested: tol,
            });
        }
        Ok(total)
    }

    fn gauss_legendre_composite<F: Fn(f64) -> f64>(&self, f: &F, a: f64, b: f64) -> Result<f64> {
        let coarse = gl_panels(f, a, b, self.panels);
        let fine = gl_panels(f, a, b, 2 * self.panels);
        let err = (fine - coarse).abs();
        let tol = self.abs_tol.max(self.rel_tol * fine.abs());
        if err > tol {
            return Err(Error::NumericFailure {
                achieved: err,
                requested: tol,
            });
        }
        Ok(fine)
    }
}

struct SimpsonState {
    failed: bool,
    err: f64,
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    state: &mut SimpsonState,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || !delta.is_finite() {
        state.err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    if depth == 0 || m <= a || m >= b {
        state.failed = true;
        state.err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, state)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, state)
}

const GL_ORDER: usize = 16;

/// Nodes and weights of the 16-point Gauss-Legendre rule on [-1, 1], by
/// Newton iteration on the Legendre polynomial.
fn gl_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        (0..n)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    })
}

fn gl_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gl_rule();
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let c = a + (p as f64 + 0.5) * h;
            0.5 * h * rule.iter().map(|&(x, w)| w * f(c + 0.5 * h * x)).sum::<f64>()
        })
        .sum()
}
