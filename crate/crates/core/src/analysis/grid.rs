//! Tabulated CDF and finite-difference density of `z` on a t-grid.

use std::io::Write;

use rayon::prelude::*;

use super::quadrature::QuadratureSpec;
use super::zlaw::{ZLaw, Y_MAX_SIGMAS};
use crate::error::{Error, Result};

/// Normalisation error that triggers step halving.
pub const NORMALISATION_TARGET: f64 = 1e-3;
/// Normalisation error beyond which a grid is rejected.
pub const NORMALISATION_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// intervals on `[0, t_max]`
    pub positive_intervals: usize,
    /// lower bound on intervals on `[t_min, 0]`; the negative side otherwise
    /// uses the positive step
    pub negative_min_intervals: usize,
    /// `t_max = t_max_sigmas * sqrt(g)`
    pub t_max_sigmas: f64,
    pub max_halvings: u32,
    pub quad: QuadratureSpec,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            positive_intervals: 8192,
            negative_min_intervals: 256,
            t_max_sigmas: 9.0,
            max_halvings: 3,
            quad: QuadratureSpec::default().with_tolerance(1e-12, 1e-11),
        }
    }
}

/// `F_z` and `f_z` tabulated on `t_min = -(pi/B) 8 sqrt(g)` to
/// `t_max = 9 sqrt(g)`, uniform on each side of `t = 0`, which is a node.
#[derive(Debug, Clone)]
pub struct DistributionGrid {
    t_nodes: Vec<f64>,
    cdf_values: Vec<f64>,
    pdf_values: Vec<f64>,
    zero_index: usize,
    g: f64,
    levels: usize,
}

impl DistributionGrid {
    /// Tabulate the law of `z`, halving the step until the density
    /// integrates to one within [`NORMALISATION_TARGET`].
    pub fn build(law: &ZLaw, spec: &GridSpec) -> Result<Self> {
        let mut intervals = spec.positive_intervals.max(2);
        let mut halvings = 0;
        loop {
            let grid = Self::tabulate(law, spec, intervals)?;
            let err = (grid.pdf_integral() - 1.0).abs();
            if err < NORMALISATION_TARGET {
                return Ok(grid);
            }
            if halvings >= spec.max_halvings {
                if err < NORMALISATION_LIMIT {
                    return Ok(grid);
                }
                return Err(Error::GridResolution {
                    integral: grid.pdf_integral(),
                });
            }
            halvings += 1;
            intervals *= 2;
        }
    }

    fn tabulate(law: &ZLaw, spec: &GridSpec, intervals: usize) -> Result<Self> {
        let sg = law.g().sqrt();
        let t_max = spec.t_max_sigmas * sg;
        let t_min = -law.half_width() * Y_MAX_SIGMAS * sg;
        let h = t_max / intervals as f64;
        let n_neg = ((-t_min / h).ceil() as usize).max(spec.negative_min_intervals);

        let mut t_nodes = Vec::with_capacity(n_neg + intervals + 1);
        t_nodes.extend((0..n_neg).map(|i| t_min + (-t_min) * i as f64 / n_neg as f64));
        t_nodes.extend((0..=intervals).map(|i| t_max * i as f64 / intervals as f64));

        let cdf_values = t_nodes
            .par_iter()
            .map(|&t| law.cdf(t, &spec.quad))
            .collect::<Result<Vec<f64>>>()?;
        let pdf_values = pdf_z(&t_nodes, &cdf_values, n_neg)?;
        Ok(Self {
            t_nodes,
            cdf_values,
            pdf_values,
            zero_index: n_neg,
            g: law.g(),
            levels: law.levels(),
        })
    }

    pub fn t_nodes(&self) -> &[f64] {
        &self.t_nodes
    }

    pub fn cdf_values(&self) -> &[f64] {
        &self.cdf_values
    }

    pub fn pdf_values(&self) -> &[f64] {
        &self.pdf_values
    }

    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Integral of the tabulated density.
    pub fn pdf_integral(&self) -> f64 {
        self.integrate_nodes(|_, p| p)
    }

    /// Integral of `weight(t, f_z(t))` over the grid: composite Simpson on
    /// each uniform side, trapezoid on a trailing odd interval.
    pub fn integrate_nodes(&self, weight: impl Fn(f64, f64) -> f64) -> f64 {
        let vals: Vec<f64> = self
            .t_nodes
            .iter()
            .zip(&self.pdf_values)
            .map(|(&t, &p)| weight(t, p))
            .collect();
        let neg = simpson_uniform(&self.t_nodes[..=self.zero_index], &vals[..=self.zero_index]);
        let pos = simpson_uniform(&self.t_nodes[self.zero_index..], &vals[self.zero_index..]);
        neg + pos
    }

    /// Linear interpolation of the CDF, clamped to 0 / 1 off the grid.
    pub fn cdf(&self, t: f64) -> f64 {
        interpolate(&self.t_nodes, &self.cdf_values, t, 0.0, 1.0)
    }

    pub fn pdf(&self, t: f64) -> f64 {
        interpolate(&self.t_nodes, &self.pdf_values, t, 0.0, 0.0)
    }

    /// CSV with header `t,cdf,pdf`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,cdf,pdf")?;
        for ((t, c), p) in self.t_nodes.iter().zip(&self.cdf_values).zip(&self.pdf_values) {
            writeln!(w, "{t:.9e},{c:.12e},{p:.9e}")?;
        }
        Ok(())
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64, below: f64, above: f64) -> f64 {
    if x < xs[0] {
        return below;
    }
    if x > xs[xs.len() - 1] {
        return above;
    }
    let i = xs.partition_point(|&n| n <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let a = (x - x0) / (x1 - x0);
    ys[i - 1] + a * (ys[i] - ys[i - 1])
}

fn simpson_uniform(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let h = (t[n] - t[0]) / n as f64;
    let even = n - n % 2;
    let mut s = 0.0;
    if even > 0 {
        s = y[0] + y[even];
        for (i, v) in y.iter().enumerate().take(even).skip(1) {
            s += v * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s *= h / 3.0;
    }
    if even < n {
        s += 0.5 * h * (y[n - 1] + y[n]);
    }
    s
}

/// Differentiate a tabulated CDF: central differences inside each uniform
/// side, second-order one-sided differences at the ends and at `t = 0`
/// (index `zero_index`), where the left and right estimates are averaged.
pub fn pdf_z(t: &[f64], cdf: &[f64], zero_index: usize) -> Result<Vec<f64>> {
    if t.len() != cdf.len() || zero_index < 2 || t.len() < zero_index + 3 {
        return Err(Error::InvalidParameter("grid needs at least two intervals per side".into()));
    }
    let mut pdf = vec![0.0; t.len()];
    let mut side = |lo: usize, hi: usize| -> (f64, f64) {
        let h = (t[hi] - t[lo]) / (hi - lo) as f64;
        for i in lo + 1..hi {
            pdf[i] = (cdf[i + 1] - cdf[i - 1]) / (2.0 * h);
        }
        let start = (-3.0 * cdf[lo] + 4.0 * cdf[lo + 1] - cdf[lo + 2]) / (2.0 * h);
        let end = (3.0 * cdf[hi] - 4.0 * cdf[hi - 1] + cdf[hi - 2]) / (2.0 * h);
        (start, end)
    };
    let (neg_start, zero_left) = side(0, zero_index);
    let (zero_right, pos_end) = side(zero_index, t.len() - 1);
    pdf[0] = neg_start;
    pdf[zero_index] = 0.5 * (zero_left + zero_right);
    let last = t.len() - 1;
    pdf[last] = pos_end;
    let grid_integral = simpson_uniform(&t[..=zero_index], &pdf[..=zero_index])
        + simpson_uniform(&t[zero_index..], &pdf[zero_index..]);
    if (grid_integral - 1.0).abs() > NORMALISATION_LIMIT {
        return Err(Error::GridResolution {
            integral: grid_integral,
        });
    }
    Ok(pdf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;

    fn grid(g: f64, levels: usize) -> DistributionGrid {
        DistributionGrid::build(&ZLaw::new(g, levels).unwrap(), &GridSpec::default()).unwrap()
    }

    #[test]
    fn invariants() {
        for (g, b) in [(1.0, 16), (2.0, 64), (1.0, 8)] {
            let gr = grid(g, b);
            assert!((gr.pdf_integral() - 1.0).abs() < 1e-3);
            assert!(gr.cdf_values()[0] < 1e-6);
            assert!(gr.cdf_values()[gr.cdf_values().len() - 1] > 1.0 - 1e-6);
            assert!(gr.cdf_values().windows(2).all(|w| w[1] >= w[0] - 1e-6));
            assert!(gr.cdf_values().iter().all(|&f| (0.0..=1.0).contains(&f)));
            assert!(gr.pdf_values().iter().all(|&p| p >= -1e-8));
            assert!(gr.t_nodes().windows(2).all(|w| w[1] > w[0]));
            assert_eq!(gr.t_nodes()[gr.zero_index()], 0.0);
        }
    }

    #[test]
    fn many_levels_density_is_rayleigh() {
        let gr = grid(1.0, 1 << 20);
        let sup = gr
            .t_nodes()
            .iter()
            .zip(gr.pdf_values())
            .filter(|(&t, _)| t > 0.0)
            .map(|(&t, &p)| (p - 2.0 * t * (-t * t).exp()).abs())
            .fold(0.0, f64::max);
        assert!(sup < 0.01, "{sup}");
    }

    #[test]
    fn density_matches_histogram() {
        let law = ZLaw::new(1.0, 16).unwrap();
        let gr = grid(1.0, 16);
        let mut rng = StreamFactory::new(41).stream(0);
        let n = 4_000_000;
        // bins of width 0.05 on [-0.5, 3.5]
        let (lo, width, bins) = (-0.5, 0.05, 80);
        let mut counts = vec![0u64; bins];
        for _ in 0..n {
            let z = law.sample(&mut rng);
            let k = ((z - lo) / width).floor();
            if k >= 0.0 && (k as usize) < bins {
                counts[k as usize] += 1;
            }
        }
        let mut sup: f64 = 0.0;
        for (k, &c) in counts.iter().enumerate() {
            let a = lo + k as f64 * width;
            let expect = (gr.cdf(a + width) - gr.cdf(a)) / width;
            sup = sup.max((c as f64 / n as f64 / width - expect).abs());
        }
        assert!(sup < 0.01, "{sup}");
    }

    #[test]
    fn interpolation_clamps() {
        let gr = grid(1.0, 16);
        assert_eq!(gr.cdf(-100.0), 0.0);
        assert_eq!(gr.cdf(100.0), 1.0);
        assert_eq!(gr.pdf(100.0), 0.0);
    }

    #[test]
    fn coarse_grid_rejected() {
        let t: Vec<f64> = (0..7).map(|i| -1.0 + i as f64 * 0.5).collect();
        // a CDF that only reaches 0.5
        let cdf: Vec<f64> = t.iter().map(|&x| (x + 1.0) / 6.0).collect();
        assert!(matches!(pdf_z(&t, &cdf, 2), Err(Error::GridResolution { .. })));
    }

    #[test]
    fn csv_export() {
        let gr = grid(1.0, 16);
        let mut out = Vec::new();
        gr.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("t,cdf,pdf\n"));
        assert_eq!(text.lines().count(), gr.t_nodes().len() + 1);
    }
}
