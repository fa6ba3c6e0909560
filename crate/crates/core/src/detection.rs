//! Receivers: the single-user real statistic, exhaustive joint-ML over both
//! users' symbols, and maximal ratio combining for a multi-antenna access
//! point.

use crate::channel::LinkVector;
use crate::constellation::Constellation;
use crate::error::{Error, Result};
use crate::Complex64;

/// `Re(exp(-j(alpha + beta)) r / (sqrt(Es) gamma))`.
///
/// A zero gain is reported as [`Error::DegenerateLink`]; simulation callers
/// substitute a statistic of 0 and let the slicer's tie rule decide.
pub fn sufficient_statistic(r: Complex64, gamma: f64, alpha: f64, beta: f64, es: f64) -> Result<f64> {
    if gamma == 0.0 {
        return Err(Error::DegenerateLink);
    }
    let derot = Complex64::from_polar(1.0, -(alpha + beta));
    Ok((derot * r).re / (es.sqrt() * gamma))
}

/// Exhaustive minimum-distance search over all symbol pairs,
/// `argmin |y - h1 s1 - h2 s2|`. Returns point indices; ties go to the
/// lexicographically smallest `(i1, i2)`.
pub fn joint_ml(y: Complex64, h1: Complex64, h2: Complex64, c: &Constellation) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_metric = f64::INFINITY;
    for (i1, &s1) in c.points().iter().enumerate() {
        let partial = y - h1 * s1;
        for (i2, &s2) in c.points().iter().enumerate() {
            let m = (partial - h2 * s2).norm_sqr();
            if m < best_metric {
                best_metric = m;
                best = (i1, i2);
            }
        }
    }
    best
}

/// `Re(exp(-j beta) h^H r / (sqrt(Es) |h|^2))`.
pub fn mrc_statistic(r: &[Complex64], h: &LinkVector, beta: f64, es: f64) -> Result<f64> {
    let energy = h.norm_sqr();
    if energy == 0.0 {
        return Err(Error::DegenerateLink);
    }
    let combined: Complex64 = h.h.iter().zip(r).map(|(a, x)| a.conj() * x).sum();
    Ok((Complex64::from_polar(1.0, -beta) * combined).re / (es.sqrt() * energy))
}

/// Bit errors between the sliced decision and the transmitted label.
pub fn slice_and_count(stat: Complex64, c: &Constellation, tx_label: u32) -> u32 {
    (c.slice(stat).label ^ tx_label).count_ones()
}
