//! Gray-labelled M-PAM and square M-QAM alphabets with unit average energy.
//!
//! PAM points are stored in order of *descending* amplitude and point `i`
//! carries the Gray label `i ^ (i >> 1)`. For BPSK this gives index 0 = +1
//! with label `0`, index 1 = -1 with label `1`. QAM is the Cartesian product
//! of two PAM rails; the in-phase rail supplies the high label bits.

use crate::error::{Error, Result};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Pam,
    Qam,
}

/// An immutable symbol alphabet.
#[derive(Debug, Clone)]
pub struct Constellation {
    kind: Kind,
    order: usize,
    bits_per_symbol: usize,
    points: Vec<Complex64>,
    labels: Vec<u32>,
    /// point index for each label value
    by_label: Vec<usize>,
    /// one PAM rail (descending amplitudes) and its decision thresholds
    rail: Vec<f64>,
    thresholds: Vec<f64>,
}

/// Result of slicing a statistic onto the alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decision {
    pub index: usize,
    pub label: u32,
}

fn gray(i: usize) -> u32 {
    (i ^ (i >> 1)) as u32
}

/// Descending amplitudes M-1, M-3, ..., -(M-1) with unit mean square.
fn pam_rail(m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|i| (m - 1) as f64 - 2.0 * i as f64).collect();
    let mean_sq = raw.iter().map(|a| a * a).sum::<f64>() / m as f64;
    let scale = mean_sq.sqrt();
    raw.into_iter().map(|a| a / scale).collect()
}

fn thresholds(rail: &[f64]) -> Vec<f64> {
    rail.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect()
}

impl Constellation {
    /// M-PAM for M in {2, 4, 8, 16}.
    pub fn pam(order: usize) -> Result<Self> {
        if !matches!(order, 2 | 4 | 8 | 16) {
            return Err(Error::InvalidOrder(order));
        }
        let rail = pam_rail(order);
        let points = rail.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        let labels: Vec<u32> = (0..order).map(gray).collect();
        Ok(Self::assemble(Kind::Pam, order, points, labels, rail))
    }

    /// Square M-QAM for M in {4, 16, 64}.
    pub fn qam(order: usize) -> Result<Self> {
        if !matches!(order, 4 | 16 | 64) {
            return Err(Error::InvalidOrder(order));
        }
        let side = (order as f64).sqrt().round() as usize;
        let half_bits = side.trailing_zeros();
        // each rail carries half of the energy
        let rail: Vec<f64> = pam_rail(side)
            .into_iter()
            .map(|a| a / std::f64::consts::SQRT_2)
            .collect();
        let mut points = Vec::with_capacity(order);
        let mut labels = Vec::with_capacity(order);
        for i in 0..side {
            for q in 0..side {
                points.push(Complex64::new(rail[i], rail[q]));
                labels.push((gray(i) << half_bits) | gray(q));
            }
        }
        Ok(Self::assemble(Kind::Qam, order, points, labels, rail))
    }

    fn assemble(
        kind: Kind,
        order: usize,
        points: Vec<Complex64>,
        labels: Vec<u32>,
        rail: Vec<f64>,
    ) -> Self {
        let mut by_label = vec![0; order];
        for (i, &l) in labels.iter().enumerate() {
            by_label[l as usize] = i;
        }
        let thresholds = thresholds(&rail);
        Self {
            kind,
            order,
            bits_per_symbol: order.trailing_zeros() as usize,
            points,
            labels,
            by_label,
            rail,
            thresholds,
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Point carrying the integer label `label` (MSB first).
    pub fn point_for_label(&self, label: u32) -> Complex64 {
        self.points[self.by_label[label as usize]]
    }

    /// Label of point `index` as a bit vector, most significant bit first.
    pub fn label_bits(&self, index: usize) -> Vec<u8> {
        label_to_bits(self.labels[index], self.bits_per_symbol)
    }

    /// Map `log2 M` bits (MSB first, each 0 or 1) to a symbol.
    pub fn modulate(&self, bits: &[u8]) -> Result<Complex64> {
        if bits.len() != self.bits_per_symbol {
            return Err(Error::BitLength {
                expected: self.bits_per_symbol,
                got: bits.len(),
            });
        }
        let label = bits
            .iter()
            .fold(0u32, |acc, &b| (acc << 1) | u32::from(b != 0));
        Ok(self.point_for_label(label))
    }

    /// Nearest point to `stat`. PAM uses the real part only. Ties go to the
    /// lowest point index.
    pub fn slice(&self, stat: Complex64) -> Decision {
        let index = match self.kind {
            Kind::Pam => self.rail_index(stat.re),
            Kind::Qam => {
                let side = self.rail.len();
                self.rail_index(stat.re) * side + self.rail_index(stat.im)
            }
        };
        Decision {
            index,
            label: self.labels[index],
        }
    }

    /// Slice a real statistic (PAM fast path).
    pub fn slice_real(&self, stat: f64) -> Decision {
        self.slice(Complex64::new(stat, 0.0))
    }

    // Rail amplitudes descend with index, so a statistic sitting exactly on
    // a threshold belongs to the lower index.
    fn rail_index(&self, x: f64) -> usize {
        self.thresholds.iter().take_while(|&&thr| x < thr).count()
    }
}

pub fn label_to_bits(label: u32, width: usize) -> Vec<u8> {
    (0..width)
        .rev()
        .map(|k| ((label >> k) & 1) as u8)
        .collect()
}
