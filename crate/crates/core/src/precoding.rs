//! Interference-nulling precoder phases and the phase feedback quantizer.
//!
//! With `beta2 - beta1 = alpha1 - alpha2 + pi/2` the interfering user is
//! rotated into the quadrature dimension of the other user's derotated
//! signal, and vice versa. The `+pi/2` branch is used throughout.

use crate::channel::LinkVector;
use crate::error::{invalid, Result};
use crate::{wrap_2pi, wrap_pi, Complex64, FRAC_PI_2, TAU};

/// `B` unit-circle codewords at angles `2 pi k / B`.
#[derive(Debug, Clone)]
pub struct PhaseCodebook {
    levels: usize,
    codewords: Vec<Complex64>,
}

/// Phases chosen for one coherence block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecodingAssignment {
    pub beta1: f64,
    /// phase actually applied by user 2 (quantized when feedback is limited)
    pub beta2: f64,
    pub feedback_index: Option<usize>,
    /// applied minus ideal user-2 phase, wrapped to (-pi, pi]
    pub eps2: f64,
}

/// Output of the multi-antenna phase rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MrcPhase {
    pub beta2: f64,
    /// set when `h1^H h2 = 0`, in which case `beta2 = beta1`
    pub already_orthogonal: bool,
}

impl PhaseCodebook {
    pub fn new(levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(invalid(format!("codebook needs at least 2 levels, got {levels}")));
        }
        let codewords = (0..levels)
            .map(|k| Complex64::from_polar(1.0, Self::angle_of(levels, k)))
            .collect();
        Ok(Self { levels, codewords })
    }

    /// Codebook addressed by `bits` feedback bits (`B = 2^bits`).
    pub fn from_bits(bits: u32) -> Result<Self> {
        if !(1..=24).contains(&bits) {
            return Err(invalid(format!("feedback bits must be in 1..=24, got {bits}")));
        }
        Self::new(1 << bits)
    }

    fn angle_of(levels: usize, k: usize) -> f64 {
        TAU * k as f64 / levels as f64
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn codewords(&self) -> &[Complex64] {
        &self.codewords
    }

    pub fn angle(&self, index: usize) -> f64 {
        Self::angle_of(self.levels, index)
    }

    /// Bits needed to send an index, `ceil(log2 B)`.
    pub fn index_bits(&self) -> u32 {
        self.levels.next_power_of_two().trailing_zeros()
    }

    /// Nearest codeword to `exp(j beta)`; ties go to the lower index.
    ///
    /// Chordal distance is monotone in angular distance, so only the two
    /// codewords bracketing `beta` need to be compared.
    pub fn quantize(&self, beta: f64) -> (usize, f64) {
        let b = wrap_2pi(beta);
        let step = TAU / self.levels as f64;
        let lo = ((b / step).floor() as usize) % self.levels;
        let hi = (lo + 1) % self.levels;
        let d_lo = wrap_pi(self.angle(lo) - b).abs();
        let d_hi = wrap_pi(self.angle(hi) - b).abs();
        let index = if d_lo < d_hi || (d_lo == d_hi && lo < hi) {
            lo
        } else {
            hi
        };
        (index, self.angle(index))
    }
}

/// Ideal user-2 phase, `(beta1 + alpha1 - alpha2 + pi/2) mod 2 pi`.
pub fn ideal_beta2(alpha1: f64, alpha2: f64, beta1: f64) -> f64 {
    wrap_2pi(beta1 + alpha1 - alpha2 + FRAC_PI_2)
}

/// Assignment for one block: exact `beta2` when `codebook` is `None`,
/// otherwise the nearest codeword.
pub fn assign(alpha1: f64, alpha2: f64, beta1: f64, codebook: Option<&PhaseCodebook>) -> PrecodingAssignment {
    let ideal = ideal_beta2(alpha1, alpha2, beta1);
    match codebook {
        None => PrecodingAssignment {
            beta1,
            beta2: ideal,
            feedback_index: None,
            eps2: 0.0,
        },
        Some(cb) => {
            let (index, applied) = cb.quantize(ideal);
            PrecodingAssignment {
                beta1,
                beta2: applied,
                feedback_index: Some(index),
                eps2: wrap_pi(applied - ideal),
            }
        }
    }
}

/// Multi-antenna rule `beta2 = beta1 + pi/2 - arg(h1^H h2)`, which nulls the
/// cross term after maximal ratio combining for both users.
pub fn beta2_mrc(h1: &LinkVector, h2: &LinkVector, beta1: f64) -> MrcPhase {
    let cross = h1.inner(h2);
    if cross == Complex64::new(0.0, 0.0) {
        return MrcPhase {
            beta2: wrap_2pi(beta1),
            already_orthogonal: true,
        };
    }
    MrcPhase {
        beta2: wrap_2pi(beta1 + FRAC_PI_2 - cross.arg()),
        already_orthogonal: false,
    }
}
