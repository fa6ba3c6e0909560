//! Small statistics helpers: binomial intervals, Kolmogorov-Smirnov
//! distances and curve reading.

/// z-quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Normal-approximation 95% interval for a binomial proportion, clamped to
/// `[0, 1]`. With no trials the interval is the whole unit interval.
pub fn binomial_ci95(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let half = Z95 * (p * (1.0 - p) / n).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

/// Standard deviation of the estimate of `p` from `trials` Bernoulli draws.
pub fn binomial_sigma(p: f64, trials: u64) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

/// One-sample KS distance between sorted samples and a reference CDF.
pub fn ks_statistic(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((f - lo).abs()).max((hi - f).abs());
    }
    d
}

/// Two-sample KS distance between sorted samples.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

pub fn sort_samples(v: &mut [f64]) {
    v.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN sample"));
}

/// Eb/No (dB) at which a BER curve crosses `target`, interpolating
/// `log10(ber)` linearly in dB between the two bracketing points. `curve`
/// must be ordered by increasing Eb/No and contain positive BERs around the
/// crossing.
pub fn ebno_at_ber(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    let lt = target.log10();
    curve.windows(2).find_map(|w| {
        let (e0, b0) = w[0];
        let (e1, b1) = w[1];
        if b0 <= 0.0 || b1 <= 0.0 {
            return None;
        }
        let (l0, l1) = (b0.log10(), b1.log10());
        let brackets = (l0 >= lt && lt >= l1) || (l0 <= lt && lt <= l1);
        if !brackets || l0 == l1 {
            return None;
        }
        Some(e0 + (lt - l0) * (e1 - e0) / (l1 - l0))
    })
}

/// Magnitude of the log-log BER slope (decades per decade of SNR) between
/// two points given in dB.
pub fn diversity_slope(ebno0_db: f64, ber0: f64, ebno1_db: f64, ber1: f64) -> f64 {
    (ber0.log10() - ber1.log10()) / ((ebno1_db - ebno0_db) / 10.0)
}
