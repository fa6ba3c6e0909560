//! Seeded, chunked BER sweeps.
//!
//! The trials of one Eb/No point are cut into chunks of [`CHUNK_TRIALS`];
//! chunk `k` draws from its own stream, so the counts depend only on the
//! seed and the stopping point, never on how chunks are scheduled. Chunks are
//! run in rounds of growing size and the stopping rule is checked between
//! rounds.

use rand::Rng;
use rayon::prelude::*;

use crate::analysis::{ber_ideal_bpsk_rayleigh, ber_semi_analytic, DistributionGrid, GridSpec, ZLaw};
use crate::channel::{complex_gaussian, ebno_to_sigma2, Link, LinkVector};
use crate::constellation::{Constellation, Kind};
use crate::detection::{joint_ml, mrc_statistic, slice_and_count, sufficient_statistic};
use crate::error::{invalid, Result};
use crate::precoding::{assign, beta2_mrc, PhaseCodebook};
use crate::rng::{SimRng, StreamFactory, RNG_IDENTITY};
use crate::stats::{binomial_ci95, ks_statistic, sort_samples};
use crate::{Complex64, TAU};

pub const CHUNK_TRIALS: u64 = 8192;
const MAX_ROUND_CHUNKS: u64 = 64;
pub const DEFAULT_MIN_ERRORS: u64 = 200;
pub const DEFAULT_MAX_TRIALS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// exact nulling phase fed back to user 2
    ProposedIdeal,
    /// user 2 phase quantized to `2^feedback_bits` levels
    ProposedQuantized,
    /// no precoding, exhaustive joint detection
    JointMl,
    /// no precoding, single-user real statistic
    SingleUserNaive,
    /// multi-antenna phase rule with maximal ratio combining
    ProposedMrc,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::ProposedIdeal => "proposed-ideal",
            Mode::ProposedQuantized => "proposed-quantized",
            Mode::JointMl => "joint-ml",
            Mode::SingleUserNaive => "single-user",
            Mode::ProposedMrc => "proposed-mrc",
        }
    }

    fn precoded(&self) -> bool {
        matches!(self, Mode::ProposedIdeal | Mode::ProposedQuantized | Mode::ProposedMrc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulation {
    Bpsk,
    Pam4,
    Qam4,
}

impl Modulation {
    pub fn name(&self) -> &'static str {
        match self {
            Modulation::Bpsk => "bpsk",
            Modulation::Pam4 => "4pam",
            Modulation::Qam4 => "4qam",
        }
    }

    pub fn constellation(&self) -> Constellation {
        match self {
            Modulation::Bpsk => Constellation::pam(2),
            Modulation::Pam4 => Constellation::pam(4),
            Modulation::Qam4 => Constellation::qam(4),
        }
        .expect("supported order")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: Mode,
    pub modulation: Modulation,
    pub feedback_bits: Option<u32>,
    pub n_r: usize,
    pub ebno_points_db: Vec<f64>,
    pub g: f64,
    pub min_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    /// rayon worker threads; 0 uses the global pool
    pub workers: usize,
    /// force `h2 = h1` on every trial
    pub pin_equal_links: bool,
    /// user 2 transmits nothing
    pub no_interferer: bool,
}

impl SweepConfig {
    pub fn new(mode: Mode, modulation: Modulation) -> Self {
        Self {
            mode,
            modulation,
            feedback_bits: None,
            n_r: 1,
            ebno_points_db: Vec::new(),
            g: 1.0,
            min_errors: DEFAULT_MIN_ERRORS,
            max_trials: DEFAULT_MAX_TRIALS,
            seed: 1,
            workers: 0,
            pin_equal_links: false,
            no_interferer: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.mode, self.feedback_bits) {
            (Mode::ProposedQuantized, None) => {
                return Err(invalid("proposed-quantized needs feedback bits"));
            }
            (Mode::ProposedQuantized, Some(b)) if !(1..=24).contains(&b) => {
                return Err(invalid(format!("feedback bits must be in 1..=24, got {b}")));
            }
            (Mode::ProposedQuantized, _) | (_, None) => {}
            (m, Some(_)) => {
                return Err(invalid(format!("feedback bits do not apply to {}", m.name())));
            }
        }
        let pam = self.modulation.constellation().kind() == Kind::Pam;
        if self.mode != Mode::JointMl && !pam {
            return Err(invalid(format!(
                "{} detects on one real dimension and needs a PAM-family modulation, not {}",
                self.mode.name(),
                self.modulation.name()
            )));
        }
        if self.n_r < 1 {
            return Err(invalid("antenna count must be at least 1"));
        }
        if self.n_r > 1 && self.mode != Mode::ProposedMrc {
            return Err(invalid(format!("{} supports a single receive antenna", self.mode.name())));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(invalid(format!("average link power must be positive, got {}", self.g)));
        }
        if self.ebno_points_db.iter().any(|x| !x.is_finite()) {
            return Err(invalid("Eb/No points must be finite"));
        }
        Ok(())
    }

    pub fn codebook_levels(&self) -> Option<usize> {
        match self.mode {
            Mode::ProposedQuantized => self.feedback_bits.map(|b| 1usize << b),
            _ => None,
        }
    }
}

/// Everything a trial needs at one Eb/No point.
#[derive(Debug, Clone)]
pub struct TrialSetup {
    pub mode: Mode,
    pub constellation: Constellation,
    pub codebook: Option<PhaseCodebook>,
    pub sigma2: f64,
    pub es: f64,
    pub g: f64,
    pub n_r: usize,
    pub pin_equal_links: bool,
    pub no_interferer: bool,
}

impl TrialSetup {
    pub fn new(cfg: &SweepConfig, ebno_db: f64) -> Result<Self> {
        cfg.validate()?;
        let es = 1.0;
        Ok(Self {
            mode: cfg.mode,
            constellation: cfg.modulation.constellation(),
            codebook: cfg.codebook_levels().map(PhaseCodebook::new).transpose()?,
            sigma2: ebno_to_sigma2(ebno_db, es, cfg.g)?,
            es,
            g: cfg.g,
            n_r: cfg.n_r,
            pin_equal_links: cfg.pin_equal_links,
            no_interferer: cfg.no_interferer,
        })
    }
}

/// Bit errors of one trial for each user.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrialOutcome {
    pub user1: u32,
    pub user2: u32,
}

/// One coherence block carrying one symbol per user.
pub fn run_trial<R: Rng + ?Sized>(setup: &TrialSetup, rng: &mut R) -> TrialOutcome {
    let c = &setup.constellation;
    let m = c.order() as u32;
    let tx1 = rng.gen_range(0..m);
    let tx2 = rng.gen_range(0..m);
    let s1 = c.point_for_label(tx1);
    let s2 = if setup.no_interferer {
        Complex64::new(0.0, 0.0)
    } else {
        c.point_for_label(tx2)
    };
    let mut out = if setup.mode == Mode::ProposedMrc {
        mrc_trial(setup, s1, s2, tx1, tx2, rng)
    } else {
        scalar_trial(setup, s1, s2, tx1, tx2, rng)
    };
    if setup.no_interferer {
        out.user2 = 0;
    }
    out
}

fn scalar_trial<R: Rng + ?Sized>(
    setup: &TrialSetup,
    s1: Complex64,
    s2: Complex64,
    tx1: u32,
    tx2: u32,
    rng: &mut R,
) -> TrialOutcome {
    let c = &setup.constellation;
    let l1 = Link::from_complex(complex_gaussian(setup.g, rng));
    let l2 = if setup.pin_equal_links {
        l1
    } else {
        Link::from_complex(complex_gaussian(setup.g, rng))
    };
    // consumed in every mode, also by the unprecoded baselines
    let beta1 = rng.gen_range(0.0..TAU);
    let (beta1, beta2) = if setup.mode.precoded() {
        let p = assign(l1.alpha, l2.alpha, beta1, setup.codebook.as_ref());
        (p.beta1, p.beta2)
    } else {
        (0.0, 0.0)
    };
    let amp = setup.es.sqrt();
    let x1 = Complex64::from_polar(amp, beta1) * s1;
    let x2 = Complex64::from_polar(amp, beta2) * s2;
    let r = l1.h * x1 + l2.h * x2 + complex_gaussian(setup.sigma2, rng);

    match setup.mode {
        Mode::JointMl => {
            let (i1, i2) = joint_ml(r, amp * l1.h, amp * l2.h, c);
            TrialOutcome {
                user1: (c.labels()[i1] ^ tx1).count_ones(),
                user2: (c.labels()[i2] ^ tx2).count_ones(),
            }
        }
        _ => {
            let y1 = sufficient_statistic(r, l1.gamma, l1.alpha, beta1, setup.es).unwrap_or(0.0);
            let y2 = sufficient_statistic(r, l2.gamma, l2.alpha, beta2, setup.es).unwrap_or(0.0);
            TrialOutcome {
                user1: slice_and_count(y1.into(), c, tx1),
                user2: slice_and_count(y2.into(), c, tx2),
            }
        }
    }
}

fn mrc_trial<R: Rng + ?Sized>(
    setup: &TrialSetup,
    s1: Complex64,
    s2: Complex64,
    tx1: u32,
    tx2: u32,
    rng: &mut R,
) -> TrialOutcome {
    let c = &setup.constellation;
    let draw = |rng: &mut R| LinkVector {
        h: (0..setup.n_r).map(|_| complex_gaussian(setup.g, rng)).collect(),
    };
    let h1 = draw(rng);
    let h2 = if setup.pin_equal_links { h1.clone() } else { draw(rng) };
    let beta1 = rng.gen_range(0.0..TAU);
    let beta2 = beta2_mrc(&h1, &h2, beta1).beta2;
    let amp = setup.es.sqrt();
    let x1 = Complex64::from_polar(amp, beta1) * s1;
    let x2 = Complex64::from_polar(amp, beta2) * s2;
    let r: Vec<Complex64> = h1
        .h
        .iter()
        .zip(&h2.h)
        .map(|(a, b)| a * x1 + b * x2 + complex_gaussian(setup.sigma2, rng))
        .collect();
    let y1 = mrc_statistic(&r, &h1, beta1, setup.es).unwrap_or(0.0);
    let y2 = mrc_statistic(&r, &h2, beta2, setup.es).unwrap_or(0.0);
    TrialOutcome {
        user1: slice_and_count(y1.into(), c, tx1),
        user2: slice_and_count(y2.into(), c, tx2),
    }
}

/// Counts and 95% interval at one Eb/No point (user 1).
#[derive(Debug, Clone, PartialEq)]
pub struct BerPoint {
    pub ebno_db: f64,
    pub trials: u64,
    pub bits_per_symbol: usize,
    pub bit_errors: u64,
    pub user2_bit_errors: u64,
    pub ber: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    /// stopped on `max_trials` before collecting `min_errors`
    pub low_confidence: bool,
}

impl BerPoint {
    fn from_counts(ebno_db: f64, trials: u64, bps: usize, errors: u64, errors2: u64, min_errors: u64) -> Self {
        let bits = trials * bps as u64;
        let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
        let (lo, hi) = binomial_ci95(errors, bits);
        Self {
            ebno_db,
            trials,
            bits_per_symbol: bps,
            bit_errors: errors,
            user2_bit_errors: errors2,
            ber,
            ci95_low: lo,
            ci95_high: hi,
            low_confidence: trials == 0 || errors < min_errors,
        }
    }

    pub fn user2_ber(&self) -> f64 {
        let bits = self.trials * self.bits_per_symbol as u64;
        if bits == 0 {
            0.0
        } else {
            self.user2_bit_errors as f64 / bits as f64
        }
    }

    /// Standard deviation of the estimate under its own BER.
    pub fn sigma(&self) -> f64 {
        crate::stats::binomial_sigma(self.ber, self.trials * self.bits_per_symbol as u64)
    }
}

/// Stream-space index of an Eb/No point: millidecibels, two's complement,
/// truncated to 24 bits. A point therefore draws the same numbers in every
/// sweep that contains it.
fn point_id(ebno_db: f64) -> u64 {
    ((ebno_db * 1000.0).round() as i64 as u64) & 0xFF_FFFF
}

fn run_chunk(setup: &TrialSetup, mut rng: SimRng, trials: u64) -> (u64, u64) {
    let (mut e1, mut e2) = (0u64, 0u64);
    for _ in 0..trials {
        let o = run_trial(setup, &mut rng);
        e1 += u64::from(o.user1);
        e2 += u64::from(o.user2);
    }
    (e1, e2)
}

fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Run trials at `ebno_db` until user 1 collects `min_errors` bit errors or
/// `max_trials` is reached.
pub fn estimate_ber(cfg: &SweepConfig, ebno_db: f64) -> Result<BerPoint> {
    let setup = TrialSetup::new(cfg, ebno_db)?;
    with_workers(cfg.workers, || estimate_with(&setup, cfg, ebno_db))
}

fn estimate_with(setup: &TrialSetup, cfg: &SweepConfig, ebno_db: f64) -> BerPoint {
    let bps = setup.constellation.bits_per_symbol();
    if cfg.min_errors == 0 || cfg.max_trials == 0 {
        return BerPoint::from_counts(ebno_db, 0, bps, 0, 0, cfg.min_errors);
    }
    let streams = StreamFactory::new(cfg.seed);
    let point = point_id(ebno_db);
    let total_chunks = cfg.max_trials.div_ceil(CHUNK_TRIALS);
    let (mut next_chunk, mut trials, mut e1, mut e2) = (0u64, 0u64, 0u64, 0u64);
    let mut round = 0u32;
    while next_chunk < total_chunks && e1 < cfg.min_errors {
        let width = (1u64 << round.min(6)).min(MAX_ROUND_CHUNKS).min(total_chunks - next_chunk);
        let (re1, re2, rt) = (next_chunk..next_chunk + width)
            .into_par_iter()
            .map(|k| {
                let n = CHUNK_TRIALS.min(cfg.max_trials - k * CHUNK_TRIALS);
                let (a, b) = run_chunk(setup, streams.chunk_stream(point, k), n);
                (a, b, n)
            })
            .reduce(|| (0, 0, 0), |x, y| (x.0 + y.0, x.1 + y.1, x.2 + y.2));
        e1 += re1;
        e2 += re2;
        trials += rt;
        next_chunk += width;
        round += 1;
    }
    BerPoint::from_counts(ebno_db, trials, bps, e1, e2, cfg.min_errors)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepMetadata {
    pub version: String,
    pub seed: u64,
    pub rng: &'static str,
    pub mode: Mode,
    pub chunk_trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub config: SweepConfig,
    pub points: Vec<BerPoint>,
    pub metadata: SweepMetadata,
}

pub fn version_string() -> String {
    format!("ccisim {}", env!("CARGO_PKG_VERSION"))
}

pub fn sweep(cfg: &SweepConfig) -> Result<Sweep> {
    cfg.validate()?;
    let setups = cfg
        .ebno_points_db
        .iter()
        .map(|&e| TrialSetup::new(cfg, e))
        .collect::<Result<Vec<_>>>()?;
    let points = with_workers(cfg.workers, || {
        cfg.ebno_points_db
            .iter()
            .zip(&setups)
            .map(|(&e, s)| estimate_with(s, cfg, e))
            .collect()
    })?;
    Ok(Sweep {
        config: cfg.clone(),
        points,
        metadata: SweepMetadata {
            version: version_string(),
            seed: cfg.seed,
            rng: RNG_IDENTITY,
            mode: cfg.mode,
            chunk_trials: CHUNK_TRIALS,
        },
    })
}

/// Analytic BER for the configuration when one exists: the interference-free
/// Rayleigh value for ideal phases (one antenna, BPSK, interferer present or
/// not) and the semi-analytic value under quantized feedback.
pub fn analytic_reference(cfg: &SweepConfig) -> Result<Option<Vec<f64>>> {
    if cfg.modulation != Modulation::Bpsk || cfg.n_r != 1 {
        return Ok(None);
    }
    let ideal = || Some(cfg.ebno_points_db.iter().map(|&e| ber_ideal_bpsk_rayleigh(e)).collect());
    match cfg.mode {
        Mode::ProposedIdeal | Mode::ProposedMrc => Ok(ideal()),
        Mode::ProposedQuantized | Mode::SingleUserNaive if cfg.no_interferer => Ok(ideal()),
        Mode::ProposedQuantized => {
            let levels = cfg.codebook_levels().expect("validated");
            let grid = DistributionGrid::build(&ZLaw::new(cfg.g, levels)?, &GridSpec::default())?;
            Ok(Some(cfg.ebno_points_db.iter().map(|&e| ber_semi_analytic(e, &grid)).collect()))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionKind {
    /// sine of the phase quantization error
    SinEps2,
    /// effective amplitude `gamma1 + gamma2 sin(eps2)`
    Z,
}

impl DistributionKind {
    pub fn name(&self) -> &'static str {
        match self {
            DistributionKind::SinEps2 => "sin-eps2",
            DistributionKind::Z => "z",
        }
    }
}

/// Sorted samples and their KS distance to the reference law.
#[derive(Debug, Clone)]
pub struct DistributionSample {
    pub kind: DistributionKind,
    pub levels: usize,
    pub g: f64,
    pub samples: Vec<f64>,
    pub ks: f64,
    /// tabulated law of `z` (only for [`DistributionKind::Z`])
    pub grid: Option<DistributionGrid>,
}

impl DistributionSample {
    /// Reference CDF: uniform on `[-pi/B, pi/B]` for `sin eps2`, the
    /// tabulated `F_z` for `z`.
    pub fn reference_cdf(&self, x: f64) -> f64 {
        match &self.grid {
            Some(g) => g.cdf(x),
            None => crate::analysis::cdf_v(x, self.levels),
        }
    }

    pub fn empirical_cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.samples.len() as f64
    }
}

/// Simulate the feedback chain (random phases, nulling rule, quantizer) and
/// collect `sin eps2` or `z`, then measure the KS distance to the reference.
pub fn sample_distribution(kind: DistributionKind, g: f64, levels: usize, count: usize, seed: u64) -> Result<DistributionSample> {
    if count < 10_000 {
        return Err(invalid(format!("need at least 10^4 samples, got {count}")));
    }
    let codebook = PhaseCodebook::new(levels)?;
    let law = ZLaw::new(g, levels)?;
    let streams = StreamFactory::new(seed);
    let chunk = CHUNK_TRIALS as usize;
    let n_chunks = count.div_ceil(chunk);
    let mut samples: Vec<f64> = (0..n_chunks)
        .into_par_iter()
        .flat_map_iter(|k| {
            let mut rng = streams.stream(k as u64);
            let n = chunk.min(count - k * chunk);
            let codebook = &codebook;
            (0..n).map(move |_| {
                let l1 = Link::from_complex(complex_gaussian(g, &mut rng));
                let l2 = Link::from_complex(complex_gaussian(g, &mut rng));
                let beta1 = rng.gen_range(0.0..TAU);
                let v = assign(l1.alpha, l2.alpha, beta1, Some(codebook)).eps2.sin();
                match kind {
                    DistributionKind::SinEps2 => v,
                    DistributionKind::Z => l1.gamma + l2.gamma * v,
                }
            })
        })
        .collect();
    sort_samples(&mut samples);
    let grid = match kind {
        DistributionKind::SinEps2 => None,
        DistributionKind::Z => Some(DistributionGrid::build(&law, &GridSpec::default())?),
    };
    let mut out = DistributionSample {
        kind,
        levels,
        g,
        samples,
        ks: 0.0,
        grid,
    };
    out.ks = ks_statistic(&out.samples, |x| out.reference_cdf(x));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::binomial_sigma;

    fn cfg(mode: Mode, modulation: Modulation, ebno: &[f64]) -> SweepConfig {
        SweepConfig {
            ebno_points_db: ebno.to_vec(),
            ..SweepConfig::new(mode, modulation)
        }
    }

    #[test]
    fn compatibility_rules() {
        assert!(cfg(Mode::JointMl, Modulation::Qam4, &[]).validate().is_ok());
        assert!(cfg(Mode::ProposedIdeal, Modulation::Qam4, &[]).validate().is_err());
        assert!(cfg(Mode::SingleUserNaive, Modulation::Qam4, &[]).validate().is_err());
        assert!(cfg(Mode::ProposedQuantized, Modulation::Bpsk, &[]).validate().is_err());
        let mut c = cfg(Mode::ProposedMrc, Modulation::Pam4, &[]);
        c.n_r = 3;
        assert!(c.validate().is_ok());
        c.mode = Mode::ProposedIdeal;
        assert!(c.validate().is_err());
    }

    #[test]
    fn noiseless_proposed_is_error_free() {
        for mode in [Mode::ProposedIdeal, Mode::ProposedMrc] {
            for m in [Modulation::Bpsk, Modulation::Pam4] {
                let mut setup = TrialSetup::new(&cfg(mode, m, &[]), 0.0).unwrap();
                setup.sigma2 = 0.0;
                let mut rng = StreamFactory::new(3).stream(0);
                for _ in 0..20_000 {
                    assert_eq!(run_trial(&setup, &mut rng), TrialOutcome::default());
                }
            }
        }
    }

    #[test]
    fn noiseless_naive_with_equal_links_has_quarter_floor() {
        // brute force over the four equiprobable BPSK pairs: the statistic is s1 + s2
        let c = Modulation::Bpsk.constellation();
        let mut wrong = 0;
        for l1 in 0..2u32 {
            for l2 in 0..2u32 {
                let stat = c.point_for_label(l1) + c.point_for_label(l2);
                wrong += (c.slice(stat).label ^ l1).count_ones();
            }
        }
        let floor = wrong as f64 / 4.0;
        assert_eq!(floor, 0.25);

        let mut conf = cfg(Mode::SingleUserNaive, Modulation::Bpsk, &[]);
        conf.pin_equal_links = true;
        let mut setup = TrialSetup::new(&conf, 0.0).unwrap();
        setup.sigma2 = 0.0;
        let mut rng = StreamFactory::new(4).stream(0);
        let n = 200_000;
        let errors: u32 = (0..n).map(|_| run_trial(&setup, &mut rng).user1).sum();
        let ber = errors as f64 / n as f64;
        assert!((ber - floor).abs() < 3.0 * binomial_sigma(floor, n), "ber={ber}");
    }

    #[test]
    fn estimates_are_reproducible() {
        let mut c = cfg(Mode::ProposedQuantized, Modulation::Pam4, &[5.0, 10.0]);
        c.feedback_bits = Some(3);
        c.max_trials = 300_000;
        let a = sweep(&c).unwrap();
        let b = sweep(&c).unwrap();
        assert_eq!(a.points, b.points);
        let mut other = c.clone();
        other.seed += 1;
        assert_ne!(sweep(&other).unwrap().points, a.points);
    }

    #[test]
    fn point_independent_of_sweep_composition() {
        let c = cfg(Mode::ProposedIdeal, Modulation::Bpsk, &[0.0, 7.0]);
        let alone = estimate_ber(&c, 7.0).unwrap();
        assert_eq!(sweep(&c).unwrap().points[1], alone);
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let mut c = cfg(Mode::JointMl, Modulation::Bpsk, &[8.0]);
        c.min_errors = 2000;
        c.workers = 1;
        let one = estimate_ber(&c, 8.0).unwrap();
        c.workers = 3;
        let three = estimate_ber(&c, 8.0).unwrap();
        assert_eq!(one, three);
    }

    #[test]
    fn zero_min_errors_returns_flagged_empty_point() {
        let mut c = cfg(Mode::ProposedIdeal, Modulation::Bpsk, &[10.0]);
        c.min_errors = 0;
        let p = estimate_ber(&c, 10.0).unwrap();
        assert_eq!(p.trials, 0);
        assert!(p.low_confidence);
        assert_eq!((p.ci95_low, p.ci95_high), (0.0, 1.0));
    }

    #[test]
    fn trial_cap_flags_low_confidence() {
        let mut c = cfg(Mode::ProposedIdeal, Modulation::Bpsk, &[40.0]);
        c.max_trials = 10_000;
        let p = estimate_ber(&c, 40.0).unwrap();
        assert_eq!(p.trials, 10_000);
        assert!(p.low_confidence);
    }

    #[test]
    fn empty_sweep() {
        let s = sweep(&cfg(Mode::ProposedIdeal, Modulation::Bpsk, &[])).unwrap();
        assert!(s.points.is_empty());
        assert_eq!(s.metadata.rng, RNG_IDENTITY);
    }

    #[test]
    fn ideal_matches_closed_form_and_beats_joint_ml() {
        let mut c = cfg(Mode::ProposedIdeal, Modulation::Bpsk, &[]);
        c.min_errors = 5000;
        let p = estimate_ber(&c, 10.0).unwrap();
        let expect = ber_ideal_bpsk_rayleigh(10.0);
        assert!((p.ber - expect).abs() < 3.0 * binomial_sigma(expect, p.trials), "{} vs {expect}", p.ber);
        c.mode = Mode::JointMl;
        let j = estimate_ber(&c, 10.0).unwrap();
        assert!(j.ci95_low > p.ci95_high, "joint {} proposed {}", j.ber, p.ber);
    }

    #[test]
    fn users_see_the_same_ber() {
        let mut c = cfg(Mode::ProposedIdeal, Modulation::Pam4, &[]);
        c.min_errors = 5000;
        let p = estimate_ber(&c, 12.0).unwrap();
        let bits = p.trials * 2;
        let (lo2, hi2) = binomial_ci95(p.user2_bit_errors, bits);
        assert!(lo2 <= p.ci95_high && p.ci95_low <= hi2, "{} vs {}", p.ber, p.user2_ber());
    }

    #[test]
    fn ber_nonincreasing_in_ebno() {
        let mut c = cfg(Mode::ProposedIdeal, Modulation::Pam4, &[0.0, 4.0, 8.0, 12.0, 16.0]);
        c.min_errors = 1000;
        let s = sweep(&c).unwrap();
        for w in s.points.windows(2) {
            assert!(w[1].ci95_low <= w[0].ci95_high);
            assert!(w[1].ber < w[0].ber);
        }
    }

    #[test]
    fn analytic_column_availability() {
        let mut c = cfg(Mode::ProposedQuantized, Modulation::Bpsk, &[10.0]);
        c.feedback_bits = Some(4);
        let a = analytic_reference(&c).unwrap().unwrap();
        assert!(a[0] > ber_ideal_bpsk_rayleigh(10.0));
        assert!(analytic_reference(&cfg(Mode::JointMl, Modulation::Bpsk, &[10.0])).unwrap().is_none());
        assert!(analytic_reference(&cfg(Mode::ProposedIdeal, Modulation::Pam4, &[10.0])).unwrap().is_none());
    }

    #[test]
    fn quantization_error_law() {
        let s8 = sample_distribution(DistributionKind::SinEps2, 1.0, 8, 1_000_000, 5).unwrap();
        let s1024 = sample_distribution(DistributionKind::SinEps2, 1.0, 1024, 1_000_000, 5).unwrap();
        assert!(s8.ks <= 0.02, "ks={}", s8.ks);
        assert!(s1024.ks < s8.ks);
        assert!(sample_distribution(DistributionKind::SinEps2, 1.0, 8, 9_999, 5).is_err());
    }

    #[test]
    fn z_samples_follow_grid() {
        let s = sample_distribution(DistributionKind::Z, 1.0, 16, 1_000_000, 6).unwrap();
        assert!(s.ks <= 0.01, "ks={}", s.ks);
        assert!(s.samples.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(s.empirical_cdf(f64::INFINITY), 1.0);
    }
}
