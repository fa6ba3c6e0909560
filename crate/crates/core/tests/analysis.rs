//! Cross-checks between the analytic routines and direct simulation.

use ccisim::analysis::{ber_ideal_bpsk_rayleigh, ber_semi_analytic, DistributionGrid, GridSpec, ZLaw};
use ccisim::montecarlo::{estimate_ber, sample_distribution, DistributionKind, Mode, Modulation, SweepConfig};
use ccisim::rng::StreamFactory;
use ccisim::stats::{ks_two_sample, sort_samples};

#[test]
fn direct_z_law_matches_feedback_chain() {
    // z from (gamma1, gamma2, uniform v) versus z from the full quantization chain
    let law = ZLaw::new(2.0, 8).unwrap();
    let mut rng = StreamFactory::new(40).stream(0);
    let mut direct: Vec<f64> = (0..400_000).map(|_| law.sample(&mut rng)).collect();
    sort_samples(&mut direct);
    let chain = sample_distribution(DistributionKind::Z, 2.0, 8, 400_000, 41).unwrap();
    let d = ks_two_sample(&direct, &chain.samples);
    assert!(d < 0.01, "two-sample KS {d}");
}

#[test]
fn semi_analytic_tracks_simulation() {
    for (bits, g) in [(4u32, 1.0), (6, 0.5)] {
        let grid = DistributionGrid::build(&ZLaw::new(g, 1 << bits).unwrap(), &GridSpec::default()).unwrap();
        let cfg = SweepConfig {
            feedback_bits: Some(bits),
            g,
            min_errors: 4000,
            ..SweepConfig::new(Mode::ProposedQuantized, Modulation::Bpsk)
        };
        for ebno in [3.0, 12.0, 20.0] {
            let p = estimate_ber(&cfg, ebno).unwrap();
            let a = ber_semi_analytic(ebno, &grid);
            assert!((p.ber - a).abs() < 4.0 * p.sigma().max(1e-12), "bits={bits} g={g} {ebno} dB: {} vs {a}", p.ber);
        }
    }
}

#[test]
fn fine_codebook_recovers_ideal_curve() {
    let grid = DistributionGrid::build(&ZLaw::new(1.0, 1 << 16).unwrap(), &GridSpec::default()).unwrap();
    for ebno in [0.0, 10.0, 25.0] {
        let a = ber_semi_analytic(ebno, &grid);
        let ideal = ber_ideal_bpsk_rayleigh(ebno);
        assert!((a - ideal).abs() / ideal < 1e-3, "{ebno} dB");
    }
}

#[test]
fn average_link_power_is_absorbed_by_ebno() {
    let mut cfg = SweepConfig {
        min_errors: 4000,
        ..SweepConfig::new(Mode::ProposedIdeal, Modulation::Bpsk)
    };
    let unit = estimate_ber(&cfg, 8.0).unwrap();
    cfg.g = 4.0;
    let strong = estimate_ber(&cfg, 8.0).unwrap();
    assert!(unit.ci95_low <= strong.ci95_high && strong.ci95_low <= unit.ci95_high);
}
