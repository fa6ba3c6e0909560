//! Command-line front end and output files.
//!
//! A sweep writes a CSV with a fixed header, a `PATH.manifest` key-value file
//! next to it and, with `--gnuplot`, a `PATH.gp` plot script. A distribution
//! dump writes quantiles of the sample with the empirical and reference CDFs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, ValueEnum};

use crate::analysis::{DistributionGrid, GridSpec, ZLaw};
use crate::error::{Error, Result};
use crate::montecarlo::{
    self, version_string, BerPoint, DistributionKind, DistributionSample, Mode, Modulation, Sweep, SweepConfig,
    DEFAULT_MAX_TRIALS, DEFAULT_MIN_ERRORS,
};
use crate::rng::RNG_IDENTITY;

pub const CSV_HEADER: &str = "ebno_db,mode,modulation,feedback_bits,nr,trials,bit_errors,ber,ci95_low,ci95_high,analytic_ber";

/// Modelling choices that differ from a literal reading of the derivation.
pub const DEVIATIONS: &[&str] = &[
    "z-law CDF for t>=0 uses a re-derived closed inner integral; the nested region form is kept as its reference",
    "z<0 requires v<0 and gamma2*|v|>gamma1 (corrected inequality signs)",
    "user 1 transmits with the exact phase beta1; only user 2's phase is fed back",
    "baseline joint-ML and single-user modes use beta1=beta2=0",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    ProposedIdeal,
    ProposedQuantized,
    JointMl,
    SingleUser,
    ProposedMrc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModArg {
    Bpsk,
    #[value(name = "4pam")]
    Pam4,
    #[value(name = "4qam")]
    Qam4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistArg {
    SinEps2,
    Z,
}

#[derive(Debug, Parser)]
#[command(name = "ccisim", version, about = "BER simulator for phase-precoded co-channel interference nulling")]
struct Cli {
    /// detection / precoding scheme
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// modulation
    #[arg(long = "mod", value_enum, default_value = "bpsk")]
    modulation: ModArg,
    /// phase feedback bits (codebook size 2^N)
    #[arg(long)]
    feedback_bits: Option<u32>,
    /// receive antennas (proposed-mrc only)
    #[arg(long, default_value_t = 1)]
    nr: usize,
    /// Eb/No points in dB: A:B:STEP (inclusive) or a comma list
    #[arg(long, allow_hyphen_values = true)]
    ebno: Option<String>,
    /// average link power E|h|^2
    #[arg(long, default_value_t = 1.0)]
    g: f64,
    /// maximum trials per Eb/No point
    #[arg(long, default_value_t = DEFAULT_MAX_TRIALS)]
    trials: u64,
    /// bit errors (user 1) at which a point stops
    #[arg(long, default_value_t = DEFAULT_MIN_ERRORS)]
    min_errors: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// output CSV
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// fill the analytic_ber column where a closed or semi-analytic form exists
    #[arg(long)]
    analytic: bool,
    /// dump a distribution sample instead of running a BER sweep
    #[arg(long, value_enum)]
    dist: Option<DistArg>,
    /// samples for --dist
    #[arg(long, default_value_t = 1_000_000)]
    count: usize,
    /// worker threads (0: one per core)
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// also write PATH.gp, a gnuplot script for the CSV
    #[arg(long)]
    gnuplot: bool,
    /// use the same fading coefficient for both users
    #[arg(long)]
    pin_equal_links: bool,
    /// silence user 2
    #[arg(long)]
    no_interferer: bool,
    /// write the tabulated law of z (t,cdf,pdf) to this path
    #[arg(long)]
    export_grid: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub config: SweepConfig,
    pub out: PathBuf,
    pub analytic: bool,
    pub gnuplot: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRequest {
    pub kind: DistributionKind,
    pub g: f64,
    pub levels: usize,
    pub count: usize,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRequest {
    pub g: f64,
    pub levels: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    Sweep(SweepRequest),
    Distribution(DistributionRequest),
    ExportGrid(GridRequest),
    /// help or version text to print before exiting successfully
    Info(String),
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

/// Parse an Eb/No list: `A:B:STEP` (endpoints inclusive) or `x,y,z`.
pub fn parse_ebno(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| usage(format!("bad Eb/No value '{t}'")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, step] = parts[..] else {
            return Err(usage(format!("Eb/No range must be A:B:STEP, got '{s}'")));
        };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if step <= 0.0 || b < a {
            return Err(usage(format!("Eb/No range needs A <= B and STEP > 0, got '{s}'")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        // round to micro-dB so 0:1:0.1 style ranges give clean values
        Ok((0..=n).map(|k| ((a + k as f64 * step) * 1e6).round() / 1e6).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

pub fn parse_cli<I, T>(argv: I) -> Result<Request>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Ok(Request::Info(e.to_string())),
                _ => Err(usage(e.to_string())),
            };
        }
    };
    let levels = || -> Result<usize> {
        match cli.feedback_bits {
            Some(b) if (1..=24).contains(&b) => Ok(1 << b),
            Some(b) => Err(usage(format!("--feedback-bits must be in 1..=24, got {b}"))),
            None => Err(usage("--feedback-bits is required here")),
        }
    };
    if let Some(path) = &cli.export_grid {
        if cli.mode.is_some() || cli.dist.is_some() {
            return Err(usage("--export-grid cannot be combined with --mode or --dist"));
        }
        return Ok(Request::ExportGrid(GridRequest {
            g: cli.g,
            levels: levels()?,
            out: path.clone(),
        }));
    }
    if let Some(dist) = cli.dist {
        if cli.mode.is_some() {
            return Err(usage("--dist cannot be combined with --mode"));
        }
        if cli.count < 10_000 {
            return Err(usage(format!("--count must be at least 10000, got {}", cli.count)));
        }
        return Ok(Request::Distribution(DistributionRequest {
            kind: match dist {
                DistArg::SinEps2 => DistributionKind::SinEps2,
                DistArg::Z => DistributionKind::Z,
            },
            g: cli.g,
            levels: levels()?,
            count: cli.count,
            seed: cli.seed,
            out: cli.out,
        }));
    }
    let mode = match cli.mode.ok_or_else(|| usage("one of --mode, --dist or --export-grid is required"))? {
        ModeArg::ProposedIdeal => Mode::ProposedIdeal,
        ModeArg::ProposedQuantized => Mode::ProposedQuantized,
        ModeArg::JointMl => Mode::JointMl,
        ModeArg::SingleUser => Mode::SingleUserNaive,
        ModeArg::ProposedMrc => Mode::ProposedMrc,
    };
    let modulation = match cli.modulation {
        ModArg::Bpsk => Modulation::Bpsk,
        ModArg::Pam4 => Modulation::Pam4,
        ModArg::Qam4 => Modulation::Qam4,
    };
    let ebno = cli.ebno.as_deref().ok_or_else(|| usage("--ebno is required for a sweep"))?;
    let config = SweepConfig {
        mode,
        modulation,
        feedback_bits: cli.feedback_bits,
        n_r: cli.nr,
        ebno_points_db: parse_ebno(ebno)?,
        g: cli.g,
        min_errors: cli.min_errors,
        max_trials: cli.trials,
        seed: cli.seed,
        workers: cli.workers,
        pin_equal_links: cli.pin_equal_links,
        no_interferer: cli.no_interferer,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    Ok(Request::Sweep(SweepRequest {
        config,
        out: cli.out,
        analytic: cli.analytic,
        gnuplot: cli.gnuplot,
    }))
}

/// Key-value record written next to every CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub rng: String,
    /// resolved configuration as ordered key-value pairs
    pub config: Vec<(String, String)>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub deviations: Vec<String>,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

impl RunManifest {
    pub fn new(seed: u64, config: Vec<(String, String)>, started_unix: f64) -> Self {
        Self {
            version: version_string(),
            seed,
            rng: RNG_IDENTITY.to_string(),
            config,
            started_unix,
            finished_unix: unix_now(),
            deviations: DEVIATIONS.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn for_sweep(sweep: &Sweep, analytic: bool, started_unix: f64) -> Self {
        let c = &sweep.config;
        let fmt_points = c.ebno_points_db.iter().map(|e| format_ebno(*e)).collect::<Vec<_>>().join(",");
        let config = [
            ("mode", c.mode.name().to_string()),
            ("modulation", c.modulation.name().to_string()),
            ("feedback_bits", c.feedback_bits.map(|b| b.to_string()).unwrap_or_default()),
            ("nr", c.n_r.to_string()),
            ("ebno_db", fmt_points),
            ("g", c.g.to_string()),
            ("min_errors", c.min_errors.to_string()),
            ("max_trials", c.max_trials.to_string()),
            ("workers", c.workers.to_string()),
            ("pin_equal_links", c.pin_equal_links.to_string()),
            ("no_interferer", c.no_interferer.to_string()),
            ("analytic", analytic.to_string()),
            ("chunk_trials", sweep.metadata.chunk_trials.to_string()),
        ];
        let mut m = Self::new(c.seed, config.into_iter().map(|(k, v)| (k.to_string(), v)).collect(), started_unix);
        let low: Vec<String> = sweep
            .points
            .iter()
            .filter(|p| p.low_confidence)
            .map(|p| format_ebno(p.ebno_db))
            .collect();
        m.config.push(("low_confidence_points".into(), low.join(",")));
        m
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "version={}", self.version);
        let _ = writeln!(s, "seed={}", self.seed);
        let _ = writeln!(s, "rng={}", self.rng);
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k}={v}");
        }
        let _ = writeln!(s, "started_unix={:.3}", self.started_unix);
        let _ = writeln!(s, "finished_unix={:.3}", self.finished_unix);
        for (i, d) in self.deviations.iter().enumerate() {
            let _ = writeln!(s, "deviation.{i}={d}");
        }
        s
    }
}

pub fn manifest_path(csv: &Path) -> PathBuf {
    sibling(csv, "manifest")
}

pub fn gnuplot_path(csv: &Path) -> PathBuf {
    sibling(csv, "gp")
}

fn sibling(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn format_ebno(x: f64) -> String {
    format!("{x:.3}")
}

fn format_ber(x: f64) -> String {
    format!("{x:.5e}")
}

/// CSV body for a sweep. `analytic`, when given, has one value per point.
pub fn format_csv(points: &[BerPoint], cfg: &SweepConfig, analytic: Option<&[f64]>) -> Result<String> {
    if points.is_empty() {
        return Err(Error::EmptyResult);
    }
    let mut s = String::with_capacity(128 * (points.len() + 1));
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (i, p) in points.iter().enumerate() {
        let a = analytic.and_then(|a| a.get(i)).map(|&x| format_ber(x)).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            format_ebno(p.ebno_db),
            cfg.mode.name(),
            cfg.modulation.name(),
            cfg.feedback_bits.map(|b| b.to_string()).unwrap_or_default(),
            cfg.n_r,
            p.trials,
            p.bit_errors,
            format_ber(p.ber),
            format_ber(p.ci95_low),
            format_ber(p.ci95_high),
            a
        );
    }
    Ok(s)
}

/// Write the CSV and its manifest.
pub fn emit_csv(
    points: &[BerPoint],
    cfg: &SweepConfig,
    analytic: Option<&[f64]>,
    manifest: &RunManifest,
    path: &Path,
) -> Result<()> {
    let body = format_csv(points, cfg, analytic)?;
    fs::write(path, body)?;
    fs::write(manifest_path(path), manifest.render())?;
    Ok(())
}

/// Gnuplot script plotting BER against Eb/No on a log axis.
pub fn gnuplot_script(csv: &Path, analytic: bool) -> String {
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = csv.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set terminal pngcairo size 800,600");
    let _ = writeln!(s, "set output '{stem}.png'");
    let _ = writeln!(s, "set logscale y");
    let _ = writeln!(s, "set format y '10^{{%L}}'");
    let _ = writeln!(s, "set xlabel 'Eb/No (dB)'");
    let _ = writeln!(s, "set ylabel 'BER'");
    let _ = writeln!(s, "set grid");
    let _ = write!(
        s,
        "plot '{name}' skip 1 using 1:8:9:10 with yerrorlines title 'simulation'"
    );
    if analytic {
        let _ = write!(s, ", '{name}' skip 1 using 1:11 with lines dt 2 title 'analytic'");
    }
    s.push('\n');
    s
}

/// Quantile table of a distribution sample: `x,empirical_cdf,reference_cdf`
/// at `rows` evenly spaced order statistics.
pub fn format_distribution(sample: &DistributionSample, rows: usize) -> String {
    let n = sample.samples.len();
    let rows = rows.clamp(2, n);
    let mut s = String::from("x,empirical_cdf,reference_cdf\n");
    for k in 0..rows {
        let x = sample.samples[k * (n - 1) / (rows - 1)];
        let _ = writeln!(s, "{:.9e},{:.9e},{:.9e}", x, sample.empirical_cdf(x), sample.reference_cdf(x));
    }
    s
}

/// Execute a parsed request. Returns text for standard output.
pub fn execute(req: &Request) -> Result<String> {
    let started = unix_now();
    match req {
        Request::Info(text) => Ok(text.clone()),
        Request::Sweep(r) => {
            let sweep = montecarlo::sweep(&r.config)?;
            let analytic = if r.analytic {
                montecarlo::analytic_reference(&r.config)?
            } else {
                None
            };
            let manifest = RunManifest::for_sweep(&sweep, r.analytic, started);
            emit_csv(&sweep.points, &r.config, analytic.as_deref(), &manifest, &r.out)?;
            if r.gnuplot {
                fs::write(gnuplot_path(&r.out), gnuplot_script(&r.out, analytic.is_some()))?;
            }
            let mut out = format_csv(&sweep.points, &r.config, analytic.as_deref())?;
            for p in sweep.points.iter().filter(|p| p.low_confidence) {
                let _ = writeln!(
                    out,
                    "warning: {} dB stopped at {} trials with {} errors",
                    format_ebno(p.ebno_db),
                    p.trials,
                    p.bit_errors
                );
            }
            Ok(out)
        }
        Request::Distribution(r) => {
            let sample = montecarlo::sample_distribution(r.kind, r.g, r.levels, r.count, r.seed)?;
            fs::write(&r.out, format_distribution(&sample, 1001))?;
            let config = vec![
                ("dist".to_string(), r.kind.name().to_string()),
                ("g".to_string(), r.g.to_string()),
                ("levels".to_string(), r.levels.to_string()),
                ("count".to_string(), r.count.to_string()),
                ("ks".to_string(), format!("{:.6e}", sample.ks)),
            ];
            fs::write(manifest_path(&r.out), RunManifest::new(r.seed, config, started).render())?;
            Ok(format!("{} B={} samples={} ks={:.6e}\n", r.kind.name(), r.levels, r.count, sample.ks))
        }
        Request::ExportGrid(r) => {
            let grid = DistributionGrid::build(&ZLaw::new(r.g, r.levels)?, &GridSpec::default())?;
            let mut buf = Vec::new();
            grid.write_csv(&mut buf)?;
            fs::write(&r.out, buf)?;
            let config = vec![
                ("g".to_string(), r.g.to_string()),
                ("levels".to_string(), r.levels.to_string()),
                ("nodes".to_string(), grid.t_nodes().len().to_string()),
                ("pdf_integral".to_string(), format!("{:.9}", grid.pdf_integral())),
            ];
            fs::write(manifest_path(&r.out), RunManifest::new(0, config, started).render())?;
            Ok(format!("grid nodes={} pdf_integral={:.9}\n", grid.t_nodes().len(), grid.pdf_integral()))
        }
    }
}
