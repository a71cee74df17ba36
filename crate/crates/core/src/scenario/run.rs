//! Driving a configured run and writing its artefacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use rayon::prelude::*;

use crate::basis::BoxBasis;
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolveOptions, Observer, SpinorState};
use crate::kick::{build_kick_matrix_bessel, KickOperator, KickParams};
use crate::observables::{ObservableSeries, SeriesRecorder};
use crate::wavepacket::project_packet;

use super::classify::{regime_classifier, RegimeReport};
use super::config::{InitialState, RunConfig};

pub const SERIES_HEADER: &str = "kick_index,time,E_kin,E_total,velocity,norm";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Load the kick matrix from this file if it exists, otherwise save the
    /// assembled one there. The file carries no parameters beyond its
    /// dimension; keeping it matched to the config is the caller's job.
    pub kick_matrix: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    /// The configuration actually run (`n_max` after any doubling).
    pub config: RunConfig,
    pub series: ObservableSeries,
    /// `n_max` of every attempt, last one kept.
    pub nmax_history: Vec<usize>,
    /// Largest probability in the top eighth of the modes over the run.
    pub edge_population: f64,
    /// Packet runs only.
    pub captured_fraction: Option<f64>,
    /// `None` when the series is shorter than the classifier minimum.
    pub regime: Option<RegimeReport>,
    pub files: Vec<PathBuf>,
}

/// Tracks the largest probability held by the top eighth of the basis.
struct EdgeMonitor {
    start: usize,
    peak: f64,
}

impl EdgeMonitor {
    fn new(n_max: usize) -> Self {
        EdgeMonitor {
            start: n_max - (n_max / 8).max(1),
            peak: 0.0,
        }
    }
}

impl Observer for EdgeMonitor {
    fn observe(&mut self, state: &SpinorState) -> Result<()> {
        let p: f64 = state.coefficients()[self.start..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        self.peak = self.peak.max(p);
        Ok(())
    }
}

fn initial_state(config: &RunConfig, basis: &BoxBasis) -> Result<(SpinorState, Option<f64>)> {
    match config.initial {
        InitialState::Mode(n) => Ok((SpinorState::eigenmode(basis, n, config.renormalize)?, None)),
        InitialState::Packet(spec) => {
            let (state, report) = project_packet(&spec, basis, config.renormalize)?;
            Ok((state, Some(report.captured_fraction)))
        }
    }
}

fn kick_operator(
    config: &RunConfig,
    basis: &BoxBasis,
    cache: Option<&Path>,
) -> Result<KickOperator> {
    let params = KickParams::new(config.epsilon, config.lambda, config.period)?
        .with_phase(config.kick_phase);
    match cache {
        Some(path) if path.exists() => {
            info!("loading kick matrix from {}", path.display());
            KickOperator::read_binary(path, basis, params)
        }
        Some(path) => {
            let op = build_kick_matrix_bessel(basis, params, config.bessel_tol)?;
            op.write_binary(path)?;
            info!("saved kick matrix to {}", path.display());
            Ok(op)
        }
        None => build_kick_matrix_bessel(basis, params, config.bessel_tol),
    }
}

struct Attempt {
    series: ObservableSeries,
    edge: f64,
    captured: Option<f64>,
}

fn attempt(config: &RunConfig, cache: Option<&Path>) -> Result<Attempt> {
    let basis = BoxBasis::new(config.length, config.n_max)?;
    let op = kick_operator(config, &basis, cache)?;
    let (mut state, captured) = initial_state(config, &basis)?;
    let mut recorder = SeriesRecorder::new(&basis, config.period)
        .with_density(config.density_points, &config.density_kicks);
    let mut edge = EdgeMonitor::new(config.n_max);
    let opts = EvolveOptions::new(config.n_kicks)
        .stride(config.stride)
        .order(config.order)
        .norm_floor(config.norm_floor);
    evolve(&mut state, &op, &opts, &mut [&mut recorder, &mut edge])?;
    Ok(Attempt {
        series: recorder.finish(),
        edge: edge.peak,
        captured,
    })
}

/// Run a configuration in memory. With `auto_nmax`, `n_max` doubles while the
/// top eighth of the basis ever holds more than `edge_limit`, up to
/// `nmax_limit`.
pub fn simulate(config: &RunConfig, options: &RunOptions) -> Result<RunSummary> {
    config.validate()?;
    if config.auto_nmax && options.kick_matrix.is_some() {
        return Err(Error::invalid(
            "kick_matrix",
            "a cached kick matrix fixes n_max; turn auto_nmax off",
        ));
    }
    let mut config = config.clone();
    let mut history = Vec::new();
    let result = loop {
        history.push(config.n_max);
        let run = attempt(&config, options.kick_matrix.as_deref())?;
        if !config.auto_nmax || run.edge <= config.edge_limit {
            break run;
        }
        if config.n_max * 2 > config.nmax_limit {
            warn!(
                "top modes still hold {:.3e} at n_max = {} and the limit is {}; keeping this run",
                run.edge, config.n_max, config.nmax_limit
            );
            break run;
        }
        info!(
            "edge population {:.3e} at n_max = {}; doubling",
            run.edge, config.n_max
        );
        config.n_max *= 2;
    };
    let regime = if result.series.len() >= config.classifier.min_samples {
        Some(regime_classifier(&result.series, &config.classifier)?)
    } else {
        None
    };
    Ok(RunSummary {
        config,
        series: result.series,
        nmax_history: history,
        edge_population: result.edge,
        captured_fraction: result.captured,
        regime,
        files: Vec::new(),
    })
}

/// [`simulate`], then write `series.csv`, one `density_<kick>.csv` per
/// density frame and `meta.txt` into `out_dir`.
pub fn run_scenario(
    config: &RunConfig,
    out_dir: &Path,
    options: &RunOptions,
) -> Result<RunSummary> {
    let mut summary = simulate(config, options)?;
    fs::create_dir_all(out_dir)?;
    let mut files = Vec::new();

    let path = out_dir.join("series.csv");
    fs::write(&path, series_csv(&summary.series))?;
    files.push(path);

    for frame in &summary.series.density_frames {
        let mut s = String::from("x,rho\n");
        for (x, r) in frame.x.iter().zip(&frame.rho) {
            writeln!(s, "{x:.16e},{r:.16e}").unwrap();
        }
        let path = out_dir.join(format!("density_{}.csv", frame.kick));
        fs::write(&path, s)?;
        files.push(path);
    }

    let path = out_dir.join("meta.txt");
    fs::write(&path, meta_text(&summary))?;
    files.push(path);

    summary.files = files;
    Ok(summary)
}

/// Run independent configurations on the rayon pool, each into
/// `root/<name>`. Results come back in input order.
pub fn run_batch(jobs: &[(String, RunConfig)], root: &Path) -> Vec<Result<RunSummary>> {
    jobs.par_iter()
        .map(|(name, config)| run_scenario(config, &root.join(name), &RunOptions::default()))
        .collect()
}

/// The series table, every float as `{:.16e}`.
pub fn series_csv(series: &ObservableSeries) -> String {
    let mut s = String::with_capacity(100 * (series.len() + 1));
    s.push_str(SERIES_HEADER);
    s.push('\n');
    for i in 0..series.len() {
        writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            series.kick_index[i],
            series.times[i],
            series.energy[i],
            series.total_energy[i],
            series.velocity[i],
            series.norm[i]
        )
        .unwrap();
    }
    s
}

/// Inverse of [`series_csv`] (density frames are not part of the table).
pub fn parse_series_csv(text: &str) -> Result<ObservableSeries> {
    let bad = |line: usize, message: String| Error::Config { line, message };
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SERIES_HEADER => {}
        other => {
            return Err(bad(
                1,
                format!(
                    "expected header `{SERIES_HEADER}`, got `{}`",
                    other.unwrap_or("")
                ),
            ))
        }
    }
    let mut s = ObservableSeries::default();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(bad(
                line_no,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        }
        let num = |i: usize| {
            fields[i]
                .parse::<f64>()
                .map_err(|_| bad(line_no, format!("bad number `{}`", fields[i])))
        };
        s.kick_index.push(
            fields[0]
                .parse()
                .map_err(|_| bad(line_no, format!("bad kick index `{}`", fields[0])))?,
        );
        s.times.push(num(1)?);
        s.energy.push(num(2)?);
        s.total_energy.push(num(3)?);
        s.velocity.push(num(4)?);
        s.norm.push(num(5)?);
    }
    Ok(s)
}

/// Canonical config of the run that was kept, followed by result comments.
pub fn meta_text(summary: &RunSummary) -> String {
    let mut config = summary.config.clone();
    config.auto_nmax = false;
    config.out_dir = None;
    let mut s = format!("# diracbox {}\n", env!("CARGO_PKG_VERSION"));
    s.push_str(&config.to_text());
    let history: Vec<String> = summary.nmax_history.iter().map(|n| n.to_string()).collect();
    writeln!(s, "# n_max attempts: {}", history.join(",")).unwrap();
    writeln!(s, "# edge population: {:.6e}", summary.edge_population).unwrap();
    if let Some(c) = summary.captured_fraction {
        writeln!(s, "# captured fraction: {c:.16e}").unwrap();
    }
    if let Some(last) = summary.series.norm.last() {
        writeln!(s, "# final norm: {last:.16e}").unwrap();
    }
    match &summary.regime {
        Some(r) => writeln!(
            s,
            "# regime: {} (slope {:.6e}, residual ratio {:.6e}, growth {:.6e}, peak {})",
            r.tag,
            r.fit.slope,
            r.fit.residual_ratio,
            r.growth_ratio,
            r.peak.map_or("none".to_string(), |(p, lag)| format!(
                "{p:.6} at lag {lag}"
            ))
        )
        .unwrap(),
        None => s.push_str("# regime: unclassified (series too short)\n"),
    }
    s
}
