use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use log::info;

use diracbox::kick::{build_kick_matrix_bessel, KickParams};
use diracbox::oracle::{run_oracle_check, LeakagePolicy, OracleConfig};
use diracbox::scenario::{
    list_presets, parse_config, preset, run_scenario, InitialState, RunConfig, RunOptions,
};
use diracbox::wavepacket::project_packet;
use diracbox::{BoxBasis, Error, SpinorState};

const EXIT_CONFIG: u8 = 1;
const EXIT_NORM_FLOOR: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "diracbox", version, about = "Kicked Dirac particle in a box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file or a named preset and write CSV output.
    Simulate {
        #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Output directory (default: the config's `out_dir`, else `runs/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override `n_max` and disable automatic doubling.
        #[arg(long)]
        nmax: Option<usize>,
        /// Override the number of kicks; density frames past the end are dropped.
        #[arg(long)]
        kicks: Option<usize>,
        /// Load the kick matrix from this file, or save it there if absent.
        #[arg(long)]
        kick_matrix: Option<PathBuf>,
    },
    /// Print the preset table.
    ListPresets,
    /// Parse a configuration file and print its canonical form.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare a preset's spectral run with the finite-difference reference.
    OracleCheck {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        kicks: usize,
        /// Write `discrepancy.csv` here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Basis size (default: the preset's, capped at 256).
        #[arg(long)]
        nmax: Option<usize>,
        /// Grid points per spectral mode.
        #[arg(long, default_value_t = 16)]
        points_per_mode: usize,
        /// Free-flight substeps per period.
        #[arg(long, default_value_t = 64)]
        substeps: usize,
        /// Keep negative-energy content on the grid instead of projecting it out.
        #[arg(long)]
        retain_leakage: bool,
    },
}

fn load_config(path: &Path) -> anyhow::Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn simulate(
    config: Option<PathBuf>,
    preset_name: Option<String>,
    out: Option<PathBuf>,
    nmax: Option<usize>,
    kicks: Option<usize>,
    kick_matrix: Option<PathBuf>,
) -> anyhow::Result<()> {
    let (mut cfg, name) = match (config, preset_name) {
        (Some(path), _) => {
            let name = path
                .file_stem()
                .map_or("run".into(), |s| s.to_string_lossy().into_owned());
            (load_config(&path)?, name)
        }
        (None, Some(name)) => (preset(&name)?.config, name),
        (None, None) => bail!("one of --config or --preset is required"),
    };
    if let Some(n) = nmax {
        cfg.n_max = n;
        cfg.nmax_limit = cfg.nmax_limit.max(n);
        cfg.auto_nmax = false;
    }
    if let Some(k) = kicks {
        cfg.n_kicks = k;
        cfg.density_kicks.retain(|&d| d <= k);
    }
    if kick_matrix.is_some() {
        cfg.auto_nmax = false;
    }
    cfg.validate()?;
    let dir = out
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| Path::new("runs").join(&name));
    let summary = run_scenario(&cfg, &dir, &RunOptions { kick_matrix })?;
    println!("n_max: {}", summary.config.n_max);
    if let Some(c) = summary.captured_fraction {
        println!("captured fraction: {c:.6}");
    }
    if let Some(norm) = summary.series.norm.last() {
        println!("final norm: {norm:.12}");
    }
    match &summary.regime {
        Some(r) => println!("regime: {}", r.tag),
        None => println!("regime: unclassified ({} samples)", summary.series.len()),
    }
    for f in &summary.files {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn print_presets() {
    println!(
        "{:<14} {:<15} {:>7} {:>8} {:>7} {:>6} {:>6}  description",
        "name", "tag", "epsilon", "T", "lambda", "n_max", "kicks"
    );
    for p in list_presets() {
        let c = &p.config;
        println!(
            "{:<14} {:<15} {:>7} {:>8} {:>7} {:>6} {:>6}  {}",
            p.name,
            p.tag.to_string(),
            c.epsilon,
            c.period,
            c.lambda,
            c.n_max,
            c.n_kicks,
            p.description
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn oracle_check(
    preset_name: &str,
    kicks: usize,
    out: Option<PathBuf>,
    nmax: Option<usize>,
    points_per_mode: usize,
    substeps: usize,
    retain: bool,
) -> anyhow::Result<()> {
    let cfg = preset(preset_name)?.config;
    let n_max = nmax.unwrap_or(cfg.n_max.min(256));
    let basis = BoxBasis::new(cfg.length, n_max)?;
    let params = KickParams::new(cfg.epsilon, cfg.lambda, cfg.period)?.with_phase(cfg.kick_phase);
    let op = build_kick_matrix_bessel(&basis, params, cfg.bessel_tol)?;
    let initial = match cfg.initial {
        InitialState::Mode(n) => SpinorState::eigenmode(&basis, n, false)?,
        InitialState::Packet(spec) => project_packet(&spec, &basis, false)?.0,
    };
    let oracle = OracleConfig {
        n_grid: points_per_mode * n_max,
        n_substeps: substeps,
        policy: if retain {
            LeakagePolicy::Retain
        } else {
            LeakagePolicy::Discard
        },
    };
    info!(
        "oracle grid {} points, {} substeps per period",
        oracle.n_grid, oracle.n_substeps
    );
    let (report, _) = run_oracle_check(
        &basis,
        &op,
        cfg.order,
        initial.coefficients(),
        kicks,
        &oracle,
    )?;
    println!(
        "n_max: {n_max}, grid points: {}, substeps: {substeps}",
        oracle.n_grid
    );
    println!("max L2 distance: {:.6e}", report.max_distance());
    println!("final L2 distance: {:.6e}", report.final_distance());
    println!("grid leakage: {:.6e}", report.grid_leakage);
    println!("spectral leakage: {:.6e}", report.spectral_leakage);
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        let path = dir.join("discrepancy.csv");
        report.write_csv(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<Error>() {
            return match e {
                Error::NormFloorBreach { .. } => EXIT_NORM_FLOOR,
                Error::Io(_) => EXIT_IO,
                _ => EXIT_CONFIG,
            };
        }
        if cause.is::<std::io::Error>() {
            return EXIT_IO;
        }
    }
    EXIT_CONFIG
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            preset,
            out,
            nmax,
            kicks,
            kick_matrix,
        } => simulate(config, preset, out, nmax, kicks, kick_matrix),
        Command::ListPresets => {
            print_presets();
            Ok(())
        }
        Command::Validate { config } => load_config(&config).map(|c| print!("{}", c.to_text())),
        Command::OracleCheck {
            preset,
            kicks,
            out,
            nmax,
            points_per_mode,
            substeps,
            retain_leakage,
        } => oracle_check(
            &preset,
            kicks,
            out,
            nmax,
            points_per_mode,
            substeps,
            retain_leakage,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
