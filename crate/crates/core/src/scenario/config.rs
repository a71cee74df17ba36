//! Flat `key = value` run configuration.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{StepOrder, DEFAULT_NORM_FLOOR};
use crate::kick::{KickPhase, DEFAULT_BESSEL_TOL};
use crate::wavepacket::GaussianPacketSpec;

use super::classify::ClassifierConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    /// Pure eigenmode, 1-based.
    Mode(usize),
    Packet(GaussianPacketSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub length: f64,
    pub n_max: usize,
    pub epsilon: f64,
    pub lambda: f64,
    pub period: f64,
    pub n_kicks: usize,
    pub stride: usize,
    pub order: StepOrder,
    pub kick_phase: KickPhase,
    pub renormalize: bool,
    pub initial: InitialState,
    pub density_points: usize,
    /// Kick counts at which `ρ(x)` is written.
    pub density_kicks: Vec<usize>,
    pub norm_floor: f64,
    pub bessel_tol: f64,
    /// Double `n_max` and rerun while the top eighth of the modes holds more
    /// than `edge_limit` probability at any recorded time.
    pub auto_nmax: bool,
    pub edge_limit: f64,
    pub nmax_limit: usize,
    pub classifier: ClassifierConfig,
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            length: 1.0,
            n_max: 512,
            epsilon: 0.1,
            lambda: 1.0,
            period: 0.47,
            n_kicks: 1000,
            stride: 1,
            order: StepOrder::PhaseKick,
            kick_phase: KickPhase::Scalar,
            renormalize: false,
            initial: InitialState::Mode(1),
            density_points: 1024,
            density_kicks: Vec::new(),
            norm_floor: DEFAULT_NORM_FLOOR,
            bessel_tol: DEFAULT_BESSEL_TOL,
            auto_nmax: false,
            edge_limit: 1e-3,
            nmax_limit: 8192,
            classifier: ClassifierConfig::default(),
            out_dir: None,
        }
    }
}

const KEYS: &[&str] = &[
    "L",
    "n_max",
    "epsilon",
    "lambda",
    "T",
    "n_kicks",
    "stride",
    "order",
    "kick_phase",
    "renormalize",
    "initial",
    "initial_mode",
    "packet_d",
    "packet_x0",
    "packet_v0",
    "packet_s1",
    "packet_s2",
    "packet_s3",
    "packet_s4",
    "density_points",
    "density_kicks",
    "norm_floor",
    "bessel_tol",
    "auto_nmax",
    "edge_limit",
    "nmax_limit",
    "classifier_window",
    "classifier_peak",
    "classifier_growth",
    "classifier_residual",
    "classifier_min_samples",
    "out_dir",
];

struct Entries {
    map: HashMap<&'static str, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |(l, _)| *l)
    }

    fn get<T>(
        &self,
        key: &'static str,
        default: T,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<T> {
        match self.map.get(key) {
            None => Ok(default),
            Some((line, raw)) => parse(raw).map_err(|m| Error::Config {
                line: *line,
                message: format!("`{key}`: {m}"),
            }),
        }
    }
}

fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("expected a finite number, got `{s}`"))
}

fn parse_usize(s: &str) -> std::result::Result<usize, String> {
    s.parse::<usize>()
        .map_err(|_| format!("expected a non-negative integer, got `{s}`"))
}

fn parse_bool(s: &str) -> std::result::Result<bool, String> {
    match s {
        "on" | "true" | "yes" => Ok(true),
        "off" | "false" | "no" => Ok(false),
        _ => Err(format!("expected on/off, got `{s}`")),
    }
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let mut parts = s.split(',').map(str::trim);
    let re = parse_f64(parts.next().unwrap_or(""))?;
    let im = match parts.next() {
        Some(p) => parse_f64(p)?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(format!("expected `re` or `re,im`, got `{s}`"));
    }
    Ok(Complex64::new(re, im))
}

fn parse_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|p| parse_usize(p.trim())).collect()
}

/// Parse and validate a configuration. Unset keys take their defaults;
/// `lambda` defaults to `L`.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map: HashMap<&'static str, (usize, String)> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim();
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| Error::Config {
                line,
                message: format!("unknown key `{key}`"),
            })?;
        if let Some((first, _)) = map.insert(known, (line, value.trim().to_string())) {
            return Err(Error::Config {
                line,
                message: format!("`{key}` already set on line {first}"),
            });
        }
    }
    let e = Entries { map };
    let d = RunConfig::default();

    let length = e.get("L", d.length, parse_f64)?;
    let initial = match e
        .get("initial", "mode".to_string(), |s| Ok(s.to_string()))?
        .as_str()
    {
        "mode" => {
            for k in [
                "packet_d",
                "packet_x0",
                "packet_v0",
                "packet_s1",
                "packet_s2",
                "packet_s3",
                "packet_s4",
            ] {
                if e.map.contains_key(k) {
                    return Err(Error::Config {
                        line: e.line(k),
                        message: format!("`{k}` requires `initial = packet`"),
                    });
                }
            }
            InitialState::Mode(e.get("initial_mode", 1, parse_usize)?)
        }
        "packet" => {
            if e.map.contains_key("initial_mode") {
                return Err(Error::Config {
                    line: e.line("initial_mode"),
                    message: "`initial_mode` requires `initial = mode`".into(),
                });
            }
            let zero = Complex64::new(0.0, 0.0);
            InitialState::Packet(GaussianPacketSpec::new(
                e.get("packet_d", length / 100.0, parse_f64)?,
                e.get("packet_x0", length / 2.0, parse_f64)?,
                e.get("packet_v0", 0.0, parse_f64)?,
                [
                    e.get("packet_s1", Complex64::new(1.0, 0.0), parse_complex)?,
                    e.get("packet_s2", zero, parse_complex)?,
                    e.get("packet_s3", zero, parse_complex)?,
                    e.get("packet_s4", zero, parse_complex)?,
                ],
            ))
        }
        other => {
            return Err(Error::Config {
                line: e.line("initial"),
                message: format!("`initial`: expected `mode` or `packet`, got `{other}`"),
            })
        }
    };
    let cfg = RunConfig {
        length,
        n_max: e.get("n_max", d.n_max, parse_usize)?,
        epsilon: e.get("epsilon", d.epsilon, parse_f64)?,
        lambda: e.get("lambda", length, parse_f64)?,
        period: e.get("T", d.period, parse_f64)?,
        n_kicks: e.get("n_kicks", d.n_kicks, parse_usize)?,
        stride: e.get("stride", d.stride, parse_usize)?,
        order: e.get("order", d.order, |s| s.parse())?,
        kick_phase: e.get("kick_phase", d.kick_phase, |s| s.parse())?,
        renormalize: e.get("renormalize", d.renormalize, parse_bool)?,
        initial,
        density_points: e.get("density_points", d.density_points, parse_usize)?,
        density_kicks: e.get("density_kicks", d.density_kicks.clone(), parse_list)?,
        norm_floor: e.get("norm_floor", d.norm_floor, parse_f64)?,
        bessel_tol: e.get("bessel_tol", d.bessel_tol, parse_f64)?,
        auto_nmax: e.get("auto_nmax", d.auto_nmax, parse_bool)?,
        edge_limit: e.get("edge_limit", d.edge_limit, parse_f64)?,
        nmax_limit: e.get("nmax_limit", d.nmax_limit, parse_usize)?,
        classifier: ClassifierConfig {
            window: e.get("classifier_window", d.classifier.window, parse_usize)?,
            peak_threshold: e.get("classifier_peak", d.classifier.peak_threshold, parse_f64)?,
            growth_factor: e.get("classifier_growth", d.classifier.growth_factor, parse_f64)?,
            residual_threshold: e.get(
                "classifier_residual",
                d.classifier.residual_threshold,
                parse_f64,
            )?,
            min_samples: e.get(
                "classifier_min_samples",
                d.classifier.min_samples,
                parse_usize,
            )?,
        },
        out_dir: e.get("out_dir", None, |s| Ok(Some(PathBuf::from(s))))?,
    };
    cfg.validate_with(|key| e.line(key))?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.validate_with(|_| 0)
    }

    fn validate_with(&self, line: impl Fn(&str) -> usize) -> Result<()> {
        let fail = |key: &'static str, message: String| Error::Config {
            line: line(key),
            message: format!("`{key}`: {message}"),
        };
        let positive = |key: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(fail(key, format!("must be positive, got {v}")))
            }
        };
        positive("L", self.length)?;
        positive("lambda", self.lambda)?;
        positive("T", self.period)?;
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(fail(
                "epsilon",
                format!("must be non-negative, got {}", self.epsilon),
            ));
        }
        if self.n_max == 0 {
            return Err(fail("n_max", "must be at least 1".into()));
        }
        if self.stride == 0 {
            return Err(fail("stride", "must be at least 1".into()));
        }
        if !self.n_kicks.is_multiple_of(self.stride) {
            return Err(fail(
                "stride",
                format!(
                    "must divide n_kicks = {} so the last kick is reported",
                    self.n_kicks
                ),
            ));
        }
        if self.density_points < 2 {
            return Err(fail("density_points", "need at least 2 points".into()));
        }
        for &k in &self.density_kicks {
            if k > self.n_kicks {
                return Err(fail(
                    "density_kicks",
                    format!("kick {k} is after the last kick {}", self.n_kicks),
                ));
            }
            if k % self.stride != 0 {
                return Err(fail(
                    "density_kicks",
                    format!("kick {k} is not a multiple of stride {}", self.stride),
                ));
            }
        }
        if !(self.norm_floor >= 0.0 && self.norm_floor < 1.0) {
            return Err(fail(
                "norm_floor",
                format!("must lie in [0, 1), got {}", self.norm_floor),
            ));
        }
        if !(self.bessel_tol > 0.0 && self.bessel_tol < 1.0) {
            return Err(fail(
                "bessel_tol",
                format!("must lie in (0, 1), got {}", self.bessel_tol),
            ));
        }
        positive("edge_limit", self.edge_limit)?;
        if self.nmax_limit < self.n_max {
            return Err(fail(
                "nmax_limit",
                format!("is below n_max = {}", self.n_max),
            ));
        }
        match self.initial {
            InitialState::Mode(n) => {
                if n == 0 || n > self.n_max {
                    return Err(fail(
                        "initial_mode",
                        format!("{n} outside 1..={}", self.n_max),
                    ));
                }
            }
            InitialState::Packet(spec) => {
                positive("packet_d", spec.d)?;
                if !(spec.x0 > 0.0 && spec.x0 < self.length) {
                    return Err(fail(
                        "packet_x0",
                        format!("{} not inside (0, {})", spec.x0, self.length),
                    ));
                }
                if spec.s.iter().all(|c| c.norm_sqr() == 0.0) {
                    return Err(fail("packet_s1", "all spin weights are zero".into()));
                }
            }
        }
        let c = &self.classifier;
        if c.window == 0 || c.window.is_multiple_of(2) {
            return Err(fail(
                "classifier_window",
                format!("must be odd and positive, got {}", c.window),
            ));
        }
        positive("classifier_peak", c.peak_threshold)?;
        positive("classifier_growth", c.growth_factor)?;
        positive("classifier_residual", c.residual_threshold)?;
        if c.min_samples < 3 {
            return Err(fail("classifier_min_samples", "must be at least 3".into()));
        }
        Ok(())
    }

    /// Canonical text listing every key; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k} = {v}").unwrap();
        let onoff = |b: bool| if b { "on" } else { "off" }.to_string();
        let cplx = |c: Complex64| format!("{:?},{:?}", c.re, c.im);
        kv("L", format!("{:?}", self.length));
        kv("n_max", self.n_max.to_string());
        kv("epsilon", format!("{:?}", self.epsilon));
        kv("lambda", format!("{:?}", self.lambda));
        kv("T", format!("{:?}", self.period));
        kv("n_kicks", self.n_kicks.to_string());
        kv("stride", self.stride.to_string());
        kv("order", self.order.to_string());
        kv("kick_phase", self.kick_phase.to_string());
        kv("renormalize", onoff(self.renormalize));
        match self.initial {
            InitialState::Mode(n) => {
                kv("initial", "mode".into());
                kv("initial_mode", n.to_string());
            }
            InitialState::Packet(p) => {
                kv("initial", "packet".into());
                kv("packet_d", format!("{:?}", p.d));
                kv("packet_x0", format!("{:?}", p.x0));
                kv("packet_v0", format!("{:?}", p.v0));
                for (i, c) in p.s.iter().enumerate() {
                    kv(&format!("packet_s{}", i + 1), cplx(*c));
                }
            }
        }
        kv("density_points", self.density_points.to_string());
        kv(
            "density_kicks",
            self.density_kicks
                .iter()
                .map(|k| k.to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        kv("norm_floor", format!("{:?}", self.norm_floor));
        kv("bessel_tol", format!("{:?}", self.bessel_tol));
        kv("auto_nmax", onoff(self.auto_nmax));
        kv("edge_limit", format!("{:?}", self.edge_limit));
        kv("nmax_limit", self.nmax_limit.to_string());
        kv("classifier_window", self.classifier.window.to_string());
        kv(
            "classifier_peak",
            format!("{:?}", self.classifier.peak_threshold),
        );
        kv(
            "classifier_growth",
            format!("{:?}", self.classifier.growth_factor),
        );
        kv(
            "classifier_residual",
            format!("{:?}", self.classifier.residual_threshold),
        );
        kv(
            "classifier_min_samples",
            self.classifier.min_samples.to_string(),
        );
        if let Some(dir) = &self.out_dir {
            kv("out_dir", dir.display().to_string());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.initial, InitialState::Mode(1));
        assert_eq!(c.length, 1.0);
        assert_eq!(c.n_max, 512);
        assert_eq!(c.stride, 1);
        assert_eq!(c.order, StepOrder::PhaseKick);
        assert_eq!(c.kick_phase, KickPhase::Scalar);
        assert!(!c.renormalize);
    }

    #[test]
    fn comments_whitespace_and_values() {
        let c = parse_config("# header\n epsilon = 0.1  # strength\nT=0.47\n\nrenormalize=on\n")
            .unwrap();
        assert_eq!(c.epsilon, 0.1);
        assert_eq!(c.period, 0.47);
        assert!(c.renormalize);
    }

    #[test]
    fn lambda_follows_length() {
        let c = parse_config("L = 2.5").unwrap();
        assert_eq!(c.lambda, 2.5);
        let c = parse_config("L = 2.5\nlambda = 1.25").unwrap();
        assert_eq!(c.lambda, 1.25);
    }

    #[test]
    fn errors_carry_line_and_key() {
        let err = parse_config("epsilon = 0.1\nT=-1\n").unwrap_err();
        match err {
            Error::Config { line, message } => {
                assert_eq!(line, 2);
                assert!(
                    message.contains("`T`") && message.contains("positive"),
                    "{message}"
                );
            }
            other => panic!("{other:?}"),
        }
        let check = |text: &str, want_line: usize| match parse_config(text) {
            Err(Error::Config { line, .. }) => assert_eq!(line, want_line, "{text}"),
            other => panic!("{text}: {other:?}"),
        };
        check("\n\nbogus = 1", 3);
        check("n_max = ten", 1);
        check("epsilon = 1\nepsilon = 2", 2);
        check("no equals sign", 1);
        check("n_kicks = 10\nstride = 3", 2);
        check("initial_mode = 600", 1);
        check("packet_d = 0.1", 1);
        check("initial = packet\npacket_x0 = 1.5", 2);
        check("density_kicks = 5,2000", 1);
        check("order = backwards", 1);
        check("renormalize = maybe", 1);
        check("classifier_window = 50", 1);
    }

    #[test]
    fn packet_keys() {
        let c = parse_config("initial = packet\npacket_d = 0.02\npacket_s4 = 0.5,-0.5\n").unwrap();
        match c.initial {
            InitialState::Packet(p) => {
                assert_eq!(p.d, 0.02);
                assert_eq!(p.x0, 0.5);
                assert_eq!(p.s[0], Complex64::new(1.0, 0.0));
                assert_eq!(p.s[3], Complex64::new(0.5, -0.5));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn canonical_text_round_trips() {
        let mut c = parse_config("initial = packet\npacket_v0 = 3.3\npacket_s2 = 0.1,0.2\nT = 1e-4\ndensity_kicks = 0,20").unwrap();
        c.out_dir = Some(PathBuf::from("runs/a"));
        let back = parse_config(&c.to_text()).unwrap();
        assert_eq!(back, c);
        let d = RunConfig::default();
        assert_eq!(parse_config(&d.to_text()).unwrap(), d);
    }
}
