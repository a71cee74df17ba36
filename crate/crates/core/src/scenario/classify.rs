//! Periodic / growing / nonperiodic labels for an energy series.
//!
//! The labels are conventions, not physics:
//!
//! * **growing** — a least-squares line through `E(t)` has positive slope,
//!   explains the data (`SS_res / SS_tot < residual_threshold`), and
//!   `E(end) > growth_factor · E(start)`;
//! * **periodic** — after subtracting a centred moving average of `window`
//!   samples (which removes slow drifts without touching the oscillation),
//!   the normalized autocorrelation has a peak above `peak_threshold`
//!   somewhere past its first zero crossing. A constant series counts as
//!   periodic (period one);
//! * **nonperiodic** — anything else.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::observables::ObservableSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierConfig {
    pub window: usize,
    pub peak_threshold: f64,
    pub growth_factor: f64,
    pub residual_threshold: f64,
    pub min_samples: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            window: 51,
            peak_threshold: 0.9,
            growth_factor: 1.5,
            residual_threshold: 0.1,
            min_samples: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    Periodic,
    Nonperiodic,
    Growing,
    PacketSplit,
    PacketRevival,
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegimeTag::Periodic => "periodic",
            RegimeTag::Nonperiodic => "nonperiodic",
            RegimeTag::Growing => "growing",
            RegimeTag::PacketSplit => "packet_split",
            RegimeTag::PacketRevival => "packet_revival",
        })
    }
}

impl FromStr for RegimeTag {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "periodic" => RegimeTag::Periodic,
            "nonperiodic" => RegimeTag::Nonperiodic,
            "growing" => RegimeTag::Growing,
            "packet_split" => RegimeTag::PacketSplit,
            "packet_revival" => RegimeTag::PacketRevival,
            _ => return Err(format!("unknown regime `{s}`")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// `SS_res / SS_tot`; zero for a constant series.
    pub residual_ratio: f64,
}

/// Ordinary least squares `y ≈ slope·t + intercept`.
pub fn linear_fit(t: &[f64], y: &[f64]) -> LinearFit {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in t.iter().zip(y) {
        stt += (a - tm) * (a - tm);
        sty += (a - tm) * (b - ym);
        syy += (b - ym) * (b - ym);
    }
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    let intercept = ym - slope * tm;
    let ss_res: f64 = t
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (slope * a + intercept);
            r * r
        })
        .sum();
    let residual_ratio = if syy > 0.0 { ss_res / syy } else { 0.0 };
    LinearFit {
        slope,
        intercept,
        residual_ratio,
    }
}

/// Centred moving average, window shrinking symmetrically-truncated at the ends.
pub fn moving_average(y: &[f64], window: usize) -> Vec<f64> {
    let half = window / 2;
    let n = y.len();
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + y[i];
    }
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            (prefix[hi] - prefix[lo]) / (hi - lo) as f64
        })
        .collect()
}

/// Largest normalized autocorrelation past the first zero crossing, with its
/// lag, over lags `< n/2`. `None` if the autocorrelation never turns negative
/// or the series has no variance.
pub fn secondary_peak(x: &[f64]) -> Option<(f64, usize)> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let var: f64 = c.iter().map(|v| v * v).sum();
    if var == 0.0 {
        return None;
    }
    let ac = |lag: usize| {
        c[..n - lag]
            .iter()
            .zip(&c[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / var
    };
    let max_lag = n / 2;
    let first_negative = (1..max_lag).find(|&l| ac(l) < 0.0)?;
    (first_negative..max_lag)
        .map(|l| (ac(l), l))
        .max_by(|a, b| a.0.total_cmp(&b.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub tag: RegimeTag,
    pub fit: LinearFit,
    pub growth_ratio: f64,
    pub peak: Option<(f64, usize)>,
}

/// Classify a uniformly sampled series `y(t)`.
pub fn classify_values(t: &[f64], y: &[f64], cfg: &ClassifierConfig) -> Result<RegimeReport> {
    if t.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: t.len(),
            actual: y.len(),
        });
    }
    if y.len() < cfg.min_samples {
        return Err(Error::SeriesTooShort {
            len: y.len(),
            min: cfg.min_samples,
        });
    }
    let fit = linear_fit(t, y);
    let growth_ratio = y[y.len() - 1] / y[0];
    let constant = y.iter().all(|&v| v == y[0]);
    let growing = fit.slope > 0.0
        && fit.residual_ratio < cfg.residual_threshold
        && growth_ratio > cfg.growth_factor;
    let trend = moving_average(y, cfg.window);
    let detrended: Vec<f64> = y.iter().zip(&trend).map(|(a, b)| a - b).collect();
    let peak = secondary_peak(&detrended);
    let tag = if growing {
        RegimeTag::Growing
    } else if constant || peak.is_some_and(|(p, _)| p > cfg.peak_threshold) {
        RegimeTag::Periodic
    } else {
        RegimeTag::Nonperiodic
    };
    Ok(RegimeReport {
        tag,
        fit,
        growth_ratio,
        peak,
    })
}

/// Classify the kinetic-energy column of a series.
pub fn regime_classifier(
    series: &ObservableSeries,
    cfg: &ClassifierConfig,
) -> Result<RegimeReport> {
    classify_values(&series.times, &series.energy, cfg)
}
