//! Named parameter sets with the regime each one is expected to show.
//!
//! Regime presets start from the lowest mode, renormalize after every kick
//! and let `n_max` double until the top of the basis stays empty.

use crate::error::{Error, Result};
use crate::wavepacket::GaussianPacketSpec;

use super::classify::RegimeTag;
use super::config::{InitialState, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: RunConfig,
    pub tag: RegimeTag,
}

fn regime(epsilon: f64, period: f64, lambda: f64, n_max: usize) -> RunConfig {
    RunConfig {
        epsilon,
        period,
        lambda,
        n_max,
        n_kicks: 2000,
        renormalize: true,
        auto_nmax: true,
        ..RunConfig::default()
    }
}

fn with_density(mut config: RunConfig, kicks: &[usize]) -> RunConfig {
    config.density_kicks = kicks.to_vec();
    config
}

fn packet(epsilon: f64, period: f64, n_kicks: usize, frames: &[usize]) -> RunConfig {
    RunConfig {
        epsilon,
        period,
        n_max: 512,
        n_kicks,
        renormalize: true,
        initial: InitialState::Packet(GaussianPacketSpec::spin_up(0.01, 0.5, 0.0)),
        density_kicks: frames.to_vec(),
        ..RunConfig::default()
    }
}

/// Every preset, in a fixed order.
pub fn list_presets() -> Vec<ScenarioPreset> {
    use RegimeTag::*;
    let p = |name, description, config, tag| ScenarioPreset {
        name,
        description,
        config,
        tag,
    };
    vec![
        p(
            "fig1_eps0.01",
            "weak kick, long period",
            regime(0.01, 0.47, 1.0, 512),
            Periodic,
        ),
        p(
            "fig1_eps0.05",
            "weak kick, long period",
            regime(0.05, 0.47, 1.0, 512),
            Periodic,
        ),
        p(
            "fig1_eps0.1",
            "weak kick, long period",
            regime(0.1, 0.47, 1.0, 512),
            Periodic,
        ),
        p(
            "fig2_eps0.1",
            "intermediate period",
            regime(0.1, 1e-2, 1.0, 512),
            Nonperiodic,
        ),
        p(
            "fig2_eps0.5",
            "intermediate period",
            regime(0.5, 1e-2, 1.0, 512),
            Nonperiodic,
        ),
        p(
            "fig3_eps0.1",
            "short period",
            regime(0.1, 1e-4, 1.0, 1024),
            Growing,
        ),
        p(
            "fig3_eps0.5",
            "short period",
            regime(0.5, 1e-4, 1.0, 4096),
            Growing,
        ),
        p(
            "fig3_eps1",
            "short period",
            regime(1.0, 1e-4, 1.0, 4096),
            Growing,
        ),
        p(
            "fig4_T0.1",
            "period scan at eps = 0.5",
            regime(0.5, 0.1, 1.0, 512),
            Periodic,
        ),
        p(
            "fig4_T0.01",
            "period scan at eps = 0.5",
            regime(0.5, 1e-2, 1.0, 512),
            Nonperiodic,
        ),
        p(
            "fig4_T0.0001",
            "period scan at eps = 0.5",
            regime(0.5, 1e-4, 1.0, 4096),
            Growing,
        ),
        p(
            "fig6_T0.47",
            "density snapshots, long period",
            with_density(regime(0.1, 0.47, 1.0, 512), &[0, 500, 1000, 2000]),
            Periodic,
        ),
        p(
            "fig6_T0.01",
            "density snapshots, intermediate period",
            with_density(regime(0.1, 1e-2, 1.0, 512), &[0, 500, 1000, 2000]),
            Nonperiodic,
        ),
        p(
            "fig6_T0.0001",
            "density snapshots, short period",
            with_density(regime(0.1, 1e-4, 1.0, 1024), &[0, 500, 1000, 2000]),
            Growing,
        ),
        p(
            "fig7_T100",
            "very long period",
            regime(0.1, 100.0, 1.0, 512),
            Periodic,
        ),
        p(
            "fig8_eps0.1",
            "half-box wavelength",
            regime(0.1, 1e-4, 0.5, 1024),
            Nonperiodic,
        ),
        p(
            "fig8_eps0.5",
            "half-box wavelength",
            regime(0.5, 1e-4, 0.5, 4096),
            Nonperiodic,
        ),
        p(
            "fig8_density",
            "density snapshots, intermediate period",
            with_density(regime(0.1, 1e-2, 1.0, 512), &[0, 1000, 2000]),
            Nonperiodic,
        ),
        p(
            "fig9_packet",
            "centred packet splitting under strong kicks",
            packet(1.0, 1e-2, 80, &[0, 20, 50, 80]),
            PacketSplit,
        ),
        p(
            "fig10_packet",
            "centred packet revives every fourth kick",
            packet(1.0, 0.25, 40, &[0, 1, 2, 3, 4, 20, 40]),
            PacketRevival,
        ),
    ]
}

pub fn preset(name: &str) -> Result<ScenarioPreset> {
    list_presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}
