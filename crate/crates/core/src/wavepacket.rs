//! Gaussian spinor packet and its projection onto the box eigenbasis.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64;

use crate::basis::BoxBasis;
use crate::error::{Error, Result};
use crate::evolution::{norm_sqr, SpinorState};
use crate::quadrature::{self, CompositeRule, PANEL_ORDER};

/// Captured fractions below this are treated as an empty projection.
const EMPTY_PROJECTION: f64 = 1e-14;
const WARN_CAPTURED: f64 = 0.99;
/// Packets closer than this many widths to a wall trigger a warning.
const WALL_CLEARANCE: f64 = 3.0;
/// Gauss–Legendre nodes are required to be at most `d / GAUSSIAN_RESOLUTION` apart on average.
const GAUSSIAN_RESOLUTION: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketSpec {
    pub d: f64,
    pub x0: f64,
    pub v0: f64,
    pub s: [Complex64; 4],
}

impl GaussianPacketSpec {
    pub fn new(d: f64, x0: f64, v0: f64, s: [Complex64; 4]) -> Self {
        GaussianPacketSpec { d, x0, v0, s }
    }

    /// Spin-up large component only, `s = (1, 0, 0, 0)`.
    pub fn spin_up(d: f64, x0: f64, v0: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::new(d, x0, v0, [Complex64::new(1.0, 0.0), z, z, z])
    }

    pub fn validate(&self, length: f64) -> Result<()> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::invalid(
                "packet_d",
                format!("width must be positive, got {}", self.d),
            ));
        }
        if !(self.x0 > 0.0 && self.x0 < length) {
            return Err(Error::invalid(
                "packet_x0",
                format!("center {} not inside (0, {length})", self.x0),
            ));
        }
        if !self.v0.is_finite() {
            return Err(Error::invalid("packet_v0", "must be finite"));
        }
        if self.s.iter().all(|c| c.norm_sqr() == 0.0) {
            return Err(Error::invalid(
                "packet_s",
                "at least one spin weight must be nonzero",
            ));
        }
        Ok(())
    }

    /// `1/sqrt(Σ|s_i|²)`.
    pub fn spin_factor(&self) -> f64 {
        1.0 / self.s.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Envelope `f(x) = (1/(d√π)) exp(-(x-x0)²/(2d²) + i v0 x)`; the prefactor is not unit-normalizing.
    pub fn envelope(&self, x: f64) -> Complex64 {
        let u = (x - self.x0) / self.d;
        Complex64::from_polar((-0.5 * u * u).exp() / (self.d * PI.sqrt()), self.v0 * x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionReport {
    /// `Σ|A_n|²` relative to the packet's own norm on `[0, L]`, before renormalization.
    pub captured_fraction: f64,
    /// Raw `∫₀ᴸ Ψ†Ψ dx` of the packet as written.
    pub raw_norm: f64,
    pub panels: usize,
}

fn packet_rule(spec: &GaussianPacketSpec, length: f64, k_max: f64) -> CompositeRule {
    let for_modes = quadrature::panels_for(length, k_max + spec.v0.abs());
    let spacing = spec.d / GAUSSIAN_RESOLUTION;
    let for_gaussian = (length / (spacing * PANEL_ORDER as f64)).ceil() as usize;
    CompositeRule::new(0.0, length, for_modes.max(for_gaussian))
}

/// Raw L² norm `∫₀ᴸ Ψ†Ψ dx` of the packet, spin factor included. With the
/// `1/(d√π)` prefactor this is about `1/(d√π)` for a packet well inside the box.
pub fn packet_norm_constant(spec: &GaussianPacketSpec, length: f64) -> Result<f64> {
    spec.validate(length)?;
    let rule = packet_rule(spec, length, 0.0);
    Ok(rule.integrate(|x| spec.envelope(x).norm_sqr()))
}

/// `A_n(0) = ∫ ψ_n† Ψ(x, 0) dx`, then renormalized. Only `s₁` (against `φ₁`)
/// and `s₄` (against `χ₂`) can contribute.
pub fn project_packet(
    spec: &GaussianPacketSpec,
    basis: &BoxBasis,
    renormalize_evolution: bool,
) -> Result<(SpinorState, ProjectionReport)> {
    let length = basis.length();
    spec.validate(length)?;
    let clearance = spec.x0.min(length - spec.x0);
    if clearance < WALL_CLEARANCE * spec.d {
        warn!(
            "packet centre is {clearance} from a wall, less than {WALL_CLEARANCE} widths ({})",
            WALL_CLEARANCE * spec.d
        );
    }
    let k_max = basis.wavenumbers()[basis.n_max() - 1];
    let rule = packet_rule(spec, length, k_max);
    let sf = spec.spin_factor();
    let (s1, s4) = (spec.s[0] * sf, spec.s[3] * sf);
    let f: Vec<Complex64> = rule.nodes().iter().map(|&x| spec.envelope(x)).collect();
    let raw_norm = rule
        .weights()
        .iter()
        .zip(&f)
        .map(|(w, v)| w * v.norm_sqr())
        .sum::<f64>();

    let a: Vec<Complex64> = (0..basis.n_max())
        .map(|i| {
            let mut large = Complex64::new(0.0, 0.0);
            let mut small = Complex64::new(0.0, 0.0);
            for ((&x, &w), fv) in rule.nodes().iter().zip(rule.weights()).zip(&f) {
                let (s, c) = basis.envelopes(i, x);
                large += fv * (w * s);
                small += fv * (w * c);
            }
            // conj(i) = -i on the large component
            Complex64::new(0.0, -1.0) * s1 * large + s4 * small
        })
        .collect();

    let captured = norm_sqr(&a) / raw_norm;
    if !(captured > EMPTY_PROJECTION) {
        return Err(Error::EmptyProjection { captured });
    }
    if captured < WARN_CAPTURED {
        warn!("only {captured:.4} of the packet lies in the positive-energy basis; renormalizing");
    }
    let state = SpinorState::normalized(a, renormalize_evolution)?;
    Ok((
        state,
        ProjectionReport {
            captured_fraction: captured,
            raw_norm,
            panels: rule.panels(),
        },
    ))
}

/// Interior local maxima of a sampled profile that reach `rel_height` of the
/// global maximum, as `(index, value)`.
pub fn local_maxima(rho: &[f64], rel_height: f64) -> Vec<(usize, f64)> {
    let top = rho.iter().copied().fold(0.0, f64::max);
    (1..rho.len().saturating_sub(1))
        .filter(|&i| rho[i] > rho[i - 1] && rho[i] >= rho[i + 1] && rho[i] >= rel_height * top)
        .map(|i| (i, rho[i]))
        .collect()
}

/// `max_j |ρ_j - ρ_{n-1-j}|` on a grid symmetric about the box centre.
pub fn mirror_asymmetry(rho: &[f64]) -> f64 {
    rho.iter()
        .zip(rho.iter().rev())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Cosine similarity of two sampled profiles; 1 for identical shapes.
pub fn profile_similarity(a: &[f64], b: &[f64]) -> f64 {
    let ab: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let aa: f64 = a.iter().map(|x| x * x).sum();
    let bb: f64 = b.iter().map(|x| x * x).sum();
    ab / (aa * bb).sqrt()
}
