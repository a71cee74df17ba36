//! Composite Gauss–Legendre rules on a finite interval.
//!
//! All matrix elements that are not available in closed form (and all the
//! closed forms that need an independent check) are integrated with these
//! rules. Integrands here are trigonometric polynomials times smooth phases,
//! so a fixed 16-point rule per panel with enough panels is sufficient.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

/// Nodes per panel.
pub const PANEL_ORDER: usize = 16;

/// Minimum number of nodes per half-wavelength of the fastest oscillation.
pub const NODES_PER_HALF_WAVE: usize = 4;

#[derive(Debug, Clone)]
pub struct CompositeRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl CompositeRule {
    /// `panels` equal panels over `[a, b]`, each carrying a 16-point rule.
    pub fn new(a: f64, b: f64, panels: usize) -> Self {
        let panels = panels.max(1);
        let rule = GaussLegendre::new(NonZeroUsize::new(PANEL_ORDER).unwrap());
        let pairs = rule.as_node_weight_pairs();
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
        let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
        for p in 0..panels {
            let lo = a + width * p as f64;
            let mid = lo + 0.5 * width;
            for &(t, w) in pairs {
                nodes.push(mid + 0.5 * width * t);
                weights.push(0.5 * width * w);
            }
        }
        CompositeRule {
            nodes,
            weights,
            panels,
        }
    }

    /// Smallest rule on `[0, length]` resolving oscillations up to wavenumber
    /// `k_max` with at least [`NODES_PER_HALF_WAVE`] nodes per half-wavelength.
    pub fn resolving(length: f64, k_max: f64) -> Self {
        Self::new(0.0, length, panels_for(length, k_max))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Panels needed on `[0, length]` for wavenumbers up to `k_max`.
pub fn panels_for(length: f64, k_max: f64) -> usize {
    let half_waves = (k_max.abs() * length / PI).ceil().max(1.0);
    let nodes = half_waves * NODES_PER_HALF_WAVE as f64;
    (nodes / PANEL_ORDER as f64).ceil().max(1.0) as usize
}

/// Whether `panels` on `[0, length]` satisfies the node-density rule for `k_max`.
pub fn is_sufficient(length: f64, k_max: f64, panels: usize) -> bool {
    panels >= panels_for(length, k_max)
}
