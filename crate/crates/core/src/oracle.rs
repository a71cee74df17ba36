//! Finite-difference reference integrator.
//!
//! The spinor lives on a collocated grid `x_j = jh`, `j = 0..=N`, with `φ₁`
//! pinned to zero at both walls and `χ₂` free. The free Hamiltonian
//!
//! ```text
//! H (φ, χ) = (φ - i D χ,  -i D̃ φ - χ)
//! ```
//!
//! uses a central difference `D` at interior points and its adjoint `D̃` with
//! respect to the trapezoid weights (one-sided at the walls), so `H` is
//! self-adjoint and the implicit midpoint (Cayley) step is exactly unitary in
//! the discrete norm. Eliminating `χ` leaves a real SPD system coupling `φ_j`
//! to `φ_{j±2}` only: two independent tridiagonal chains.
//!
//! The spectral map keeps only positive-energy modes, so after each kick the
//! default [`LeakagePolicy::Discard`] projects out the negative-energy content
//! the kick creates; the norm removed is the grid's own leakage estimate.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::basis::{cos_pi, sin_pi, BoxBasis};
use crate::error::{Error, Result};
use crate::evolution::{norm_sqr, SpinorState, StepOrder, Stepper};
use crate::kick::{KickOperator, KickPhase};

/// Grid points required per retained spectral mode.
pub const POINTS_PER_MODE: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    length: f64,
    /// `φ₁` at all points; the two wall entries stay exactly zero.
    pub phi1: Vec<Complex64>,
    pub chi2: Vec<Complex64>,
}

impl GridState {
    pub fn zeros(length: f64, n_grid: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid("L", "box length must be positive"));
        }
        if n_grid < 3 {
            return Err(Error::invalid(
                "n_grid",
                format!("need at least 3 points, got {n_grid}"),
            ));
        }
        Ok(GridState {
            length,
            phi1: vec![Complex64::new(0.0, 0.0); n_grid],
            chi2: vec![Complex64::new(0.0, 0.0); n_grid],
        })
    }

    /// Sample `Σ A_n ψ_n` on the grid.
    pub fn from_spectral(basis: &BoxBasis, a: &[Complex64], n_grid: usize) -> Result<Self> {
        check_resolution(n_grid, basis.n_max())?;
        let mut gs = Self::zeros(basis.length(), n_grid)?;
        gs.fill_spectral(basis, a);
        Ok(gs)
    }

    fn fill_spectral(&mut self, basis: &BoxBasis, a: &[Complex64]) {
        let last = self.n_grid() - 1;
        for (j, (phi, chi)) in self.phi1.iter_mut().zip(self.chi2.iter_mut()).enumerate() {
            let t = j as f64 / last as f64;
            let mut p = Complex64::new(0.0, 0.0);
            let mut c = Complex64::new(0.0, 0.0);
            for (i, coef) in a.iter().enumerate() {
                if coef.re == 0.0 && coef.im == 0.0 {
                    continue;
                }
                let m = (i + 1) as f64;
                p += coef * (basis.norms()[i] * sin_pi(m * t));
                c += coef * (basis.norms()[i] * basis.kappas()[i] * cos_pi(m * t));
            }
            *phi = Complex64::new(-p.im, p.re);
            *chi = c;
        }
    }

    pub fn n_grid(&self) -> usize {
        self.chi2.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / (self.n_grid() - 1) as f64
    }

    pub fn positions(&self) -> Vec<f64> {
        let last = self.n_grid() - 1;
        (0..=last)
            .map(|j| {
                if j == last {
                    self.length
                } else {
                    self.length * j as f64 / last as f64
                }
            })
            .collect()
    }

    /// Discrete inner product: weight `h` for interior `φ₁`, trapezoid for `χ₂`.
    pub fn inner(&self, other: &GridState) -> Complex64 {
        let h = self.spacing();
        let n = self.n_grid();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 1..n - 1 {
            acc += self.phi1[j].conj() * other.phi1[j];
        }
        for j in 0..n {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += self.chi2[j].conj() * other.chi2[j] * w;
        }
        acc * h
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re
    }

    pub fn l2_distance(&self, other: &GridState) -> Result<f64> {
        if self.n_grid() != other.n_grid() {
            return Err(Error::DimensionMismatch {
                expected: self.n_grid(),
                actual: other.n_grid(),
            });
        }
        let diff = GridState {
            length: self.length,
            phi1: self
                .phi1
                .iter()
                .zip(&other.phi1)
                .map(|(a, b)| a - b)
                .collect(),
            chi2: self
                .chi2
                .iter()
                .zip(&other.chi2)
                .map(|(a, b)| a - b)
                .collect(),
        };
        Ok(diff.norm().max(0.0).sqrt())
    }
}

/// Reject grids with fewer than [`POINTS_PER_MODE`] points per spectral mode.
pub fn check_resolution(n_grid: usize, n_max: usize) -> Result<()> {
    let need = POINTS_PER_MODE * n_max;
    if n_grid < need {
        return Err(Error::invalid(
            "n_grid",
            format!("{n_grid} points cannot represent {n_max} modes; need >= {need}"),
        ));
    }
    Ok(())
}

/// Pre-factored implicit-midpoint propagator for one period.
#[derive(Debug, Clone)]
pub struct FreeFlight {
    n_grid: usize,
    h: f64,
    n_substeps: usize,
    dt: f64,
    /// Thomas factors for the chain `j, j+2, ...`: modified super-diagonal
    /// ratios and inverse pivots, indexed by grid point.
    upper: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl FreeFlight {
    pub fn new(length: f64, n_grid: usize, period: f64, n_substeps: usize) -> Result<Self> {
        if n_substeps == 0 {
            return Err(Error::invalid("substeps", "must be at least 1"));
        }
        if !(period >= 0.0 && period.is_finite()) {
            return Err(Error::invalid("T", "must be finite and non-negative"));
        }
        if n_grid < 5 {
            return Err(Error::invalid(
                "n_grid",
                format!("need at least 5 points, got {n_grid}"),
            ));
        }
        let big_n = n_grid - 1;
        let h = length / big_n as f64;
        let dt = period / n_substeps as f64;
        // M = (1 + dt²/4) I + (dt²/4) G with G = -D D̃:
        // G_jj = 2/(4h²) (3/(4h²) next to a wall), G_{j,j±2} = -1/(4h²).
        let c1 = dt * dt / 4.0;
        let diag = |j: usize| {
            let g = if j == 1 || j == big_n - 1 { 3.0 } else { 2.0 };
            1.0 + c1 + c1 * g / (4.0 * h * h)
        };
        let off = -c1 / (4.0 * h * h);
        let mut upper = vec![0.0; n_grid];
        let mut inv_pivot = vec![0.0; n_grid];
        for start in [1, 2] {
            let mut prev_upper = 0.0;
            let mut j = start;
            let mut first = true;
            while j < big_n {
                let pivot = if first {
                    diag(j)
                } else {
                    diag(j) - off * prev_upper
                };
                first = false;
                inv_pivot[j] = 1.0 / pivot;
                upper[j] = off / pivot;
                prev_upper = upper[j];
                j += 2;
            }
        }
        Ok(FreeFlight {
            n_grid,
            h,
            n_substeps,
            dt,
            upper,
            inv_pivot,
        })
    }

    pub fn substep(&self) -> f64 {
        self.dt
    }

    fn d_central(&self, chi: &[Complex64], j: usize) -> Complex64 {
        (chi[j + 1] - chi[j - 1]) / (2.0 * self.h)
    }

    /// `D̃ φ` at point `i` (adjoint of the central difference under trapezoid weights).
    fn d_adjoint(&self, phi: &[Complex64], i: usize) -> Complex64 {
        let last = self.n_grid - 1;
        if i == 0 {
            phi[1] / self.h
        } else if i == last {
            -phi[last - 1] / self.h
        } else {
            (phi[i + 1] - phi[i - 1]) / (2.0 * self.h)
        }
    }

    fn solve(&self, rhs: &mut [Complex64]) {
        let big_n = self.n_grid - 1;
        let off = -(self.dt * self.dt / 4.0) / (4.0 * self.h * self.h);
        for start in [1, 2] {
            // forward sweep
            let mut j = start;
            let mut prev: Option<usize> = None;
            while j < big_n {
                let r = match prev {
                    Some(p) => rhs[j] - rhs[p] * off,
                    None => rhs[j],
                };
                rhs[j] = r * self.inv_pivot[j];
                prev = Some(j);
                j += 2;
            }
            // back substitution
            let mut j = prev.unwrap_or(start);
            while j >= start + 2 {
                let below = j - 2;
                rhs[below] -= self.upper[below] * rhs[j];
                j = below;
            }
        }
    }

    /// Advance one period in place.
    pub fn advance(&self, gs: &mut GridState) -> Result<()> {
        if gs.n_grid() != self.n_grid {
            return Err(Error::DimensionMismatch {
                expected: self.n_grid,
                actual: gs.n_grid(),
            });
        }
        let n = self.n_grid;
        let a = Complex64::new(0.0, 0.5 * self.dt);
        let ia = Complex64::new(0.0, 1.0) * a;
        let mut r_phi = vec![Complex64::new(0.0, 0.0); n];
        let mut r_chi = vec![Complex64::new(0.0, 0.0); n];
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        for _ in 0..self.n_substeps {
            let (phi, chi) = (&gs.phi1, &gs.chi2);
            // r = (I - aH) u
            for j in 1..n - 1 {
                r_phi[j] = (1.0 - a) * phi[j] + ia * self.d_central(chi, j);
            }
            for i in 0..n {
                r_chi[i] = (1.0 + a) * chi[i] + ia * self.d_adjoint(phi, i);
            }
            // [(1 - a²) I + a² D D̃] φ' = (1 - a) r_φ + i a D r_χ
            for j in 1..n - 1 {
                rhs[j] = (1.0 - a) * r_phi[j] + ia * self.d_central(&r_chi, j);
            }
            rhs[0] = Complex64::new(0.0, 0.0);
            rhs[n - 1] = Complex64::new(0.0, 0.0);
            self.solve(&mut rhs);
            gs.phi1.copy_from_slice(&rhs);
            // χ' = (r_χ + i a D̃ φ') / (1 - a)
            let inv = 1.0 / (1.0 - a);
            for i in 0..n {
                gs.chi2[i] = (r_chi[i] + ia * self.d_adjoint(&gs.phi1, i)) * inv;
            }
        }
        Ok(())
    }
}

/// Convenience wrapper: one free flight of duration `period`.
pub fn free_flight(gs: &GridState, period: f64, n_substeps: usize) -> Result<GridState> {
    let ff = FreeFlight::new(gs.length(), gs.n_grid(), period, n_substeps)?;
    let mut out = gs.clone();
    ff.advance(&mut out)?;
    Ok(out)
}

/// Multiply by the kick factor pointwise.
pub fn kick_pointwise(gs: &mut GridState, epsilon: f64, lambda: f64, phase: KickPhase) {
    let q = 2.0 * PI / lambda;
    for (x, (phi, chi)) in gs
        .positions()
        .into_iter()
        .zip(gs.phi1.iter_mut().zip(gs.chi2.iter_mut()))
    {
        let k = Complex64::from_polar(1.0, epsilon * (q * x).cos());
        *phi *= k;
        *chi *= match phase {
            KickPhase::Scalar => k,
            KickPhase::MassTerm => k.conj(),
        };
    }
}

/// What happens to negative-energy content created by a kick.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeakagePolicy {
    /// Project it out after every kick, mirroring the truncated spectral map.
    #[default]
    Discard,
    /// Keep evolving the full grid state.
    Retain,
}

/// Grid samples of the negative-energy box modes `E = -sqrt(k² + 1)`,
/// `k = nπ/L`, `n = 0..=n_modes` (the `n = 0` mode is `χ₂ = 1/√L`).
pub struct NegativeEnergyProjector {
    /// `φ₁ = i s`, `χ₂ = c`.
    modes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl NegativeEnergyProjector {
    pub fn new(length: f64, n_grid: usize, n_modes: usize) -> Self {
        let last = (n_grid - 1) as f64;
        let mut modes = Vec::with_capacity(n_modes + 1);
        modes.push((vec![0.0; n_grid], vec![1.0 / length.sqrt(); n_grid]));
        for n in 1..=n_modes {
            let k = n as f64 * PI / length;
            let e = k.hypot(1.0);
            let kappa = -(e + 1.0) / k;
            let norm = 1.0 / (0.5 * length * (1.0 + kappa * kappa)).sqrt();
            let s = (0..n_grid)
                .map(|j| norm * sin_pi(n as f64 * j as f64 / last))
                .collect();
            let c = (0..n_grid)
                .map(|j| norm * kappa * cos_pi(n as f64 * j as f64 / last))
                .collect();
            modes.push((s, c));
        }
        NegativeEnergyProjector { modes }
    }

    /// Remove the projection onto the negative modes; returns the norm removed.
    pub fn remove(&self, gs: &mut GridState) -> f64 {
        let before = gs.norm();
        let n = gs.n_grid();
        let h = gs.spacing();
        for (s, c) in &self.modes {
            // ⟨ψ⁻, u⟩ = h Σ conj(i s) φ + h Σ' c χ
            let mut coef = Complex64::new(0.0, 0.0);
            for j in 1..n - 1 {
                coef += Complex64::new(0.0, -s[j]) * gs.phi1[j];
            }
            for j in 0..n {
                let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
                coef += gs.chi2[j] * (c[j] * w);
            }
            coef *= h;
            for j in 1..n - 1 {
                gs.phi1[j] -= coef * Complex64::new(0.0, s[j]);
            }
            for j in 0..n {
                gs.chi2[j] -= coef * c[j];
            }
        }
        before - gs.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub n_grid: usize,
    pub n_substeps: usize,
    pub policy: LeakagePolicy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyRecord {
    pub kick: usize,
    pub time: f64,
    pub l2_distance: f64,
    pub grid_norm: f64,
    pub spectral_norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub records: Vec<DiscrepancyRecord>,
    /// Norm lost on the grid, as `1 - grid norm` at the last record.
    pub grid_leakage: f64,
    /// `1 - Σ|A_n|²` at the last record.
    pub spectral_leakage: f64,
}

impl DiscrepancyReport {
    pub fn max_distance(&self) -> f64 {
        self.records
            .iter()
            .map(|r| r.l2_distance)
            .fold(0.0, f64::max)
    }

    pub fn final_distance(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.l2_distance)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("time,l2_distance,grid_norm,spectral_norm\n");
        for r in &self.records {
            writeln!(
                s,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                r.time, r.l2_distance, r.grid_norm, r.spectral_norm
            )
            .unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Compare spectral coefficient snapshots with grid snapshots taken at the
/// same kick counts.
pub fn compare_trajectories(
    spectral: &[(usize, Vec<Complex64>)],
    grid: &[(usize, GridState)],
    basis: &BoxBasis,
    period: f64,
) -> Result<DiscrepancyReport> {
    if spectral.len() != grid.len() {
        return Err(Error::ScheduleMismatch(format!(
            "{} spectral snapshots vs {} grid snapshots",
            spectral.len(),
            grid.len()
        )));
    }
    let mut records = Vec::with_capacity(spectral.len());
    for ((ks, a), (kg, gs)) in spectral.iter().zip(grid) {
        if ks != kg {
            return Err(Error::ScheduleMismatch(format!(
                "spectral kick {ks} paired with grid kick {kg}"
            )));
        }
        let reference = GridState::from_spectral(basis, a, gs.n_grid())?;
        records.push(DiscrepancyRecord {
            kick: *ks,
            time: *ks as f64 * period,
            l2_distance: gs.l2_distance(&reference)?,
            grid_norm: gs.norm(),
            spectral_norm: norm_sqr(a),
        });
    }
    let (grid_leakage, spectral_leakage) = records
        .last()
        .map_or((0.0, 0.0), |r| (1.0 - r.grid_norm, 1.0 - r.spectral_norm));
    Ok(DiscrepancyReport {
        records,
        grid_leakage,
        spectral_leakage,
    })
}

/// Evolve the same initial coefficients with the spectral map and on the grid
/// for `n_kicks` periods and compare after every kick. The spectral run never
/// renormalizes, so both sides show their own leakage.
pub fn run_oracle_check(
    basis: &BoxBasis,
    op: &KickOperator,
    order: StepOrder,
    initial: &[Complex64],
    n_kicks: usize,
    cfg: &OracleConfig,
) -> Result<(DiscrepancyReport, GridState)> {
    check_resolution(cfg.n_grid, basis.n_max())?;
    let params = *op.params();
    let ff = FreeFlight::new(basis.length(), cfg.n_grid, params.period, cfg.n_substeps)?;
    let projector = match cfg.policy {
        LeakagePolicy::Discard => Some(NegativeEnergyProjector::new(
            basis.length(),
            cfg.n_grid,
            basis.n_max(),
        )),
        LeakagePolicy::Retain => None,
    };
    let mut state = SpinorState::normalized(initial.to_vec(), false)?;
    let mut gs = GridState::from_spectral(basis, state.coefficients(), cfg.n_grid)?;
    let mut stepper = Stepper::new(op, order);

    let mut spectral = vec![(0, state.coefficients().to_vec())];
    let mut grid = vec![(0, gs.clone())];
    for kick in 1..=n_kicks {
        stepper.step(&mut state)?;
        match order {
            StepOrder::PhaseKick => {
                ff.advance(&mut gs)?;
                kick_pointwise(&mut gs, params.epsilon, params.lambda, params.phase);
            }
            StepOrder::KickPhase => {
                kick_pointwise(&mut gs, params.epsilon, params.lambda, params.phase);
                ff.advance(&mut gs)?;
            }
        }
        if let Some(p) = &projector {
            p.remove(&mut gs);
        }
        spectral.push((kick, state.coefficients().to_vec()));
        grid.push((kick, gs.clone()));
    }
    let report = compare_trajectories(&spectral, &grid, basis, params.period)?;
    Ok((report, gs))
}
