//! Expectation values and densities of a coefficient vector.
//!
//! Every function takes the raw coefficients `A_n` (0-based slice); none of
//! them divide by the norm, so a leaking state reports leaking values.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::basis::BoxBasis;
use crate::error::{Error, Result};
use crate::evolution::{norm_sqr, Observer, SpinorState};

/// Diagonal of `-iα_x d/dx` in the eigenbasis: `E_n - 1/E_n`. The operator
/// has no off-diagonal elements between positive-energy box modes.
pub fn kinetic_matrix(basis: &BoxBasis) -> Vec<f64> {
    basis.energies().iter().map(|&e| e - 1.0 / e).collect()
}

/// Diagonal of `β`: `∫(|φ₁|² - |χ₂|²) dx = 1/E_n`.
pub fn mass_matrix(basis: &BoxBasis) -> Vec<f64> {
    basis.energies().iter().map(|&e| 1.0 / e).collect()
}

fn check_dim(basis: &BoxBasis, a: &[Complex64]) -> Result<()> {
    if a.len() != basis.n_max() {
        return Err(Error::DimensionMismatch {
            expected: basis.n_max(),
            actual: a.len(),
        });
    }
    Ok(())
}

fn diagonal_form(diag: &[f64], a: &[Complex64]) -> f64 {
    a.iter().zip(diag).map(|(c, d)| c.norm_sqr() * d).sum()
}

/// `Σ |A_n|² (E_n - 1/E_n)`.
pub fn kinetic_energy(basis: &BoxBasis, a: &[Complex64]) -> Result<f64> {
    check_dim(basis, a)?;
    Ok(a.iter()
        .zip(basis.energies())
        .map(|(c, &e)| c.norm_sqr() * (e - 1.0 / e))
        .sum())
}

/// `Σ |A_n|² E_n`, kinetic plus mass term.
pub fn total_energy(basis: &BoxBasis, a: &[Complex64]) -> Result<f64> {
    check_dim(basis, a)?;
    Ok(diagonal_form(basis.energies(), a))
}

pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a)
}

/// `∫ψ_n† α_x ψ_m dx` for 0-based `i = n-1`, `j = m-1`:
/// `2i N_n N_m (κ_n k_m + κ_m k_n) / (k_m² - k_n²)` when `n + m` is odd, else 0.
pub fn velocity_element(basis: &BoxBasis, i: usize, j: usize) -> Complex64 {
    if (i + j).is_multiple_of(2) {
        return Complex64::new(0.0, 0.0);
    }
    let (k, kap, nrm) = (basis.wavenumbers(), basis.kappas(), basis.norms());
    let scale = PI / basis.length();
    let (n, m) = ((i + 1) as f64, (j + 1) as f64);
    let denom = (m * m - n * n) * scale * scale;
    Complex64::new(
        0.0,
        2.0 * nrm[i] * nrm[j] * (kap[i] * k[j] + kap[j] * k[i]) / denom,
    )
}

/// Dense row-major velocity matrix (hermitian, purely imaginary, zero where
/// `n + m` is even).
pub fn velocity_matrix(basis: &BoxBasis) -> Vec<Complex64> {
    let dim = basis.n_max();
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            m[i * dim + j] = velocity_element(basis, i, j);
        }
    }
    m
}

/// `Re(A† M_v A)`, summing only over populated modes of opposite parity.
pub fn velocity(basis: &BoxBasis, a: &[Complex64]) -> Result<f64> {
    check_dim(basis, a)?;
    let (k, kap, nrm) = (basis.wavenumbers(), basis.kappas(), basis.norms());
    let scale = PI / basis.length();
    let populated = |parity: usize| -> Vec<usize> {
        (parity..a.len())
            .step_by(2)
            .filter(|&i| a[i].re != 0.0 || a[i].im != 0.0)
            .collect()
    };
    let (even, odd) = (populated(0), populated(1));
    if even.is_empty() || odd.is_empty() {
        return Ok(0.0);
    }
    // Per-mode factors of the numerator N_n N_m (κ_n k_m + κ_m k_n).
    let u: Vec<f64> = (0..a.len()).map(|i| nrm[i] * kap[i]).collect();
    let w: Vec<f64> = (0..a.len()).map(|i| nrm[i] * k[i]).collect();
    let sq: Vec<f64> = (0..a.len()).map(|i| ((i + 1) * (i + 1)) as f64).collect();
    let mut total = 0.0;
    for &i in &even {
        let ai = a[i].conj();
        let mut acc = 0.0;
        for &j in &odd {
            // Re(conj(a_i) i g a_j) = -g Im(conj(a_i) a_j), counted for (i,j) and (j,i).
            let g = (u[i] * w[j] + u[j] * w[i]) / (sq[j] - sq[i]);
            acc += g * (ai * a[j]).im;
        }
        total += acc;
    }
    Ok(-4.0 * total / (scale * scale))
}

/// The spinor components `(φ₁, χ₂)` of `Σ A_n ψ_n` at `x`.
pub fn reconstruct(basis: &BoxBasis, a: &[Complex64], x: f64) -> (Complex64, Complex64) {
    let mut phi = Complex64::new(0.0, 0.0);
    let mut chi = Complex64::new(0.0, 0.0);
    for (i, c) in a.iter().enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let (s, k) = basis.envelopes(i, x);
        phi += c * s;
        chi += c * k;
    }
    (Complex64::new(-phi.im, phi.re), chi)
}

/// `ρ(x) = |φ₁|² + |χ₂|²` at each grid point.
pub fn density(basis: &BoxBasis, a: &[Complex64], grid: &[f64]) -> Result<Vec<f64>> {
    check_dim(basis, a)?;
    for &x in grid {
        basis.check_position(x)?;
    }
    Ok(grid
        .iter()
        .map(|&x| {
            let (phi, chi) = reconstruct(basis, a, x);
            phi.norm_sqr() + chi.norm_sqr()
        })
        .collect())
}

/// `points` equally spaced positions on `[0, L]`, both walls included.
pub fn uniform_grid(length: f64, points: usize) -> Vec<f64> {
    let last = (points.max(2) - 1) as f64;
    (0..points)
        .map(|j| {
            if j as f64 == last {
                length
            } else {
                length * j as f64 / last
            }
        })
        .collect()
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(values: &[f64], spacing: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => spacing * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityFrame {
    pub kick: usize,
    pub time: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    pub kick_index: Vec<usize>,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub total_energy: Vec<f64>,
    pub velocity: Vec<f64>,
    pub norm: Vec<f64>,
    pub density_frames: Vec<DensityFrame>,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Observer filling an [`ObservableSeries`].
pub struct SeriesRecorder<'a> {
    basis: &'a BoxBasis,
    period: f64,
    with_velocity: bool,
    density_grid: Vec<f64>,
    density_kicks: Vec<usize>,
    series: ObservableSeries,
}

impl<'a> SeriesRecorder<'a> {
    pub fn new(basis: &'a BoxBasis, period: f64) -> Self {
        SeriesRecorder {
            basis,
            period,
            with_velocity: true,
            density_grid: Vec::new(),
            density_kicks: Vec::new(),
            series: ObservableSeries::default(),
        }
    }

    /// Skip the velocity column (recorded as 0), which costs
    /// O(populated even × populated odd) per sample.
    pub fn without_velocity(mut self) -> Self {
        self.with_velocity = false;
        self
    }

    /// Record `ρ` on `points` uniform points at the given kick counts.
    pub fn with_density(mut self, points: usize, kicks: &[usize]) -> Self {
        self.density_grid = uniform_grid(self.basis.length(), points);
        self.density_kicks = kicks.to_vec();
        self
    }

    pub fn series(&self) -> &ObservableSeries {
        &self.series
    }

    pub fn finish(self) -> ObservableSeries {
        self.series
    }
}

impl Observer for SeriesRecorder<'_> {
    fn observe(&mut self, state: &SpinorState) -> Result<()> {
        let a = state.coefficients();
        let kick = state.kicks_elapsed();
        let time = kick as f64 * self.period;
        let s = &mut self.series;
        s.kick_index.push(kick);
        s.times.push(time);
        s.energy.push(kinetic_energy(self.basis, a)?);
        s.total_energy.push(total_energy(self.basis, a)?);
        s.velocity.push(if self.with_velocity {
            velocity(self.basis, a)?
        } else {
            0.0
        });
        s.norm.push(norm(a));
        if self.density_kicks.contains(&kick) {
            s.density_frames.push(DensityFrame {
                kick,
                time,
                x: self.density_grid.clone(),
                rho: density(self.basis, a, &self.density_grid)?,
            });
        }
        Ok(())
    }
}
