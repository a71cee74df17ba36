//! One-period kick operator.
//!
//! `V[l][n] = ∫ ψ_n†(x) K(x) ψ_l(x) dx` where `K` is the kick multiplier
//! `exp(i ε cos(2πx/λ))`. In the default scalar form `K` multiplies both
//! spinor components; in the mass-term form the large component gets
//! `exp(+i ε cos)` and the small one `exp(-i ε cos)`. The operator also
//! carries the free-flight phases `exp(-i E_l T)` for one period.
//!
//! Two independent assemblies are provided: a closed-form Jacobi–Anger sum
//! and direct quadrature of the defining integral.

use std::f64::consts::PI;
use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{cos_pi, sin_pi, BoxBasis};
use crate::bessel::JacobiAnger;
use crate::error::{Error, Result};
use crate::quadrature::{self, CompositeRule};

pub const DEFAULT_BESSEL_TOL: f64 = 1e-14;

/// Denominators `|u| < RESONANCE_EPS` (in units of π/L) use the analytic limit.
const RESONANCE_EPS: f64 = 1e-9;

const MAGIC: &[u8; 8] = b"KICKMAT1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KickPhase {
    /// Same phase on both components (default).
    #[default]
    Scalar,
    /// `exp(+iε cos)` on the large, `exp(-iε cos)` on the small component.
    MassTerm,
}

impl fmt::Display for KickPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KickPhase::Scalar => "scalar",
            KickPhase::MassTerm => "mass_term",
        })
    }
}

impl FromStr for KickPhase {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "scalar" => Ok(KickPhase::Scalar),
            "mass_term" => Ok(KickPhase::MassTerm),
            _ => Err(format!("expected `scalar` or `mass_term`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub period: f64,
    pub phase: KickPhase,
}

impl KickParams {
    pub fn new(epsilon: f64, lambda: f64, period: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::invalid(
                "epsilon",
                format!("must be finite and >= 0, got {epsilon}"),
            ));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(
                "lambda",
                format!("must be positive, got {lambda}"),
            ));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::invalid(
                "T",
                format!("must be positive, got {period}"),
            ));
        }
        Ok(KickParams {
            epsilon,
            lambda,
            period,
            phase: KickPhase::Scalar,
        })
    }

    pub fn with_phase(mut self, phase: KickPhase) -> Self {
        self.phase = phase;
        self
    }

    /// Spatial wavenumber `2π/λ` of the kick profile.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AssemblyMethod {
    BesselSeries { tol: f64, cutoff: usize },
    Quadrature { panels: usize },
    Loaded,
}

#[derive(Debug, Clone)]
pub struct KickOperator {
    dim: usize,
    /// Row-major, `v[l * dim + n] = V_ln`.
    v: Vec<Complex64>,
    phase: Vec<Complex64>,
    params: KickParams,
    method: AssemblyMethod,
    /// Per-row half-open column range outside of which the row is exactly zero.
    support: Vec<(usize, usize)>,
}

impl KickOperator {
    /// Wrap an assembled matrix. Exposed for loading cached matrices.
    pub fn from_matrix(
        basis: &BoxBasis,
        params: KickParams,
        v: Vec<Complex64>,
        method: AssemblyMethod,
    ) -> Result<Self> {
        let dim = basis.n_max();
        if v.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: v.len(),
            });
        }
        let phase = basis
            .energies()
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -e * params.period))
            .collect();
        let support = (0..dim)
            .map(|l| {
                let row = &v[l * dim..(l + 1) * dim];
                let nz = |c: &Complex64| c.re != 0.0 || c.im != 0.0;
                match row.iter().position(nz) {
                    Some(lo) => (lo, dim - row.iter().rev().position(nz).unwrap()),
                    None => (0, 0),
                }
            })
            .collect();
        Ok(KickOperator {
            dim,
            v,
            phase,
            params,
            method,
            support,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &KickParams {
        &self.params
    }

    pub fn method(&self) -> AssemblyMethod {
        self.method
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.v
    }

    /// `V_ln` with 0-based indices.
    pub fn get(&self, l: usize, n: usize) -> Complex64 {
        self.v[l * self.dim + n]
    }

    /// Free-flight phases `exp(-i E_l T)`.
    pub fn phases(&self) -> &[Complex64] {
        &self.phase
    }

    pub fn row_support(&self, l: usize) -> (usize, usize) {
        self.support[l]
    }

    /// Fraction of matrix entries inside the row supports.
    pub fn fill_fraction(&self) -> f64 {
        let filled: usize = self.support.iter().map(|(a, b)| b - a).sum();
        filled as f64 / (self.dim * self.dim) as f64
    }

    /// `out_n = Σ_l b_l V_ln`, accumulating in increasing `l` for every `n`.
    /// Entries outside the row supports are exact zeros and are skipped.
    pub fn left_multiply(&self, b: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(b.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (l, &bl) in b.iter().enumerate() {
            if bl.re == 0.0 && bl.im == 0.0 {
                continue;
            }
            let (lo, hi) = self.support[l];
            let row = &self.v[l * self.dim + lo..l * self.dim + hi];
            for (o, &vv) in out[lo..hi].iter_mut().zip(row) {
                o.re += bl.re * vv.re - bl.im * vv.im;
                o.im += bl.re * vv.im + bl.im * vv.re;
            }
        }
    }

    /// Per-row deficiency `d_l = 1 - Σ_n |V_ln|²`.
    pub fn subunitarity_report(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|l| {
                let row = &self.v[l * self.dim..(l + 1) * self.dim];
                1.0 - row.iter().map(|c| c.norm_sqr()).sum::<f64>()
            })
            .collect()
    }

    /// Binary dump: `KICKMAT1`, u32 dimension, u32 reserved, then row-major
    /// `(re, im)` pairs, all little-endian.
    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        for c in &self.v {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Load a dumped matrix. Only the dimension is validated against `basis`;
    /// the caller is responsible for matching `params`.
    pub fn read_binary(path: &Path, basis: &BoxBasis, params: KickParams) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..8] != MAGIC {
            return Err(Error::KickMatrixFormat("bad magic".into()));
        }
        let dim = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        if dim != basis.n_max() {
            return Err(Error::KickMatrixFormat(format!(
                "file holds n_max = {dim}, basis has {}",
                basis.n_max()
            )));
        }
        let mut v = Vec::with_capacity(dim * dim);
        let mut buf = [0u8; 16];
        for _ in 0..dim * dim {
            r.read_exact(&mut buf)
                .map_err(|_| Error::KickMatrixFormat("truncated payload".into()))?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            v.push(Complex64::new(re, im));
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::KickMatrixFormat("trailing bytes".into()));
        }
        KickOperator::from_matrix(basis, params, v, AssemblyMethod::Loaded)
    }
}

/// Closed-form assembly through the Jacobi–Anger expansion.
///
/// With `k_n L = nπ`, every elementary integral reduces to
/// `∫₀ᴸ cos(πu x/L) dx = L sin(πu)/(πu)` where `u = 2mL/λ ± integer`, so
/// `sin(πu) = ±sin(2πmL/λ)` and only one sine per order is needed.
pub fn build_kick_matrix_bessel(
    basis: &BoxBasis,
    params: KickParams,
    tol: f64,
) -> Result<KickOperator> {
    let series = JacobiAnger::new(params.epsilon, tol)?;
    let v = if params.epsilon == 0.0 {
        // Unit multiplier: V is the overlap matrix, the identity exactly.
        identity(basis.n_max())
    } else {
        assemble_bessel(basis, params.lambda, params.phase, &series)
    };
    KickOperator::from_matrix(
        basis,
        params,
        v,
        AssemblyMethod::BesselSeries {
            tol,
            cutoff: series.cutoff(),
        },
    )
}

pub(crate) fn assemble_bessel(
    basis: &BoxBasis,
    lambda: f64,
    phase: KickPhase,
    series: &JacobiAnger,
) -> Vec<Complex64> {
    let dim = basis.n_max();
    let length = basis.length();
    let ratio = length / lambda;
    let orders: Vec<(f64, f64, Complex64, Complex64)> = (0..=series.cutoff())
        .map(|m| {
            let shift = 2.0 * m as f64 * ratio;
            let w = series.cosine_weight(m);
            let w_small = match phase {
                KickPhase::Scalar => w,
                KickPhase::MassTerm => w.conj(),
            };
            (shift, sin_pi(shift), w, w_small)
        })
        .collect();

    // ∫₀ᴸ cos(πu x/L) dx with sin(πu) supplied from the exact identity.
    let cos_integral = |u: f64, sin_u: f64| -> f64 {
        if u.abs() < RESONANCE_EPS {
            length
        } else if sin_u == 0.0 {
            0.0
        } else {
            length * sin_u / (PI * u)
        }
    };

    let norms = basis.norms();
    let kappas = basis.kappas();
    let mut v = vec![Complex64::new(0.0, 0.0); dim * dim];
    v.par_chunks_mut(dim).enumerate().for_each(|(l, row)| {
        for n in l..dim {
            row[n] = {
                let diff = (n - l) as f64;
                let sum = (n + l + 2) as f64;
                let sign = if (n + l) % 2 == 0 { 1.0 } else { -1.0 };
                let mut acc_large = Complex64::new(0.0, 0.0);
                let mut acc_small = Complex64::new(0.0, 0.0);
                for &(shift, s, w, w_small) in &orders {
                    let s = sign * s;
                    let r_minus =
                        0.5 * (cos_integral(shift + diff, s) + cos_integral(shift - diff, s));
                    let r_plus =
                        0.5 * (cos_integral(shift + sum, s) + cos_integral(shift - sum, s));
                    let i_ss = 0.5 * (r_minus - r_plus);
                    let i_cc = 0.5 * (r_minus + r_plus);
                    acc_large += w * i_ss;
                    acc_small += w_small * i_cc;
                }
                norms[l] * norms[n] * (acc_large + kappas[l] * kappas[n] * acc_small)
            };
        }
    });
    mirror_upper(dim, &mut v);
    v
}

/// Panels that resolve the fastest mode pair together with the kick phase.
pub fn recommended_panels(basis: &BoxBasis, params: &KickParams) -> usize {
    quadrature::panels_for(
        basis.length(),
        quadrature_bandwidth(basis, params.epsilon, params.lambda),
    )
}

fn quadrature_bandwidth(basis: &BoxBasis, epsilon: f64, lambda: f64) -> f64 {
    // Beyond this order the phase's harmonics are below 1e-16.
    let orders = JacobiAnger::new(epsilon.abs(), 1e-16)
        .map(|j| j.cutoff() + 1)
        .unwrap_or(1);
    2.0 * basis.wavenumbers()[basis.n_max() - 1] + orders as f64 * 2.0 * PI / lambda
}

/// Direct composite Gauss–Legendre quadrature of the defining integral.
pub fn build_kick_matrix_quadrature(
    basis: &BoxBasis,
    params: KickParams,
    panels: usize,
) -> Result<KickOperator> {
    let need = recommended_panels(basis, &params);
    if panels < need {
        return Err(Error::invalid(
            "panels",
            format!(
                "{panels} panels cannot resolve mode {} and the kick phase; need >= {need}",
                basis.n_max()
            ),
        ));
    }
    let v = assemble_quadrature(basis, params.epsilon, params.lambda, params.phase, panels);
    KickOperator::from_matrix(basis, params, v, AssemblyMethod::Quadrature { panels })
}

/// Quadrature assembly without parameter validation (allows negative `epsilon`).
pub(crate) fn assemble_quadrature(
    basis: &BoxBasis,
    epsilon: f64,
    lambda: f64,
    phase: KickPhase,
    panels: usize,
) -> Vec<Complex64> {
    let dim = basis.n_max();
    let length = basis.length();
    let rule = CompositeRule::new(0.0, length, panels);
    let q = 2.0 * PI / lambda;
    let (large_w, small_w): (Vec<Complex64>, Vec<Complex64>) = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| {
            let kick = Complex64::from_polar(w, epsilon * (q * x).cos());
            let small = match phase {
                KickPhase::Scalar => kick,
                KickPhase::MassTerm => kick.conj(),
            };
            (kick, small)
        })
        .unzip();
    let norms = basis.norms();
    let kappas = basis.kappas();
    let sines: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            rule.nodes()
                .iter()
                .map(|&x| norms[i] * sin_pi((i + 1) as f64 * x / length))
                .collect()
        })
        .collect();
    let cosines: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            rule.nodes()
                .iter()
                .map(|&x| norms[i] * kappas[i] * cos_pi((i + 1) as f64 * x / length))
                .collect()
        })
        .collect();

    let mut v = vec![Complex64::new(0.0, 0.0); dim * dim];
    v.par_chunks_mut(dim).enumerate().for_each(|(l, row)| {
        let a: Vec<Complex64> = large_w.iter().zip(&sines[l]).map(|(w, s)| w * s).collect();
        let b: Vec<Complex64> = small_w
            .iter()
            .zip(&cosines[l])
            .map(|(w, c)| w * c)
            .collect();
        for n in l..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..a.len() {
                acc += a[j] * sines[n][j] + b[j] * cosines[n][j];
            }
            row[n] = acc;
        }
    });
    mirror_upper(dim, &mut v);
    v
}

fn identity(dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        v[i * dim + i] = Complex64::new(1.0, 0.0);
    }
    v
}

/// Both kick forms give `V_ln = V_nl`; fill the lower triangle from the upper.
fn mirror_upper(dim: usize, v: &mut [Complex64]) {
    for l in 0..dim {
        for n in l + 1..dim {
            v[n * dim + l] = v[l * dim + n];
        }
    }
}
