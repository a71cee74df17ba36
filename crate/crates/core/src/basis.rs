//! Positive-energy eigenbasis of the free Dirac particle in `[0, L]` with the
//! large component pinned to zero at both walls.
//!
//! Mode `n` (1-based) has `k_n = nπ/L`, `E_n = sqrt(k_n² + 1)` and spinor
//! `(i N_n sin(k_n x), 0, 0, N_n κ_n cos(k_n x))` with `κ_n = k_n/(E_n + 1)`
//! and `N_n = sqrt((E_n + 1)/(E_n L))`. Only the two nonzero components are
//! stored. Slices returned by accessors are 0-based (index `n - 1`).

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::CompositeRule;

/// `sin(π t)` with the argument reduced modulo 2 so integer `t` gives exactly 0.
pub fn sin_pi(t: f64) -> f64 {
    let r = t.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        0.0
    } else {
        (PI * r).sin()
    }
}

/// `cos(π t)`, exact at integer and half-integer `t`.
pub fn cos_pi(t: f64) -> f64 {
    let r = t.rem_euclid(2.0);
    if r == 0.5 || r == 1.5 {
        0.0
    } else {
        (PI * r).cos()
    }
}

/// `sin(π num/den)` with exact integer reduction.
pub fn sin_pi_ratio(num: u64, den: u64) -> f64 {
    let r = num % (2 * den);
    sin_pi(r as f64 / den as f64)
}

/// `cos(π num/den)` with exact integer reduction.
pub fn cos_pi_ratio(num: u64, den: u64) -> f64 {
    let r = num % (2 * den);
    cos_pi(r as f64 / den as f64)
}

/// The two nonzero spinor components at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorSample {
    pub phi1: Complex64,
    pub chi2: Complex64,
}

impl SpinorSample {
    pub fn density(&self) -> f64 {
        self.phi1.norm_sqr() + self.chi2.norm_sqr()
    }

    /// `ψ† α_x ψ = 2 Re(conj(φ₁) χ₂)`, proportional to the current.
    pub fn current(&self) -> f64 {
        2.0 * (self.phi1.conj() * self.chi2).re
    }
}

#[derive(Debug, Clone)]
pub struct BoxBasis {
    length: f64,
    k: Vec<f64>,
    energy: Vec<f64>,
    norm: Vec<f64>,
    kappa: Vec<f64>,
}

impl BoxBasis {
    pub fn new(length: f64, n_max: usize) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::invalid(
                "L",
                format!("box length must be positive, got {length}"),
            ));
        }
        if n_max == 0 {
            return Err(Error::invalid("n_max", "must be at least 1"));
        }
        let mut k = Vec::with_capacity(n_max);
        let mut energy = Vec::with_capacity(n_max);
        let mut norm = Vec::with_capacity(n_max);
        let mut kappa = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let kn = n as f64 * PI / length;
            let en = kn.hypot(1.0);
            k.push(kn);
            energy.push(en);
            norm.push(((en + 1.0) / (en * length)).sqrt());
            kappa.push(kn / (en + 1.0));
        }
        let basis = BoxBasis {
            length,
            k,
            energy,
            norm,
            kappa,
        };
        debug_assert!(basis.spot_check_normalization());
        Ok(basis)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_max(&self) -> usize {
        self.k.len()
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn energies(&self) -> &[f64] {
        &self.energy
    }

    pub fn norms(&self) -> &[f64] {
        &self.norm
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappa
    }

    pub fn check_mode(&self, n: usize) -> Result<usize> {
        if n == 0 || n > self.n_max() {
            Err(Error::ModeOutOfRange {
                index: n,
                n_max: self.n_max(),
            })
        } else {
            Ok(n - 1)
        }
    }

    pub fn check_position(&self, x: f64) -> Result<()> {
        if (0.0..=self.length).contains(&x) {
            Ok(())
        } else {
            Err(Error::PositionOutOfRange {
                x,
                length: self.length,
            })
        }
    }

    /// Real envelopes `(N_n sin(k_n x), N_n κ_n cos(k_n x))` for 0-based index
    /// `i`; the large component is `i` times the first value.
    #[inline]
    pub fn envelopes(&self, i: usize, x: f64) -> (f64, f64) {
        let t = (i + 1) as f64 * (x / self.length);
        let n = self.norm[i];
        (n * sin_pi(t), n * self.kappa[i] * cos_pi(t))
    }

    pub fn eval_eigenspinor(&self, n: usize, x: f64) -> Result<SpinorSample> {
        let i = self.check_mode(n)?;
        self.check_position(x)?;
        let (s, c) = self.envelopes(i, x);
        Ok(SpinorSample {
            phi1: Complex64::new(0.0, s),
            chi2: Complex64::new(c, 0.0),
        })
    }

    /// `∫ ψ_n† ψ_m dx` by quadrature. Test support; closed form is `δ_nm`.
    pub fn mode_overlap(&self, n: usize, m: usize) -> Result<Complex64> {
        let a = self.check_mode(n)?;
        let b = self.check_mode(m)?;
        let rule = CompositeRule::resolving(self.length, self.k[a] + self.k[b]);
        // conj(i s_a) (i s_b) + c_a c_b: both products are real.
        let v = rule.integrate(|x| {
            let (sa, ca) = self.envelopes(a, x);
            let (sb, cb) = self.envelopes(b, x);
            sa * sb + ca * cb
        });
        Ok(Complex64::new(v, 0.0))
    }

    fn spot_check_normalization(&self) -> bool {
        let n_max = self.n_max();
        let mut probe = vec![0, 1.min(n_max - 1), n_max / 2, n_max - 1];
        probe.sort_unstable();
        probe.dedup();
        probe.into_iter().all(|i| {
            let rule = CompositeRule::resolving(self.length, 2.0 * self.k[i]);
            let v = rule.integrate(|x| {
                let (s, c) = self.envelopes(i, x);
                s * s + c * c
            });
            (v - 1.0).abs() < 1e-10
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_formula_values() {
        let b = BoxBasis::new(PI, 1).unwrap();
        assert!((b.wavenumbers()[0] - 1.0).abs() < 1e-15);
        assert!((b.energies()[0] - 2f64.sqrt()).abs() < 1e-15);

        let b = BoxBasis::new(1.0, 1).unwrap();
        assert_eq!(b.wavenumbers()[0], PI);
        assert!((b.energies()[0] - 3.296_908_309).abs() < 1e-8);
    }

    #[test]
    fn normalization_matches_quadrature() {
        let b = BoxBasis::new(1.0, 1).unwrap();
        let rule = CompositeRule::new(0.0, 1.0, 8);
        let n1 = b.norms()[0];
        let (k, kap) = (b.wavenumbers()[0], b.kappas()[0]);
        let raw = rule.integrate(|x| (k * x).sin().powi(2) + kap * kap * (k * x).cos().powi(2));
        assert!((n1 * n1 * raw - 1.0).abs() < 1e-12);
        assert!((n1 - 1.141_63).abs() < 1e-5, "N1 = {n1}");
    }

    #[test]
    fn invariants_hold_for_many_modes() {
        let b = BoxBasis::new(1.0, 512).unwrap();
        let mut prev = 1.0;
        for i in 0..512 {
            let (k, e) = (b.wavenumbers()[i], b.energies()[i]);
            assert_eq!(k, (i + 1) as f64 * PI);
            assert!((e * e - k * k - 1.0).abs() < 1e-14 * e * e);
            assert!(e > prev);
            prev = e;
            assert!(b.kappas()[i] > 0.0 && b.kappas()[i] < 1.0);
        }
        assert!(b.kappas()[511] > 0.99);
    }

    #[test]
    fn walls_are_exact_zeros_of_large_component() {
        let b = BoxBasis::new(0.7, 40).unwrap();
        for n in 1..=40 {
            assert_eq!(
                b.eval_eigenspinor(n, 0.0).unwrap().phi1,
                Complex64::new(0.0, 0.0)
            );
            assert_eq!(
                b.eval_eigenspinor(n, 0.7).unwrap().phi1,
                Complex64::new(0.0, 0.0)
            );
            assert_eq!(b.eval_eigenspinor(n, 0.0).unwrap().current(), 0.0);
            assert_eq!(b.eval_eigenspinor(n, 0.7).unwrap().current(), 0.0);
        }
    }

    #[test]
    fn midpoint_of_first_mode() {
        let b = BoxBasis::new(1.0, 1).unwrap();
        let s = b.eval_eigenspinor(1, 0.5).unwrap();
        assert_eq!(s.phi1, Complex64::new(0.0, b.norms()[0]));
        assert_eq!(s.chi2.re, 0.0);
    }

    #[test]
    fn component_structure() {
        let b = BoxBasis::new(1.0, 5).unwrap();
        let s = b.eval_eigenspinor(3, 0.2).unwrap();
        assert_eq!(s.phi1.re, 0.0);
        assert_eq!(s.chi2.im, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BoxBasis::new(0.0, 4).is_err());
        assert!(BoxBasis::new(-1.0, 4).is_err());
        assert!(BoxBasis::new(1.0, 0).is_err());
        let b = BoxBasis::new(1.0, 4).unwrap();
        assert!(b.eval_eigenspinor(0, 0.5).is_err());
        assert!(b.eval_eigenspinor(5, 0.5).is_err());
        assert!(b.eval_eigenspinor(1, 1.01).is_err());
        assert!(b.eval_eigenspinor(1, -0.01).is_err());
    }

    #[test]
    fn overlaps() {
        let b = BoxBasis::new(1.0, 8).unwrap();
        assert!((b.mode_overlap(3, 3).unwrap().re - 1.0).abs() < 1e-12);
        assert!(b.mode_overlap(1, 2).unwrap().norm() < 1e-12);
        assert!(b.mode_overlap(2, 5).unwrap().norm() < 1e-12);
    }
}
