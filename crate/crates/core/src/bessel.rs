//! Integer-order Bessel functions of the first kind and the Jacobi–Anger
//! coefficients of the kick phase `exp(i ε cos θ) = Σ_m i^m J_m(ε) e^{imθ}`.

use num_complex::Complex64;

use crate::error::{Error, Result};

const RESCALE_ABOVE: f64 = 1e200;

/// `J_0(x) ..= J_max_order(x)` by Miller's backward recurrence, normalized
/// with `J_0 + 2 Σ_k J_{2k} = 1`.
pub fn bessel_j_orders(x: f64, max_order: usize) -> Vec<f64> {
    let mut out = vec![0.0; max_order + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let top = max_order.max(ax.ceil() as usize);
    let mut start = top + 32 + (40.0 * (top as f64 + 1.0)).sqrt() as usize;
    start += start % 2;

    let mut j_next = 0.0; // J_{k+1}
    let mut j_k = 1.0; // J_k, starting at k = start
    let mut even_sum = 0.0;
    for k in (1..=start).rev() {
        // J_{k-1} = (2k/x) J_k - J_{k+1}
        let j_prev = (2.0 * k as f64 / ax) * j_k - j_next;
        j_next = j_k;
        j_k = j_prev;
        let order = k - 1;
        if order <= max_order {
            out[order] = j_k;
        }
        if order % 2 == 0 && order > 0 {
            even_sum += j_k;
        }
        if j_k.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            j_k *= s;
            j_next *= s;
            even_sum *= s;
            for v in out.iter_mut().skip(order) {
                *v *= s;
            }
        }
    }
    let norm = j_k + 2.0 * even_sum;
    for (m, v) in out.iter_mut().enumerate() {
        *v /= norm;
        if x < 0.0 && m % 2 == 1 {
            *v = -*v;
        }
    }
    debug_assert!(
        ax > 2.0
            || out
                .iter()
                .take(4)
                .enumerate()
                .all(|(m, &v)| (v - bessel_j_series(m, x)).abs() < 1e-13),
        "Miller recurrence disagrees with power series at x = {x}"
    );
    out
}

/// Power series `Σ_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)`; accurate for small `|x|`.
pub fn bessel_j_series(order: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=order {
        term *= half / i as f64;
    }
    let mut sum = term;
    let q = half * half;
    for k in 1..200 {
        term *= -q / (k as f64 * (k + order) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Truncated Jacobi–Anger expansion of `exp(i ε cos θ)`.
#[derive(Debug, Clone)]
pub struct JacobiAnger {
    epsilon: f64,
    /// `J_0(ε) ..= J_M(ε)`
    j: Vec<f64>,
}

impl JacobiAnger {
    /// Keeps orders `|m| ≤ M`, where `M` is the smallest cutoff past the
    /// turning point `m ≈ ε` with `|J_{M+1}(ε)| < tol`.
    pub fn new(epsilon: f64, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::invalid("tol", format!("{tol} not in (0, 1)")));
        }
        if !epsilon.is_finite() {
            return Err(Error::invalid("epsilon", "must be finite"));
        }
        if epsilon == 0.0 {
            return Ok(JacobiAnger {
                epsilon,
                j: vec![1.0],
            });
        }
        let ae = epsilon.abs();
        let mut probe = (ae.ceil() as usize + 16).max(16);
        loop {
            let all = bessel_j_orders(epsilon, probe + 1);
            let first = ae.floor() as usize;
            if let Some(m) = (first..=probe).find(|&m| all[m + 1].abs() < tol) {
                let mut j = all;
                j.truncate(m + 1);
                return Ok(JacobiAnger { epsilon, j });
            }
            probe *= 2;
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Largest retained order `M`.
    pub fn cutoff(&self) -> usize {
        self.j.len() - 1
    }

    /// `J_m(ε)` for `0 ≤ m ≤ M`.
    pub fn bessel(&self, m: usize) -> f64 {
        self.j[m]
    }

    /// `b_m = i^m J_m(ε)` for `|m| ≤ M`; zero outside the retained range.
    pub fn coefficient(&self, m: i64) -> Complex64 {
        let am = m.unsigned_abs() as usize;
        if am > self.cutoff() {
            return Complex64::new(0.0, 0.0);
        }
        let jm = if m < 0 && am % 2 == 1 {
            -self.j[am]
        } else {
            self.j[am]
        };
        i_pow(m) * jm
    }

    /// Weight of `cos(m θ)` after pairing `±m`: `J_0` for `m = 0`,
    /// `2 i^m J_m` otherwise.
    pub fn cosine_weight(&self, m: usize) -> Complex64 {
        if m == 0 {
            Complex64::new(self.j[0], 0.0)
        } else {
            i_pow(m as i64) * (2.0 * self.j[m])
        }
    }

    /// `Σ_{|m| ≤ M} |b_m|^2`, which tends to 1 as the cutoff grows.
    pub fn sum_of_squares(&self) -> f64 {
        self.j[0] * self.j[0] + 2.0 * self.j[1..].iter().map(|v| v * v).sum::<f64>()
    }

    /// The same expansion with one extra order, ignoring the tolerance.
    pub fn extended(&self, extra: usize) -> Self {
        JacobiAnger {
            epsilon: self.epsilon,
            j: bessel_j_orders(self.epsilon, self.cutoff() + extra),
        }
    }
}

fn i_pow(m: i64) -> Complex64 {
    match m.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}
