//! Repeated application of the one-period map
//! `A_n(t+T) = Σ_l A_l(t) e^{-iE_l T} V_ln`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::basis::BoxBasis;
use crate::error::{Error, Result};
use crate::kick::KickOperator;

pub const DEFAULT_NORM_FLOOR: f64 = 0.5;

/// Tolerance on the unit norm of a freshly created state.
const CREATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepOrder {
    /// Free-flight phase first, then the kick (default).
    #[default]
    PhaseKick,
    KickPhase,
}

impl fmt::Display for StepOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepOrder::PhaseKick => "phase_kick",
            StepOrder::KickPhase => "kick_phase",
        })
    }
}

impl FromStr for StepOrder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "phase_kick" => Ok(StepOrder::PhaseKick),
            "kick_phase" => Ok(StepOrder::KickPhase),
            _ => Err(format!("expected `phase_kick` or `kick_phase`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    a: Vec<Complex64>,
    kicks_elapsed: usize,
    leakage_log: Vec<f64>,
    renormalize: bool,
}

impl SpinorState {
    /// Wrap coefficients that are already normalized to within 1e-12.
    pub fn from_coefficients(a: Vec<Complex64>, renormalize: bool) -> Result<Self> {
        let n = norm_sqr(&a);
        if (n - 1.0).abs() > CREATION_TOL {
            return Err(Error::invalid(
                "state",
                format!("coefficients have norm {n}, expected 1"),
            ));
        }
        Ok(SpinorState {
            a,
            kicks_elapsed: 0,
            leakage_log: Vec::new(),
            renormalize,
        })
    }

    /// Scale arbitrary nonzero coefficients to unit norm.
    pub fn normalized(mut a: Vec<Complex64>, renormalize: bool) -> Result<Self> {
        let n = norm_sqr(&a);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid(
                "state",
                "coefficients have zero or non-finite norm",
            ));
        }
        let s = 1.0 / n.sqrt();
        a.iter_mut().for_each(|c| *c *= s);
        Self::from_coefficients(a, renormalize)
    }

    /// Pure eigenmode `n` (1-based).
    pub fn eigenmode(basis: &BoxBasis, n: usize, renormalize: bool) -> Result<Self> {
        let i = basis.check_mode(n)?;
        let mut a = vec![Complex64::new(0.0, 0.0); basis.n_max()];
        a[i] = Complex64::new(1.0, 0.0);
        Self::from_coefficients(a, renormalize)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn kicks_elapsed(&self) -> usize {
        self.kicks_elapsed
    }

    /// Norm lost in each step so far (before any renormalization).
    pub fn leakage_log(&self) -> &[f64] {
        &self.leakage_log
    }

    pub fn renormalize(&self) -> bool {
        self.renormalize
    }

    pub fn norm(&self) -> f64 {
        norm_sqr(&self.a)
    }

    /// Embed into a larger basis, padding with zeros.
    pub fn padded(&self, dim: usize) -> Result<Self> {
        if dim < self.a.len() {
            return Err(Error::DimensionMismatch {
                expected: self.a.len(),
                actual: dim,
            });
        }
        let mut s = self.clone();
        s.a.resize(dim, Complex64::new(0.0, 0.0));
        Ok(s)
    }
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum()
}

/// Reusable workspace for stepping one state with one operator.
pub struct Stepper<'a> {
    op: &'a KickOperator,
    order: StepOrder,
    scratch: Vec<Complex64>,
    out: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    pub fn new(op: &'a KickOperator, order: StepOrder) -> Self {
        let dim = op.dim();
        Stepper {
            op,
            order,
            scratch: vec![Complex64::new(0.0, 0.0); dim],
            out: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn step(&mut self, state: &mut SpinorState) -> Result<()> {
        if state.dim() != self.op.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.op.dim(),
                actual: state.dim(),
            });
        }
        let before = state.norm();
        let phase = self.op.phases();
        match self.order {
            StepOrder::PhaseKick => {
                for ((s, a), p) in self.scratch.iter_mut().zip(&state.a).zip(phase) {
                    *s = a * p;
                }
                self.op.left_multiply(&self.scratch, &mut self.out);
            }
            StepOrder::KickPhase => {
                self.op.left_multiply(&state.a, &mut self.out);
                for (o, p) in self.out.iter_mut().zip(phase) {
                    *o *= p;
                }
            }
        }
        std::mem::swap(&mut state.a, &mut self.out);
        let after = state.norm();
        state.leakage_log.push(before - after);
        state.kicks_elapsed += 1;
        if state.renormalize && after > 0.0 {
            let s = 1.0 / after.sqrt();
            state.a.iter_mut().for_each(|c| *c *= s);
        }
        Ok(())
    }
}

/// One period applied to `state`.
pub fn step(state: &mut SpinorState, op: &KickOperator, order: StepOrder) -> Result<()> {
    Stepper::new(op, order).step(state)
}

/// Called at `t = 0` and after every `stride` kicks.
pub trait Observer {
    fn observe(&mut self, state: &SpinorState) -> Result<()>;
}

impl<F: FnMut(&SpinorState) -> Result<()>> Observer for F {
    fn observe(&mut self, state: &SpinorState) -> Result<()> {
        self(state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub n_kicks: usize,
    pub stride: usize,
    pub order: StepOrder,
    /// Abort once the norm drops below this (only without renormalization).
    pub norm_floor: f64,
}

impl EvolveOptions {
    pub fn new(n_kicks: usize) -> Self {
        EvolveOptions {
            n_kicks,
            stride: 1,
            order: StepOrder::PhaseKick,
            norm_floor: DEFAULT_NORM_FLOOR,
        }
    }

    pub fn stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn order(mut self, order: StepOrder) -> Self {
        self.order = order;
        self
    }

    pub fn norm_floor(mut self, floor: f64) -> Self {
        self.norm_floor = floor;
        self
    }
}

/// Apply `opts.n_kicks` periods, calling every observer on the initial state
/// and after each `stride`-th kick. Observation happens at the state's own
/// kick count, so split runs observe the same instants as a single run.
pub fn evolve(
    state: &mut SpinorState,
    op: &KickOperator,
    opts: &EvolveOptions,
    observers: &mut [&mut dyn Observer],
) -> Result<()> {
    if opts.stride == 0 {
        return Err(Error::invalid("stride", "must be at least 1"));
    }
    let observe_all = |state: &SpinorState, observers: &mut [&mut dyn Observer]| -> Result<()> {
        for o in observers.iter_mut() {
            o.observe(state)?;
        }
        Ok(())
    };
    if state.kicks_elapsed.is_multiple_of(opts.stride) {
        observe_all(state, observers)?;
    }
    let mut stepper = Stepper::new(op, opts.order);
    for _ in 0..opts.n_kicks {
        stepper.step(state)?;
        let norm = state.norm();
        if !state.renormalize && norm < opts.norm_floor {
            return Err(Error::NormFloorBreach {
                kick: state.kicks_elapsed,
                norm,
                floor: opts.norm_floor,
            });
        }
        if state.kicks_elapsed.is_multiple_of(opts.stride) {
            observe_all(state, observers)?;
        }
    }
    Ok(())
}
