//! Spectral Floquet simulation of a delta-kicked Dirac particle confined to a
//! one-dimensional box.
//!
//! The state is expanded in the positive-energy eigenbasis of the free box
//! ([`basis`]); one kick period is a dense matrix ([`kick`]) applied
//! repeatedly ([`evolution`]). Observables, Gaussian packet preparation, an
//! independent finite-difference reference integrator and the scenario /
//! preset layer sit on top.

pub mod basis;
pub mod bessel;
pub mod error;
pub mod evolution;
pub mod kick;
pub mod observables;
pub mod oracle;
pub mod quadrature;
pub mod scenario;
pub mod wavepacket;

pub use basis::{BoxBasis, SpinorSample};
pub use error::{Error, Result};
pub use evolution::{SpinorState, StepOrder};
pub use kick::{KickOperator, KickParams, KickPhase};
pub use observables::ObservableSeries;
pub use scenario::{RegimeTag, RunConfig};
pub use wavepacket::GaussianPacketSpec;
