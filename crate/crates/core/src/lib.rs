//! Desk-scale simulator and estimation toolkit for microwave time-bin qubits.
//!
//! The crate covers the full pipeline from drive synthesis to state
//! reconstruction:
//!
//! - [`system`] — device parameters, derived frequencies, LO matching, and
//!   the drive-to-effective-coupling map.
//! - [`pulse`] — sampled waveforms: Gaussian/DRAG control pulses, cosine
//!   coupling pulses with ac-Stark chirping, and the two-bin drive sequence.
//! - [`dynamics`] — Heisenberg-picture coefficient ODEs for the driven
//!   qubit–cavity–waveguide cascade, the e↔f swap, emitted wave-packet
//!   amplitude, and generation efficiency.
//! - [`fock`] — truncated photon-number-basis density matrices for one and
//!   two temporal modes, loss and phase-drift channels, quadrature marginals,
//!   Wigner functions, fidelity, and single-photon-subspace projection.
//! - [`tomo`] — phase-selective quadrature sampling, binned iterative
//!   maximum-likelihood reconstruction, marginal photon-population fits,
//!   and bootstrap statistics.
//! - [`io`] — plot-ready CSV/JSON emitters and parsers for all of the above.
//!
//! All core math is generic over the scalar type through [`num::Real`];
//! concrete `f64` aliases are exported at the crate root. Frequencies are
//! angular (rad/s) everywhere inside the crate; configuration files carry
//! plain Hz and are converted exactly once at the load boundary.

pub mod cmatrix;
pub mod dynamics;
pub mod fock;
pub mod hermite;
pub mod io;
pub mod num;
pub mod pulse;
pub mod system;
pub mod tomo;

pub use crate::num::Real;

/// Complex scalar over `f64`, the default working precision.
pub type C64 = num_complex::Complex<f64>;
/// Complex scalar over `f32`.
pub type C32 = num_complex::Complex<f32>;

/// `f64` system parameters.
pub type SystemParams64 = system::SystemParams<f64>;
/// `f64` sampled waveform.
pub type Waveform64 = pulse::SampledWaveform<f64>;
/// `f64` single-mode density matrix.
pub type FockDm64 = fock::FockDensityMatrix<f64>;
/// `f64` two-temporal-mode density matrix.
pub type TwoModeDm64 = fock::TwoModeDensityMatrix<f64>;
/// `f64` dynamics result.
pub type DynamicsResult64 = dynamics::DynamicsResult<f64>;
