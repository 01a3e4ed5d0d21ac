//! Classical simulation of quantum Fourier function encoding and a
//! variational eigensolver for Schrödinger-type PDEs `[D(-i∇) + V(x)] f = E f`.
//!
//! The crate is organised bottom-up:
//!
//! * [`qsim`]: dense statevector simulator over a small gate set, QFT circuits, sampling.
//! * [`fourier`]: grids, register encoding, momentum ordering, quantum/classical interpolation
//!   and the spectral-error suite.
//! * [`ansatz`]: RY, ZGR and symmetrized variational circuits.
//! * [`problems`]: harmonic oscillator, transmon and flux-qubit Hamiltonians, energy estimators
//!   and a dense reference eigensolver.
//! * [`optimize`]: parameter-shift gradients, Adam, SPSA and Nelder–Mead.
//! * [`noise`]: density-matrix simulation with thermal relaxation and readout error, and
//!   zero-noise extrapolation in `1/T1`.
//! * [`metrics`]: fidelities, continuous fidelity, rescaled energy error, aggregation.
//! * [`experiment`]: config-driven runner behind the `qpde` binary.

pub mod ansatz;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod fourier;
pub mod metrics;
pub mod noise;
pub mod optimize;
pub mod problems;
pub mod qsim;

pub use error::{Error, Result};
