//! Simulator for cooling two distant Λ-type atoms in coupled cavities into
//! the maximally entangled state |T⟩ = (|01⟩ + |10⟩)/√2.
//!
//! Three lasers drive each atom. Their frequencies are chosen so that the
//! ground states |00,00⟩, |S,00⟩ and |11,00⟩ each sit exactly on resonance
//! with one dressed excited state of the atom–cavity system, while every
//! transition out of |T,00⟩ is far detuned. Cavity decay (κ) and atomic
//! spontaneous emission (γ) then funnel population into |T,00⟩, the unique
//! (quasi-)steady state of the Lindblad dynamics — dissipation does the
//! work that unitary control cannot.
//!
//! Everything is expressed in units of the atom–cavity coupling g
//! (ħ = 1, times in 1/g).
//!
//! The crate is organized along the physics:
//!
//! - [`hilbert`]: truncated two-atom ⊗ two-mode basis and elementary
//!   operators;
//! - [`model`]: system parameters, the drive-free and laser Hamiltonians,
//!   the laser-frequency selection rule, rotating-frame transformation;
//! - [`spectrum`]: closed-form eigensystem of the ≤1-excitation block and
//!   its verification against dense diagonalization;
//! - [`transitions`]: dressed-state coupling coefficients, detunings, and
//!   the suppression-ratio diagnostic behind the scheme;
//! - [`dynamics`]: collapse channels, the master-equation right-hand side,
//!   adaptive Runge–Kutta propagation, steady-state detection;
//! - [`experiments`]: populations/fidelity observables, parameter sweeps,
//!   cooling runs, and fluctuation-robustness studies;
//! - [`config`], [`output`], [`cli`]: flat-file configuration, CSV/manifest
//!   writers, and the command-line front end.
//!
//! The `examples/` directory demonstrates each capability as a runnable
//! program; `cargo run --example cooling_run` reproduces the headline
//! steady-state fidelity at the working point.

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hilbert;
pub mod model;
pub mod output;
pub mod spectrum;
pub mod transitions;

pub use error::{Error, Result};
