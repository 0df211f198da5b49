//! Single-excitation dynamics of two-level emitters coupled to a photonic
//! Harper-Hofstadter lattice.
//!
//! Units throughout: `hbar = J = l0 = 1` and the bare photon frequency is zero,
//! so all frequencies are detunings in units of the hopping `J`.

pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod propagator;
pub mod run;
pub mod scenarios;
pub mod seeding;
pub mod sparse;
pub mod spectral;

pub use error::{Error, Result};
