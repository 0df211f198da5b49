//! Single-excitation time evolution of lattice and emitters, reduced
//! memory-kernel equations for the emitter amplitudes, and coupling-regime
//! analytics.

mod coupled;
mod emitters;
mod evolve;
mod markov;
mod volterra;

pub use coupled::{build_coupled_hamiltonian, CoupledHamiltonian};
pub use emitters::{Emitter, EmitterSet, EmitterSpec};
pub use evolve::{evolve, EvolveOptions, QuantumState, Snapshot, Trajectory, DEFAULT_DT, NORM_DRIFT_TOLERANCE};
pub use markov::{classify_regime, markov_rate, rabi_frequency, Regime, RegimeReport, STRONG_ABOVE, WEAK_BELOW};
pub use volterra::{volterra_solve, Kernel, KernelSpec, VolterraOptions, VolterraSolution};
