//! Exact diagonalization, continuum Landau-level analytics, and emitter
//! excitation spectra.

mod analytics;
mod diag;
mod excitation;

pub use analytics::{hermite, hermite_norm, oscillator_function, LandauAnalytics, MAX_LEVEL};
pub use diag::{
    diagonalize, diagonalize_with_cap, mode_center_x, EigenDecomposition, DEFAULT_DIAG_CAP,
};
pub use excitation::{excitation_spectrum, excitation_spectrum_from, ExcitationSpectrum};
pub(crate) use excitation::trapezoid;
