//! Exact and continuum photon propagators, local density of states, and
//! local-field quantities for smooth potentials.

mod continuum;
mod greens;
mod ldos;
mod local_field;

pub use continuum::{greens_lll, ContinuumMode, MODE_WEIGHT_CUTOFF};
pub use greens::{greens_exact, GreensEvaluator};
pub use ldos::{ldos, ldos_analytic, ldos_numeric, LdosMethod, LdosProfile, DEFAULT_BROADENING};
pub use local_field::{demux_position, gradient, local_field, DemuxChannel, LocalField};
