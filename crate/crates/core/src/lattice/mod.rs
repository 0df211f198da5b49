//! Photonic lattice construction: geometry, Landau-gauge hopping phases, on-site
//! potential landscapes, and the assembled single-photon Hamiltonian.

mod gauge;
mod geometry;
mod hamiltonian;
mod potential;

pub use gauge::{build_gauge, wrap_phase, GaugeField};
pub use geometry::{Axis, Bond, Boundary, LatticeGeometry};
pub use hamiltonian::{assemble_hamiltonian, HoppingOperator};
pub use potential::{build_potential, parse_grid, rms_gradient, PotentialField, PotentialSpec};

use crate::error::Result;

/// Geometry, gauge, and potential in one call.
pub fn build_lattice(
    geometry: &LatticeGeometry,
    alpha: f64,
    potential: &PotentialSpec,
    seed: Option<u64>,
) -> Result<(PotentialField, HoppingOperator)> {
    let gauge = build_gauge(geometry, alpha)?;
    let v = build_potential(geometry, potential, seed)?;
    let h = assemble_hamiltonian(geometry, &gauge, &v)?;
    Ok((v, h))
}
