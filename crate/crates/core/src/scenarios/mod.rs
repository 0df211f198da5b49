//! Scripted experiments: emission, revivals, transfer, disorder sweeps, beam
//! splitting and the percolation-network transfer criteria.

mod beam_splitter;
mod criteria;
mod emission;
mod metrics;
mod revival;
mod spectrum;
mod sweep;
mod transfer;

pub use beam_splitter::{run_beam_splitter, BeamSplitterOptions, BeamSplitterReport, BranchWeights};
pub use criteria::{check_transfer_criteria, contour_connects, CriteriaReport, CriterionCheck, DEFAULT_RELATIVE_TOLERANCE};
pub use emission::{excitation_scan, run_emission, EmissionOptions, EmissionReport, ExcitationScan, SnapshotMetrics};
pub use metrics::{
    dominant_frequency, fit_exponential_rate, longitudinal_profile, moments, projected_moments, row_displacement,
    tail_length, WavepacketMetrics,
};
pub use revival::{revival_map, run_revival, RevivalOptions, RevivalReport, REVIVAL_WINDOW};
pub use spectrum::{spectrum_report, SpectrumReport, SpectrumRow, BULK_MARGIN};
pub use sweep::{disorder_sweep, realization_seed, DisorderSweepOptions, SweepGrid};
pub use transfer::{predicted_transfer_time, run_transfer, TransferOptions, TransferReport};

use crate::dynamics::{build_coupled_hamiltonian, CoupledHamiltonian, Emitter, EmitterSet};
use crate::error::Result;
use crate::lattice::{assemble_hamiltonian, build_gauge, HoppingOperator, LatticeGeometry, PotentialField};
use crate::propagator::{local_field, LocalField};
use crate::spectral::LandauAnalytics;

/// A lattice, its potential, and the emitters coupled to it.
#[derive(Debug, Clone)]
pub struct System {
    pub potential: PotentialField,
    pub hopping: HoppingOperator,
    pub coupled: CoupledHamiltonian,
}

impl System {
    pub fn new(alpha: f64, potential: PotentialField, emitters: Vec<Emitter>) -> Result<Self> {
        let geometry = *potential.geometry();
        let gauge = build_gauge(&geometry, alpha)?;
        let hopping = assemble_hamiltonian(&geometry, &gauge, &potential)?;
        let set = EmitterSet::new(&geometry, emitters)?;
        let coupled = build_coupled_hamiltonian(&hopping, &set)?;
        Ok(Self { potential, hopping, coupled })
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        self.hopping.geometry()
    }

    pub fn alpha(&self) -> f64 {
        self.hopping.alpha()
    }

    pub fn emitters(&self) -> &EmitterSet {
        &self.coupled.emitters
    }

    pub fn local(&self, site: (usize, usize)) -> Result<LocalField> {
        local_field(&self.potential, self.alpha(), site)
    }

    /// Continuum analytics with the local field strength `|grad V|` at `site`.
    pub fn local_analytics(&self, site: (usize, usize)) -> Result<LandauAnalytics> {
        let f = self.local(site)?;
        LandauAnalytics::new(self.alpha(), f.grad[0].hypot(f.grad[1]))
    }

    /// Unit drift direction `(dV/dy, -dV/dx) / |grad V|`, flipped for negative flux.
    pub fn drift_direction(&self, site: (usize, usize)) -> Result<[f64; 2]> {
        let f = self.local(site)?;
        let norm = f.grad[0].hypot(f.grad[1]);
        if norm == 0.0 {
            return Ok([0.0, 1.0]);
        }
        let s = self.alpha().signum() / norm;
        Ok([s * f.grad[1], -s * f.grad[0]])
    }
}
